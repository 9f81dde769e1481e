#include "quaymaint/baselines.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace quaymaint {

std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::yba_repair: return "yba_repair";
        case BaselineKind::yba_replace: return "yba_replace";
        case BaselineKind::ybi_cba: return "ybi_cba";
        case BaselineKind::cbi_cba: return "cbi_cba";
    }
    return "?";
}

BaselineKind baseline_kind_from_string(const std::string& name) {
    if (name == "yba_repair") return BaselineKind::yba_repair;
    if (name == "yba_replace") return BaselineKind::yba_replace;
    if (name == "ybi_cba") return BaselineKind::ybi_cba;
    if (name == "cbi_cba") return BaselineKind::cbi_cba;
    throw std::invalid_argument("unknown baseline policy '" + name +
                                "' (valid: yba_repair, yba_replace, ybi_cba, cbi_cba)");
}

ComponentAction cba_action(int observed_state) {
    if (observed_state < 0 || observed_state > kFailedState) {
        throw std::invalid_argument("cba_action: state out of 0..4");
    }
    if (observed_state == 0) return ComponentAction::nothing;
    if (observed_state <= 2) return ComponentAction::repair;
    return ComponentAction::replace;
}

ActionVector BaselineRunnerPolicy::act(const MaintenanceEnv& env, const ObservationVector* last_obs,
                                       RandomStream&) {
    const int t = env.timestep();
    const int n = env.num_components();
    ActionVector a = make_nothing_actions(n);

    const bool on_schedule = spec_.interval > 0 && t > 0 && t % spec_.interval == 0;

    switch (spec_.kind) {
        case BaselineKind::yba_repair:
        case BaselineKind::yba_replace:
            if (on_schedule) {
                const auto action = spec_.kind == BaselineKind::yba_repair
                                        ? ComponentAction::repair
                                        : ComponentAction::replace;
                for (auto& c : a.component) c = action;
            }
            break;
        case BaselineKind::ybi_cba:
            if (act_pending_ && last_obs != nullptr) {
                for (int i = 0; i < n; ++i) {
                    a.component[static_cast<std::size_t>(i)] = cba_action((*last_obs)[static_cast<std::size_t>(i)]);
                }
            }
            act_pending_ = false;
            if (on_schedule) {
                a.global = GlobalAction::inspect;
                act_pending_ = true;
            }
            break;
        case BaselineKind::cbi_cba:
            if (act_pending_ && last_obs != nullptr) {
                for (int i = 0; i < n; ++i) {
                    a.component[static_cast<std::size_t>(i)] = cba_action((*last_obs)[static_cast<std::size_t>(i)]);
                }
                act_pending_ = false;
            } else if (last_obs != nullptr) {
                int worse = 0;
                for (int code : *last_obs) {
                    if (code >= 2) ++worse;
                }
                if (static_cast<double>(worse) / static_cast<double>(n) >= spec_.fraction) {
                    a.global = GlobalAction::inspect;
                    act_pending_ = true;
                }
            }
            break;
    }
    return a;
}

GridSearchResult grid_search(BaselineKind kind, const EnvironmentConfig& config,
                             const UtilityFunction& utility, std::span<const double> grid,
                             int episodes_per_point, std::uint64_t seed, double gamma,
                             int threads) {
    if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");

    GridSearchResult result;
    result.table.reserve(grid.size());

    std::size_t best_index = 0;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        BaselinePolicy policy;
        policy.kind = kind;
        if (kind == BaselineKind::cbi_cba) {
            policy.fraction = grid[gi];
        } else {
            policy.interval = static_cast<int>(std::lround(grid[gi]));
            if (policy.interval < 1) throw std::invalid_argument("grid_search: interval must be >= 1");
        }

        EvalOptions options;
        options.episodes = episodes_per_point;
        options.seed = seed; // same seed at every point: common random numbers
        options.gamma = gamma;
        options.threads = threads;
        options.policy_id = to_string(kind);
        const EvaluationReport report =
            evaluate_policy(config, BaselineRunnerPolicy(policy), utility, options);

        GridPointResult row;
        row.parameter = grid[gi];
        row.mean_utility = report.utility.mean;
        row.std_utility = report.utility.stddev;
        row.mean_cost_raw = report.cost_raw.mean;
        row.mean_cost_discounted = report.cost_discounted.mean;
        row.mean_prisk_raw = report.prisk_raw.mean;
        row.mean_prisk_discounted = report.prisk_discounted.mean;
        row.episodes = episodes_per_point;
        result.table.push_back(row);

        const auto& best = result.table[best_index];
        const auto& cur = result.table[gi];
        const bool better = cur.mean_utility > best.mean_utility ||
                            (cur.mean_utility == best.mean_utility &&
                             (cur.mean_cost_raw < best.mean_cost_raw ||
                              (cur.mean_cost_raw == best.mean_cost_raw &&
                               cur.parameter < best.parameter)));
        if (better) best_index = gi;
    }

    result.best.kind = kind;
    if (kind == BaselineKind::cbi_cba) {
        result.best.fraction = result.table[best_index].parameter;
    } else {
        result.best.interval = static_cast<int>(std::lround(result.table[best_index].parameter));
    }
    return result;
}

std::vector<double> default_grid(BaselineKind kind) {
    std::vector<double> grid;
    if (kind == BaselineKind::cbi_cba) {
        for (int i = 1; i <= 10; ++i) grid.push_back(static_cast<double>(i) / 10.0);
    } else {
        for (int i = 1; i <= 25; ++i) grid.push_back(static_cast<double>(i));
    }
    return grid;
}

void write_grid_csv(const GridSearchResult& result, std::ostream& out) {
    auto fmt9 = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    out << "parameter,mean_utility,std_utility,mean_cost_raw,mean_cost_discounted,"
           "mean_prisk_raw,mean_prisk_discounted,episodes\n";
    for (const auto& r : result.table) {
        out << fmt9(r.parameter) << ',' << fmt9(r.mean_utility) << ',' << fmt9(r.std_utility)
            << ',' << fmt9(r.mean_cost_raw) << ',' << fmt9(r.mean_cost_discounted) << ','
            << fmt9(r.mean_prisk_raw) << ',' << fmt9(r.mean_prisk_discounted) << ','
            << r.episodes << '\n';
    }
}

} // namespace quaymaint
