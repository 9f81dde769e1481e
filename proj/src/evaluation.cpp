#include "quaymaint/evaluation.hpp"

#include <atomic>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

namespace quaymaint {

namespace {

Aggregate aggregate_of(const std::vector<EpisodeRow>& rows, double EpisodeRow::*field) {
    Aggregate a;
    const std::size_t n = rows.size();
    if (n == 0) return a;
    double sum = 0.0;
    double lo = rows.front().*field;
    double hi = lo;
    for (const auto& r : rows) {
        sum += r.*field;
        lo = std::min(lo, r.*field);
        hi = std::max(hi, r.*field);
    }
    a.mean = sum / static_cast<double>(n);
    if (lo == hi) {
        // identical samples: exactly zero spread, no accumulation noise
        a.mean = lo;
        a.stddev = 0.0;
        return a;
    }
    if (n > 1) {
        double ss = 0.0;
        for (const auto& r : rows) {
            const double d = r.*field - a.mean;
            ss += d * d;
        }
        a.stddev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return a;
}

} // namespace

void EvaluationReport::compute_aggregates() {
    utility = aggregate_of(rows, &EpisodeRow::utility);
    score = {-utility.mean, utility.stddev};
    cost_discounted = aggregate_of(rows, &EpisodeRow::cost_discounted);
    cost_raw = aggregate_of(rows, &EpisodeRow::cost_raw);
    prisk_discounted = aggregate_of(rows, &EpisodeRow::prisk_discounted);
    prisk_raw = aggregate_of(rows, &EpisodeRow::prisk_raw);
}

int effective_thread_count(int requested) {
    int threads = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (const char* cap = std::getenv("QUAYMAINT_THREADS")) {
        const int limit = std::atoi(cap);
        if (limit >= 1 && limit < threads) threads = limit;
    }
    return threads;
}

EpisodeRow run_episode(const EnvironmentConfig& config, Policy& policy,
                       const UtilityFunction& utility, double gamma, RandomStream& env_rng,
                       RandomStream& policy_rng, int episode_index) {
    MaintenanceEnv env(config);
    policy.reset(config);

    double cost_disc = 0.0;
    double cost_raw = 0.0;
    double log_surv_disc = 0.0;
    double log_surv_raw = 0.0;
    double discount = 1.0;

    ObservationVector last_obs;
    bool have_obs = false;
    while (!env.done()) {
        const ActionVector actions = policy.act(env, have_obs ? &last_obs : nullptr, policy_rng);
        const StepResult result = env.step(actions, env_rng);
        policy.observe_step(result);
        cost_disc += discount * result.total_cost;
        cost_raw += result.total_cost;
        log_surv_disc += discount * result.reward.log_survival;
        log_surv_raw += result.reward.log_survival;
        discount *= gamma;
        last_obs = result.observation;
        have_obs = true;
    }

    EpisodeRow row;
    row.episode = episode_index;
    row.cost_discounted = cost_disc;
    row.cost_raw = cost_raw;
    row.prisk_discounted = episode_collapse_probability(log_surv_disc);
    row.prisk_raw = episode_collapse_probability(log_surv_raw);
    row.utility = utility.evaluate({-cost_disc, log_surv_disc});
    return row;
}

EvaluationReport evaluate_policy(const EnvironmentConfig& config, const Policy& prototype,
                                 const UtilityFunction& utility, const EvalOptions& options) {
    EvaluationReport report;
    report.policy_id = options.policy_id;
    report.env_name = config.name;
    report.utility_name = to_string(utility.kind());
    report.gamma = options.gamma;
    report.episodes = options.episodes;
    report.rows.resize(static_cast<std::size_t>(options.episodes));

    const int threads = effective_thread_count(options.threads);
    std::atomic<int> next_episode{0};

    auto worker = [&](Policy& policy) {
        for (;;) {
            const int ep = next_episode.fetch_add(1);
            if (ep >= options.episodes) break;
            RandomStream env_rng = derive_stream(options.seed, static_cast<std::uint64_t>(ep),
                                                 StreamPurpose::environment);
            RandomStream pol_rng = derive_stream(options.seed, static_cast<std::uint64_t>(ep),
                                                 StreamPurpose::policy);
            report.rows[static_cast<std::size_t>(ep)] =
                run_episode(config, policy, utility, options.gamma, env_rng, pol_rng, ep);
        }
    };

    if (threads <= 1 || options.episodes <= 1) {
        auto policy = prototype.clone();
        worker(*policy);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::unique_ptr<Policy>> clones;
        pool.reserve(static_cast<std::size_t>(threads));
        clones.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) clones.push_back(prototype.clone());
        for (int i = 0; i < threads; ++i) pool.emplace_back([&, i] { worker(*clones[static_cast<std::size_t>(i)]); });
        for (auto& t : pool) t.join();
    }

    report.compute_aggregates();
    return report;
}

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

void write_eval_csv(const EvaluationReport& report, std::ostream& out) {
    out << "row,episode,utility,score,cost_discounted,cost_raw,prisk_discounted,prisk_raw\n";
    for (const auto& r : report.rows) {
        out << "episode," << r.episode << ',' << fmt9(r.utility) << ',' << fmt9(-r.utility) << ','
            << fmt9(r.cost_discounted) << ',' << fmt9(r.cost_raw) << ','
            << fmt9(r.prisk_discounted) << ',' << fmt9(r.prisk_raw) << '\n';
    }
    out << "mean,," << fmt9(report.utility.mean) << ',' << fmt9(report.score.mean) << ','
        << fmt9(report.cost_discounted.mean) << ',' << fmt9(report.cost_raw.mean) << ','
        << fmt9(report.prisk_discounted.mean) << ',' << fmt9(report.prisk_raw.mean) << '\n';
    out << "std,," << fmt9(report.utility.stddev) << ',' << fmt9(report.score.stddev) << ','
        << fmt9(report.cost_discounted.stddev) << ',' << fmt9(report.cost_raw.stddev) << ','
        << fmt9(report.prisk_discounted.stddev) << ',' << fmt9(report.prisk_raw.stddev) << '\n';
}

} // namespace quaymaint
