#include "quaymaint/environment.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace quaymaint {

const DegradationModel& EnvironmentConfig::model_for(int component) const {
    const auto& gid = components[static_cast<std::size_t>(component)].group_id;
    for (const auto& m : degradation_models) {
        if (m.group_id == gid) return m;
    }
    throw std::invalid_argument("no degradation model for group '" + gid + "'");
}

namespace {

void check_lengths(std::size_t n, const ActionVector& actions) {
    if (actions.component.size() != n) {
        throw std::invalid_argument("action vector length " + std::to_string(actions.component.size()) +
                                    " != component count " + std::to_string(n));
    }
}

} // namespace

std::pair<AssetState, double> apply_actions(const AssetState& state, const ActionVector& actions,
                                            const EnvironmentConfig& config) {
    const std::size_t n = config.num_components();
    check_lengths(n, actions);
    AssetState next = state;
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& spec = config.components[i];
        switch (actions.component[i]) {
            case ComponentAction::nothing:
                cost += spec.cost_nothing;
                break;
            case ComponentAction::repair:
                cost += spec.cost_repair;
                next.health[i] = std::max(0, next.health[i] - 1);
                break;
            case ComponentAction::replace:
                cost += spec.cost_replace;
                next.health[i] = 0;
                break;
        }
    }
    if (actions.global == GlobalAction::inspect) cost += config.global_inspect_cost;
    return {std::move(next), cost};
}

void degrade(AssetState& state, const EnvironmentConfig& config, const std::vector<bool>& replaced,
             RandomStream& rng) {
    const std::size_t n = config.num_components();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& model = config.model_for(static_cast<int>(i));
        const Matrix5 d = interpolate_degradation(model, state.tau[i]);
        const auto row = d.row(state.health[i]);
        state.health[i] = static_cast<int>(rng.categorical(row));
        state.tau[i] = replaced[i] ? 0 : std::min(state.tau[i] + 1, model.tau_max - 1);
    }
}

ObservationVector observe(const AssetState& state, const ActionVector& actions) {
    const std::size_t n = state.size();
    ObservationVector obs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool revealed = actions.global == GlobalAction::inspect ||
                              actions.component[i] != ComponentAction::nothing;
        if (revealed) {
            obs[i] = state.health[i];
        } else {
            obs[i] = state.health[i] <= 1 ? 0 : 4;
        }
    }
    return obs;
}

double collapse_probability(const AssetState& state, const std::vector<DependencyGroup>& groups) {
    double survival = 1.0;
    for (const auto& g : groups) {
        int failed = 0;
        for (int m : g.members) {
            if (state.health[static_cast<std::size_t>(m)] == kFailedState) ++failed;
        }
        survival *= 1.0 - g.failure_effect[static_cast<std::size_t>(failed)];
    }
    return 1.0 - survival;
}

RewardVector make_reward(double total_cost, double risk) {
    if (risk >= 1.0) throw std::domain_error("make_reward: risk >= 1 has no finite log-survival");
    if (risk < 0.0) throw std::domain_error("make_reward: negative risk");
    return {-total_cost, std::log1p(-risk)};
}

BeliefState belief_update(const BeliefState& belief, const ActionVector& actions,
                          const ObservationVector& observation, const EnvironmentConfig& config) {
    const std::size_t n = config.num_components();
    check_lengths(n, actions);
    BeliefState next = belief;
    for (std::size_t i = 0; i < n; ++i) {
        auto prev = belief.row(i);
        std::array<double, kNumHealthStates> acted{};
        switch (actions.component[i]) {
            case ComponentAction::nothing:
                for (int s = 0; s < kNumHealthStates; ++s) acted[static_cast<std::size_t>(s)] = prev[static_cast<std::size_t>(s)];
                break;
            case ComponentAction::repair:
                // mass shifts one state up, floor at the best state
                acted[0] = prev[0] + prev[1];
                for (int s = 1; s < kNumHealthStates - 1; ++s) acted[static_cast<std::size_t>(s)] = prev[static_cast<std::size_t>(s) + 1];
                break;
            case ComponentAction::replace:
                acted[0] = 1.0;
                break;
        }

        const auto& model = config.model_for(static_cast<int>(i));
        const Matrix5 d = interpolate_degradation(model, belief.tau[i]);
        std::array<double, kNumHealthStates> propagated{};
        for (int s = 0; s < kNumHealthStates; ++s) {
            const double p = acted[static_cast<std::size_t>(s)];
            if (p == 0.0) continue;
            for (int t = 0; t < kNumHealthStates; ++t) {
                propagated[static_cast<std::size_t>(t)] += p * d.at(s, t);
            }
        }

        const bool revealed = actions.global == GlobalAction::inspect ||
                              actions.component[i] != ComponentAction::nothing;
        const int code = observation[i];
        double norm = 0.0;
        auto out = next.row(i);
        for (int s = 0; s < kNumHealthStates; ++s) {
            double like;
            if (revealed) {
                like = s == code ? 1.0 : 0.0;
            } else {
                like = (code == 0) == (s <= 1) ? 1.0 : 0.0;
            }
            out[static_cast<std::size_t>(s)] = propagated[static_cast<std::size_t>(s)] * like;
            norm += out[static_cast<std::size_t>(s)];
        }
        if (norm <= 0.0) {
            throw BeliefInconsistencyError("belief_update: observation " + std::to_string(code) +
                                           " impossible under belief for component " + std::to_string(i));
        }
        for (int s = 0; s < kNumHealthStates; ++s) out[static_cast<std::size_t>(s)] /= norm;

        next.tau[i] = actions.component[i] == ComponentAction::replace
                          ? 0
                          : std::min(belief.tau[i] + 1, model.tau_max - 1);
    }
    next.timestep = belief.timestep + 1;
    return next;
}

MaintenanceEnv::MaintenanceEnv(EnvironmentConfig config) : config_(std::move(config)) {
    validate_config(config_);
    reset();
}

void MaintenanceEnv::reset() {
    const std::size_t n = config_.num_components();
    state_.health = config_.start_health;
    state_.tau.assign(n, 0);
    belief_.probs = config_.initial_belief;
    belief_.tau.assign(n, 0);
    belief_.timestep = 0;
    timestep_ = 0;
}

StepResult MaintenanceEnv::step(const ActionVector& actions, RandomStream& rng) {
    if (done()) throw std::logic_error("step() called on a finished episode");

    auto [acted, total_cost] = apply_actions(state_, actions, config_);
    std::vector<bool> replaced(config_.num_components());
    for (std::size_t i = 0; i < replaced.size(); ++i) {
        replaced[i] = actions.component[i] == ComponentAction::replace;
    }
    degrade(acted, config_, replaced, rng);
    state_ = std::move(acted);

    const double risk = collapse_probability(state_, config_.dependency_groups);
    const RewardVector reward = make_reward(total_cost, risk);
    ObservationVector obs = observe(state_, actions);
    belief_ = belief_update(belief_, actions, obs, config_);
    ++timestep_;

    StepResult result;
    result.observation = std::move(obs);
    result.reward = reward;
    result.belief = belief_;
    result.done = done();
    result.total_cost = total_cost;
    result.risk = risk;
    return result;
}

ActionVector make_nothing_actions(int num_components) {
    ActionVector a;
    a.component.assign(static_cast<std::size_t>(num_components), ComponentAction::nothing);
    a.global = GlobalAction::nothing;
    return a;
}

} // namespace quaymaint
