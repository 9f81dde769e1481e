#pragma once

#include <stdexcept>
#include <utility>

#include "quaymaint/env_config.hpp"
#include "quaymaint/rng.hpp"
#include "quaymaint/types.hpp"

namespace quaymaint {

/// Thrown when a received observation has zero probability under the current
/// belief (model mismatch or corrupted inputs).
struct BeliefInconsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic action effect on the hidden state plus the summed action
/// cost (component costs + global action cost). Repair moves one state up
/// (floor at 0, allowed on failed components), replace resets health to 0.
/// The tau reset for replaced components happens in degrade().
std::pair<AssetState, double> apply_actions(const AssetState& state, const ActionVector& actions,
                                            const EnvironmentConfig& config);

/// Samples each component's successor from row health[i] of the interpolated
/// matrix at the component's current tau, then advances tau by one year
/// (capped at tau_max - 1) or resets it to 0 for components replaced this
/// step. Consumes exactly one uniform draw per component, in index order.
void degrade(AssetState& state, const EnvironmentConfig& config, const std::vector<bool>& replaced,
             RandomStream& rng);

/// Post-degradation observation. Deterministic: revealing (true state) for
/// inspected or repaired/replaced components, binary coarse code otherwise.
ObservationVector observe(const AssetState& state, const ActionVector& actions);

/// risk_t = 1 - prod_groups (1 - F(#members failed)).
double collapse_probability(const AssetState& state, const std::vector<DependencyGroup>& groups);

/// (-total_cost, ln(1 - risk)). Throws std::domain_error for risk >= 1.
RewardVector make_reward(double total_cost, double risk);

/// Exact Bayesian filter step mirroring the environment order: deterministic
/// action effect, propagation through the interpolated degradation matrix at
/// the component's tau, observation-likelihood conditioning, renormalisation.
/// Advances tau and timestep the same way degrade() does.
BeliefState belief_update(const BeliefState& belief, const ActionVector& actions,
                          const ObservationVector& observation, const EnvironmentConfig& config);

struct StepResult {
    ObservationVector observation;
    RewardVector reward;
    BeliefState belief;
    bool done = false;
    double total_cost = 0.0;
    double risk = 0.0;
};

/**
 * The maintenance MOPOMDP. One instance is a single-threaded value; run
 * independent instances with independent streams for parallel rollouts.
 *
 * Within-timestep order: apply_actions -> degrade -> collapse_probability ->
 * make_reward -> observe -> belief_update. risk_t is computed on the
 * post-degradation state, so failures occurring this year already count.
 */
class MaintenanceEnv {
public:
    explicit MaintenanceEnv(EnvironmentConfig config);

    void reset();
    StepResult step(const ActionVector& actions, RandomStream& rng);

    const EnvironmentConfig& config() const { return config_; }
    const AssetState& state() const { return state_; }
    const BeliefState& belief() const { return belief_; }
    int timestep() const { return timestep_; }
    bool done() const { return timestep_ >= config_.horizon; }
    int num_components() const { return static_cast<int>(config_.num_components()); }
    int horizon() const { return config_.horizon; }

private:
    EnvironmentConfig config_;
    AssetState state_;
    BeliefState belief_;
    int timestep_ = 0;
};

/// Convenience: all-nothing action vector of the right arity.
ActionVector make_nothing_actions(int num_components);

} // namespace quaymaint
