#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "quaymaint/environment.hpp"
#include "quaymaint/utility.hpp"

namespace quaymaint {

/// A policy produces the next ActionVector from the agent-visible state.
/// Implementations are cloned per worker thread; an instance is only ever
/// used by one thread at a time.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::unique_ptr<Policy> clone() const = 0;
    virtual void reset(const EnvironmentConfig& config) { (void)config; }
    /// last_obs is null on the first step of an episode.
    virtual ActionVector act(const MaintenanceEnv& env, const ObservationVector* last_obs,
                             RandomStream& rng) = 0;
    /// Called after every environment step so stateful policies can track
    /// accrued rewards.
    virtual void observe_step(const StepResult& result) { (void)result; }
};

class AllNothingPolicy final : public Policy {
public:
    std::unique_ptr<Policy> clone() const override { return std::make_unique<AllNothingPolicy>(); }
    ActionVector act(const MaintenanceEnv& env, const ObservationVector*, RandomStream&) override {
        return make_nothing_actions(env.num_components());
    }
};

/// Each component action uniform over {nothing, repair, replace}, then the
/// global action uniform over {nothing, inspect}; one bounded draw each, in
/// that order.
class UniformRandomPolicy final : public Policy {
public:
    std::unique_ptr<Policy> clone() const override { return std::make_unique<UniformRandomPolicy>(); }
    ActionVector act(const MaintenanceEnv& env, const ObservationVector*, RandomStream& rng) override {
        ActionVector a = make_nothing_actions(env.num_components());
        for (auto& c : a.component) c = static_cast<ComponentAction>(rng.uniform_int(3));
        a.global = static_cast<GlobalAction>(rng.uniform_int(2));
        return a;
    }
};

struct EpisodeRow {
    int episode = 0;
    double utility = 0.0;
    double cost_discounted = 0.0;
    double cost_raw = 0.0;
    double prisk_discounted = 0.0;
    double prisk_raw = 0.0;
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
};

struct EvaluationReport {
    std::string policy_id;
    std::string env_name;
    std::string utility_name;
    double gamma = 1.0;
    int episodes = 0;
    std::vector<EpisodeRow> rows;

    Aggregate utility, score, cost_discounted, cost_raw, prisk_discounted, prisk_raw;

    /// Recomputes all aggregates from rows (sample standard deviation).
    void compute_aggregates();
};

struct EvalOptions {
    int episodes = 5000;
    std::uint64_t seed = 0;
    double gamma = 1.0;
    int threads = 0; // 0: hardware concurrency, capped by QUAYMAINT_THREADS
    std::string policy_id;
};

/// Monte-Carlo evaluation. Episode k draws its environment stream from
/// (seed, k, environment) and its policy stream from (seed, k, policy), so
/// results are independent of worker count and schedule.
EvaluationReport evaluate_policy(const EnvironmentConfig& config, const Policy& prototype,
                                 const UtilityFunction& utility, const EvalOptions& options);

/// Resolves the worker count: explicit request, else hardware concurrency,
/// always capped by the QUAYMAINT_THREADS environment variable when set.
int effective_thread_count(int requested);

void write_eval_csv(const EvaluationReport& report, std::ostream& out);

/// One episode rollout; returns the per-episode metrics row.
EpisodeRow run_episode(const EnvironmentConfig& config, Policy& policy,
                       const UtilityFunction& utility, double gamma, RandomStream& env_rng,
                       RandomStream& policy_rng, int episode_index);

} // namespace quaymaint
