#pragma once

#include <span>
#include <string>

#include "quaymaint/evaluation.hpp"

namespace quaymaint {

enum class BaselineKind { yba_repair, yba_replace, ybi_cba, cbi_cba };

std::string to_string(BaselineKind kind);
BaselineKind baseline_kind_from_string(const std::string& name);

/// Parameterized rule-based policy. interval applies to the YBA/YBI kinds,
/// fraction to CBI.
struct BaselinePolicy {
    BaselineKind kind = BaselineKind::yba_repair;
    int interval = 1;
    double fraction = 0.5;
};

/// Condition-based action from an exactly revealed state:
/// 0 -> nothing, 1,2 -> repair, 3,4 -> replace.
ComponentAction cba_action(int observed_state);

/**
 * Runs a BaselinePolicy against the Policy interface.
 *
 * YBA acts at t in {interval, 2*interval, ...} (not at t = 0; start states
 * are known) and never inspects. YBI inspects on that schedule and applies
 * cba_action to every component on the step after an inspection; with
 * interval 1 the two overlap. CBI inspects when the fraction of components
 * whose latest observation code is in the three worst states (>= 2) reaches
 * `fraction`, then acts the next step; the trigger is not evaluated on the
 * step that applies the actions.
 */
class BaselineRunnerPolicy final : public Policy {
public:
    explicit BaselineRunnerPolicy(BaselinePolicy spec) : spec_(spec) {}

    std::unique_ptr<Policy> clone() const override {
        return std::make_unique<BaselineRunnerPolicy>(spec_);
    }
    void reset(const EnvironmentConfig&) override { act_pending_ = false; }
    ActionVector act(const MaintenanceEnv& env, const ObservationVector* last_obs,
                     RandomStream& rng) override;

    const BaselinePolicy& spec() const { return spec_; }

private:
    BaselinePolicy spec_;
    bool act_pending_ = false;
};

struct GridPointResult {
    double parameter = 0.0;
    double mean_utility = 0.0;
    double std_utility = 0.0;
    double mean_cost_raw = 0.0;
    double mean_cost_discounted = 0.0;
    double mean_prisk_raw = 0.0;
    double mean_prisk_discounted = 0.0;
    int episodes = 0;
};

struct GridSearchResult {
    BaselinePolicy best;
    std::vector<GridPointResult> table;
};

/// Evaluates every grid point with episodes_per_point episodes under common
/// random numbers (episode k reuses the same derived streams at every point)
/// and returns the argmax of mean utility; ties break toward lower mean raw
/// cost, then lower parameter value.
GridSearchResult grid_search(BaselineKind kind, const EnvironmentConfig& config,
                             const UtilityFunction& utility, std::span<const double> grid,
                             int episodes_per_point, std::uint64_t seed, double gamma,
                             int threads = 0);

/// Default parameter grids: intervals 1..25 for YBA/YBI, fractions
/// 0.1, 0.2, ..., 1.0 for CBI.
std::vector<double> default_grid(BaselineKind kind);

void write_grid_csv(const GridSearchResult& result, std::ostream& out);

} // namespace quaymaint
