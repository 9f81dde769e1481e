#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace quaymaint {

inline constexpr int kNumHealthStates = 5;
inline constexpr int kFailedState = kNumHealthStates - 1;

enum class ComponentAction : int { nothing = 0, repair = 1, replace = 2 };
enum class GlobalAction : int { nothing = 0, inspect = 1 };

struct ActionVector {
    std::vector<ComponentAction> component;
    GlobalAction global = GlobalAction::nothing;
};

/// Per-component observation codes in 0..4. After inspect/repair/replace the
/// code is the true health state; otherwise it is the binary coarse code
/// (0 for states {0,1}, 4 for states {2,3,4}).
using ObservationVector = std::vector<int>;

/// True hidden state: health level 0 (best) .. 4 (failed, absorbing) and the
/// per-component degradation rate tau.
struct AssetState {
    std::vector<int> health;
    std::vector<int> tau;

    std::size_t size() const { return health.size(); }
};

struct RewardVector {
    double neg_cost = 0.0;      // <= 0
    double log_survival = 0.0;  // ln(1 - risk_t) <= 0
};

/// Agent-facing state: one probability simplex over the 5 health states per
/// component (row-major N x 5), plus the known tau vector and timestep.
struct BeliefState {
    std::vector<double> probs;
    std::vector<int> tau;
    int timestep = 0;

    std::size_t num_components() const { return tau.size(); }
    std::span<double> row(std::size_t i) {
        return {probs.data() + i * kNumHealthStates, kNumHealthStates};
    }
    std::span<const double> row(std::size_t i) const {
        return {probs.data() + i * kNumHealthStates, kNumHealthStates};
    }
};

} // namespace quaymaint
