#pragma once

#include <array>
#include <string>

#include "quaymaint/types.hpp"

namespace quaymaint {

/// Dense 5x5 row-major matrix, the only matrix shape the dynamics need.
struct Matrix5 {
    std::array<double, 25> a{};

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * 5 + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * 5 + c]; }
    std::span<const double> row(int r) const { return {a.data() + static_cast<std::size_t>(r) * 5, 5}; }

    bool operator==(const Matrix5&) const = default;
};

/// Degradation model of one component group: upper-triangular row-stochastic
/// transition matrices at tau = 0 and tau = tau_max, linearly interpolated in
/// between. The failed state (last row) is absorbing.
struct DegradationModel {
    std::string group_id;
    Matrix5 d_start;
    Matrix5 d_end;
    int tau_max = 50;
};

/// Linear interpolation D_start + tau/(tau_max-1) * (D_end - D_start).
/// Valid for 0 <= tau <= tau_max - 1; throws std::out_of_range otherwise.
Matrix5 interpolate_degradation(const DegradationModel& model, int tau);

/// Checks row sums (1e-9), entry bounds, upper-triangular shape and the
/// absorbing last row; throws std::invalid_argument naming the offending row.
void validate_degradation_model(const DegradationModel& model);

} // namespace quaymaint
