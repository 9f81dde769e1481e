#include "quaymaint/degradation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace quaymaint {

Matrix5 interpolate_degradation(const DegradationModel& model, int tau) {
    if (tau < 0 || tau > model.tau_max - 1) {
        throw std::out_of_range("interpolate_degradation: tau " + std::to_string(tau) +
                                " outside [0, " + std::to_string(model.tau_max - 1) + "]");
    }
    const double w = static_cast<double>(tau) / static_cast<double>(model.tau_max - 1);
    Matrix5 out;
    for (std::size_t i = 0; i < out.a.size(); ++i) {
        out.a[i] = model.d_start.a[i] + w * (model.d_end.a[i] - model.d_start.a[i]);
    }
    return out;
}

namespace {

void check_matrix(const Matrix5& m, const std::string& which, const std::string& group) {
    for (int r = 0; r < kNumHealthStates; ++r) {
        double sum = 0.0;
        for (int c = 0; c < kNumHealthStates; ++c) {
            const double v = m.at(r, c);
            if (v < 0.0 || v > 1.0) {
                throw std::invalid_argument("degradation_models[" + group + "]." + which + " row " +
                                            std::to_string(r) + ": entry out of [0,1]");
            }
            if (c < r && v != 0.0) {
                throw std::invalid_argument("degradation_models[" + group + "]." + which + " row " +
                                            std::to_string(r) +
                                            ": below-diagonal entry (spontaneous improvement)");
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("degradation_models[" + group + "]." + which + " row " +
                                        std::to_string(r) + " sums to " + std::to_string(sum) +
                                        ", expected 1");
        }
    }
    for (int c = 0; c < kNumHealthStates - 1; ++c) {
        if (m.at(kFailedState, c) != 0.0) {
            throw std::invalid_argument("degradation_models[" + group + "]." + which +
                                        ": failed state must be absorbing");
        }
    }
    if (m.at(kFailedState, kFailedState) != 1.0) {
        throw std::invalid_argument("degradation_models[" + group + "]." + which +
                                    ": failed state must be absorbing");
    }
}

} // namespace

void validate_degradation_model(const DegradationModel& model) {
    if (model.tau_max < 2) {
        throw std::invalid_argument("degradation_models[" + model.group_id + "].tau_max must be >= 2");
    }
    check_matrix(model.d_start, "d_start", model.group_id);
    check_matrix(model.d_end, "d_end", model.group_id);
}

} // namespace quaymaint
