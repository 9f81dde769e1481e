#pragma once

#include <span>
#include <vector>

#include "quaymaint/autodiff.hpp"

namespace quaymaint::nn {

/// L2 norm of the concatenated gradients of all parameters.
double global_grad_norm(std::span<Parameter* const> params);

/// Scales all gradients in place so the global norm is at most max_norm;
/// returns the pre-clip norm.
double clip_global_norm(std::span<Parameter* const> params, double max_norm);

/// Adam with bias correction (defaults beta1 = 0.9, beta2 = 0.999,
/// eps = 1e-8). step() consumes and zeroes the gradients of its parameters.
class AdamOptimizer {
public:
    explicit AdamOptimizer(std::vector<Parameter*> params, double beta1 = 0.9,
                           double beta2 = 0.999, double eps = 1e-8);

    void step(double lr);
    long steps_taken() const { return t_; }

private:
    std::vector<Parameter*> params_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    double beta1_;
    double beta2_;
    double eps_;
    long t_ = 0;
};

} // namespace quaymaint::nn
