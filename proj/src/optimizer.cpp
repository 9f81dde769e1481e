#include "quaymaint/optimizer.hpp"

#include <cmath>

namespace quaymaint::nn {

double global_grad_norm(std::span<Parameter* const> params) {
    double ss = 0.0;
    for (const Parameter* p : params) {
        for (double g : p->grad.v) ss += g * g;
    }
    return std::sqrt(ss);
}

double clip_global_norm(std::span<Parameter* const> params, double max_norm) {
    const double norm = global_grad_norm(params);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (Parameter* p : params) {
            for (double& g : p->grad.v) g *= scale;
        }
    }
    return norm;
}

AdamOptimizer::AdamOptimizer(std::vector<Parameter*> params, double beta1, double beta2,
                             double eps)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Parameter* p : params_) {
        m_.emplace_back(p->value.size(), 0.0);
        v_.emplace_back(p->value.size(), 0.0);
    }
}

void AdamOptimizer::step(double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        Parameter& p = *params_[pi];
        auto& m = m_[pi];
        auto& v = v_[pi];
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.grad.v[i];
            m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
            v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p.value.v[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
        }
        p.zero_grad();
    }
}

} // namespace quaymaint::nn
