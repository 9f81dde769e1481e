#include "quaymaint/utility.hpp"

#include <cmath>
#include <stdexcept>

namespace quaymaint {

double episode_collapse_probability(double r_risk) {
    if (r_risk > 0.0) {
        throw std::domain_error("episode_collapse_probability: r_risk must be <= 0");
    }
    return -std::expm1(r_risk);
}

double threshold_utility(double r_cost, double p, const ThresholdParams& params) {
    if (p <= params.level1) return r_cost;
    if (p <= params.level2) return params.mult1 * (r_cost + params.shift1);
    return params.mult2 * (r_cost + params.shift2);
}

double threshold_penalized_utility(double r_cost, double p, const ThresholdParams& params) {
    if (p <= params.level1) return r_cost;
    if (p <= params.level2) return params.mult1 * (r_cost - params.shift1);
    return params.mult2 * (r_cost - params.shift2);
}

double fmeca_objective_score(double x, double x_max) {
    if (x < 0.0) throw std::domain_error("fmeca_objective_score: x must be >= 0");
    if (x_max <= 0.0) throw std::domain_error("fmeca_objective_score: x_max must be > 0");
    const double score = 6.0 * std::log10(1.0 + 10.0 * x / x_max);
    return x >= x_max ? score + 4.0 : score;
}

double fmeca_utility(double r_cost, double p, double c_max, double f_max) {
    const double cost_score = fmeca_objective_score(std::abs(r_cost), c_max);
    const double collapse_score = fmeca_objective_score(p, f_max);
    return -(std::max(1.0, cost_score) * std::max(1.0, collapse_score));
}

std::string to_string(UtilityKind kind) {
    switch (kind) {
        case UtilityKind::threshold: return "threshold";
        case UtilityKind::fmeca: return "fmeca";
        case UtilityKind::threshold_penalized: return "threshold_penalized";
    }
    return "?";
}

UtilityKind utility_kind_from_string(const std::string& name) {
    if (name == "threshold") return UtilityKind::threshold;
    if (name == "fmeca") return UtilityKind::fmeca;
    if (name == "threshold_penalized") return UtilityKind::threshold_penalized;
    throw std::invalid_argument("unknown utility '" + name +
                                "' (valid: threshold, fmeca, threshold_penalized)");
}

UtilityFunction UtilityFunction::threshold(ThresholdParams params) {
    UtilityFunction u;
    u.kind_ = UtilityKind::threshold;
    u.threshold_ = params;
    return u;
}

UtilityFunction UtilityFunction::threshold_penalized(ThresholdParams params) {
    UtilityFunction u;
    u.kind_ = UtilityKind::threshold_penalized;
    u.threshold_ = params;
    return u;
}

UtilityFunction UtilityFunction::fmeca(double c_max, double f_max) {
    UtilityFunction u;
    u.kind_ = UtilityKind::fmeca;
    u.c_max_ = c_max;
    u.f_max_ = f_max;
    return u;
}

UtilityFunction UtilityFunction::make(UtilityKind kind) {
    switch (kind) {
        case UtilityKind::threshold: return threshold();
        case UtilityKind::fmeca: return fmeca();
        case UtilityKind::threshold_penalized: return threshold_penalized();
    }
    throw std::invalid_argument("unknown utility kind");
}

double UtilityFunction::evaluate(const EpisodicReturn& ret) const {
    return evaluate_cost_probability(ret.r_cost, episode_collapse_probability(ret.r_risk));
}

double UtilityFunction::evaluate_cost_probability(double r_cost, double p) const {
    switch (kind_) {
        case UtilityKind::threshold: return threshold_utility(r_cost, p, threshold_);
        case UtilityKind::threshold_penalized:
            return threshold_penalized_utility(r_cost, p, threshold_);
        case UtilityKind::fmeca: return fmeca_utility(r_cost, p, c_max_, f_max_);
    }
    throw std::logic_error("unreachable utility kind");
}

} // namespace quaymaint
