#pragma once

#include <string>

namespace quaymaint {

/// Discounted episodic return vector: r_cost = sum gamma^t * (-cost_t),
/// r_risk = sum gamma^t * ln(1 - risk_t). Both non-positive.
struct EpisodicReturn {
    double r_cost = 0.0;
    double r_risk = 0.0;
};

/// P = 1 - exp(r_risk), the probability of at least one collapse over the
/// episode. Throws std::domain_error for r_risk > 0.
double episode_collapse_probability(double r_risk);

struct ThresholdParams {
    double level1 = 0.1;
    double level2 = 0.2;
    double mult1 = 3.0;
    double mult2 = 5.0;
    double shift1 = 1.0;
    double shift2 = 2.0;
};

/// Piecewise utility: r_cost if P <= level1, mult1*(r_cost + shift1) if
/// level1 < P <= level2, mult2*(r_cost + shift2) otherwise. Boundary points
/// belong to the lower-penalty branch.
///
/// Note: with these shifts the function is non-monotone in P for
/// r_cost > -(mult2*shift2 - mult1*shift1)/(mult2 - mult1) = -3.5; in that
/// region higher collapse probability yields higher utility (see README).
double threshold_utility(double r_cost, double collapse_probability,
                         const ThresholdParams& params = {});

/// Monotone variant with the tier offsets applied as penalties,
/// mult*(r_cost - shift); decreasing in P for every cost level.
double threshold_penalized_utility(double r_cost, double collapse_probability,
                                   const ThresholdParams& params = {});

/// 6*log10(1 + 10*x/x_max) plus a +4 penalty at x >= x_max. x is a magnitude.
double fmeca_objective_score(double x, double x_max);

/// -(max(1, cost score) * max(1, collapse score)); bounded above by -1.
/// The cost score is fed |r_cost|.
double fmeca_utility(double r_cost, double collapse_probability, double c_max = 4.0,
                     double f_max = 0.2);

enum class UtilityKind { threshold, fmeca, threshold_penalized };

std::string to_string(UtilityKind kind);
UtilityKind utility_kind_from_string(const std::string& name);

/// Strictly-scoped scalarization of episodic vector returns. evaluate() also
/// serves as the trainer's partial form u(R- + z): any candidate return with
/// non-positive components is a valid input.
class UtilityFunction {
public:
    static UtilityFunction threshold(ThresholdParams params = {});
    static UtilityFunction threshold_penalized(ThresholdParams params = {});
    static UtilityFunction fmeca(double c_max = 4.0, double f_max = 0.2);
    static UtilityFunction make(UtilityKind kind);

    UtilityKind kind() const { return kind_; }
    const ThresholdParams& threshold_params() const { return threshold_; }
    double c_max() const { return c_max_; }
    double f_max() const { return f_max_; }

    double evaluate(const EpisodicReturn& ret) const;
    double evaluate_cost_probability(double r_cost, double collapse_probability) const;

private:
    UtilityFunction() = default;
    UtilityKind kind_ = UtilityKind::threshold;
    ThresholdParams threshold_;
    double c_max_ = 4.0;
    double f_max_ = 0.2;
};

} // namespace quaymaint
