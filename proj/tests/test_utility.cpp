#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "quaymaint/environment.hpp"
#include "quaymaint/utility.hpp"

using namespace quaymaint;

TEST_CASE("episode_collapse_probability: identities and domain") {
    CHECK(episode_collapse_probability(0.0) == 0.0);
    CHECK(episode_collapse_probability(std::log(0.9) + std::log(0.9)) ==
          doctest::Approx(0.19).epsilon(1e-12));
    CHECK_THROWS_AS(episode_collapse_probability(0.1), std::domain_error);

    // strictly increasing in |r_risk|
    double prev = -1.0;
    for (double r = 0.0; r >= -5.0; r -= 0.01) {
        const double p = episode_collapse_probability(r);
        CHECK(p > prev - 1e-15);
        CHECK(p >= 0.0);
        CHECK(p < 1.0);
        prev = p;
    }
}

TEST_CASE("episode_collapse_probability matches the per-step product oracle") {
    // gamma = 1: 1 - exp(sum log(1 - risk_t)) must equal 1 - prod(1 - risk_t)
    const EnvironmentConfig config = build_preset("quay");
    for (int ep = 0; ep < 200; ++ep) {
        MaintenanceEnv env(config);
        RandomStream env_rng = derive_stream(9000, static_cast<std::uint64_t>(ep),
                                             StreamPurpose::environment);
        RandomStream act_rng = derive_stream(9000, static_cast<std::uint64_t>(ep),
                                             StreamPurpose::policy);
        double log_sum = 0.0;
        double survival_product = 1.0;
        while (!env.done()) {
            auto a = make_nothing_actions(13);
            for (auto& c : a.component) c = static_cast<ComponentAction>(act_rng.uniform_int(3));
            const auto r = env.step(a, env_rng);
            log_sum += r.reward.log_survival;
            survival_product *= 1.0 - r.risk;
        }
        CHECK(std::abs(episode_collapse_probability(log_sum) - (1.0 - survival_product)) < 1e-12);
    }
}

TEST_CASE("threshold utility: tier values and boundary membership") {
    CHECK(threshold_utility(-5.0, 0.05) == -5.0);
    CHECK(threshold_utility(-5.0, 0.15) == -12.0);
    CHECK(threshold_utility(-5.0, 0.25) == -15.0);
    // boundaries belong to the lower-penalty branch
    CHECK(threshold_utility(-5.0, 0.1) == -5.0);
    CHECK(threshold_utility(-5.0, 0.2) == -12.0);
}

TEST_CASE("threshold utility: monotone in r_cost within tiers; in P only below -3.5") {
    RandomStream rng(8, 8);
    for (int i = 0; i < 20000; ++i) {
        const double p = rng.uniform01();
        const double a = -rng.uniform(0.0, 10.0);
        const double b = a + rng.uniform(0.0, 2.0);
        CHECK(threshold_utility(a, p) <= threshold_utility(b, p) + 1e-12);
    }
    for (int i = 0; i < 20000; ++i) {
        const double cost = -rng.uniform(3.5, 12.0);
        const double p1 = rng.uniform01();
        const double p2 = std::min(1.0, p1 + rng.uniform01() * (1 - p1));
        CHECK(threshold_utility(cost, p2) <= threshold_utility(cost, p1) + 1e-12);
    }
    // documented non-monotone region: cheap episodes prefer high risk
    CHECK(threshold_utility(0.0, 0.5) > threshold_utility(0.0, 0.05));
}

TEST_CASE("penalized threshold variant is monotone everywhere") {
    RandomStream rng(9, 9);
    for (int i = 0; i < 20000; ++i) {
        const double cost = -rng.uniform(0.0, 12.0);
        const double p1 = rng.uniform01();
        const double p2 = std::min(1.0, p1 + rng.uniform01() * (1 - p1));
        CHECK(threshold_penalized_utility(cost, p2) <=
              threshold_penalized_utility(cost, p1) + 1e-12);
    }
    CHECK(threshold_penalized_utility(-5.0, 0.15) == -18.0);
    CHECK(threshold_penalized_utility(-5.0, 0.25) == -35.0);
    CHECK(threshold_penalized_utility(-5.0, 0.05) == -5.0);
}

TEST_CASE("fmeca objective score: formula values and the +4 jump") {
    CHECK(fmeca_objective_score(0.0, 4.0) == 0.0);
    // exact oracle: 6*log10(11) + 4
    const double at_max = 6.0 * std::log10(11.0) + 4.0;
    CHECK(fmeca_objective_score(4.0, 4.0) == doctest::Approx(at_max).epsilon(1e-15));
    CHECK(fmeca_objective_score(2.0, 4.0) == doctest::Approx(6.0 * std::log10(6.0)).epsilon(1e-15));

    // continuous except for the jump of exactly +4 at x = x_max
    const double just_below = fmeca_objective_score(4.0 - 1e-9, 4.0);
    const double at = fmeca_objective_score(4.0, 4.0);
    CHECK(at - just_below == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("fmeca utility: floors, example values, bounds") {
    CHECK(fmeca_utility(0.0, 0.0) == -1.0);
    CHECK(fmeca_utility(-2.0, 0.1) ==
          doctest::Approx(-(6.0 * std::log10(6.0)) * (6.0 * std::log10(6.0))).epsilon(1e-12));
    CHECK(fmeca_utility(-4.0, 0.0) ==
          doctest::Approx(-(6.0 * std::log10(11.0) + 4.0)).epsilon(1e-12));

    RandomStream rng(10, 10);
    for (int i = 0; i < 100000; ++i) {
        const double cost = -rng.uniform(0.0, 12.0);
        const double p = rng.uniform01();
        CHECK(fmeca_utility(cost, p) <= -1.0);
    }
}

TEST_CASE("fmeca utility: non-increasing in |r_cost| and in P (random pairs)") {
    RandomStream rng(11, 11);
    for (int i = 0; i < 100000; ++i) {
        const double c1 = rng.uniform(0.0, 12.0);
        const double c2 = c1 + rng.uniform(0.0, 4.0);
        const double p = rng.uniform01();
        CHECK(fmeca_utility(-c2, p) <= fmeca_utility(-c1, p) + 1e-12);

        const double p1 = rng.uniform01();
        const double p2 = std::min(1.0, p1 + rng.uniform01() * (1 - p1));
        const double c = rng.uniform(0.0, 12.0);
        CHECK(fmeca_utility(-c, p2) <= fmeca_utility(-c, p1) + 1e-12);
    }
}

TEST_CASE("UtilityFunction dispatch and the partial form") {
    const UtilityFunction threshold = UtilityFunction::threshold();
    const UtilityFunction fmeca = UtilityFunction::fmeca();

    // threshold: P = 1 - 0.95 = 0.05 <= 0.1 keeps the raw cost
    CHECK(threshold.evaluate({-1.5, std::log(0.95)}) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(fmeca.evaluate({0.0, 0.0}) == -1.0);

    // reported score is the negated utility (lower is preferable)
    const double u = threshold.evaluate({-2.0, std::log(0.8)});
    CHECK(-u == doctest::Approx(-(3.0 * (-2.0 + 1.0)) ).epsilon(1e-12));

    CHECK(utility_kind_from_string("fmeca") == UtilityKind::fmeca);
    CHECK(to_string(UtilityKind::threshold_penalized) == "threshold_penalized");
    CHECK_THROWS_AS(utility_kind_from_string("nope"), std::invalid_argument);
}
