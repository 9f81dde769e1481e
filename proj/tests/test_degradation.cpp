#include <doctest.h>


#include <stdexcept>
#include <cmath>

#include "quaymaint/degradation.hpp"
#include "quaymaint/env_config.hpp"

using namespace quaymaint;

TEST_CASE("interpolation endpoints are exact") {
    for (const char* name : {"simple", "quay", "quay_large"}) {
        const EnvironmentConfig config = build_preset(name);
        for (const auto& model : config.degradation_models) {
            CHECK(interpolate_degradation(model, 0) == model.d_start);
            CHECK(interpolate_degradation(model, model.tau_max - 1) == model.d_end);
        }
    }
}

TEST_CASE("simple asset tau=49 hits the printed end matrix entry") {
    const EnvironmentConfig config = build_preset("simple");
    const Matrix5 d = interpolate_degradation(config.degradation_models[0], 49);
    CHECK(d.at(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("midpoint interpolation is the arithmetic mean of the endpoints") {
    const EnvironmentConfig config = build_preset("quay");
    for (const auto& model : config.degradation_models) {
        // tau_max 50: weights i/49, so no interior tau gives exactly 0.5;
        // check linearity instead: D(a) + D(c) == 2 D(b) for b = (a+c)/2
        const Matrix5 da = interpolate_degradation(model, 10);
        const Matrix5 db = interpolate_degradation(model, 20);
        const Matrix5 dc = interpolate_degradation(model, 30);
        for (std::size_t i = 0; i < da.a.size(); ++i) {
            CHECK(da.a[i] + dc.a[i] == doctest::Approx(2.0 * db.a[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("every interpolated matrix is row-stochastic for all tau and groups") {
    for (const char* name : {"simple", "quay", "quay_large"}) {
        const EnvironmentConfig config = build_preset(name);
        for (const auto& model : config.degradation_models) {
            for (int tau = 0; tau < model.tau_max; ++tau) {
                const Matrix5 d = interpolate_degradation(model, tau);
                for (int r = 0; r < kNumHealthStates; ++r) {
                    double sum = 0.0;
                    for (int c = 0; c < kNumHealthStates; ++c) {
                        CHECK(d.at(r, c) >= 0.0);
                        CHECK(d.at(r, c) <= 1.0);
                        sum += d.at(r, c);
                    }
                    CHECK(std::abs(sum - 1.0) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("tau outside the valid range is rejected") {
    const EnvironmentConfig config = build_preset("simple");
    const auto& model = config.degradation_models[0];
    CHECK_THROWS_AS(interpolate_degradation(model, -1), std::out_of_range);
    CHECK_THROWS_AS(interpolate_degradation(model, model.tau_max), std::out_of_range);
}

TEST_CASE("model validation rejects malformed matrices") {
    DegradationModel model = build_preset("simple").degradation_models[0];
    CHECK_NOTHROW(validate_degradation_model(model));

    DegradationModel bad = model;
    bad.d_start.at(0, 0) = 0.96; // row sums to 0.99
    CHECK_THROWS_WITH_AS(validate_degradation_model(bad),
                         doctest::Contains("row 0"), std::invalid_argument);

    bad = model;
    bad.d_start.at(2, 0) = 0.1; // spontaneous improvement
    CHECK_THROWS_AS(validate_degradation_model(bad), std::invalid_argument);

    bad = model;
    bad.d_end.at(4, 4) = 0.9;
    bad.d_end.at(4, 0) = 0.1; // failed state not absorbing
    CHECK_THROWS_AS(validate_degradation_model(bad), std::invalid_argument);
}
