#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <functional>
#include <vector>

#include "quaymaint/environment.hpp"

using namespace quaymaint;

namespace {

EnvironmentConfig small_simple_config(int n) {
    EnvironmentConfig config = build_preset("simple");
    config.components.resize(static_cast<std::size_t>(n));
    config.dependency_groups.clear();
    for (int i = 0; i < n; ++i) {
        config.dependency_groups.push_back({"component", {i}, {0.0, 0.05}});
    }
    config.start_health.assign(static_cast<std::size_t>(n), 0);
    config.initial_belief.assign(static_cast<std::size_t>(n) * 5, 0.2);
    return config;
}

/**
 * Brute-force filter oracle: enumerates every hidden joint state sequence
 * s_0..s_T, weighting each path by the prior, the per-component transition
 * probabilities (after the deterministic action effects) and the indicator
 * that the path emits the recorded observations. Marginalizing the surviving
 * weight at depth T gives the exact filtered distribution, independently of
 * the incremental Bayesian update under test.
 */
struct EnumerationOracle {
    const EnvironmentConfig& config;
    std::vector<ActionVector> actions; // actions[t] taken at step t
    std::vector<ObservationVector> observations; // observations[t] received after step t

    std::vector<double> filtered_marginals(int upto) const {
        const int n = static_cast<int>(config.num_components());
        const int joint = static_cast<int>(std::pow(5, n));
        std::vector<double> result(static_cast<std::size_t>(n) * 5, 0.0);
        double total = 0.0;

        std::vector<int> state(static_cast<std::size_t>(n));
        std::function<void(int, std::vector<int>, std::vector<int>, double)> walk =
            [&](int t, std::vector<int> healths, std::vector<int> taus, double weight) {
                if (weight == 0.0) return;
                if (t == upto) {
                    total += weight;
                    for (int i = 0; i < n; ++i) {
                        result[static_cast<std::size_t>(i) * 5 +
                               static_cast<std::size_t>(healths[static_cast<std::size_t>(i)])] += weight;
                    }
                    return;
                }
                const ActionVector& act = actions[static_cast<std::size_t>(t)];
                std::vector<int> acted = healths;
                for (int i = 0; i < n; ++i) {
                    if (act.component[static_cast<std::size_t>(i)] == ComponentAction::repair) {
                        acted[static_cast<std::size_t>(i)] = std::max(0, acted[static_cast<std::size_t>(i)] - 1);
                    } else if (act.component[static_cast<std::size_t>(i)] == ComponentAction::replace) {
                        acted[static_cast<std::size_t>(i)] = 0;
                    }
                }
                for (int combo = 0; combo < joint; ++combo) {
                    int rem = combo;
                    double w = weight;
                    std::vector<int> next(static_cast<std::size_t>(n));
                    std::vector<int> ntau(static_cast<std::size_t>(n));
                    for (int i = 0; i < n && w != 0.0; ++i) {
                        const int succ = rem % 5;
                        rem /= 5;
                        const auto& model = config.model_for(i);
                        const Matrix5 d = interpolate_degradation(model, taus[static_cast<std::size_t>(i)]);
                        w *= d.at(acted[static_cast<std::size_t>(i)], succ);
                        next[static_cast<std::size_t>(i)] = succ;
                        ntau[static_cast<std::size_t>(i)] =
                            act.component[static_cast<std::size_t>(i)] == ComponentAction::replace
                                ? 0
                                : std::min(taus[static_cast<std::size_t>(i)] + 1, model.tau_max - 1);
                        // observation indicator
                        const bool revealed = act.global == GlobalAction::inspect ||
                                              act.component[static_cast<std::size_t>(i)] != ComponentAction::nothing;
                        const int code = observations[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
                        const int emitted = revealed ? succ : (succ <= 1 ? 0 : 4);
                        if (emitted != code) w = 0.0;
                    }
                    if (w != 0.0) walk(t + 1, next, ntau, w);
                }
            };

        // prior over s_0 from the initial belief rows (independent components)
        std::vector<int> taus0(static_cast<std::size_t>(n), 0);
        for (int combo = 0; combo < joint; ++combo) {
            int rem = combo;
            double w = 1.0;
            std::vector<int> healths(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const int s = rem % 5;
                rem /= 5;
                healths[static_cast<std::size_t>(i)] = s;
                w *= config.initial_belief[static_cast<std::size_t>(i) * 5 + static_cast<std::size_t>(s)];
            }
            if (w != 0.0) walk(0, healths, taus0, w);
        }

        for (double& v : result) v /= total;
        return result;
    }
};

} // namespace

TEST_CASE("belief update: revealing observation gives a one-hot row") {
    const EnvironmentConfig config = small_simple_config(1);
    BeliefState belief;
    belief.probs = {0.2, 0.2, 0.2, 0.2, 0.2};
    belief.tau = {0};
    belief.timestep = 0;

    ActionVector a = make_nothing_actions(1);
    a.global = GlobalAction::inspect;
    const BeliefState next = belief_update(belief, a, {2}, config);
    CHECK(next.row(0)[0] == 0.0);
    CHECK(next.row(0)[1] == 0.0);
    CHECK(next.row(0)[2] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(next.row(0)[3] == 0.0);
    CHECK(next.row(0)[4] == 0.0);
    CHECK(next.timestep == 1);
    CHECK(next.tau[0] == 1);
}

TEST_CASE("belief update: hand-computed do-nothing posterior on the printed matrix") {
    // Uniform prior propagated through the tau=0 matrix:
    //   col 0: 0.2*0.97 = 0.194            col 1: 0.2*(0.015+0.98) = 0.199
    // Observation code 0 keeps states {0,1}; posterior = (0.194, 0.199)/0.393.
    const EnvironmentConfig config = small_simple_config(1);
    BeliefState belief;
    belief.probs = {0.2, 0.2, 0.2, 0.2, 0.2};
    belief.tau = {0};
    belief.timestep = 0;

    const BeliefState next = belief_update(belief, make_nothing_actions(1), {0}, config);
    CHECK(next.row(0)[0] == doctest::Approx(0.194 / 0.393).epsilon(1e-12));
    CHECK(next.row(0)[1] == doctest::Approx(0.199 / 0.393).epsilon(1e-12));
    CHECK(next.row(0)[2] == 0.0);
    CHECK(next.row(0)[3] == 0.0);
    CHECK(next.row(0)[4] == 0.0);
}

TEST_CASE("belief update: impossible observation raises the inconsistency error") {
    const EnvironmentConfig config = small_simple_config(1);
    BeliefState belief;
    belief.probs = {0.0, 0.0, 0.0, 0.0, 1.0}; // certainly failed (absorbing)
    belief.tau = {0};
    belief.timestep = 0;
    // coarse code 0 (healthy side) has zero likelihood under this belief
    CHECK_THROWS_AS(belief_update(belief, make_nothing_actions(1), {0}, config),
                    BeliefInconsistencyError);
}

TEST_CASE("belief rows remain simplices under random action/observation sequences") {
    const EnvironmentConfig config = small_simple_config(2);
    MaintenanceEnv env(config);
    RandomStream env_rng = derive_stream(404, 0, StreamPurpose::environment);
    RandomStream act_rng = derive_stream(404, 0, StreamPurpose::policy);

    for (int ep = 0; ep < 20; ++ep) {
        env.reset();
        while (!env.done()) {
            auto a = make_nothing_actions(2);
            for (auto& c : a.component) c = static_cast<ComponentAction>(act_rng.uniform_int(3));
            a.global = static_cast<GlobalAction>(act_rng.uniform_int(2));
            const auto r = env.step(a, env_rng);
            for (std::size_t i = 0; i < 2; ++i) {
                double sum = 0.0;
                for (double v : r.belief.row(i)) {
                    CHECK(v >= 0.0);
                    sum += v;
                }
                CHECK(std::abs(sum - 1.0) < 1e-9);
            }
        }
    }
}

TEST_CASE("belief filter equals exhaustive enumeration (1 and 2 components, 5 steps)") {
    for (int n : {1, 2}) {
        const EnvironmentConfig config = small_simple_config(n);

        // scripted actions exercising repair, replace, inspect and do-nothing
        std::vector<ActionVector> script;
        {
            auto a0 = make_nothing_actions(n);
            auto a1 = make_nothing_actions(n);
            a1.global = GlobalAction::inspect;
            auto a2 = make_nothing_actions(n);
            a2.component[0] = ComponentAction::repair;
            auto a3 = make_nothing_actions(n);
            if (n == 2) a3.component[1] = ComponentAction::replace;
            auto a4 = make_nothing_actions(n);
            script = {a0, a1, a2, a3, a4};
        }

        MaintenanceEnv env(config);
        RandomStream rng = derive_stream(5150, static_cast<std::uint64_t>(n),
                                         StreamPurpose::environment);
        EnumerationOracle oracle{config, {}, {}};
        std::vector<BeliefState> filter_beliefs;
        for (const auto& a : script) {
            const auto r = env.step(a, rng);
            oracle.actions.push_back(a);
            oracle.observations.push_back(r.observation);
            filter_beliefs.push_back(r.belief);
        }

        for (int t = 1; t <= 5; ++t) {
            const std::vector<double> expected = oracle.filtered_marginals(t);
            const BeliefState& got = filter_beliefs[static_cast<std::size_t>(t - 1)];
            for (std::size_t i = 0; i < expected.size(); ++i) {
                CHECK(std::abs(expected[i] - got.probs[i]) < 1e-10);
            }
        }
    }
}
