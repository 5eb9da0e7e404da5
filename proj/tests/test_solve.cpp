#include "decpomdp/errors.hpp"
#include "decpomdp/evaluate.hpp"
#include "decpomdp/scenario.hpp"
#include "decpomdp/solve.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace decpomdp;
using namespace decpomdp::testing;

TEST_SUITE("solve") {

TEST_CASE("projection onto the simplex") {
    std::vector<double> v{0.2, 0.3, 0.5};
    project_to_simplex(v);
    CHECK(max_abs_diff(v, {0.2, 0.3, 0.5}) < 1e-15);

    v = {2.0, 0.0};
    project_to_simplex(v);
    CHECK(max_abs_diff(v, {1.0, 0.0}) < 1e-15);

    v = {0.5, 0.5, 0.5};
    project_to_simplex(v);
    for (double e : v) CHECK(e == doctest::Approx(1.0 / 3));

    // Brute-force check against a fine grid for a 3-vector.
    Rng rng = make_stream(20, 0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> w{4 * uniform01(rng) - 2, 4 * uniform01(rng) - 2, 4 * uniform01(rng) - 2};
        std::vector<double> p = w;
        project_to_simplex(p);
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
        const auto dist = [&](double a, double b) {
            const double c = 1 - a - b;
            return (a - w[0]) * (a - w[0]) + (b - w[1]) * (b - w[1]) + (c - w[2]) * (c - w[2]);
        };
        double best = 1e300;
        for (int i = 0; i <= 400; ++i)
            for (int j = 0; i + j <= 400; ++j) best = std::min(best, dist(i / 400.0, j / 400.0));
        CHECK(dist(p[0], p[1]) <= best + 1e-12);
    }
}

TEST_CASE("objective equals the evaluator") {
    const DecPomdp m = compile(ScenarioConfig{});
    Rng rng = make_stream(21, 0);
    const FscPolicy p = random_policy(m, {2, 1}, rng);
    CHECK(objective(m, p) == average_reward(m, p).average_reward);
    CHECK(std::isfinite(objective(m, random_policy(m, {1, 1}, rng))));
    CHECK(objective(identity_model(7.0), FscPolicy{{AgentController::uniform(1, 1, 1)}}) == doctest::Approx(7.0));
}

TEST_CASE("the oracle's policy scores the oracle's value") {
    const DecPomdp m = compile(ScenarioConfig{});
    const std::size_t nodes[] = {1, 1};
    const EnumerationResult r = enumerate_deterministic(m, nodes);
    CHECK(std::abs(objective(m, r.policy) - r.average_reward) < 1e-12);
}

TEST_CASE("a sweep never lowers the objective") {
    SolveConfig cfg;
    cfg.nodes_per_agent = {2, 2};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng = make_stream(seed, 99);
        const DecPomdp m = random_model(2, 3, 2, 2, rng, 0.2);
        const FscPolicy p = random_policy(m, {2, 2}, rng);
        const double before = objective(m, p);
        const FscPolicy q = best_response_sweep(m, p, cfg);
        CHECK(objective(m, q) >= before - cfg.tol);
        CHECK(policy_violations(q).empty());
        CHECK(to_product(q).max_normalization_error() < 1e-9);
    }
}

TEST_CASE("an optimal deterministic policy is a fixed point") {
    const DecPomdp m = bandit_model({1.0, 5.0, 2.0});
    const FscPolicy p = constant_action_policy(1, 3, 2, 1);
    SolveConfig cfg;
    CHECK(best_response_sweep(m, p, cfg) == p);
}

TEST_CASE("dominance model solves to the dominant action") {
    const DecPomdp m = bandit_model({1.0, 5.0, 2.0});
    SolveConfig cfg;
    cfg.restarts = 5;
    const SolveResult r = solve(m, cfg);
    const std::size_t nodes[] = {1};
    CHECK(r.objective == doctest::Approx(enumerate_deterministic(m, nodes).average_reward).epsilon(1e-6));
    CHECK(r.policy.agents[0].x(0, 1) > 0.999999);
}

TEST_CASE("two agents with two nodes reach the deterministic optimum") {
    Rng rng = make_stream(22, 0);
    const DecPomdp m = random_model(2, 2, 2, 2, rng);
    SolveConfig cfg;
    cfg.nodes_per_agent = {2, 2};
    cfg.seed = 3;
    const SolveResult r = solve(m, cfg);
    const std::size_t nodes[] = {2, 2};
    CHECK(r.objective >= enumerate_deterministic(m, nodes).average_reward - 1e-3);
}

TEST_CASE("results are reproducible and self-consistent") {
    const DecPomdp m = compile(ScenarioConfig{});
    SolveConfig cfg;
    cfg.nodes_per_agent = {1, 2};
    cfg.restarts = 3;
    cfg.max_outer_iters = 20;
    cfg.seed = 11;
    const SolveResult a = solve(m, cfg);
    const SolveResult b = solve(m, cfg);
    CHECK(a == b);
    CHECK(std::abs(a.objective - average_reward(m, a.policy).average_reward) <= 1e-7);
    CHECK(a.restarts_summary.size() == 3);
    CHECK(a.objective == doctest::Approx(*std::max_element(a.restarts_summary.begin(), a.restarts_summary.end())));
    for (std::size_t i = 1; i < a.history.size(); ++i) CHECK(a.history[i] >= a.history[i - 1] - cfg.tol);
    CHECK(policy_violations(a.policy).empty());
}

TEST_CASE("single agent solve reduces to the POMDP case") {
    Rng rng = make_stream(23, 0);
    const DecPomdp m = random_model(1, 3, 2, 2, rng);
    SolveConfig cfg;
    cfg.nodes_per_agent = {2};
    cfg.restarts = 10;
    const SolveResult r = solve(m, cfg);
    const std::size_t nodes[] = {2};
    CHECK(r.objective >= enumerate_deterministic(m, nodes).average_reward - 1e-3);
}

TEST_CASE("invalid configurations are rejected") {
    SolveConfig cfg;
    cfg.nodes_per_agent = {1, 1};
    CHECK_NOTHROW(check_config(cfg, 2));
    CHECK_THROWS_AS(check_config(cfg, 3), ConfigError);
    SolveConfig bad = cfg;
    bad.restarts = 0;
    CHECK_THROWS_WITH_AS(check_config(bad, 2), doctest::Contains("restarts"), ConfigError);
    bad = cfg;
    bad.tol = 0;
    CHECK_THROWS_WITH_AS(check_config(bad, 2), doctest::Contains("tol"), ConfigError);
    bad = cfg;
    bad.step_size = -1;
    CHECK_THROWS_AS(check_config(bad, 2), ConfigError);
    bad = cfg;
    bad.nodes_per_agent = {1, 0};
    CHECK_THROWS_AS(check_config(bad, 2), ConfigError);
    bad = cfg;
    bad.inner_steps = 0;
    CHECK_THROWS_AS(check_config(bad, 2), ConfigError);
}

} // TEST_SUITE
