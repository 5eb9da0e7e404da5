#include "decpomdp/errors.hpp"
#include "decpomdp/evaluate.hpp"
#include "decpomdp/scenario.hpp"
#include "decpomdp/sim.hpp"
#include "decpomdp/solve.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace decpomdp;
using namespace decpomdp::testing;

TEST_SUITE("sim") {

TEST_CASE("deterministic model and policy give the unique transition") {
    const DecPomdp m = alternating_model(1.0, 3.0);
    const FscPolicy p{{AgentController::uniform(1, 1, 1)}};
    Rng rng = make_stream(0, 0);
    const std::size_t nodes[] = {0};
    const StepOutcome o = step(m, p, 0, nodes, rng);
    CHECK(o.next_state == 1);
    CHECK(o.reward == 1.0);
    CHECK(o.actions == std::vector<std::size_t>{0});
    CHECK(o.next_nodes == std::vector<std::size_t>{0});
}

TEST_CASE("fixed seed reproduces steps and runs") {
    const DecPomdp m = compile(ScenarioConfig{});
    Rng init = make_stream(30, 0);
    const FscPolicy p = random_policy(m, {2, 2}, init);
    const std::size_t nodes[] = {1, 0};
    Rng a = make_stream(5, 0), b = make_stream(5, 0);
    const StepOutcome x = step(m, p, 7, nodes, a), y = step(m, p, 7, nodes, b);
    CHECK(x.next_state == y.next_state);
    CHECK(x.next_nodes == y.next_nodes);
    CHECK(x.observations == y.observations);

    SimConfig cfg;
    cfg.steps = 2000;
    cfg.burn_in = 100;
    cfg.replications = 3;
    cfg.seed = 8;
    cfg.record_trace = true;
    CHECK(run(m, p, cfg) == run(m, p, cfg));
    cfg.seed = 9;
    CHECK_FALSE(run(m, p, cfg) == [&] { SimConfig c2 = cfg; c2.seed = 8; return run(m, p, c2); }());
}

TEST_CASE("next-state frequencies match the transition row") {
    Rng init = make_stream(31, 0);
    const DecPomdp m = random_model(2, 4, 2, 2, init);
    const FscPolicy p = constant_action_policy(2, 2, 2, 1);
    const std::size_t ja = m.joint_actions().encode(std::vector<std::size_t>{1, 1});
    const std::size_t state = 2;
    constexpr int kSamples = 100000;
    std::vector<int> counts(4, 0);
    Rng rng = make_stream(31, 1);
    const std::size_t nodes[] = {0, 0};
    for (int i = 0; i < kSamples; ++i) ++counts[step(m, p, state, nodes, rng).next_state];
    for (std::size_t s2 = 0; s2 < 4; ++s2) {
        const double prob = m.transition_prob(state, ja, s2);
        const double sigma = std::sqrt(prob * (1 - prob) / kSamples);
        CHECK(std::abs(counts[s2] / double(kSamples) - prob) <= 3 * sigma);
    }
}

TEST_CASE("constant reward gives that mean with zero standard error") {
    const DecPomdp m = identity_model(2.5);
    SimConfig cfg;
    cfg.steps = 500;
    cfg.burn_in = 10;
    cfg.replications = 4;
    const SimTrace t = run(m, FscPolicy{{AgentController::uniform(1, 1, 1)}}, cfg);
    CHECK(t.pooled_mean == 2.5);
    CHECK(t.standard_error == 0.0);
    CHECK(t.replication_means.size() == 4);
    CHECK(t.records.empty());
}

TEST_CASE("trace shape and pooled mean") {
    const DecPomdp m = compile(ScenarioConfig{});
    Rng init = make_stream(32, 0);
    const FscPolicy p = random_policy(m, {1, 2}, init);
    SimConfig cfg;
    cfg.steps = 300;
    cfg.burn_in = 50;
    cfg.replications = 3;
    cfg.record_trace = true;
    const SimTrace t = run(m, p, cfg);
    REQUIRE(t.records.size() == 900);
    CHECK(t.records[300].replication == 1);
    CHECK(t.records[300].t == 0);
    double pooled = 0.0;
    for (std::size_t r = 0; r < 3; ++r) {
        double sum = 0.0;
        for (std::size_t i = 50; i < 300; ++i) sum += t.records[r * 300 + i].reward;
        CHECK(t.replication_means[r] == doctest::Approx(sum / 250).epsilon(1e-12));
        pooled += t.replication_means[r] / 3;
    }
    CHECK(t.pooled_mean == doctest::Approx(pooled).epsilon(1e-12));
    CHECK(t.reward_per_step.size() == 300);
}

TEST_CASE("simulation agrees with the exact evaluator") {
    const DecPomdp m = compile(ScenarioConfig{});
    SolveConfig scfg;
    scfg.nodes_per_agent = {1, 1};
    scfg.restarts = 4;
    const SolveResult solved = solve(m, scfg);
    SimConfig cfg;
    cfg.seed = 1;
    const SimTrace t = run(m, solved.policy, cfg);
    const double exact = average_reward(m, solved.policy).average_reward;
    CHECK(t.standard_error > 0.0);
    CHECK(std::abs(t.pooled_mean - exact) <= 3 * t.standard_error);
}

TEST_CASE("observation sampling order does not change the statistics") {
    const DecPomdp m = compile(ScenarioConfig{});
    Rng init = make_stream(33, 0);
    const FscPolicy p = random_policy(m, {2, 2}, init);
    // Summary statistics over many seeds: the per-agent rate of the
    // "compromised" observation and the pooled reward.
    const auto stats = [&](std::vector<std::size_t> order) {
        double obs[2] = {0, 0};
        double reward = 0.0;
        std::size_t n = 0;
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            SimConfig cfg;
            cfg.steps = 1000;
            cfg.burn_in = 1;
            cfg.replications = 1;
            cfg.seed = seed;
            cfg.record_trace = true;
            cfg.observation_order = order;
            const SimTrace t = run(m, p, cfg);
            for (const SimRecord& r : t.records) {
                obs[0] += static_cast<double>(r.observations[0]);
                obs[1] += static_cast<double>(r.observations[1]);
                reward += r.reward;
                ++n;
            }
        }
        return std::vector<double>{obs[0] / n, obs[1] / n, reward / n};
    };
    const auto forward = stats({0, 1});
    const auto backward = stats({1, 0});
    const double n = 40000.0;
    for (int k = 0; k < 2; ++k) {
        const double q = 0.5 * (forward[k] + backward[k]);
        // Generous bound: samples within a run are correlated.
        CHECK(std::abs(forward[k] - backward[k]) <= 10 * std::sqrt(2 * q * (1 - q) / n) + 1e-3);
    }
    CHECK(std::abs(forward[2] - backward[2]) < 0.5);
}

TEST_CASE("doubling replications at a fixed budget keeps overlapping intervals") {
    const DecPomdp m = compile(ScenarioConfig{});
    Rng init = make_stream(34, 0);
    const FscPolicy p = random_policy(m, {1, 1}, init);
    SimConfig a;
    a.steps = 20000;
    a.replications = 5;
    a.burn_in = 500;
    SimConfig b = a;
    b.steps = 10000;
    b.replications = 10;
    const SimTrace ta = run(m, p, a), tb = run(m, p, b);
    const double gap = std::abs(ta.pooled_mean - tb.pooled_mean);
    CHECK(gap <= 1.96 * (ta.standard_error + tb.standard_error));
}

TEST_CASE("invalid configurations are rejected") {
    const DecPomdp m = compile(ScenarioConfig{});
    SimConfig cfg;
    CHECK_NOTHROW(check_config(cfg, m));
    SimConfig bad = cfg;
    bad.replications = 0;
    CHECK_THROWS_WITH_AS(check_config(bad, m), doctest::Contains("replications"), ConfigError);
    bad = cfg;
    bad.burn_in = bad.steps;
    CHECK_THROWS_WITH_AS(check_config(bad, m), doctest::Contains("burn_in"), ConfigError);
    bad = cfg;
    bad.initial_state_distribution = std::vector<double>(36, 0.5);
    CHECK_THROWS_AS(check_config(bad, m), ConfigError);
    bad = cfg;
    bad.observation_order = {0, 0};
    CHECK_THROWS_AS(check_config(bad, m), ConfigError);
}

} // TEST_SUITE
