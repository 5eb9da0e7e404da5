#include "decpomdp/errors.hpp"
#include "decpomdp/indexing.hpp"
#include "decpomdp/model.hpp"
#include "decpomdp/scenario.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace decpomdp;
using namespace decpomdp::testing;

TEST_SUITE("model") {

TEST_CASE("joint action encoding is row-major mixed radix") {
    const auto idx = JointActionIndex::from_components({1, 0, 2}, 3);
    CHECK(idx.flat == 1 * 9 + 0 * 3 + 2);
    CHECK(JointActionIndex::from_flat(idx.flat, 3, 3).components == std::vector<std::size_t>{1, 0, 2});
    CHECK_THROWS_AS(JointActionIndex::from_components({3, 0}, 3), IndexError);
}

TEST_CASE("encode/decode round trip over every vector") {
    for (std::size_t K = 1; K <= 4; ++K)
        for (std::size_t A = 1; A <= 4; ++A) {
            MixedRadix r(K, A);
            for (std::size_t f = 0; f < r.size(); ++f) REQUIRE(r.encode(r.decode(f)) == f);
        }
    MixedRadix mixed({2, 3, 1, 4});
    CHECK(mixed.size() == 24);
    for (std::size_t f = 0; f < mixed.size(); ++f) REQUIRE(mixed.encode(mixed.decode(f)) == f);
}

TEST_CASE("identity model validates and looks up") {
    const DecPomdp m = identity_model(3.0);
    CHECK(validate(m).ok());
    CHECK(m.transition_prob(0, 0, 0) == 1.0);
    CHECK(m.obs_prob(0, 0, 0, 0) == 1.0);
    CHECK(m.reward(0, 0) == 3.0);
}

TEST_CASE("out-of-range lookups name the axis") {
    const DecPomdp m = identity_model();
    try {
        (void)m.transition_prob(0, 1, 0);
        FAIL("expected IndexError");
    } catch (const IndexError& e) {
        CHECK(e.axis() == "joint_action");
    }
    CHECK_THROWS_AS((void)m.obs_prob(1, 0, 0, 0), IndexError);
    CHECK_THROWS_AS((void)m.reward(2, 0), IndexError);
}

TEST_CASE("validate names an unnormalized transition row") {
    Rng rng = make_stream(1, 0);
    ModelTables t = random_model(2, 3, 2, 2, rng).tables();
    // row (s=1, a=2) starts at (1 * 4 + 2) * 3
    double* row = &t.transition[(1 * 4 + 2) * 3];
    row[0] -= 0.02;
    const ValidationReport report = validate(DecPomdp(t));
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].find("transition[s=1][a=2]") != std::string::npos);
    CHECK(report.violations[0].find("0.98") != std::string::npos);
}

TEST_CASE("validate reports every violation without throwing") {
    ModelTables t = identity_model().tables();
    t.transition = {1.5};
    t.observation = {std::nan("")};
    t.reward = {std::numeric_limits<double>::infinity()};
    const ValidationReport report = validate(DecPomdp(t));
    CHECK(report.violations.size() >= 3);
}

TEST_CASE("shape mismatches are rejected at construction") {
    ModelTables t = identity_model().tables();
    t.reward = {1.0, 2.0};
    CHECK_THROWS_AS(DecPomdp{t}, DimensionError);
}

TEST_CASE("renormalization only on request") {
    ModelTables t = identity_model().tables();
    t.states = {"a", "b"};
    t.transition = {0.5, 0.49, 0.2, 0.8};
    t.observation = {1.0, 1.0};
    t.reward = {0.0, 0.0};
    const DecPomdp raw(t);
    CHECK_FALSE(validate(raw).ok());
    const DecPomdp fixed = renormalized(raw);
    CHECK(validate(fixed).ok());
    CHECK(fixed.transition_prob(0, 0, 0) == doctest::Approx(0.5 / 0.99));
}

TEST_CASE("structural equality ignores construction path") {
    const DecPomdp a = compile(ScenarioConfig{});
    const DecPomdp b(a.tables());
    CHECK(a == b);
    ModelTables t = a.tables();
    t.reward[5] += 1.0;
    CHECK_FALSE(a == DecPomdp(t));
}

TEST_CASE("random models are row-stochastic") {
    Rng rng = make_stream(2, 0);
    for (int i = 0; i < 5; ++i) CHECK(validate(random_model(2, 4, 3, 2, rng, 0.3)).ok());
}

} // TEST_SUITE
