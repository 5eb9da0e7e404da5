#pragma once

// Test-only model builders and reference computations.

#include "decpomdp/controller.hpp"
#include "decpomdp/model.hpp"
#include "decpomdp/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace decpomdp::testing {

inline std::vector<std::string> names(const char* prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

inline void random_row(double* row, std::size_t n, Rng& rng, double sparsity = 0.0) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        row[i] = uniform01(rng) < sparsity ? 0.0 : 0.05 + uniform01(rng);
        sum += row[i];
    }
    if (sum == 0.0) {
        row[0] = 1.0;
        sum = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) row[i] /= sum;
}

/// Dense random model with strictly positive rows unless sparsity > 0.
inline DecPomdp random_model(std::size_t K, std::size_t S, std::size_t A, std::size_t O, Rng& rng,
                             double sparsity = 0.0) {
    ModelTables t;
    t.num_agents = K;
    t.states = names("s", S);
    t.actions = names("a", A);
    t.observations = names("o", O);
    std::size_t JA = 1;
    for (std::size_t k = 0; k < K; ++k) JA *= A;
    t.transition.resize(S * JA * S);
    for (std::size_t r = 0; r < S * JA; ++r) random_row(&t.transition[r * S], S, rng, sparsity);
    t.observation.resize(K * A * S * O);
    for (std::size_t r = 0; r < K * A * S; ++r) random_row(&t.observation[r * O], O, rng);
    t.reward.resize(S * JA);
    for (double& r : t.reward) r = 10.0 * uniform01(rng) - 5.0;
    return DecPomdp(std::move(t));
}

inline FscPolicy random_policy(const DecPomdp& m, const std::vector<std::size_t>& nodes, Rng& rng) {
    FscPolicy p;
    for (std::size_t N : nodes)
        p.agents.push_back(random_controller(N, m.num_actions(), m.num_observations(), rng));
    return p;
}

inline FscPolicy constant_action_policy(std::size_t K, std::size_t A, std::size_t O, std::size_t action) {
    FscPolicy p;
    const std::size_t acts[] = {action};
    const std::vector<std::size_t> succ(O, 0);
    for (std::size_t k = 0; k < K; ++k) p.agents.push_back(deterministic_controller(acts, succ, A, O));
    return p;
}

/// One agent, one state, one action, one observation.
inline DecPomdp identity_model(double reward = 0.0) {
    ModelTables t;
    t.num_agents = 1;
    t.states = {"s"};
    t.actions = {"a"};
    t.observations = {"o"};
    t.transition = {1.0};
    t.observation = {1.0};
    t.reward = {reward};
    return DecPomdp(std::move(t));
}

/// Single agent, one state, |A| actions with the given rewards; dynamics
/// do not depend on the action.
inline DecPomdp bandit_model(const std::vector<double>& rewards, std::size_t O = 2) {
    ModelTables t;
    t.num_agents = 1;
    t.states = {"s"};
    t.actions = names("a", rewards.size());
    t.observations = names("o", O);
    t.transition.assign(rewards.size(), 1.0);
    t.observation.assign(rewards.size() * O, 1.0 / static_cast<double>(O));
    t.reward = rewards;
    return DecPomdp(std::move(t));
}

/// Two states that swap every step whatever the action; reward by state.
inline DecPomdp alternating_model(double r0, double r1) {
    ModelTables t;
    t.num_agents = 1;
    t.states = {"s0", "s1"};
    t.actions = {"a"};
    t.observations = {"o"};
    t.transition = {0.0, 1.0, 1.0, 0.0};
    t.observation = {1.0, 1.0};
    t.reward = {r0, r1};
    return DecPomdp(std::move(t));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace decpomdp::testing
