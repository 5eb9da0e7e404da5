#pragma once

#include "decpomdp/controller.hpp"
#include "decpomdp/evaluate.hpp"
#include "decpomdp/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace decpomdp {

struct SolveConfig {
    std::vector<std::size_t> nodes_per_agent{1};
    std::size_t restarts = 20;
    std::size_t max_outer_iters = 100;
    std::size_t inner_steps = 5;
    double step_size = 1.0;
    double tol = 1e-7;
    std::uint64_t seed = 0;
};

/// Throws ConfigError naming the offending field.
void check_config(const SolveConfig& config, std::size_t num_agents);

struct SolveResult {
    FscPolicy policy;
    double objective = 0.0;
    /// Objective after initialization and after every sweep of the winning restart.
    std::vector<double> history;
    /// Final objective of each restart, by restart index.
    std::vector<double> restarts_summary;
    std::size_t best_restart = 0;
    /// Sweeps that fell back to finite differences at multichain points.
    std::size_t finite_difference_steps = 0;

    friend bool operator==(const SolveResult&, const SolveResult&) = default;
};

/// The NLP objective: long-run average reward of the joint controller.
double objective(const DecPomdp& model, const FscPolicy& policy);

/// Euclidean projection of v onto the probability simplex, in place.
void project_to_simplex(std::span<double> v);

/// One pass over the agents in index order. Each agent takes up to
/// inner_steps projected-gradient steps on its own (x, y) with the other
/// controllers fixed; a step is accepted only if the objective does not
/// drop, otherwise the step size is halved down to 1e-8.
FscPolicy best_response_sweep(const DecPomdp& model, const FscPolicy& policy,
                              const SolveConfig& config);

/// Multi-start alternating best response from Dirichlet(1) initial controllers.
/// Restart r draws from the stream (seed, r); the best restart wins, lowest
/// index on ties within 1e-9. Deterministic for a given seed.
SolveResult solve(const DecPomdp& model, const SolveConfig& config);

} // namespace decpomdp
