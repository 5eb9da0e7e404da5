#pragma once

#include "decpomdp/model.hpp"
#include "decpomdp/rng.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace decpomdp {

/// Stochastic finite-state controller of a single agent.
///
/// action_law  x(n, a)      probability of emitting a while in node n
/// node_law    y(n, o, n')  probability of moving to n' after observing o in n
struct AgentController {
    std::size_t num_nodes = 1;
    std::size_t num_actions = 1;
    std::size_t num_observations = 1;
    std::vector<double> action_law;
    std::vector<double> node_law;
    std::size_t initial_node = 0;

    /// Uniform controller of the given shape.
    static AgentController uniform(std::size_t nodes, std::size_t actions, std::size_t observations);

    double x(std::size_t n, std::size_t a) const { return action_law[n * num_actions + a]; }
    double y(std::size_t n, std::size_t o, std::size_t n2) const {
        return node_law[(n * num_observations + o) * num_nodes + n2];
    }
    std::span<const double> x_row(std::size_t n) const {
        return {action_law.data() + n * num_actions, num_actions};
    }
    std::span<const double> y_row(std::size_t n, std::size_t o) const {
        return {node_law.data() + (n * num_observations + o) * num_nodes, num_nodes};
    }

    friend bool operator==(const AgentController&, const AgentController&) = default;
};

/// Joint policy: one independent controller per agent.
struct FscPolicy {
    std::vector<AgentController> agents;

    std::size_t num_agents() const noexcept { return agents.size(); }
    std::vector<std::size_t> nodes_per_agent() const;
    std::vector<std::size_t> initial_nodes() const;

    friend bool operator==(const FscPolicy&, const FscPolicy&) = default;
};

/// Row-normalization and range violations; empty when valid.
std::vector<std::string> policy_violations(const FscPolicy& policy);

/// Throws DimensionError naming the mismatching axis.
void check_compatible(const DecPomdp& model, const FscPolicy& policy);

/// Per-agent product variables g(n, o', n', a') = y(n, o', n') * x(n', a').
struct AgentProduct {
    std::size_t num_nodes = 1;
    std::size_t num_actions = 1;
    std::size_t num_observations = 1;
    std::vector<double> g; // [n][o][n2][a]

    double at(std::size_t n, std::size_t o, std::size_t n2, std::size_t a) const {
        return g[((n * num_observations + o) * num_nodes + n2) * num_actions + a];
    }
    double& at(std::size_t n, std::size_t o, std::size_t n2, std::size_t a) {
        return g[((n * num_observations + o) * num_nodes + n2) * num_actions + a];
    }
};

struct ProductVars {
    std::vector<AgentProduct> agents;
    /// Largest deviation of sum_{n', a'} g(n, o', n', a') from 1.
    double max_normalization_error() const;
};

ProductVars to_product(const FscPolicy& policy);

/// Recovers (x, y) from g. y(n,o,n') = sum_a g; x(n',a) = g / y from any witness
/// (n, o) with y > 1e-12. Throws ConsistencyError when witnesses disagree by
/// more than 1e-6; nodes never entered keep a uniform action law.
/// Initial nodes are not encoded in g and are taken from `initial_nodes`
/// (zeros when empty).
FscPolicy from_product(const ProductVars& g, std::span<const std::size_t> initial_nodes = {});

/// One controller tick: observe, move to the next node, emit from it.
struct ControllerStep {
    std::size_t action;
    std::size_t next_node;
};

std::size_t sample_action(const AgentController& c, std::size_t node, Rng& rng);
std::size_t sample_next_node(const AgentController& c, std::size_t node, std::size_t obs, Rng& rng);
ControllerStep sample_step(const FscPolicy& policy, std::size_t agent, std::size_t node,
                           std::size_t observation, Rng& rng);

/// Each row drawn from a symmetric Dirichlet(alpha).
AgentController random_controller(std::size_t nodes, std::size_t actions, std::size_t observations,
                                  Rng& rng, double alpha = 1.0);

/// Deterministic controller from action-per-node and successor-per-(node, obs) tables.
AgentController deterministic_controller(std::span<const std::size_t> action_of_node,
                                         std::span<const std::size_t> successor,
                                         std::size_t num_actions, std::size_t num_observations);

} // namespace decpomdp
