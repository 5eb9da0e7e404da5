#include "decpomdp/controller.hpp"

#include "decpomdp/errors.hpp"

#include <cmath>
#include <sstream>

namespace decpomdp {

AgentController AgentController::uniform(std::size_t nodes, std::size_t actions,
                                         std::size_t observations) {
    AgentController c;
    c.num_nodes = nodes;
    c.num_actions = actions;
    c.num_observations = observations;
    c.action_law.assign(nodes * actions, 1.0 / static_cast<double>(actions));
    c.node_law.assign(nodes * observations * nodes, 1.0 / static_cast<double>(nodes));
    return c;
}

std::vector<std::size_t> FscPolicy::nodes_per_agent() const {
    std::vector<std::size_t> out;
    for (const auto& a : agents) out.push_back(a.num_nodes);
    return out;
}

std::vector<std::size_t> FscPolicy::initial_nodes() const {
    std::vector<std::size_t> out;
    for (const auto& a : agents) out.push_back(a.initial_node);
    return out;
}

namespace {

void check_simplex_row(std::span<const double> row, const std::string& where,
                       std::vector<std::string>& out) {
    double sum = 0.0;
    for (double p : row) {
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            out.push_back(where + ": entry outside [0, 1]");
            return;
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << where << ": row sums to " << sum;
        out.push_back(msg.str());
    }
}

} // namespace

std::vector<std::string> policy_violations(const FscPolicy& policy) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < policy.agents.size(); ++k) {
        const auto& c = policy.agents[k];
        const std::string tag = "agent " + std::to_string(k);
        if (c.num_nodes == 0 || c.num_actions == 0 || c.num_observations == 0) {
            out.push_back(tag + ": empty controller");
            continue;
        }
        if (c.action_law.size() != c.num_nodes * c.num_actions ||
            c.node_law.size() != c.num_nodes * c.num_observations * c.num_nodes) {
            out.push_back(tag + ": table sizes do not match the declared shape");
            continue;
        }
        if (c.initial_node >= c.num_nodes) out.push_back(tag + ": initial_node out of range");
        for (std::size_t n = 0; n < c.num_nodes; ++n) {
            check_simplex_row(c.x_row(n), tag + " x[n=" + std::to_string(n) + "]", out);
            for (std::size_t o = 0; o < c.num_observations; ++o)
                check_simplex_row(c.y_row(n, o),
                                  tag + " y[n=" + std::to_string(n) + "][o=" + std::to_string(o) + "]",
                                  out);
        }
    }
    return out;
}

void check_compatible(const DecPomdp& model, const FscPolicy& policy) {
    if (policy.num_agents() != model.num_agents())
        throw DimensionError("agents: controller has " + std::to_string(policy.num_agents()) +
                             ", model has " + std::to_string(model.num_agents()));
    for (std::size_t k = 0; k < policy.num_agents(); ++k) {
        const auto& c = policy.agents[k];
        const std::string tag = "agent " + std::to_string(k) + " ";
        if (c.num_actions != model.num_actions())
            throw DimensionError(tag + "actions: controller has " + std::to_string(c.num_actions) +
                                 ", model has " + std::to_string(model.num_actions()));
        if (c.num_observations != model.num_observations())
            throw DimensionError(tag + "observations: controller has " +
                                 std::to_string(c.num_observations) + ", model has " +
                                 std::to_string(model.num_observations()));
        if (c.num_nodes == 0) throw DimensionError(tag + "nodes: controller has no nodes");
        if (c.action_law.size() != c.num_nodes * c.num_actions)
            throw DimensionError(tag + "x: table size does not match nodes x actions");
        if (c.node_law.size() != c.num_nodes * c.num_observations * c.num_nodes)
            throw DimensionError(tag + "y: table size does not match nodes x observations x nodes");
        if (c.initial_node >= c.num_nodes)
            throw DimensionError(tag + "initial_node: " + std::to_string(c.initial_node) +
                                 " >= nodes " + std::to_string(c.num_nodes));
    }
}

double ProductVars::max_normalization_error() const {
    double worst = 0.0;
    for (const auto& p : agents)
        for (std::size_t n = 0; n < p.num_nodes; ++n)
            for (std::size_t o = 0; o < p.num_observations; ++o) {
                double sum = 0.0;
                for (std::size_t n2 = 0; n2 < p.num_nodes; ++n2)
                    for (std::size_t a = 0; a < p.num_actions; ++a) sum += p.at(n, o, n2, a);
                worst = std::max(worst, std::abs(sum - 1.0));
            }
    return worst;
}

ProductVars to_product(const FscPolicy& policy) {
    ProductVars out;
    for (const auto& c : policy.agents) {
        AgentProduct p{c.num_nodes, c.num_actions, c.num_observations, {}};
        p.g.resize(c.num_nodes * c.num_observations * c.num_nodes * c.num_actions);
        for (std::size_t n = 0; n < c.num_nodes; ++n)
            for (std::size_t o = 0; o < c.num_observations; ++o)
                for (std::size_t n2 = 0; n2 < c.num_nodes; ++n2)
                    for (std::size_t a = 0; a < c.num_actions; ++a)
                        p.at(n, o, n2, a) = c.y(n, o, n2) * c.x(n2, a);
        out.agents.push_back(std::move(p));
    }
    return out;
}

FscPolicy from_product(const ProductVars& vars, std::span<const std::size_t> initial_nodes) {
    constexpr double kWitness = 1e-12;
    constexpr double kAgreement = 1e-6;
    FscPolicy policy;
    for (std::size_t k = 0; k < vars.agents.size(); ++k) {
        const auto& p = vars.agents[k];
        AgentController c = AgentController::uniform(p.num_nodes, p.num_actions, p.num_observations);
        if (k < initial_nodes.size()) c.initial_node = initial_nodes[k];
        std::vector<bool> witnessed(p.num_nodes, false);
        for (std::size_t n = 0; n < p.num_nodes; ++n)
            for (std::size_t o = 0; o < p.num_observations; ++o)
                for (std::size_t n2 = 0; n2 < p.num_nodes; ++n2) {
                    double y = 0.0;
                    for (std::size_t a = 0; a < p.num_actions; ++a) y += p.at(n, o, n2, a);
                    c.node_law[(n * p.num_observations + o) * p.num_nodes + n2] = y;
                    if (y <= kWitness) continue;
                    for (std::size_t a = 0; a < p.num_actions; ++a) {
                        const double x = p.at(n, o, n2, a) / y;
                        double& slot = c.action_law[n2 * p.num_actions + a];
                        if (!witnessed[n2]) {
                            slot = x;
                        } else if (std::abs(slot - x) > kAgreement) {
                            throw ConsistencyError(
                                "agent " + std::to_string(k) + ": action law of node " +
                                std::to_string(n2) + " differs across witnesses at action " +
                                std::to_string(a) + " (" + std::to_string(slot) + " vs " +
                                std::to_string(x) + ")");
                        }
                    }
                    witnessed[n2] = true;
                }
        policy.agents.push_back(std::move(c));
    }
    return policy;
}

std::size_t sample_action(const AgentController& c, std::size_t node, Rng& rng) {
    return sample_categorical(c.x_row(node), rng);
}

std::size_t sample_next_node(const AgentController& c, std::size_t node, std::size_t obs, Rng& rng) {
    return sample_categorical(c.y_row(node, obs), rng);
}

ControllerStep sample_step(const FscPolicy& policy, std::size_t k, std::size_t node,
                           std::size_t observation, Rng& rng) {
    const auto& c = policy.agents.at(k);
    if (node >= c.num_nodes) throw IndexError("node", node, c.num_nodes);
    if (observation >= c.num_observations)
        throw IndexError("observation", observation, c.num_observations);
    const std::size_t next = sample_next_node(c, node, observation, rng);
    return {sample_action(c, next, rng), next};
}

namespace {

void dirichlet_row(std::span<double> row, Rng& rng, double alpha) {
    double sum = 0.0;
    std::gamma_distribution<double> gamma(alpha, 1.0);
    for (double& v : row) {
        if (alpha == 1.0)
            v = -std::log1p(-uniform01(rng)); // Exp(1), platform independent
        else
            v = gamma(rng);
        sum += v;
    }
    if (sum <= 0.0) {
        for (double& v : row) v = 1.0 / static_cast<double>(row.size());
        return;
    }
    for (double& v : row) v /= sum;
}

} // namespace

AgentController random_controller(std::size_t nodes, std::size_t actions, std::size_t observations,
                                  Rng& rng, double alpha) {
    AgentController c = AgentController::uniform(nodes, actions, observations);
    for (std::size_t n = 0; n < nodes; ++n)
        dirichlet_row({c.action_law.data() + n * actions, actions}, rng, alpha);
    for (std::size_t r = 0; r < nodes * observations; ++r)
        dirichlet_row({c.node_law.data() + r * nodes, nodes}, rng, alpha);
    return c;
}

AgentController deterministic_controller(std::span<const std::size_t> action_of_node,
                                         std::span<const std::size_t> successor,
                                         std::size_t num_actions, std::size_t num_observations) {
    const std::size_t N = action_of_node.size();
    if (successor.size() != N * num_observations)
        throw DimensionError("successor table must have nodes x observations entries");
    AgentController c;
    c.num_nodes = N;
    c.num_actions = num_actions;
    c.num_observations = num_observations;
    c.action_law.assign(N * num_actions, 0.0);
    c.node_law.assign(N * num_observations * N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        if (action_of_node[n] >= num_actions) throw IndexError("action", action_of_node[n], num_actions);
        c.action_law[n * num_actions + action_of_node[n]] = 1.0;
        for (std::size_t o = 0; o < num_observations; ++o) {
            const std::size_t next = successor[n * num_observations + o];
            if (next >= N) throw IndexError("node", next, N);
            c.node_law[(n * num_observations + o) * N + next] = 1.0;
        }
    }
    return c;
}

} // namespace decpomdp
