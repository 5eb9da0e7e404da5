#include "decpomdp/solve.hpp"

#include "decpomdp/errors.hpp"
#include "decpomdp/parallel.hpp"
#include "decpomdp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace decpomdp {

namespace {

constexpr double kMinStep = 1e-8;
constexpr std::size_t kStallSweeps = 3;
constexpr double kRestartTie = 1e-9;

struct SweepState {
    std::vector<double> step; // per agent, carried across sweeps
    std::size_t fd_steps = 0;
};

// Projected step on agent k's tables: x <- P(x + a dx), y <- P(y + a dy) row-wise.
AgentController ascend(const AgentController& c, const AgentGradient& g, double alpha) {
    AgentController out = c;
    for (std::size_t i = 0; i < out.action_law.size(); ++i) out.action_law[i] += alpha * g.dx[i];
    for (std::size_t i = 0; i < out.node_law.size(); ++i) out.node_law[i] += alpha * g.dy[i];
    for (std::size_t n = 0; n < out.num_nodes; ++n)
        project_to_simplex({out.action_law.data() + n * out.num_actions, out.num_actions});
    for (std::size_t r = 0; r < out.num_nodes * out.num_observations; ++r)
        project_to_simplex({out.node_law.data() + r * out.num_nodes, out.num_nodes});
    return out;
}

double sweep(const ChainEvaluator& evaluator, FscPolicy& policy, double current,
             const SolveConfig& config, SweepState& state) {
    for (std::size_t k = 0; k < policy.num_agents(); ++k) {
        double& alpha = state.step[k];
        for (std::size_t it = 0; it < config.inner_steps; ++it) {
            const AgentGradient g = evaluator.gradient(policy, k);
            if (g.finite_difference) ++state.fd_steps;
            bool accepted = false;
            while (alpha >= kMinStep) {
                AgentController candidate = ascend(policy.agents[k], g, alpha);
                if (candidate == policy.agents[k]) break;
                std::swap(candidate, policy.agents[k]);
                const double value = evaluator.objective(policy);
                if (std::isfinite(value) && value >= current) {
                    current = value;
                    accepted = true;
                    break;
                }
                std::swap(candidate, policy.agents[k]);
                alpha *= 0.5;
            }
            if (!accepted) {
                alpha = std::max(alpha, kMinStep);
                break;
            }
            alpha = std::min(2.0 * alpha, config.step_size);
        }
    }
    return current;
}

struct RestartOutcome {
    FscPolicy policy;
    double objective = 0.0;
    std::vector<double> history;
    std::size_t fd_steps = 0;
};

RestartOutcome run_restart(const ChainEvaluator& evaluator, const SolveConfig& config,
                           std::size_t restart) {
    const DecPomdp& model = evaluator.model();
    Rng rng = make_stream(config.seed, restart);
    RestartOutcome out;
    for (std::size_t N : config.nodes_per_agent)
        out.policy.agents.push_back(
            random_controller(N, model.num_actions(), model.num_observations(), rng));
    SweepState state{std::vector<double>(model.num_agents(), config.step_size), 0};
    double current = evaluator.objective(out.policy);
    out.history.push_back(current);
    std::size_t stalled = 0;
    for (std::size_t it = 0; it < config.max_outer_iters && stalled < kStallSweeps; ++it) {
        const double next = sweep(evaluator, out.policy, current, config, state);
        out.history.push_back(next);
        stalled = next - current < config.tol ? stalled + 1 : 0;
        current = next;
    }
    out.objective = current;
    out.fd_steps = state.fd_steps;
    return out;
}

} // namespace

void check_config(const SolveConfig& c, std::size_t num_agents) {
    if (c.nodes_per_agent.size() != num_agents)
        throw ConfigError("nodes_per_agent must list one count per agent (" +
                          std::to_string(num_agents) + ")");
    for (std::size_t n : c.nodes_per_agent)
        if (n < 1) throw ConfigError("nodes_per_agent entries must be >= 1");
    if (c.restarts < 1) throw ConfigError("restarts must be >= 1");
    if (c.max_outer_iters < 1) throw ConfigError("max_outer_iters must be >= 1");
    if (c.inner_steps < 1) throw ConfigError("inner_steps must be >= 1");
    if (!(c.step_size > 0.0)) throw ConfigError("step_size must be > 0");
    if (!(c.tol > 0.0)) throw ConfigError("tol must be > 0");
}

double objective(const DecPomdp& model, const FscPolicy& policy) {
    return average_reward(model, policy).average_reward;
}

void project_to_simplex(std::span<double> v) {
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cumulative += u[i];
        const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    for (double& x : v) x = std::max(x - theta, 0.0);
}

FscPolicy best_response_sweep(const DecPomdp& model, const FscPolicy& policy, const SolveConfig& config) {
    check_compatible(model, policy);
    const ChainEvaluator evaluator(model, policy.nodes_per_agent());
    FscPolicy out = policy;
    SweepState state{std::vector<double>(model.num_agents(), config.step_size), 0};
    sweep(evaluator, out, evaluator.objective(out), config, state);
    return out;
}

SolveResult solve(const DecPomdp& model, const SolveConfig& config) {
    check_config(config, model.num_agents());
    const ChainEvaluator evaluator(model, config.nodes_per_agent);
    std::vector<RestartOutcome> outcomes(config.restarts);
    parallel_for(config.restarts, [&](std::size_t r) { outcomes[r] = run_restart(evaluator, config, r); });

    SolveResult result;
    std::size_t best = 0;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        result.restarts_summary.push_back(outcomes[r].objective);
        result.finite_difference_steps += outcomes[r].fd_steps;
        if (outcomes[r].objective > outcomes[best].objective + kRestartTie) best = r;
    }
    result.best_restart = best;
    result.policy = std::move(outcomes[best].policy);
    result.history = std::move(outcomes[best].history);
    result.objective = evaluator.evaluate(result.policy, {}, false).average_reward;
    return result;
}

} // namespace decpomdp
