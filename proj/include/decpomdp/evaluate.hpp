#pragma once

#include "decpomdp/controller.hpp"
#include "decpomdp/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace decpomdp {

enum class ChainClass { unichain_verified, multichain_detected };

std::string to_string(ChainClass c);

/// Long-run joint probability of (node vector, state, joint action).
/// Layout [node_flat][s][joint_action]; node vectors use MixedRadix over
/// the per-agent node counts.
struct OccupancyMeasure {
    std::size_t num_node_vectors = 0;
    std::size_t num_states = 0;
    std::size_t num_joint_actions = 0;
    std::vector<double> pi;

    double at(std::size_t n, std::size_t s, std::size_t ja) const {
        return pi[(n * num_states + s) * num_joint_actions + ja];
    }
    double sum() const;
};

struct StationaryResult {
    Eigen::VectorXd distribution;
    double residual = 0.0; ///< max-norm of mu^T P - mu^T
    ChainClass classification = ChainClass::unichain_verified;
};

struct EvalReport {
    double average_reward = 0.0;
    double stationarity_residual = 0.0;
    ChainClass chain_classification = ChainClass::unichain_verified;
    /// Stationary distribution over (node vector, state), index n * |S| + s.
    std::vector<double> stationary;
    OccupancyMeasure occupancy;
};

struct EvalOptions {
    /// Starting state distribution for the multichain fallback; the model's
    /// own initial distribution when unset. Controllers start at their
    /// initial nodes.
    std::optional<std::vector<double>> initial_states;
};

/// Row-stochastic kernel over (node vector, state) pairs, index n * |S| + s:
///   P[(n,s),(n',s')] = sum_{a,o'} x(a|n) W(s,a,s') prod_k V_k(a_k,s',o'_k) y(n'|n,o')
/// Throws DimensionError when the policy does not fit the model.
Eigen::MatrixXd induced_chain(const DecPomdp& model, const FscPolicy& policy);

/// Solves (P^T - I) mu = 0 with the last equation replaced by sum(mu) = 1.
/// When that system is singular the chain has more than one recurrent class;
/// the result then is the long-run distribution reached from `initial`
/// (required in that case) and is flagged multichain. Throws DataError on
/// non-finite input.
StationaryResult stationary_distribution(const Eigen::MatrixXd& kernel,
                                         const Eigen::VectorXd* initial = nullptr);

EvalReport average_reward(const DecPomdp& model, const FscPolicy& policy,
                          const EvalOptions& options = {});

/// Sensitivity of the average reward to one agent's x and y entries, layouts
/// matching AgentController::action_law and node_law. Entry i of a row p is
/// the derivative along e_i - p (bump entry i, renormalize the row), i.e. the
/// raw partial minus the p-weighted row mean. Adding a constant per row does
/// not change a simplex-projected step, so these serve directly for ascent.
struct AgentGradient {
    std::vector<double> dx;
    std::vector<double> dy;
    /// Set when the point was multichain and finite differences were used.
    bool finite_difference = false;
};

enum class GradientMethod { analytic, finite_difference };

/// Central-difference step used by GradientMethod::finite_difference.
inline constexpr double kFiniteDifferenceStep = 1e-6;

/// Reusable evaluator for one model and one controller shape. Holds the
/// precomputed joint observation products and sparse transition rows, so
/// repeated evaluations (search, gradients) avoid rebuilding them.
class ChainEvaluator {
public:
    ChainEvaluator(const DecPomdp& model, std::vector<std::size_t> nodes_per_agent);

    const DecPomdp& model() const noexcept { return *model_; }
    std::size_t num_node_vectors() const noexcept { return nodes_.size(); }
    std::size_t chain_size() const noexcept { return nodes_.size() * S_; }

    Eigen::MatrixXd kernel(const FscPolicy& policy) const;
    /// Expected immediate reward per (node vector, state).
    Eigen::VectorXd expected_reward(const FscPolicy& policy) const;

    /// Average reward by the route used everywhere: unichain linear solve,
    /// reachable-set fallback otherwise.
    EvalReport evaluate(const FscPolicy& policy, const EvalOptions& options = {},
                        bool with_occupancy = true) const;

    /// Objective only; policy rows are not validated.
    double objective(const FscPolicy& policy, const EvalOptions& options = {}) const;

    AgentGradient gradient(const FscPolicy& policy, std::size_t agent,
                           GradientMethod method = GradientMethod::analytic,
                           const EvalOptions& options = {}) const;

private:
    struct Solved;
    Solved solve(const FscPolicy& policy, const EvalOptions& options) const;
    AgentGradient analytic_gradient(const FscPolicy& policy, std::size_t agent,
                                    const Solved& solved) const;
    AgentGradient fd_gradient(const FscPolicy& policy, std::size_t agent,
                              const EvalOptions& options) const;
    std::vector<double> joint_action_law(const FscPolicy& policy) const;
    std::vector<double> joint_node_law(const FscPolicy& policy) const;

    const DecPomdp* model_;
    std::size_t K_, S_, A_, O_, JA_, JO_;
    MixedRadix nodes_;
    std::vector<std::size_t> ja_digits_, jo_digits_, node_digits_;
    std::vector<double> joint_obs_; ///< [ja][s'][jo] = prod_k V_k(a_k, s', o_k)
    struct Entry {
        std::size_t next;
        double p;
    };
    std::vector<std::vector<Entry>> sparse_rows_; ///< [(s * JA + ja)]
};

AgentGradient gradient(const DecPomdp& model, const FscPolicy& policy, std::size_t agent,
                       GradientMethod method = GradientMethod::analytic);

/// Result of exhaustive search over deterministic controllers.
struct EnumerationResult {
    FscPolicy policy;
    double average_reward = 0.0;
    std::size_t candidates = 0;
};

inline constexpr double kEnumerationGuard = 1e7;

/// Number of deterministic joint controllers with the given node counts.
double deterministic_search_space(const DecPomdp& model, std::span<const std::size_t> nodes_per_agent);

/// Evaluates every deterministic joint controller (initial nodes 0) and
/// returns the best. Ties within 1e-9 keep the lexicographically smallest
/// encoding: agent 0 first, per agent the node actions then the successor
/// table. Throws GuardError above kEnumerationGuard candidates.
EnumerationResult enumerate_deterministic(const DecPomdp& model,
                                          std::span<const std::size_t> nodes_per_agent,
                                          const EvalOptions& options = {});

} // namespace decpomdp
