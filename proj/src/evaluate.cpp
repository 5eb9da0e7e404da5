#include "decpomdp/evaluate.hpp"

#include "decpomdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace decpomdp {

std::string to_string(ChainClass c) {
    return c == ChainClass::unichain_verified ? "unichain-verified" : "multichain-detected";
}

double OccupancyMeasure::sum() const {
    double total = 0.0;
    for (double p : pi) total += p;
    return total;
}

namespace {

// Reciprocal condition estimate below which the replaced system is treated
// as singular and the rank is checked explicitly.
constexpr double kRcondFloor = 1e-13;
constexpr double kRankThreshold = 1e-10;
constexpr int kMaxSquarings = 20; // 2^20 lazy steps, roughly 1e6
constexpr double kPowerTolerance = 1e-12;

Eigen::MatrixXd replaced_system(const Eigen::MatrixXd& P) {
    const Eigen::Index N = P.rows();
    Eigen::MatrixXd M = P.transpose();
    M.diagonal().array() -= 1.0;
    M.row(N - 1).setOnes();
    return M;
}

double balance_residual(const Eigen::MatrixXd& P, const Eigen::VectorXd& mu) {
    if (mu.size() == 0) return 0.0;
    return (P.transpose() * mu - mu).cwiseAbs().maxCoeff();
}

// Unichain iff the replaced system is non-singular: the rows of P^T - I sum to
// zero, so dropping one keeps its rank, and 1 is never in that row space.
bool is_unichain(const Eigen::MatrixXd& P, const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
    if (lu.rcond() > kRcondFloor) return true;
    Eigen::MatrixXd A = P.transpose();
    A.diagonal().array() -= 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> full(A);
    full.setThreshold(kRankThreshold);
    return full.rank() == P.rows() - 1;
}

std::vector<Eigen::Index> reachable_from(const Eigen::MatrixXd& P, const Eigen::VectorXd& init) {
    const Eigen::Index N = P.rows();
    std::vector<char> seen(static_cast<std::size_t>(N), 0);
    std::deque<Eigen::Index> queue;
    for (Eigen::Index i = 0; i < N; ++i)
        if (init[i] > 0.0) {
            seen[i] = 1;
            queue.push_back(i);
        }
    while (!queue.empty()) {
        const Eigen::Index i = queue.front();
        queue.pop_front();
        for (Eigen::Index j = 0; j < N; ++j)
            if (!seen[j] && P(i, j) > 0.0) {
                seen[j] = 1;
                queue.push_back(j);
            }
    }
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < N; ++i)
        if (seen[i]) out.push_back(i);
    return out;
}

// Long-run distribution from `init` on a chain with several recurrent classes.
Eigen::VectorXd multichain_limit(const Eigen::MatrixXd& P, const Eigen::VectorXd& init) {
    const auto keep = reachable_from(P, init);
    const Eigen::Index R = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd PR(R, R);
    Eigen::VectorXd v(R);
    for (Eigen::Index a = 0; a < R; ++a) {
        v[a] = init[keep[a]];
        for (Eigen::Index b = 0; b < R; ++b) PR(a, b) = P(keep[a], keep[b]);
    }
    Eigen::VectorXd limit;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(replaced_system(PR));
    if (is_unichain(PR, lu)) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(R);
        rhs[R - 1] = 1.0;
        limit = lu.solve(rhs);
    } else {
        // Power iteration on the lazy chain (P + I) / 2, which has the same
        // stationary laws but no periodicity, accelerated by squaring.
        Eigen::MatrixXd Q = 0.5 * (PR + Eigen::MatrixXd::Identity(R, R));
        for (int m = 0; m < kMaxSquarings; ++m) {
            Eigen::VectorXd next = Q.transpose() * v;
            const double change = (next - v).cwiseAbs().maxCoeff();
            v = std::move(next);
            if (change < kPowerTolerance) break;
            Q = Q * Q;
        }
        limit = v / v.sum();
    }
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(P.rows());
    for (Eigen::Index a = 0; a < R; ++a) mu[keep[a]] = limit[a];
    return mu;
}

void check_finite(const Eigen::MatrixXd& P) {
    if (!P.allFinite()) throw DataError("kernel contains NaN or Inf");
}

} // namespace

StationaryResult stationary_distribution(const Eigen::MatrixXd& kernel, const Eigen::VectorXd* initial) {
    if (kernel.rows() != kernel.cols() || kernel.rows() == 0)
        throw DimensionError("kernel must be a non-empty square matrix");
    check_finite(kernel);
    const Eigen::Index N = kernel.rows();
    StationaryResult out;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(replaced_system(kernel));
    if (is_unichain(kernel, lu)) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
        rhs[N - 1] = 1.0;
        out.distribution = lu.solve(rhs);
        out.classification = ChainClass::unichain_verified;
    } else {
        const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(N, 1.0 / static_cast<double>(N));
        out.distribution = multichain_limit(kernel, initial ? *initial : uniform);
        out.classification = ChainClass::multichain_detected;
    }
    out.residual = balance_residual(kernel, out.distribution);
    return out;
}

// ---------------------------------------------------------------------------

struct ChainEvaluator::Solved {
    std::vector<double> xj, yj;
    Eigen::MatrixXd P;
    Eigen::VectorXd c;
    Eigen::VectorXd mu;
    double rho = 0.0;
    double residual = 0.0;
    bool unichain = true;
    std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
};

ChainEvaluator::ChainEvaluator(const DecPomdp& model, std::vector<std::size_t> nodes_per_agent)
    : model_(&model),
      K_(model.num_agents()),
      S_(model.num_states()),
      A_(model.num_actions()),
      O_(model.num_observations()),
      JA_(model.num_joint_actions()),
      JO_(model.num_joint_observations()) {
    if (nodes_per_agent.size() != K_)
        throw DimensionError("agents: " + std::to_string(nodes_per_agent.size()) +
                             " node counts for a model with " + std::to_string(K_) + " agents");
    nodes_ = MixedRadix(std::move(nodes_per_agent));
    ja_digits_ = model.joint_actions().digit_table();
    jo_digits_ = model.joint_observations().digit_table();
    node_digits_ = nodes_.digit_table();

    joint_obs_.assign(JA_ * S_ * JO_, 0.0);
    for (std::size_t ja = 0; ja < JA_; ++ja)
        for (std::size_t s2 = 0; s2 < S_; ++s2)
            for (std::size_t jo = 0; jo < JO_; ++jo) {
                double q = 1.0;
                for (std::size_t k = 0; k < K_ && q != 0.0; ++k)
                    q *= model.obs_row(k, ja_digits_[ja * K_ + k], s2)[jo_digits_[jo * K_ + k]];
                joint_obs_[(ja * S_ + s2) * JO_ + jo] = q;
            }

    sparse_rows_.resize(S_ * JA_);
    for (std::size_t s = 0; s < S_; ++s)
        for (std::size_t ja = 0; ja < JA_; ++ja) {
            auto row = model.transition_row(s, ja);
            auto& out = sparse_rows_[s * JA_ + ja];
            for (std::size_t s2 = 0; s2 < S_; ++s2)
                if (row[s2] != 0.0) out.push_back({s2, row[s2]});
        }
}

std::vector<double> ChainEvaluator::joint_action_law(const FscPolicy& policy) const {
    const std::size_t NN = nodes_.size();
    std::vector<double> xj(NN * JA_);
    for (std::size_t n = 0; n < NN; ++n)
        for (std::size_t ja = 0; ja < JA_; ++ja) {
            double p = 1.0;
            for (std::size_t k = 0; k < K_ && p != 0.0; ++k)
                p *= policy.agents[k].x(node_digits_[n * K_ + k], ja_digits_[ja * K_ + k]);
            xj[n * JA_ + ja] = p;
        }
    return xj;
}

std::vector<double> ChainEvaluator::joint_node_law(const FscPolicy& policy) const {
    const std::size_t NN = nodes_.size();
    std::vector<double> yj(NN * JO_ * NN);
    for (std::size_t n = 0; n < NN; ++n)
        for (std::size_t jo = 0; jo < JO_; ++jo)
            for (std::size_t n2 = 0; n2 < NN; ++n2) {
                double p = 1.0;
                for (std::size_t k = 0; k < K_ && p != 0.0; ++k)
                    p *= policy.agents[k].y(node_digits_[n * K_ + k], jo_digits_[jo * K_ + k],
                                            node_digits_[n2 * K_ + k]);
                yj[(n * JO_ + jo) * NN + n2] = p;
            }
    return yj;
}

namespace {

void check_shape(const DecPomdp& model, const FscPolicy& policy, const MixedRadix& nodes) {
    check_compatible(model, policy);
    for (std::size_t k = 0; k < policy.num_agents(); ++k)
        if (policy.agents[k].num_nodes != nodes.radix(k))
            throw DimensionError("agent " + std::to_string(k) + " nodes: controller has " +
                                 std::to_string(policy.agents[k].num_nodes) + ", evaluator expects " +
                                 std::to_string(nodes.radix(k)));
}

Eigen::MatrixXd build_kernel(std::size_t NN, std::size_t S, std::size_t JA, std::size_t JO,
                             const std::vector<double>& xj, const std::vector<double>& yj,
                             const std::vector<double>& joint_obs, const auto& sparse_rows) {
    const Eigen::Index N = static_cast<Eigen::Index>(NN * S);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
    std::vector<double> flow(S * JO);
    for (std::size_t n = 0; n < NN; ++n)
        for (std::size_t s = 0; s < S; ++s) {
            std::fill(flow.begin(), flow.end(), 0.0);
            for (std::size_t ja = 0; ja < JA; ++ja) {
                const double px = xj[n * JA + ja];
                if (px == 0.0) continue;
                for (const auto& e : sparse_rows[s * JA + ja]) {
                    const double f = px * e.p;
                    const double* q = &joint_obs[(ja * S + e.next) * JO];
                    double* dst = &flow[e.next * JO];
                    for (std::size_t jo = 0; jo < JO; ++jo) dst[jo] += f * q[jo];
                }
            }
            const Eigen::Index row = static_cast<Eigen::Index>(n * S + s);
            for (std::size_t s2 = 0; s2 < S; ++s2)
                for (std::size_t jo = 0; jo < JO; ++jo) {
                    const double t = flow[s2 * JO + jo];
                    if (t == 0.0) continue;
                    const double* y = &yj[(n * JO + jo) * NN];
                    for (std::size_t n2 = 0; n2 < NN; ++n2)
                        if (y[n2] != 0.0) P(row, static_cast<Eigen::Index>(n2 * S + s2)) += t * y[n2];
                }
        }
    return P;
}

void center_rows(const std::vector<double>& probs, std::vector<double>& grad, std::size_t width) {
    for (std::size_t r = 0; r < probs.size() / width; ++r) {
        double mean = 0.0;
        for (std::size_t i = 0; i < width; ++i) mean += probs[r * width + i] * grad[r * width + i];
        for (std::size_t i = 0; i < width; ++i) grad[r * width + i] -= mean;
    }
}

} // namespace

Eigen::MatrixXd ChainEvaluator::kernel(const FscPolicy& policy) const {
    check_shape(*model_, policy, nodes_);
    return build_kernel(nodes_.size(), S_, JA_, JO_, joint_action_law(policy), joint_node_law(policy),
                        joint_obs_, sparse_rows_);
}

Eigen::VectorXd ChainEvaluator::expected_reward(const FscPolicy& policy) const {
    check_shape(*model_, policy, nodes_);
    const auto xj = joint_action_law(policy);
    const std::size_t NN = nodes_.size();
    Eigen::VectorXd c(static_cast<Eigen::Index>(NN * S_));
    for (std::size_t n = 0; n < NN; ++n)
        for (std::size_t s = 0; s < S_; ++s) {
            double v = 0.0;
            for (std::size_t ja = 0; ja < JA_; ++ja)
                if (xj[n * JA_ + ja] != 0.0) v += xj[n * JA_ + ja] * model_->reward_unchecked(s, ja);
            c[static_cast<Eigen::Index>(n * S_ + s)] = v;
        }
    return c;
}

ChainEvaluator::Solved ChainEvaluator::solve(const FscPolicy& policy, const EvalOptions& options) const {
    check_shape(*model_, policy, nodes_);
    Solved out;
    const std::size_t NN = nodes_.size();
    out.xj = joint_action_law(policy);
    out.yj = joint_node_law(policy);
    out.P = build_kernel(NN, S_, JA_, JO_, out.xj, out.yj, joint_obs_, sparse_rows_);
    check_finite(out.P);
    out.c = expected_reward(policy);
    if (!out.c.allFinite()) throw DataError("expected reward contains NaN or Inf");

    const Eigen::Index N = out.P.rows();
    out.lu.emplace(replaced_system(out.P));
    out.unichain = is_unichain(out.P, *out.lu);
    if (out.unichain) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
        rhs[N - 1] = 1.0;
        out.mu = out.lu->solve(rhs);
    } else {
        const std::vector<double> states =
            options.initial_states ? *options.initial_states : model_->initial_distribution();
        if (states.size() != S_)
            throw DimensionError("initial state distribution has " + std::to_string(states.size()) +
                                 " entries, model has " + std::to_string(S_) + " states");
        Eigen::VectorXd init = Eigen::VectorXd::Zero(N);
        const std::size_t n0 = nodes_.encode(policy.initial_nodes());
        for (std::size_t s = 0; s < S_; ++s) init[static_cast<Eigen::Index>(n0 * S_ + s)] = states[s];
        out.mu = multichain_limit(out.P, init);
    }
    out.rho = out.mu.dot(out.c);
    out.residual = balance_residual(out.P, out.mu);
    return out;
}

double ChainEvaluator::objective(const FscPolicy& policy, const EvalOptions& options) const {
    return solve(policy, options).rho;
}

EvalReport ChainEvaluator::evaluate(const FscPolicy& policy, const EvalOptions& options,
                                    bool with_occupancy) const {
    const Solved sv = solve(policy, options);
    EvalReport report;
    report.average_reward = sv.rho;
    report.stationarity_residual = sv.residual;
    report.chain_classification =
        sv.unichain ? ChainClass::unichain_verified : ChainClass::multichain_detected;
    report.stationary.resize(static_cast<std::size_t>(sv.mu.size()));
    for (Eigen::Index i = 0; i < sv.mu.size(); ++i)
        report.stationary[static_cast<std::size_t>(i)] = sv.mu[i] < 0.0 ? 0.0 : sv.mu[i];
    if (with_occupancy) {
        const std::size_t NN = nodes_.size();
        OccupancyMeasure& occ = report.occupancy;
        occ.num_node_vectors = NN;
        occ.num_states = S_;
        occ.num_joint_actions = JA_;
        occ.pi.assign(NN * S_ * JA_, 0.0);
        for (std::size_t n = 0; n < NN; ++n)
            for (std::size_t s = 0; s < S_; ++s) {
                const double m = report.stationary[n * S_ + s];
                for (std::size_t ja = 0; ja < JA_; ++ja)
                    occ.pi[(n * S_ + s) * JA_ + ja] = m * sv.xj[n * JA_ + ja];
            }
    }
    return report;
}

AgentGradient ChainEvaluator::gradient(const FscPolicy& policy, std::size_t agent,
                                       GradientMethod method, const EvalOptions& options) const {
    if (agent >= K_) throw IndexError("agent", agent, K_);
    if (method == GradientMethod::finite_difference) return fd_gradient(policy, agent, options);
    const Solved sv = solve(policy, options);
    if (!sv.unichain) return fd_gradient(policy, agent, options);
    return analytic_gradient(policy, agent, sv);
}

// Raw partials: d(rho) = mu^T (dc + dP h), where h solves the transposed
// replaced system (h = -lambda with lambda[last] zeroed). Each row is then
// centred by its probability-weighted mean, giving the derivative along
// e_i - row, which is the direction a renormalized perturbation moves.
AgentGradient ChainEvaluator::analytic_gradient(const FscPolicy& policy, std::size_t k,
                                                const Solved& sv) const {
    const std::size_t NN = nodes_.size();
    const Eigen::Index N = sv.P.rows();
    // With P M = L U, M^T = U^T L^T P, so solve U^T then L^T then permute back.
    const Eigen::MatrixXd& lu = sv.lu->matrixLU();
    Eigen::VectorXd z = lu.triangularView<Eigen::Upper>().transpose().solve(sv.c);
    z = lu.triangularView<Eigen::UnitLower>().transpose().solve(z);
    Eigen::VectorXd h = -(sv.lu->permutationP().transpose() * z);
    h[N - 1] = 0.0;

    const AgentController& me = policy.agents[k];
    AgentGradient g;
    g.dx.assign(me.action_law.size(), 0.0);
    g.dy.assign(me.node_law.size(), 0.0);

    // hy[n][jo][s'] = sum_{n'} yj(n'|n, jo) h(n', s')
    std::vector<double> hy(NN * JO_ * S_, 0.0);
    for (std::size_t n = 0; n < NN; ++n)
        for (std::size_t jo = 0; jo < JO_; ++jo) {
            const double* y = &sv.yj[(n * JO_ + jo) * NN];
            double* dst = &hy[(n * JO_ + jo) * S_];
            for (std::size_t n2 = 0; n2 < NN; ++n2)
                if (y[n2] != 0.0)
                    for (std::size_t s2 = 0; s2 < S_; ++s2)
                        dst[s2] += y[n2] * h[static_cast<Eigen::Index>(n2 * S_ + s2)];
        }

    // Product of the other agents' action probabilities.
    auto others_x = [&](std::size_t n, std::size_t ja) {
        double p = 1.0;
        for (std::size_t j = 0; j < K_ && p != 0.0; ++j)
            if (j != k) p *= policy.agents[j].x(node_digits_[n * K_ + j], ja_digits_[ja * K_ + j]);
        return p;
    };

    // flow[n][jo][s'] = sum_s mu(n,s) sum_a xj(a|n) W(s,a,s') Q(a,s',jo)
    std::vector<double> flow(NN * JO_ * S_, 0.0);
    for (std::size_t n = 0; n < NN; ++n)
        for (std::size_t s = 0; s < S_; ++s) {
            const double m = sv.mu[static_cast<Eigen::Index>(n * S_ + s)];
            if (m == 0.0) continue;
            for (std::size_t ja = 0; ja < JA_; ++ja) {
                const double ox = others_x(n, ja);
                if (ox == 0.0) continue;
                const double px = sv.xj[n * JA_ + ja];
                double G = model_->reward_unchecked(s, ja);
                for (const auto& e : sparse_rows_[s * JA_ + ja]) {
                    const double* q = &joint_obs_[(ja * S_ + e.next) * JO_];
                    double acc = 0.0;
                    for (std::size_t jo = 0; jo < JO_; ++jo) {
                        acc += q[jo] * hy[(n * JO_ + jo) * S_ + e.next];
                        if (px != 0.0) flow[(n * JO_ + jo) * S_ + e.next] += m * px * e.p * q[jo];
                    }
                    G += e.p * acc;
                }
                const std::size_t nk = node_digits_[n * K_ + k];
                const std::size_t ak = ja_digits_[ja * K_ + k];
                g.dx[nk * A_ + ak] += m * ox * G;
            }
        }

    const std::size_t Nk = me.num_nodes;
    for (std::size_t n = 0; n < NN; ++n) {
        const std::size_t nk = node_digits_[n * K_ + k];
        for (std::size_t jo = 0; jo < JO_; ++jo) {
            const std::size_t ok = jo_digits_[jo * K_ + k];
            const double* f = &flow[(n * JO_ + jo) * S_];
            for (std::size_t n2 = 0; n2 < NN; ++n2) {
                double oy = 1.0;
                for (std::size_t j = 0; j < K_ && oy != 0.0; ++j)
                    if (j != k)
                        oy *= policy.agents[j].y(node_digits_[n * K_ + j], jo_digits_[jo * K_ + j],
                                                 node_digits_[n2 * K_ + j]);
                if (oy == 0.0) continue;
                double acc = 0.0;
                for (std::size_t s2 = 0; s2 < S_; ++s2)
                    acc += f[s2] * h[static_cast<Eigen::Index>(n2 * S_ + s2)];
                g.dy[(nk * O_ + ok) * Nk + node_digits_[n2 * K_ + k]] += oy * acc;
            }
        }
    }
    center_rows(me.action_law, g.dx, A_);
    center_rows(me.node_law, g.dy, Nk);
    return g;
}

AgentGradient ChainEvaluator::fd_gradient(const FscPolicy& policy, std::size_t k,
                                          const EvalOptions& options) const {
    const double step = kFiniteDifferenceStep;
    AgentGradient g;
    g.finite_difference = true;
    FscPolicy probe = policy;

    // The perturbed row is renormalized so every probe is a proper policy;
    // entries closer than one step to zero use a forward difference.
    auto derivative = [&](std::vector<double>& table, std::size_t idx, std::size_t row_begin,
                          std::size_t row_len) {
        const std::vector<double> saved(table.begin() + static_cast<std::ptrdiff_t>(row_begin),
                                        table.begin() + static_cast<std::ptrdiff_t>(row_begin + row_len));
        auto restore = [&] {
            std::copy(saved.begin(), saved.end(), table.begin() + static_cast<std::ptrdiff_t>(row_begin));
        };
        auto shifted = [&](double delta) {
            restore();
            table[idx] += delta;
            double sum = 0.0;
            for (std::size_t i = 0; i < row_len; ++i) sum += table[row_begin + i];
            for (std::size_t i = 0; i < row_len; ++i) table[row_begin + i] /= sum;
            return objective(probe, options);
        };
        double d;
        if (table[idx] - step >= 0.0) {
            d = (shifted(step) - shifted(-step)) / (2.0 * step);
        } else {
            const double base = (restore(), objective(probe, options));
            d = (shifted(step) - base) / step;
        }
        restore();
        return d;
    };

    AgentController& c = probe.agents[k];
    g.dx.resize(c.action_law.size());
    for (std::size_t i = 0; i < c.action_law.size(); ++i) {
        const std::size_t row = i / c.num_actions;
        g.dx[i] = derivative(c.action_law, i, row * c.num_actions, c.num_actions);
    }
    g.dy.resize(c.node_law.size());
    for (std::size_t i = 0; i < c.node_law.size(); ++i) {
        const std::size_t row = i / c.num_nodes;
        g.dy[i] = derivative(c.node_law, i, row * c.num_nodes, c.num_nodes);
    }
    return g;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd induced_chain(const DecPomdp& model, const FscPolicy& policy) {
    check_compatible(model, policy);
    return ChainEvaluator(model, policy.nodes_per_agent()).kernel(policy);
}

EvalReport average_reward(const DecPomdp& model, const FscPolicy& policy, const EvalOptions& options) {
    check_compatible(model, policy);
    return ChainEvaluator(model, policy.nodes_per_agent()).evaluate(policy, options);
}

AgentGradient gradient(const DecPomdp& model, const FscPolicy& policy, std::size_t agent,
                       GradientMethod method) {
    check_compatible(model, policy);
    return ChainEvaluator(model, policy.nodes_per_agent()).gradient(policy, agent, method);
}

double deterministic_search_space(const DecPomdp& model, std::span<const std::size_t> nodes) {
    double total = 1.0;
    const double A = static_cast<double>(model.num_actions());
    const double O = static_cast<double>(model.num_observations());
    for (std::size_t N : nodes) {
        const double n = static_cast<double>(N);
        total *= std::pow(A, n) * std::pow(n, n * O);
    }
    return total;
}

EnumerationResult enumerate_deterministic(const DecPomdp& model, std::span<const std::size_t> nodes,
                                          const EvalOptions& options) {
    if (nodes.size() != model.num_agents())
        throw DimensionError("agents: " + std::to_string(nodes.size()) + " node counts for " +
                             std::to_string(model.num_agents()) + " agents");
    for (std::size_t N : nodes)
        if (N == 0) throw ConfigError("nodes must be at least 1 per agent");
    const double space = deterministic_search_space(model, nodes);
    if (space > kEnumerationGuard) throw GuardError(space, kEnumerationGuard);

    const std::size_t A = model.num_actions();
    const std::size_t O = model.num_observations();
    std::vector<std::size_t> radices;
    for (std::size_t N : nodes) {
        radices.insert(radices.end(), N, A);
        radices.insert(radices.end(), N * O, N);
    }
    const MixedRadix encoding(radices);
    const ChainEvaluator evaluator(model, std::vector<std::size_t>(nodes.begin(), nodes.end()));

    std::vector<std::size_t> digits(encoding.positions());
    auto build = [&](std::size_t flat) {
        encoding.decode(flat, digits);
        FscPolicy policy;
        std::size_t pos = 0;
        for (std::size_t N : nodes) {
            std::span<const std::size_t> acts(digits.data() + pos, N);
            std::span<const std::size_t> succ(digits.data() + pos + N, N * O);
            policy.agents.push_back(deterministic_controller(acts, succ, A, O));
            pos += N + N * O;
        }
        return policy;
    };

    EnumerationResult best;
    best.average_reward = -std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t f = 0; f < encoding.size(); ++f) {
        const double value = evaluator.objective(build(f), options);
        if (value > best.average_reward + 1e-9) {
            best.average_reward = value;
            best_index = f;
        }
    }
    best.policy = build(best_index);
    best.candidates = encoding.size();
    return best;
}

} // namespace decpomdp
