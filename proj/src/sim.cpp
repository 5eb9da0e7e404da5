#include "decpomdp/sim.hpp"

#include "decpomdp/errors.hpp"
#include "decpomdp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace decpomdp {

void check_config(const SimConfig& c, const DecPomdp& model) {
    if (c.replications < 1) throw ConfigError("replications must be >= 1");
    if (c.steps <= c.burn_in) throw ConfigError("steps must exceed burn_in");
    if (c.initial_state_distribution) {
        const auto& d = *c.initial_state_distribution;
        if (d.size() != model.num_states())
            throw ConfigError("initial_state_distribution must have one entry per state");
        double sum = 0.0;
        for (double p : d) {
            if (!(p >= 0.0)) throw ConfigError("initial_state_distribution entries must be >= 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kProbTolerance)
            throw ConfigError("initial_state_distribution must sum to 1");
    }
    if (!c.observation_order.empty()) {
        std::vector<std::size_t> sorted = c.observation_order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 0; k < sorted.size(); ++k)
            if (sorted[k] != k || sorted.size() != model.num_agents())
                throw ConfigError("observation_order must be a permutation of the agents");
    }
}

StepOutcome step(const DecPomdp& model, const FscPolicy& policy, std::size_t state,
                 std::span<const std::size_t> nodes, Rng& rng,
                 std::span<const std::size_t> observation_order) {
    const std::size_t K = model.num_agents();
    StepOutcome out;
    out.actions.resize(K);
    for (std::size_t k = 0; k < K; ++k) out.actions[k] = sample_action(policy.agents[k], nodes[k], rng);
    const std::size_t ja = model.joint_actions().encode(out.actions);
    out.reward = model.reward_unchecked(state, ja);
    out.next_state = sample_categorical(model.transition_row(state, ja), rng);
    out.observations.resize(K);
    for (std::size_t i = 0; i < K; ++i) {
        const std::size_t k = observation_order.empty() ? i : observation_order[i];
        out.observations[k] = sample_categorical(model.obs_row(k, out.actions[k], out.next_state), rng);
    }
    out.next_nodes.resize(K);
    for (std::size_t k = 0; k < K; ++k)
        out.next_nodes[k] = sample_next_node(policy.agents[k], nodes[k], out.observations[k], rng);
    return out;
}

namespace {

struct Replication {
    std::vector<SimRecord> records;
    std::vector<double> rewards;
    double mean = 0.0;
};

Replication replicate(const DecPomdp& model, const FscPolicy& policy, const SimConfig& c,
                      const std::vector<double>& init, std::size_t r) {
    Rng rng = make_stream(c.seed, r);
    Replication out;
    out.rewards.resize(c.steps);
    if (c.record_trace) out.records.reserve(c.steps);
    std::size_t state = sample_categorical(init, rng);
    std::vector<std::size_t> nodes = policy.initial_nodes();
    double total = 0.0;
    for (std::size_t t = 0; t < c.steps; ++t) {
        StepOutcome o = step(model, policy, state, nodes, rng, c.observation_order);
        out.rewards[t] = o.reward;
        if (t >= c.burn_in) total += o.reward;
        if (c.record_trace)
            out.records.push_back({r, t, state, nodes, o.actions, o.observations, o.reward});
        state = o.next_state;
        nodes = std::move(o.next_nodes);
    }
    out.mean = total / static_cast<double>(c.steps - c.burn_in);
    return out;
}

} // namespace

SimTrace run(const DecPomdp& model, const FscPolicy& policy, const SimConfig& config) {
    check_compatible(model, policy);
    check_config(config, model);
    const std::vector<double> init =
        config.initial_state_distribution ? *config.initial_state_distribution
                                          : model.initial_distribution();

    std::vector<Replication> reps(config.replications);
    parallel_for(config.replications,
                 [&](std::size_t r) { reps[r] = replicate(model, policy, config, init, r); });

    SimTrace trace;
    const double R = static_cast<double>(config.replications);
    trace.reward_per_step.assign(config.steps, 0.0);
    for (auto& rep : reps) {
        trace.replication_means.push_back(rep.mean);
        for (std::size_t t = 0; t < config.steps; ++t) trace.reward_per_step[t] += rep.rewards[t] / R;
        std::move(rep.records.begin(), rep.records.end(), std::back_inserter(trace.records));
    }
    trace.pooled_mean =
        std::accumulate(trace.replication_means.begin(), trace.replication_means.end(), 0.0) / R;
    if (config.replications > 1) {
        double ss = 0.0;
        for (double m : trace.replication_means) ss += (m - trace.pooled_mean) * (m - trace.pooled_mean);
        trace.standard_error = std::sqrt(ss / (R - 1.0) / R);
    }
    return trace;
}

} // namespace decpomdp
