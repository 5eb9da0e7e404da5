#pragma once

#include "decpomdp/controller.hpp"
#include "decpomdp/model.hpp"
#include "decpomdp/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace decpomdp {

struct SimConfig {
    std::size_t steps = 100000;
    std::size_t replications = 10;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 0;
    /// Explicit start distribution over joint states; the model's own when unset.
    std::optional<std::vector<double>> initial_state_distribution;
    /// Keep every per-step record (memory grows with steps * replications).
    bool record_trace = false;
    /// Agent order used when sampling observations; index order when empty.
    std::vector<std::size_t> observation_order;
};

/// Throws ConfigError naming the offending field.
void check_config(const SimConfig& config, const DecPomdp& model);

struct SimRecord {
    std::size_t replication = 0;
    std::size_t t = 0;
    std::size_t state = 0;
    std::vector<std::size_t> nodes;
    std::vector<std::size_t> actions;
    std::vector<std::size_t> observations;
    double reward = 0.0;

    friend bool operator==(const SimRecord&, const SimRecord&) = default;
};

struct SimTrace {
    std::vector<SimRecord> records;
    /// Mean reward per replication over the steps after burn-in.
    std::vector<double> replication_means;
    double pooled_mean = 0.0;
    /// Between-replication standard error of pooled_mean (0 for one replication).
    double standard_error = 0.0;
    /// Mean reward at each step across replications.
    std::vector<double> reward_per_step;

    friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

struct StepOutcome {
    std::size_t next_state;
    std::vector<std::size_t> next_nodes;
    std::vector<std::size_t> actions;
    std::vector<std::size_t> observations;
    double reward;
};

/// One decision epoch: actions from the current nodes, reward r(s, a),
/// s' ~ W(s, a, .), each agent's observation from its own V_k(a_k, s', .),
/// then every controller moves on its observation.
StepOutcome step(const DecPomdp& model, const FscPolicy& policy, std::size_t state,
                 std::span<const std::size_t> nodes, Rng& rng,
                 std::span<const std::size_t> observation_order = {});

/// Replication r uses the stream (seed, r); replications are independent and
/// assembled in index order.
SimTrace run(const DecPomdp& model, const FscPolicy& policy, const SimConfig& config);

} // namespace decpomdp
