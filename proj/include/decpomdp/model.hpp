#pragma once

#include "decpomdp/indexing.hpp"

#include <json.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace decpomdp {

/// Normalization tolerance applied to every probability row.
inline constexpr double kProbTolerance = 1e-9;

/// Raw tables of a flat DEC-POMDP, laid out dense and row-major.
///
///   transition  [s][a_joint][s']       size |S| * |A|^K * |S|
///   observation [k][a][s'][o]          size K * |A| * |S| * |O|
///   reward      [s][a_joint]           size |S| * |A|^K
struct ModelTables {
    std::size_t num_agents = 1;
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<std::string> observations;
    std::vector<double> transition;
    std::vector<double> observation;
    std::vector<double> reward;
    /// Distribution used to start simulations and the multichain fallback.
    /// Empty means uniform over states.
    std::vector<double> initial;
    nlohmann::json meta = nlohmann::json::object();
};

/// Finite DEC-POMDP with shared per-agent action and observation spaces.
///
/// Construction checks that every table has the declared shape and throws
/// DimensionError otherwise; probability normalization is left to validate(),
/// which reports rather than throws. Immutable once built.
class DecPomdp {
public:
    explicit DecPomdp(ModelTables tables);

    std::size_t num_agents() const noexcept { return t_.num_agents; }
    std::size_t num_states() const noexcept { return t_.states.size(); }
    std::size_t num_actions() const noexcept { return t_.actions.size(); }
    std::size_t num_observations() const noexcept { return t_.observations.size(); }
    std::size_t num_joint_actions() const noexcept { return joint_actions_.size(); }
    std::size_t num_joint_observations() const noexcept { return joint_obs_.size(); }

    const MixedRadix& joint_actions() const noexcept { return joint_actions_; }
    const MixedRadix& joint_observations() const noexcept { return joint_obs_; }

    const std::vector<std::string>& state_names() const noexcept { return t_.states; }
    const std::vector<std::string>& action_names() const noexcept { return t_.actions; }
    const std::vector<std::string>& observation_names() const noexcept { return t_.observations; }
    const nlohmann::json& meta() const noexcept { return t_.meta; }
    const ModelTables& tables() const noexcept { return t_; }

    /// Checked lookups; out-of-range indices throw IndexError naming the axis.
    double transition_prob(std::size_t s, std::size_t joint_action, std::size_t next_state) const;
    double obs_prob(std::size_t agent, std::size_t action, std::size_t next_state,
                    std::size_t obs) const;
    double reward(std::size_t s, std::size_t joint_action) const;

    /// Unchecked row views for inner loops.
    std::span<const double> transition_row(std::size_t s, std::size_t joint_action) const {
        const std::size_t S = num_states();
        return {t_.transition.data() + (s * num_joint_actions() + joint_action) * S, S};
    }
    std::span<const double> obs_row(std::size_t agent, std::size_t action,
                                    std::size_t next_state) const {
        const std::size_t O = num_observations();
        return {t_.observation.data() +
                    ((agent * num_actions() + action) * num_states() + next_state) * O,
                O};
    }
    double reward_unchecked(std::size_t s, std::size_t joint_action) const {
        return t_.reward[s * num_joint_actions() + joint_action];
    }

    /// Starting state distribution (uniform when the model declares none).
    std::vector<double> initial_distribution() const;

    friend bool operator==(const DecPomdp& a, const DecPomdp& b);

private:
    ModelTables t_;
    MixedRadix joint_actions_;
    MixedRadix joint_obs_;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Lists every normalization, range and finiteness violation. Never throws.
ValidationReport validate(const DecPomdp& model);

/// Renormalizes every transition and observation row. Only used on explicit request.
DecPomdp renormalized(const DecPomdp& model);

} // namespace decpomdp
