#include "decpomdp/model.hpp"

#include "decpomdp/errors.hpp"

#include <cmath>
#include <sstream>

namespace decpomdp {

namespace {

void expect_size(const char* table, std::size_t got, std::size_t want) {
    if (got != want)
        throw DimensionError(std::string(table) + " table has " + std::to_string(got) +
                             " entries, expected " + std::to_string(want));
}

void check_index(const char* axis, std::size_t i, std::size_t n) {
    if (i >= n) throw IndexError(axis, i, n);
}

} // namespace

DecPomdp::DecPomdp(ModelTables tables) : t_(std::move(tables)) {
    if (t_.num_agents == 0) throw DimensionError("model needs at least one agent");
    if (t_.states.empty()) throw DimensionError("model has no states");
    if (t_.actions.empty()) throw DimensionError("model has no actions");
    if (t_.observations.empty()) throw DimensionError("model has no observations");
    joint_actions_ = MixedRadix(t_.num_agents, t_.actions.size());
    joint_obs_ = MixedRadix(t_.num_agents, t_.observations.size());
    const std::size_t S = num_states();
    expect_size("transition", t_.transition.size(), S * num_joint_actions() * S);
    expect_size("observation", t_.observation.size(),
                t_.num_agents * num_actions() * S * num_observations());
    expect_size("reward", t_.reward.size(), S * num_joint_actions());
    if (!t_.initial.empty()) expect_size("initial", t_.initial.size(), S);
}

double DecPomdp::transition_prob(std::size_t s, std::size_t ja, std::size_t s2) const {
    check_index("state", s, num_states());
    check_index("joint_action", ja, num_joint_actions());
    check_index("next_state", s2, num_states());
    return transition_row(s, ja)[s2];
}

double DecPomdp::obs_prob(std::size_t k, std::size_t a, std::size_t s2, std::size_t o) const {
    check_index("agent", k, num_agents());
    check_index("action", a, num_actions());
    check_index("next_state", s2, num_states());
    check_index("observation", o, num_observations());
    return obs_row(k, a, s2)[o];
}

double DecPomdp::reward(std::size_t s, std::size_t ja) const {
    check_index("state", s, num_states());
    check_index("joint_action", ja, num_joint_actions());
    return reward_unchecked(s, ja);
}

std::vector<double> DecPomdp::initial_distribution() const {
    if (!t_.initial.empty()) return t_.initial;
    return std::vector<double>(num_states(), 1.0 / static_cast<double>(num_states()));
}

bool operator==(const DecPomdp& a, const DecPomdp& b) {
    const auto& x = a.t_;
    const auto& y = b.t_;
    return x.num_agents == y.num_agents && x.states == y.states && x.actions == y.actions &&
           x.observations == y.observations && x.transition == y.transition &&
           x.observation == y.observation && x.reward == y.reward && x.initial == y.initial &&
           x.meta == y.meta;
}

namespace {

// Checks one probability row, appending violations tagged with `where`.
void check_row(std::span<const double> row, const std::string& where,
               std::vector<std::string>& out) {
    double sum = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        const double p = row[i];
        if (!std::isfinite(p)) {
            out.push_back(where + ": entry " + std::to_string(i) + " is not finite");
            return;
        }
        if (p < 0.0 || p > 1.0) {
            std::ostringstream msg;
            msg << where << ": entry " << i << " = " << p << " outside [0, 1]";
            out.push_back(msg.str());
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTolerance) {
        std::ostringstream msg;
        msg.precision(10);
        msg << where << ": row sums to " << sum;
        out.push_back(msg.str());
    }
}

} // namespace

ValidationReport validate(const DecPomdp& m) {
    ValidationReport report;
    auto& out = report.violations;
    const std::size_t S = m.num_states();
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t ja = 0; ja < m.num_joint_actions(); ++ja)
            check_row(m.transition_row(s, ja),
                      "transition[s=" + std::to_string(s) + "][a=" + std::to_string(ja) + "]",
                      out);
    for (std::size_t k = 0; k < m.num_agents(); ++k)
        for (std::size_t a = 0; a < m.num_actions(); ++a)
            for (std::size_t s2 = 0; s2 < S; ++s2)
                check_row(m.obs_row(k, a, s2),
                          "observation[k=" + std::to_string(k) + "][a=" + std::to_string(a) +
                              "][s'=" + std::to_string(s2) + "]",
                          out);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t ja = 0; ja < m.num_joint_actions(); ++ja)
            if (!std::isfinite(m.reward_unchecked(s, ja)))
                out.push_back("reward[s=" + std::to_string(s) + "][a=" + std::to_string(ja) +
                              "] is not finite");
    const auto& init = m.tables().initial;
    if (!init.empty()) check_row(init, "initial", out);
    return report;
}

DecPomdp renormalized(const DecPomdp& model) {
    ModelTables t = model.tables();
    auto normalize = [](double* row, std::size_t n) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += row[i];
        if (sum <= 0.0) throw DataError("cannot renormalize a row with non-positive mass");
        for (std::size_t i = 0; i < n; ++i) row[i] /= sum;
    };
    const std::size_t S = t.states.size();
    for (std::size_t r = 0; r < t.transition.size() / S; ++r) normalize(&t.transition[r * S], S);
    const std::size_t O = t.observations.size();
    for (std::size_t r = 0; r < t.observation.size() / O; ++r)
        normalize(&t.observation[r * O], O);
    if (!t.initial.empty()) normalize(t.initial.data(), S);
    return DecPomdp(std::move(t));
}

} // namespace decpomdp
