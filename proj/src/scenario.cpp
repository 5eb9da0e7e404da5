#include "decpomdp/scenario.hpp"

#include "decpomdp/errors.hpp"

#include <array>
#include <cmath>

namespace decpomdp {

namespace {

void check_prob(const std::string& field, double p) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw ConfigError(field + " must lie in [0, 1], got " + std::to_string(p));
}

const std::array<const char*, kLocalStates> kLocalNames{"SL", "SM", "SH", "CL", "CM", "CH"};

} // namespace

std::size_t ScenarioConfig::num_honeypots() const {
    std::size_t h = 0;
    for (const auto& d : devices) h += d.kind == DeviceKind::honeypot;
    return h;
}

void check_config(const ScenarioConfig& c) {
    if (c.devices.empty()) throw ConfigError("devices must list at least one device");
    for (std::size_t k = 0; k < c.devices.size(); ++k) {
        const std::string prefix = "devices[" + std::to_string(k) + "].";
        check_prob(prefix + "fp_rate", c.devices[k].fp_rate);
        check_prob(prefix + "fn_rate", c.devices[k].fn_rate);
    }
    check_prob("attack_prob", c.attack_prob);
    check_prob("diversion_factor", c.diversion_factor);
    check_prob("detect_prob", c.detect_prob);
    check_prob("recover_prob", c.recover_prob);
    const auto& w = c.reward_weights;
    if (!(w.detect_reward > 0.0))
        throw ConfigError("reward_weights.detect_reward must be positive");
    const std::array<std::pair<const char*, double>, 4> costs{{
        {"reward_weights.miss_penalty", w.miss_penalty},
        {"reward_weights.false_escalation_penalty", w.false_escalation_penalty},
        {"reward_weights.monitor_cost", w.monitor_cost},
        {"reward_weights.escalate_cost", w.escalate_cost},
    }};
    for (const auto& [name, value] : costs)
        if (!std::isfinite(value) || value > 0.0)
            throw ConfigError(std::string(name) + " must be a non-positive reward");
}

MixedRadix scenario_state_space(std::size_t num_devices) {
    return MixedRadix(num_devices, kLocalStates);
}

double local_reward(const DeviceSpec&, Security x, Mode a, const RewardWeights& w) {
    const bool compromised = x == Security::compromised;
    switch (a) {
    case Mode::sleep:
        return compromised ? w.miss_penalty : 0.0;
    case Mode::monitor:
        return compromised ? w.miss_penalty + w.monitor_cost : w.monitor_cost;
    case Mode::escalate:
        return compromised ? w.detect_reward + w.escalate_cost
                           : w.false_escalation_penalty + w.escalate_cost;
    }
    return 0.0;
}

double compromise_prob(const ScenarioConfig& c, std::size_t k, std::span<const std::size_t> modes) {
    double p = c.attack_prob;
    if (c.devices[k].kind == DeviceKind::hids) {
        for (std::size_t j = 0; j < c.devices.size(); ++j)
            if (c.devices[j].kind == DeviceKind::honeypot &&
                static_cast<Mode>(modes[j]) != Mode::sleep)
                p *= c.diversion_factor;
    }
    if (static_cast<Mode>(modes[k]) != Mode::sleep) p *= 1.0 - c.detect_prob;
    return p;
}

DecPomdp compile(const ScenarioConfig& c) {
    check_config(c);
    const std::size_t K = c.devices.size();
    const MixedRadix space = scenario_state_space(K);
    const MixedRadix joint_actions(K, kNumModes);
    const std::size_t S = space.size();
    const std::size_t JA = joint_actions.size();

    ModelTables t;
    t.num_agents = K;
    t.actions = {"sleep", "monitor", "escalate"};
    t.observations = {"secure", "compromised"};
    t.states.reserve(S);
    for (std::size_t s = 0; s < S; ++s) {
        std::string name;
        for (std::size_t k = 0; k < K; ++k) {
            if (k) name += '.';
            name += kLocalNames[space.digit(s, k)];
        }
        t.states.push_back(std::move(name));
    }

    // Per-device marginal over next local states, then a product over devices.
    t.transition.assign(S * JA * S, 0.0);
    std::vector<std::size_t> modes(K);
    std::vector<std::array<double, kLocalStates>> marginal(K);
    for (std::size_t ja = 0; ja < JA; ++ja) {
        joint_actions.decode(ja, modes);
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t k = 0; k < K; ++k) {
                const Security x = local_security(space.digit(s, k));
                const Mode a = static_cast<Mode>(modes[k]);
                const Load y2 = load_for(a);
                double to_compromised;
                if (x == Security::secure)
                    to_compromised = compromise_prob(c, k, modes);
                else
                    to_compromised = a == Mode::escalate ? 1.0 - c.recover_prob : 1.0;
                marginal[k].fill(0.0);
                marginal[k][local_state(Security::secure, y2)] = 1.0 - to_compromised;
                marginal[k][local_state(Security::compromised, y2)] = to_compromised;
            }
            double* row = &t.transition[(s * JA + ja) * S];
            for (std::size_t s2 = 0; s2 < S; ++s2) {
                double p = 1.0;
                for (std::size_t k = 0; k < K && p != 0.0; ++k) p *= marginal[k][space.digit(s2, k)];
                row[s2] = p;
            }
        }
    }

    // Observations depend only on the device's own next local state.
    const std::size_t O = t.observations.size();
    t.observation.assign(K * kNumModes * S * O, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        const DeviceSpec& d = c.devices[k];
        for (std::size_t a = 0; a < kNumModes; ++a)
            for (std::size_t s2 = 0; s2 < S; ++s2) {
                double* row = &t.observation[((k * kNumModes + a) * S + s2) * O];
                const auto secure = static_cast<std::size_t>(Security::secure);
                const auto compromised = static_cast<std::size_t>(Security::compromised);
                if (static_cast<Mode>(a) == Mode::sleep) {
                    row[secure] = 0.5;
                    row[compromised] = 0.5;
                } else if (local_security(space.digit(s2, k)) == Security::secure) {
                    row[compromised] = d.fp_rate;
                    row[secure] = 1.0 - d.fp_rate;
                } else {
                    row[secure] = d.fn_rate;
                    row[compromised] = 1.0 - d.fn_rate;
                }
            }
    }

    t.reward.assign(S * JA, 0.0);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t ja = 0; ja < JA; ++ja) {
            joint_actions.decode(ja, modes);
            double r = 0.0;
            for (std::size_t k = 0; k < K; ++k)
                r += local_reward(c.devices[k], local_security(space.digit(s, k)),
                                  static_cast<Mode>(modes[k]), c.reward_weights);
            t.reward[s * JA + ja] = r;
        }

    t.initial.assign(S, 0.0);
    t.initial[0] = 1.0; // every device secure and asleep
    t.meta = {{"source", "scenario"},
              {"devices", K},
              {"honeypots", c.num_honeypots()},
              {"state_encoding", "mixed radix over devices, local = security*3 + load"}};
    return DecPomdp(std::move(t));
}

} // namespace decpomdp
