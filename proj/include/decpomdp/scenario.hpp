#pragma once

#include "decpomdp/model.hpp"

#include <cstddef>
#include <vector>

namespace decpomdp {

/// Local device action modes. "escalate" is prevention on a HIDS and
/// analysis on a honeypot.
enum class Mode : std::size_t { sleep = 0, monitor = 1, escalate = 2 };
/// Security condition of a device (also the observation alphabet).
enum class Security : std::size_t { secure = 0, compromised = 1 };
/// Resource consumption level; forced by the mode chosen in the previous step.
enum class Load : std::size_t { low = 0, medium = 1, high = 2 };

inline constexpr std::size_t kNumModes = 3;
inline constexpr std::size_t kNumSecurity = 2;
inline constexpr std::size_t kNumLoads = 3;
inline constexpr std::size_t kLocalStates = kNumSecurity * kNumLoads;

enum class DeviceKind { hids, honeypot };

struct DeviceSpec {
    DeviceKind kind = DeviceKind::hids;
    double fp_rate = 0.05;
    double fn_rate = 0.1;
};

struct RewardWeights {
    double detect_reward = 10.0;
    double miss_penalty = -10.0;
    double false_escalation_penalty = -5.0;
    double monitor_cost = -1.0;
    double escalate_cost = -2.0;
};

/// Factored description of a HIDS/honeypot network.
///
/// The attack dynamics are modelling choices, not measured values:
///  - a secure device is attacked with probability attack_prob per step; on
///    HIDS devices this is scaled by diversion_factor^m where m is the number
///    of honeypots in monitor or escalate mode;
///  - an attack on a monitored (monitor or escalate) device is stopped with
///    probability detect_prob;
///  - a compromised device in escalate mode returns to secure with
///    probability recover_prob, otherwise it stays compromised.
struct ScenarioConfig {
    std::vector<DeviceSpec> devices{{DeviceKind::hids, 0.05, 0.1},
                                    {DeviceKind::honeypot, 0.05, 0.1}};
    double attack_prob = 0.1;
    double diversion_factor = 0.6;
    double detect_prob = 0.8;
    double recover_prob = 0.9;
    RewardWeights reward_weights;

    std::size_t num_honeypots() const;
};

/// Throws ConfigError naming the first offending field.
void check_config(const ScenarioConfig& config);

/// Local state index of (security, load) inside a device.
constexpr std::size_t local_state(Security x, Load y) {
    return static_cast<std::size_t>(x) * kNumLoads + static_cast<std::size_t>(y);
}
constexpr Security local_security(std::size_t local) { return static_cast<Security>(local / kNumLoads); }
constexpr Load local_load(std::size_t local) { return static_cast<Load>(local % kNumLoads); }
constexpr Load load_for(Mode a) { return static_cast<Load>(static_cast<std::size_t>(a)); }

/// Joint states are mixed-radix over devices (device 0 most significant),
/// each digit a local state in [0, 6).
MixedRadix scenario_state_space(std::size_t num_devices);

/// Immediate reward of one device. The device kind does not change the
/// mapping: an engaged honeypot under analysis earns the detection reward.
double local_reward(const DeviceSpec& spec, Security x, Mode a, const RewardWeights& w);

/// Probability that device k moves from secure to compromised this step.
double compromise_prob(const ScenarioConfig& config, std::size_t device,
                       std::span<const std::size_t> modes);

/// Builds the flat model: |S| = 6^K, actions {sleep, monitor, escalate},
/// observations {secure, compromised}. Starts in the all-(secure, low) state.
DecPomdp compile(const ScenarioConfig& config);

} // namespace decpomdp
