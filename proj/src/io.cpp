#include "decpomdp/io.hpp"

#include "decpomdp/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace decpomdp::io {

using nlohmann::json;

namespace {

const json& field(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
    return j.at(key);
}

std::size_t as_count(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw FormatError(where + ": expected a non-negative integer");
    return j.get<std::size_t>();
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw FormatError(where + ": expected a number");
    return j.get<double>();
}

std::vector<std::string> as_names(const json& j, const std::string& where) {
    if (!j.is_array()) throw FormatError(where + ": expected an array of names");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) throw FormatError(where + "[" + std::to_string(i) + "]: expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

// Flattens a nested array whose shape must be exactly `dims`.
void flatten(const json& j, std::span<const std::size_t> dims, const std::string& where,
             std::vector<double>& out) {
    if (dims.empty()) {
        out.push_back(as_number(j, where));
        return;
    }
    if (!j.is_array() || j.size() != dims[0])
        throw FormatError(where + ": expected an array of length " + std::to_string(dims[0]));
    for (std::size_t i = 0; i < dims[0]; ++i)
        flatten(j[i], dims.subspan(1), where + "[" + std::to_string(i) + "]", out);
}

json nest(std::span<const double> flat, std::span<const std::size_t> dims) {
    if (dims.empty()) return flat[0];
    json arr = json::array();
    std::size_t stride = 1;
    for (std::size_t d = 1; d < dims.size(); ++d) stride *= dims[d];
    for (std::size_t i = 0; i < dims[0]; ++i) arr.push_back(nest(flat.subspan(i * stride, stride), dims.subspan(1)));
    return arr;
}

template <typename F>
auto wrap(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw FormatError(what + ": " + e.what());
    }
}

} // namespace

json model_to_json(const DecPomdp& m) {
    const auto& t = m.tables();
    const std::size_t S = m.num_states(), JA = m.num_joint_actions();
    json j;
    j["agents"] = t.num_agents;
    j["states"] = t.states;
    j["actions"] = t.actions;
    j["observations"] = t.observations;
    const std::size_t tdims[] = {S, JA, S};
    j["transition"] = nest(t.transition, tdims);
    const std::size_t odims[] = {t.num_agents, m.num_actions(), S, m.num_observations()};
    j["observation"] = nest(t.observation, odims);
    const std::size_t rdims[] = {S, JA};
    j["reward"] = nest(t.reward, rdims);
    if (!t.initial.empty()) j["initial"] = t.initial;
    j["meta"] = t.meta;
    return j;
}

DecPomdp model_from_json(const json& j) {
    return wrap("model", [&] {
        ModelTables t;
        const json& agents = field(j, "agents", "model");
        if (agents.is_array())
            t.num_agents = agents.size();
        else
            t.num_agents = as_count(agents, "model.agents");
        if (t.num_agents == 0) throw FormatError("model.agents: must be at least 1");
        t.states = as_names(field(j, "states", "model"), "model.states");
        t.actions = as_names(field(j, "actions", "model"), "model.actions");
        t.observations = as_names(field(j, "observations", "model"), "model.observations");
        if (t.states.empty() || t.actions.empty() || t.observations.empty())
            throw FormatError("model: states, actions and observations must be non-empty");
        const std::size_t S = t.states.size(), A = t.actions.size(), O = t.observations.size();
        std::size_t JA = 1;
        for (std::size_t k = 0; k < t.num_agents; ++k) JA *= A;
        const std::size_t tdims[] = {S, JA, S};
        flatten(field(j, "transition", "model"), tdims, "model.transition", t.transition);
        const std::size_t odims[] = {t.num_agents, A, S, O};
        flatten(field(j, "observation", "model"), odims, "model.observation", t.observation);
        const std::size_t rdims[] = {S, JA};
        flatten(field(j, "reward", "model"), rdims, "model.reward", t.reward);
        if (j.contains("initial")) {
            const std::size_t idims[] = {S};
            flatten(j.at("initial"), idims, "model.initial", t.initial);
        }
        if (j.contains("meta")) t.meta = j.at("meta");
        return DecPomdp(std::move(t));
    });
}

namespace {

const char* kind_name(DeviceKind k) { return k == DeviceKind::hids ? "hids" : "honeypot"; }

} // namespace

json scenario_to_json(const ScenarioConfig& c) {
    json devices = json::array();
    for (const auto& d : c.devices)
        devices.push_back({{"kind", kind_name(d.kind)}, {"fp_rate", d.fp_rate}, {"fn_rate", d.fn_rate}});
    const auto& w = c.reward_weights;
    return {{"devices", devices},
            {"attack_prob", c.attack_prob},
            {"diversion_factor", c.diversion_factor},
            {"detect_prob", c.detect_prob},
            {"recover_prob", c.recover_prob},
            {"reward_weights",
             {{"detect_reward", w.detect_reward},
              {"miss_penalty", w.miss_penalty},
              {"false_escalation_penalty", w.false_escalation_penalty},
              {"monitor_cost", w.monitor_cost},
              {"escalate_cost", w.escalate_cost}}}};
}

ScenarioConfig scenario_from_json(const json& j) {
    return wrap("scenario", [&] {
        if (!j.is_object()) throw FormatError("scenario: expected an object");
        ScenarioConfig c;
        auto number = [&](const json& obj, const char* key, double& slot, const std::string& where) {
            if (obj.contains(key)) slot = as_number(obj.at(key), where + "." + key);
        };
        if (j.contains("devices")) {
            const json& devs = j.at("devices");
            if (!devs.is_array()) throw FormatError("scenario.devices: expected an array");
            c.devices.clear();
            for (std::size_t i = 0; i < devs.size(); ++i) {
                const std::string where = "scenario.devices[" + std::to_string(i) + "]";
                DeviceSpec d;
                const json& kind = field(devs[i], "kind", where);
                if (kind == "hids")
                    d.kind = DeviceKind::hids;
                else if (kind == "honeypot")
                    d.kind = DeviceKind::honeypot;
                else
                    throw FormatError(where + ".kind: expected \"hids\" or \"honeypot\"");
                number(devs[i], "fp_rate", d.fp_rate, where);
                number(devs[i], "fn_rate", d.fn_rate, where);
                c.devices.push_back(d);
            }
        }
        number(j, "attack_prob", c.attack_prob, "scenario");
        number(j, "diversion_factor", c.diversion_factor, "scenario");
        number(j, "detect_prob", c.detect_prob, "scenario");
        number(j, "recover_prob", c.recover_prob, "scenario");
        if (j.contains("reward_weights")) {
            const json& w = j.at("reward_weights");
            const std::string where = "scenario.reward_weights";
            auto& rw = c.reward_weights;
            number(w, "detect_reward", rw.detect_reward, where);
            number(w, "miss_penalty", rw.miss_penalty, where);
            number(w, "false_escalation_penalty", rw.false_escalation_penalty, where);
            number(w, "monitor_cost", rw.monitor_cost, where);
            number(w, "escalate_cost", rw.escalate_cost, where);
        }
        return c;
    });
}

json controller_to_json(const FscPolicy& policy) {
    json agents = json::array();
    for (const auto& c : policy.agents) {
        const std::size_t xd[] = {c.num_nodes, c.num_actions};
        const std::size_t yd[] = {c.num_nodes, c.num_observations, c.num_nodes};
        agents.push_back({{"nodes", c.num_nodes},
                          {"x", nest(c.action_law, xd)},
                          {"y", nest(c.node_law, yd)},
                          {"initial_node", c.initial_node}});
    }
    return {{"agents", agents}};
}

FscPolicy controller_from_json(const json& j) {
    return wrap("controller", [&] {
        const json& agents = field(j, "agents", "controller");
        if (!agents.is_array() || agents.empty())
            throw FormatError("controller.agents: expected a non-empty array");
        FscPolicy policy;
        for (std::size_t k = 0; k < agents.size(); ++k) {
            const std::string where = "controller.agents[" + std::to_string(k) + "]";
            const json& a = agents[k];
            AgentController c;
            c.num_nodes = as_count(field(a, "nodes", where), where + ".nodes");
            if (c.num_nodes == 0) throw FormatError(where + ".nodes: must be at least 1");
            const json& x = field(a, "x", where);
            const json& y = field(a, "y", where);
            if (!x.is_array() || x.empty() || !x[0].is_array() || x[0].empty())
                throw FormatError(where + ".x: expected a nodes x actions array");
            if (!y.is_array() || y.empty() || !y[0].is_array() || y[0].empty())
                throw FormatError(where + ".y: expected a nodes x observations x nodes array");
            c.num_actions = x[0].size();
            c.num_observations = y[0].size();
            const std::size_t xd[] = {c.num_nodes, c.num_actions};
            const std::size_t yd[] = {c.num_nodes, c.num_observations, c.num_nodes};
            flatten(x, xd, where + ".x", c.action_law);
            flatten(y, yd, where + ".y", c.node_law);
            c.initial_node = a.contains("initial_node")
                                 ? as_count(a.at("initial_node"), where + ".initial_node")
                                 : 0;
            if (c.initial_node >= c.num_nodes)
                throw FormatError(where + ".initial_node: out of range");
            policy.agents.push_back(std::move(c));
        }
        return policy;
    });
}

json report_to_json(const EvalReport& r) {
    return {{"average_reward", r.average_reward},
            {"stationarity_residual", r.stationarity_residual},
            {"chain_classification", to_string(r.chain_classification)},
            {"occupancy_sum", r.occupancy.sum()}};
}

json solve_metrics_to_json(const SolveResult& r) {
    return {{"objective", r.objective},
            {"history", r.history},
            {"restarts_summary", r.restarts_summary},
            {"best_restart", r.best_restart},
            {"finite_difference_steps", r.finite_difference_steps}};
}

json sim_summary_to_json(const SimTrace& t) {
    return {{"pooled_mean", t.pooled_mean},
            {"standard_error", t.standard_error},
            {"replication_means", t.replication_means}};
}

std::string trace_csv(const SimTrace& trace) {
    std::string out = "replication,t,state,node_vector,action_vector,obs_vector,reward\n";
    char buf[64];
    for (const auto& r : trace.records) {
        out += std::to_string(r.replication);
        out += ',';
        out += std::to_string(r.t);
        out += ',';
        out += std::to_string(r.state);
        out += ',';
        out += dash_join(r.nodes);
        out += ',';
        out += dash_join(r.actions);
        out += ',';
        out += dash_join(r.observations);
        out += ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.reward);
        out += buf;
        out += '\n';
    }
    return out;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw FormatError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw FormatError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

void write_json_atomic(const std::filesystem::path& path, const json& j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

} // namespace decpomdp::io
