#include "cli.hpp"

#include "decpomdp/errors.hpp"
#include "decpomdp/evaluate.hpp"
#include "decpomdp/io.hpp"
#include "decpomdp/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace decpomdp::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::size_t> parse_nodes(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || item.empty() || item[0] == '-' || v < 1)
            throw UsageError("--nodes: expected positive integers separated by commas, got '" + text + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("--nodes: empty");
    return out;
}

std::vector<std::size_t> expand_nodes(const std::vector<std::size_t>& nodes, std::size_t agents) {
    if (nodes.size() == agents) return nodes;
    if (nodes.size() == 1) return std::vector<std::size_t>(agents, nodes[0]);
    throw ConfigError("--nodes: " + std::to_string(nodes.size()) + " counts given for " +
                      std::to_string(agents) + " agents");
}

} // namespace

CommandSpec parse_args(const std::vector<std::string>& argv) {
    CommandSpec spec;
    CLI::App app{"Finite-state controller planning for HIDS/honeypot scheduling", "decpomdp"};
    app.require_subcommand(1);

    std::string nodes_text = "1";
    auto* scenario = app.add_subcommand("scenario", "compile a scenario file into a model");
    scenario->add_option("--config", spec.config, "scenario JSON (defaults when omitted)");
    scenario->add_option("--out", spec.out, "model JSON to write")->required();

    auto* validate = app.add_subcommand("validate", "check a model file");
    validate->add_option("--model", spec.model, "model JSON")->required();

    auto* solve = app.add_subcommand("solve", "optimize fixed-size controllers");
    solve->add_option("--model", spec.model, "model JSON")->required();
    solve->add_option("--nodes", nodes_text, "nodes per agent: N or N1,N2,...");
    solve->add_option("--restarts", spec.solve.restarts)->check(CLI::Range(std::size_t{1}, SIZE_MAX));
    solve->add_option("--max-iters", spec.solve.max_outer_iters)->check(CLI::Range(std::size_t{1}, SIZE_MAX));
    solve->add_option("--inner-steps", spec.solve.inner_steps)->check(CLI::Range(std::size_t{1}, SIZE_MAX));
    solve->add_option("--step-size", spec.solve.step_size)->check(CLI::PositiveNumber);
    solve->add_option("--tol", spec.solve.tol)->check(CLI::PositiveNumber);
    solve->add_option("--seed", spec.solve.seed);
    solve->add_option("--out", spec.out, "controller JSON to write")->required();
    solve->add_option("--metrics", spec.metrics, "metrics JSON (default: <out>.metrics.json)");
    solve->add_flag("--oracle", spec.oracle, "also run the deterministic oracle and report the gap");
    solve->add_option("--emit-plot-data", spec.plot_dir, "directory for objective_history.csv");

    auto* eval = app.add_subcommand("eval", "exact average reward of a controller");
    eval->add_option("--model", spec.model, "model JSON")->required();
    eval->add_option("--controller", spec.controller, "controller JSON")->required();
    eval->add_option("--out", spec.out, "report JSON (stdout when omitted)");
    eval->add_flag("--require-unichain", spec.require_unichain, "fail on multichain controllers");
    eval->add_option("--emit-plot-data", spec.plot_dir, "directory for stationary.csv");

    auto* enumerate = app.add_subcommand("enumerate", "exhaustive deterministic controller search");
    enumerate->add_option("--model", spec.model, "model JSON")->required();
    enumerate->add_option("--nodes", nodes_text, "nodes per agent: N or N1,N2,...");
    enumerate->add_option("--out", spec.out, "best controller JSON")->required();
    enumerate->add_option("--metrics", spec.metrics, "result JSON (default: <out>.metrics.json)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo rollouts of a controller");
    simulate->add_option("--model", spec.model, "model JSON")->required();
    simulate->add_option("--controller", spec.controller, "controller JSON")->required();
    simulate->add_option("--steps", spec.sim.steps)->check(CLI::Range(std::size_t{1}, SIZE_MAX));
    simulate->add_option("--replications", spec.sim.replications)->check(CLI::Range(std::size_t{1}, SIZE_MAX));
    simulate->add_option("--burn-in", spec.sim.burn_in);
    simulate->add_option("--seed", spec.sim.seed);
    simulate->add_option("--out", spec.out, "summary JSON (stdout when omitted)");
    simulate->add_option("--trace", spec.trace, "per-step trace CSV");
    simulate->add_option("--emit-plot-data", spec.plot_dir, "directory for reward_per_step.csv");

    std::vector<std::string> args(argv.rbegin(), argv.rend());
    if (!args.empty()) args.pop_back(); // program name
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        CLI::App* target = &app;
        for (CLI::App* sub : app.get_subcommands()) target = sub;
        throw HelpRequested(target->help());
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        if (msg.empty()) msg = app.help();
        throw UsageError(msg);
    }

    if (scenario->parsed()) spec.command = Command::scenario;
    if (validate->parsed()) spec.command = Command::validate;
    if (solve->parsed()) spec.command = Command::solve;
    if (eval->parsed()) spec.command = Command::eval;
    if (enumerate->parsed()) spec.command = Command::enumerate;
    if (simulate->parsed()) spec.command = Command::simulate;
    spec.nodes = parse_nodes(nodes_text);
    if (spec.command == Command::simulate && spec.sim.steps <= spec.sim.burn_in)
        throw UsageError("--burn-in: must be smaller than --steps");
    if ((spec.command == Command::solve || spec.command == Command::enumerate) && spec.metrics.empty())
        spec.metrics = spec.out + ".metrics.json";
    spec.sim.record_trace = !spec.trace.empty();
    return spec;
}

namespace {

void write_csv(const std::string& dir, const std::string& name, const std::string& body) {
    fs::create_directories(dir);
    io::write_text_atomic(fs::path(dir) / name, body);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run_scenario(const CommandSpec& spec) {
    ScenarioConfig config;
    if (!spec.config.empty()) config = io::scenario_from_json(io::read_json(spec.config));
    io::write_json_atomic(spec.out, io::model_to_json(compile(config)));
    return 0;
}

int run_validate(const CommandSpec& spec, std::ostream& out) {
    const DecPomdp model = io::model_from_json(io::read_json(spec.model));
    const ValidationReport report = validate(model);
    for (const auto& v : report.violations) out << v << '\n';
    out << (report.ok() ? "valid" : std::to_string(report.violations.size()) + " violation(s)") << '\n';
    return report.ok() ? 0 : 1;
}

DecPomdp load_valid_model(const std::string& path) {
    DecPomdp model = io::model_from_json(io::read_json(path));
    const ValidationReport report = validate(model);
    if (!report.ok()) throw DataError("invalid model: " + report.violations.front());
    return model;
}

FscPolicy load_valid_controller(const std::string& path, const DecPomdp& model) {
    FscPolicy policy = io::controller_from_json(io::read_json(path));
    check_compatible(model, policy);
    const auto problems = policy_violations(policy);
    if (!problems.empty()) throw DataError("invalid controller: " + problems.front());
    return policy;
}

int run_solve(const CommandSpec& spec, std::ostream& out) {
    const DecPomdp model = load_valid_model(spec.model);
    SolveConfig config = spec.solve;
    config.nodes_per_agent = expand_nodes(spec.nodes, model.num_agents());
    const SolveResult result = solve(model, config);
    nlohmann::json metrics = io::solve_metrics_to_json(result);
    if (spec.oracle) {
        const EnumerationResult oracle = enumerate_deterministic(model, config.nodes_per_agent);
        metrics["oracle_objective"] = oracle.average_reward;
        metrics["oracle_gap"] = result.objective - oracle.average_reward;
    }
    io::write_json_atomic(spec.out, io::controller_to_json(result.policy));
    io::write_json_atomic(spec.metrics, metrics);
    if (!spec.plot_dir.empty()) {
        std::string csv = "iteration,objective\n";
        for (std::size_t i = 0; i < result.history.size(); ++i)
            csv += std::to_string(i) + "," + fmt(result.history[i]) + "\n";
        write_csv(spec.plot_dir, "objective_history.csv", csv);
    }
    out << "objective " << fmt(result.objective) << '\n';
    return 0;
}

int run_eval(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
    const DecPomdp model = load_valid_model(spec.model);
    const FscPolicy policy = load_valid_controller(spec.controller, model);
    const ChainEvaluator evaluator(model, policy.nodes_per_agent());
    const EvalReport report = evaluator.evaluate(policy);
    if (spec.require_unichain && report.chain_classification != ChainClass::unichain_verified) {
        err << "error: controller induces a multichain process (--require-unichain)\n";
        return 1;
    }
    const nlohmann::json j = io::report_to_json(report);
    if (spec.out.empty())
        out << j.dump(2) << '\n';
    else
        io::write_json_atomic(spec.out, j);
    if (!spec.plot_dir.empty()) {
        const MixedRadix nodes(policy.nodes_per_agent());
        const Eigen::VectorXd c = evaluator.expected_reward(policy);
        std::string csv = "node_vector,state,probability,expected_reward\n";
        const std::size_t S = model.num_states();
        for (std::size_t i = 0; i < report.stationary.size(); ++i)
            csv += dash_join(nodes.decode(i / S)) + "," + std::to_string(i % S) + "," +
                   fmt(report.stationary[i]) + "," + fmt(c[static_cast<Eigen::Index>(i)]) + "\n";
        write_csv(spec.plot_dir, "stationary.csv", csv);
    }
    return 0;
}

int run_enumerate(const CommandSpec& spec, std::ostream& out) {
    const DecPomdp model = load_valid_model(spec.model);
    const auto nodes = expand_nodes(spec.nodes, model.num_agents());
    const EnumerationResult result = enumerate_deterministic(model, nodes);
    io::write_json_atomic(spec.out, io::controller_to_json(result.policy));
    io::write_json_atomic(spec.metrics, {{"objective", result.average_reward},
                                         {"candidates", result.candidates}});
    out << "objective " << fmt(result.average_reward) << " over " << result.candidates
        << " candidates\n";
    return 0;
}

int run_simulate(const CommandSpec& spec, std::ostream& out) {
    const DecPomdp model = load_valid_model(spec.model);
    const FscPolicy policy = load_valid_controller(spec.controller, model);
    const SimTrace trace = run(model, policy, spec.sim);
    const nlohmann::json summary = io::sim_summary_to_json(trace);
    if (spec.out.empty())
        out << summary.dump(2) << '\n';
    else
        io::write_json_atomic(spec.out, summary);
    if (!spec.trace.empty()) io::write_text_atomic(spec.trace, io::trace_csv(trace));
    if (!spec.plot_dir.empty()) {
        std::string csv = "t,mean_reward,running_mean\n";
        double total = 0.0;
        for (std::size_t t = 0; t < trace.reward_per_step.size(); ++t) {
            total += trace.reward_per_step[t];
            csv += std::to_string(t) + "," + fmt(trace.reward_per_step[t]) + "," +
                   fmt(total / static_cast<double>(t + 1)) + "\n";
        }
        write_csv(spec.plot_dir, "reward_per_step.csv", csv);
    }
    return 0;
}

} // namespace

int run_command(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        switch (spec.command) {
        case Command::scenario: return run_scenario(spec);
        case Command::validate: return run_validate(spec, out);
        case Command::solve: return run_solve(spec, out);
        case Command::eval: return run_eval(spec, out, err);
        case Command::enumerate: return run_enumerate(spec, out);
        case Command::simulate: return run_simulate(spec, out);
        }
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CommandSpec spec;
    try {
        spec = parse_args(argv);
    } catch (const HelpRequested& e) {
        out << e.what();
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    return run_command(spec, out, err);
}

} // namespace decpomdp::cli
