#include "cli.hpp"

#include "decpomdp/errors.hpp"
#include "decpomdp/evaluate.hpp"
#include "decpomdp/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <sys/wait.h>

using namespace decpomdp;
using namespace decpomdp::cli;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
    const fs::path dir = fs::temp_directory_path() / "decpomdp_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "decpomdp");
    std::ostringstream out, err;
    const int code = main_entry(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t line_count(const std::string& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("solve arguments parse into a spec") {
    const CommandSpec s = parse_args({"decpomdp", "solve", "--model", "m.json", "--nodes", "2", "--restarts", "20",
                                      "--seed", "7", "--out", "ctrl.json"});
    CHECK(s.command == Command::solve);
    CHECK(s.model == "m.json");
    CHECK(s.nodes == std::vector<std::size_t>{2});
    CHECK(s.solve.restarts == 20);
    CHECK(s.solve.seed == 7);
    CHECK(s.out == "ctrl.json");
    CHECK(s.metrics == "ctrl.json.metrics.json");
}

TEST_CASE("usage errors name the offending flag") {
    CHECK_THROWS_WITH_AS(parse_args({"decpomdp", "solve", "--out", "c.json"}), doctest::Contains("--model"), UsageError);
    CHECK_THROWS_WITH_AS(parse_args({"decpomdp", "solve", "--model", "m", "--out", "c", "--restarts", "0"}),
                         doctest::Contains("--restarts"), UsageError);
    CHECK_THROWS_WITH_AS(parse_args({"decpomdp", "solve", "--model", "m", "--out", "c", "--bogus"}),
                         doctest::Contains("--bogus"), UsageError);
    CHECK_THROWS_WITH_AS(parse_args({"decpomdp", "solve", "--model", "m", "--out", "c", "--nodes", "0"}),
                         doctest::Contains("--nodes"), UsageError);
    CHECK_THROWS_AS(parse_args({"decpomdp"}), UsageError);
    const Outcome o = invoke({"solve", "--out", "c.json"});
    CHECK(o.code == 2);
    CHECK(o.err.find("--model") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
    const Outcome o = invoke({"solve", "--help"});
    CHECK(o.code == 0);
    CHECK(o.out.find("--restarts") != std::string::npos);
}

TEST_CASE("scenario, solve and eval agree end to end") {
    const std::string model = path("pipeline_model.json"), ctrl = path("pipeline_ctrl.json");
    const std::string report = path("pipeline_report.json"), plots = path("plots");
    REQUIRE(invoke({"scenario", "--out", model}).code == 0);
    REQUIRE(invoke({"validate", "--model", model}).code == 0);
    const std::string model_bytes = slurp(model);
    REQUIRE(invoke({"solve", "--model", model, "--nodes", "1,2", "--restarts", "2", "--max-iters", "15", "--seed", "4",
                    "--out", ctrl, "--emit-plot-data", plots})
                .code == 0);
    CHECK(slurp(model) == model_bytes);
    const auto metrics = io::read_json(ctrl + ".metrics.json");
    const std::string ctrl_bytes = slurp(ctrl);
    REQUIRE(invoke({"eval", "--model", model, "--controller", ctrl, "--out", report, "--require-unichain"}).code == 0);
    const auto r = io::read_json(report);
    CHECK(std::abs(r.at("average_reward").get<double>() - metrics.at("objective").get<double>()) <= 1e-7);
    CHECK(slurp(ctrl) == ctrl_bytes);
    CHECK(line_count(plots + "/objective_history.csv") == metrics.at("history").size() + 1);

    // Written files parse back to equal objects.
    const DecPomdp m = io::model_from_json(io::read_json(model));
    CHECK(io::model_from_json(io::model_to_json(m)) == m);
    const FscPolicy p = io::controller_from_json(io::read_json(ctrl));
    CHECK(io::controller_from_json(io::controller_to_json(p)) == p);
    CHECK(p.nodes_per_agent() == std::vector<std::size_t>{1, 2});

    // Same seed, same bytes.
    const std::string ctrl2 = path("pipeline_ctrl2.json");
    REQUIRE(invoke({"solve", "--model", model, "--nodes", "1,2", "--restarts", "2", "--max-iters", "15", "--seed", "4",
                    "--out", ctrl2})
                .code == 0);
    CHECK(slurp(ctrl2) == ctrl_bytes);
}

TEST_CASE("eval on a mismatched controller exits 1 and names the axis") {
    const std::string model = path("mismatch_model.json"), ctrl = path("mismatch_ctrl.json");
    REQUIRE(invoke({"scenario", "--out", model}).code == 0);
    FscPolicy p{{AgentController::uniform(1, 2, 2), AgentController::uniform(1, 3, 2)}};
    io::write_json_atomic(ctrl, io::controller_to_json(p));
    const Outcome o = invoke({"eval", "--model", model, "--controller", ctrl});
    CHECK(o.code == 1);
    CHECK(o.err.find("actions") != std::string::npos);
    CHECK(std::count(o.err.begin(), o.err.end(), '\n') == 1);
}

TEST_CASE("simulate writes a trace with one row per step") {
    const std::string model = path("sim_model.json"), ctrl = path("sim_ctrl.json"), trace = path("sim_trace.csv");
    const std::string summary = path("sim_summary.json");
    REQUIRE(invoke({"scenario", "--out", model}).code == 0);
    io::write_json_atomic(ctrl, io::controller_to_json(FscPolicy{{AgentController::uniform(2, 3, 2),
                                                                  AgentController::uniform(1, 3, 2)}}));
    const Outcome o = invoke({"simulate", "--model", model, "--controller", ctrl, "--steps", "200", "--replications",
                              "3", "--burn-in", "20", "--seed", "5", "--trace", trace, "--out", summary,
                              "--emit-plot-data", path("simplots")});
    REQUIRE(o.code == 0);
    CHECK(line_count(trace) == 3 * 200 + 1);
    CHECK(line_count(path("simplots") + "/reward_per_step.csv") == 200 + 1);
    const auto s = io::read_json(summary);
    CHECK(s.at("replication_means").size() == 3);
    const std::string first = slurp(trace);
    REQUIRE(invoke({"simulate", "--model", model, "--controller", ctrl, "--steps", "200", "--replications", "3",
                    "--burn-in", "20", "--seed", "5", "--trace", trace})
                .code == 0);
    CHECK(slurp(trace) == first);
}

TEST_CASE("exit codes follow the error kind") {
    const std::string model = path("codes_model.json");
    REQUIRE(invoke({"scenario", "--out", model}).code == 0);
    CHECK(invoke({"validate", "--model", path("does_not_exist.json")}).code == 2);
    std::ofstream(path("garbage.json")) << "[1, 2";
    CHECK(invoke({"validate", "--model", path("garbage.json")}).code == 2);

    // A model whose rows do not sum to one is a domain error.
    auto j = io::read_json(model);
    j["transition"][0][0][0] = 0.5;
    io::write_json_atomic(path("bad_rows.json"), j);
    const Outcome bad = invoke({"validate", "--model", path("bad_rows.json")});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("transition[s=0][a=0]") != std::string::npos);

    // Oracle guard.
    CHECK(invoke({"enumerate", "--model", model, "--nodes", "4", "--out", path("enum.json")}).code == 1);
    REQUIRE(invoke({"enumerate", "--model", model, "--nodes", "1", "--out", path("enum.json")}).code == 0);
    CHECK(io::read_json(path("enum.json.metrics.json")).contains("objective"));

    // Multichain refusal: both states are absorbing.
    nlohmann::json two = {{"agents", 1},
                          {"states", {"a", "b"}},
                          {"actions", {"x"}},
                          {"observations", {"o"}},
                          {"transition", {{{1.0, 0.0}}, {{0.0, 1.0}}}},
                          {"observation", {{{{1.0}, {1.0}}}}},
                          {"reward", {{1.0}, {2.0}}}};
    io::write_json_atomic(path("reducible.json"), two);
    io::write_json_atomic(path("one_node.json"), io::controller_to_json(FscPolicy{{AgentController::uniform(1, 1, 1)}}));
    CHECK(invoke({"eval", "--model", path("reducible.json"), "--controller", path("one_node.json")}).code == 0);
    CHECK(invoke({"eval", "--model", path("reducible.json"), "--controller", path("one_node.json"),
                  "--require-unichain"})
              .code == 1);
}

TEST_CASE("the installed binary honours the exit-code contract") {
    const std::string bin = DECPOMDP_CLI_BINARY;
    const auto run = [&](const std::string& args) {
        const int status = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    CHECK(run("scenario --out " + path("bin_model.json")) == 0);
    CHECK(run("validate --model " + path("bin_model.json")) == 0);
    CHECK(run("solve --out x.json") == 2);
    CHECK(run("validate --model " + path("nope.json")) == 2);
}

} // TEST_SUITE
