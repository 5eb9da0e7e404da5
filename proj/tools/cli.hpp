#pragma once

#include "decpomdp/sim.hpp"
#include "decpomdp/solve.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace decpomdp::cli {

enum class Command { scenario, solve, eval, enumerate, simulate, validate };

/// Bad command line; the message names the offending flag.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by parse_args when --help was given; what() is the help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommandSpec {
    Command command = Command::validate;
    std::string model;
    std::string controller;
    std::string config;
    std::string out;
    std::string metrics;
    std::string trace;
    std::string plot_dir;
    /// One entry applies to every agent.
    std::vector<std::size_t> nodes{1};
    SolveConfig solve;
    SimConfig sim;
    bool require_unichain = false;
    bool oracle = false;
};

/// argv[0] is the program name. Throws UsageError.
CommandSpec parse_args(const std::vector<std::string>& argv);

/// Exit status: 0 success, 1 domain error, 2 I/O or format error.
int run_command(const CommandSpec& spec, std::ostream& out, std::ostream& err);

/// parse_args + run_command with usage errors mapped to exit status 2.
int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace decpomdp::cli
