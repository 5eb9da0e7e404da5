#pragma once

#include "decpomdp/controller.hpp"
#include "decpomdp/evaluate.hpp"
#include "decpomdp/model.hpp"
#include "decpomdp/scenario.hpp"
#include "decpomdp/sim.hpp"
#include "decpomdp/solve.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace decpomdp::io {

// Conversions throw FormatError with the JSON path of the first bad field.

nlohmann::json model_to_json(const DecPomdp& model);
DecPomdp model_from_json(const nlohmann::json& j);

nlohmann::json scenario_to_json(const ScenarioConfig& config);
/// Missing fields take their defaults.
ScenarioConfig scenario_from_json(const nlohmann::json& j);

nlohmann::json controller_to_json(const FscPolicy& policy);
FscPolicy controller_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const EvalReport& report);
nlohmann::json solve_metrics_to_json(const SolveResult& result);
nlohmann::json sim_summary_to_json(const SimTrace& trace);

/// Header plus one row per record:
/// replication,t,state,node_vector,action_vector,obs_vector,reward
std::string trace_csv(const SimTrace& trace);

nlohmann::json read_json(const std::filesystem::path& path);
/// Writes through a sibling temporary file and a rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace decpomdp::io
