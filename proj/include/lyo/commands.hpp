#pragma once

// The simulation behind each command-line subcommand, independent of file
// handling so tests can drive it directly.

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lyo/io.hpp"
#include "lyo/scenario.hpp"

namespace lyo {

struct CommandOutput {
    nlohmann::json summary;                          // stage times and key observables
    std::vector<std::pair<std::string, Table>> tables;  // file stem -> trajectory
    std::vector<ComparisonReport> comparisons;
    bool references_passed = true;
};

// command is one of freeze, primary, secondary, cycle, failure, analyze.
// Throws SchemaError when the scenario cannot serve the command (stage not
// selected, stand-alone initial temperature missing, reference column
// unknown) and SimulationError when a stage fails.
CommandOutput run_command(const std::string& command, const Scenario& scenario);

const std::vector<std::string>& command_names();

}  // namespace lyo
