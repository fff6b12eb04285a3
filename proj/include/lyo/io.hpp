#pragma once

// Flat-file output: column tables of stage trajectories written as CSV
// (comma, '.', header row, shortest round-trip doubles, independent of the
// process locale) or as JSON, plus the reference-comparison harness.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lyo/pipeline.hpp"
#include "lyo/scenario.hpp"

namespace lyo {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // one vector per column

    std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
    void add(std::string name, std::vector<double> values);
    const std::vector<double>& column(const std::string& name) const;  // throws std::out_of_range
    bool has(const std::string& name) const;
};

// Shortest representation that parses back to the same double; NaN becomes
// an empty field.
std::string format_double(double v);

std::string to_csv(const Table& t);
nlohmann::json to_json(const Table& t);  // {"columns": [...], "rows": [[...], ...]}
void write_text(const std::string& path, const std::string& content);

// Trajectory tables. Drying stages are sampled from the dense output on a
// uniform clock of spacing dt (plus the final instant).
Table freezing_table(const FreezingResult& r, const FreezingProtocol& p);
Table primary_table(const PrimaryResult& r, const PrimaryModel& m, double dt);
Table secondary_table(const SecondaryResult& r, const SecondaryModel& m, double dt);
Table cycle_table(const CycleResult& r);

struct ComparisonReport {
    std::string name, observable;
    std::size_t points = 0;
    double rmse = 0, max_abs = 0;
    std::optional<double> terminal_time_delta;  // simulated minus reference, s
    bool passed = true;
    std::vector<std::string> exceeded;  // metrics over their threshold

    nlohmann::json to_json() const;
};

// Linear interpolation of the simulation onto reference times that fall
// inside the simulated range. Throws std::domain_error when the ranges do not
// overlap.
ComparisonReport compare_with_reference(const std::vector<double>& sim_t, const std::vector<double>& sim_v,
                                        const ReferenceSeries& ref,
                                        std::optional<double> sim_terminal_time = std::nullopt);

}  // namespace lyo
