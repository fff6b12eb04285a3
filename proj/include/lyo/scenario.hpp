#pragma once

// Scenario documents: a JSON object whose keys carry their SI unit as a
// suffix (h_b_W_per_m2K, T_b_K, ...). Missing keys fall back to the default
// parameter set, unknown keys are rejected, and every value consumed is
// echoed into Scenario::effective so a run can be audited afterwards.
//
// Schedules are either a number or a list of [t_s, value] pairs
// (piecewise linear, held outside the table).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lyo/analysis.hpp"
#include "lyo/chamber.hpp"
#include "lyo/pipeline.hpp"

namespace lyo {

enum class Stage { Freezing, PrimaryDrying, SecondaryDrying };
const char* stage_key(Stage s);

struct ReferenceThresholds {
    std::optional<double> rmse;
    std::optional<double> max_abs;
    std::optional<double> terminal_time_delta_s;
    std::optional<double> terminal_time_rel;  // |delta| / reference terminal time
};

struct ReferenceSeries {
    std::string name;
    std::string run;         // which output it is compared with: freeze | primary | secondary | cycle | failure
    std::string observable;  // trajectory column, e.g. "T_bottom_K"
    std::string units;
    std::vector<double> t, value;
    std::optional<double> terminal_time_s;
    ReferenceThresholds thresholds;
};

struct AnalysisInputs {
    std::vector<double> h_W_per_m2K{8.0, 65.0};
    double length_m = 0.012;  // conduction length (vial radius)
    double k_W_per_mK = 2.25;
    double Fo_max = 10.0;
    int Fo_points = 201;
    int n_terms = 20;
    PorousMedium medium{};
    double T_K = 256.0;
    double M_g_per_mol = 18.0;
    double diffusion_length_m = 0.01;
    double k_d_per_s = 7.8e-5;
    double solid_length_m = 5e-7;
    double solid_diffusivity_m2_per_s = 7e-16;
};

struct Scenario {
    std::string name = "unnamed";
    std::vector<Stage> stages{Stage::Freezing, Stage::PrimaryDrying, Stage::SecondaryDrying};
    std::uint64_t seed = 0;
    CycleConfig cycle{};
    // Initial temperatures for stand-alone drying runs (absent means the
    // stage can only run chained).
    std::optional<double> primary_T0;
    std::optional<double> secondary_T0;
    ChamberModel chamber{};
    bool chamber_in_cycle = false;
    AnalysisInputs analysis{};
    std::vector<ReferenceSeries> references;
    nlohmann::json effective;  // merged parameter set actually used

    bool has_stage(Stage s) const;
};

// Both throw SchemaError with a path to the offending key.
Scenario parse_scenario(const nlohmann::json& doc, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

// Sets a dotted path ("primary_drying.T_b_K") to a number, creating objects
// as needed. Used by the sweep driver before parsing.
void set_scenario_value(nlohmann::json& doc, const std::string& dotted_path, double value);

// Reads a two-column reference CSV (header row, then t_s,value).
void read_reference_csv(const std::string& path, ReferenceSeries& out);

}  // namespace lyo
