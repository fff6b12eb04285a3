#pragma once

// Freezing, primary drying and secondary drying chained into one cycle.
//
// Freezing schedules use the cycle clock. Primary-drying schedules count from
// the primary handoff and secondary-drying schedules from t_d1, so a stage
// protocol reads the same whether the stage runs alone or inside a cycle.

#include <optional>
#include <string>
#include <vector>

#include "lyo/chamber.hpp"
#include "lyo/drying_primary.hpp"
#include "lyo/drying_secondary.hpp"
#include "lyo/freezing.hpp"

namespace lyo {

enum class PrimaryHandoff {
    EndOfFreezing,     // t_f5, after final cooling (default)
    EndOfSolidification  // t_f4, the literal alternative
};

struct CycleConfig {
    FreezingModel freezing{};
    double T0 = 298.15;  // initial product temperature, K
    PrimaryModel primary{};
    SecondaryModel secondary{};
    double c_w0 = 0.088;  // bound water at the start of secondary drying, kg/kg
    PrimaryHandoff handoff = PrimaryHandoff::EndOfFreezing;
    double extra_heating_time = 0.0;  // s of conduction-only hold before secondary drying
    std::optional<ChamberModel> chamber;  // condenser-limited primary drying when set
    double output_dt = 60.0;  // s, common output clock
};

struct WaterBalance {
    double initial = 0;          // water filled into the vial, kg
    double visf_evaporated = 0;  // lost before nucleation
    double ice_sublimed = 0;     // front sweep A_z (rho_f - rho_e) S
    double bound_removed = 0;    // rho_d V (c0 - c_end)
    double bound_residual = 0;   // rho_d V c_end
    double accounted() const { return visf_evaporated + ice_sublimed + bound_removed + bound_residual; }
    double closure() const { return (accounted() - initial) / initial; }
};

// Samples on the common output clock. Stage codes: 0 freezing, 1 primary
// drying, 2 extra heating, 3 secondary drying.
struct CycleTrace {
    std::vector<double> t, T_avg, T_bottom, T_top, m_w, m_i, S, c_avg, p, T_shelf, T_wall, T_gas;
    std::vector<int> stage;
};

struct CycleResult {
    FreezingResult freezing;
    PrimaryResult primary;
    std::optional<SecondaryResult> hold;
    SecondaryResult secondary;
    double t_f1 = 0, t_f2 = 0, t_f3 = 0, t_f4 = 0, t_f5 = 0, t_d1 = 0, t_d2 = 0;
    double primary_start = 0;    // handoff time actually used
    double secondary_start = 0;
    double m_ice_start = 0;      // ice entering primary drying
    WaterBalance water;
    CycleTrace trace;
};

// Runs the full cycle. Stage failures surface as SimulationError with the
// failing stage in its tag.
CycleResult run_full_cycle(const CycleConfig& cfg);

// Maps a profile onto n nodes of the same normalized coordinate (exact copy
// when sizes agree).
std::vector<double> resample_profile(const std::vector<double>& v, std::size_t n);

const char* cycle_stage_name(int code);

}  // namespace lyo
