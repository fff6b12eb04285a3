#include "lyo/commands.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lyo/analysis.hpp"
#include "lyo/errors.hpp"

namespace lyo {

using nlohmann::json;

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"freeze", "primary", "secondary", "cycle", "failure", "analyze"};
    return names;
}

namespace {

void require_stage(const Scenario& sc, Stage s, const std::string& command) {
    if (!sc.has_stage(s)) {
        throw SchemaError("stages: '" + command + "' needs " + stage_key(s) + " in the stage selection");
    }
}

double require_T0(const std::optional<double>& T0, Stage s) {
    if (!T0) throw SchemaError(std::string(stage_key(s)) + ".T0_K: required for a stand-alone run");
    return *T0;
}

json freezing_summary(const FreezingResult& r) {
    return {{"t_f1_s", r.t_f1},
            {"t_f2_s", r.t_f2},
            {"t_f3_s", r.t_f3},
            {"t_f4_s", r.t_f4},
            {"t_f5_s", r.t_f5},
            {"T_nucleation_K", r.T_nucleation},
            {"T_after_nucleation_K", r.nucleation.T_fl},
            {"T_end_K", r.final_state.T},
            {"m_w0_kg", r.m_w0},
            {"m_s_kg", r.m_s},
            {"m_w_end_kg", r.final_state.m_w},
            {"m_i_end_kg", r.final_state.m_i}};
}

double peak(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

json primary_summary(const PrimaryResult& r) {
    return {{"t0_s", r.t0},
            {"t_d1_s", r.t_d1},
            {"duration_s", r.t_d1 - r.t0},
            {"T_bottom_end_K", r.T_bottom.back()},
            {"T_bottom_peak_K", peak(r.T_bottom)},
            {"T_avg_peak_K", peak(r.T_avg)},
            {"p_w_c_peak_Pa", peak(r.p_w_c)},
            {"steps", r.solution.stats.steps}};
}

json secondary_summary(const SecondaryResult& r) {
    return {{"t0_s", r.t0},
            {"t_d2_s", r.t_end},
            {"duration_s", r.t_end - r.t0},
            {"c_avg_start_kg_per_kg", r.c_avg.front()},
            {"c_avg_end_kg_per_kg", r.c_avg.back()},
            {"T_avg_end_K", r.T_avg.back()},
            {"steps", r.solution.stats.steps}};
}

SecondaryResult secondary_with_hold(const Scenario& sc, double T0) {
    const auto& m = sc.cycle.secondary;
    std::vector<double> T(m.n_z, T0), c(m.n_z, sc.cycle.c_w0);
    double t0 = 0.0;
    if (sc.cycle.extra_heating_time > 0.0) {
        const auto hold = run_conduction_hold(m, T, c, 0.0, sc.cycle.extra_heating_time);
        T = hold.T_profile(hold.t.size() - 1);
        t0 = hold.t_end;
    }
    return run_secondary(m, T, c, t0);
}

// Chamber flow balance residual |j_w - j_w,max| / j_w,max at sample i.
double flow_residual(const PrimaryResult& r, const ChamberModel& c, double A_z, std::size_t i) {
    return std::abs(vapor_flow(c, r.N_w[i], A_z) - c.j_w_max) / c.j_w_max;
}

CommandOutput analyze(const AnalysisInputs& a) {
    CommandOutput out;
    json biot = json::array();
    Table theta;
    std::vector<double> Fo(static_cast<std::size_t>(a.Fo_points));
    for (std::size_t i = 0; i < Fo.size(); ++i) {
        Fo[i] = a.Fo_max * static_cast<double>(i) / static_cast<double>(Fo.size() - 1);
    }
    theta.add("Fo", Fo);
    for (double h : a.h_W_per_m2K) {
        const double Bi = biot_number(h, a.length_m, a.k_W_per_mK);
        std::vector<double> series(Fo.size()), lumped(Fo.size());
        double gap = 0.0;
        for (std::size_t i = 0; i < Fo.size(); ++i) {
            series[i] = cylinder_transient_theta(Bi, Fo[i], a.n_terms);
            lumped[i] = lumped_cylinder_theta(Bi, Fo[i]);
            gap = std::max(gap, std::abs(series[i] - lumped[i]));
        }
        const double fo_series = cylinder_fourier_to_theta(Bi, 0.01, a.n_terms);
        const double fo_lumped = std::log(100.0) / (2.0 * Bi);
        biot.push_back({{"h_W_per_m2K", h},
                        {"Bi", Bi},
                        {"lambda_1", cylinder_eigenvalues(Bi, 1).front()},
                        {"max_abs_theta_gap", gap},
                        {"Fo_theta_0.01_series", fo_series},
                        {"Fo_theta_0.01_lumped", fo_lumped},
                        {"lumped_adequate", Bi < 0.1}});
        const std::string tag = format_double(h);
        theta.add("theta_series_h" + tag, std::move(series));
        theta.add("theta_lumped_h" + tag, std::move(lumped));
    }
    const auto D = effective_diffusivity(a.medium, a.T_K, a.M_g_per_mol);
    const auto ts = time_scales(a.diffusion_length_m, D.D_e, a.k_d_per_s);
    out.summary = {
        {"biot", biot},
        {"diffusivity_m2_per_s", {{"D_K", D.D_K}, {"D_e_g", D.D_e_g}, {"D_e_K", D.D_e_K}, {"D_e", D.D_e}}},
        {"time_scales",
         {{"t_diff_s", ts.t_diff},
          {"t_des_s", ts.t_des},
          {"t_des_h", ts.t_des / 3600.0},
          {"ratio_des_to_diff", ts.t_des / ts.t_diff},
          {"limiting", limiting_name(ts.limiting)}}},
        {"solid_diffusion_time_s", diffusion_time(a.solid_length_m, a.solid_diffusivity_m2_per_s)}};
    out.tables.emplace_back("analysis_theta", std::move(theta));
    return out;
}

}  // namespace

CommandOutput run_command(const std::string& command, const Scenario& sc) {
    CommandOutput out;
    // References compare against the first table of the run and its
    // terminal time.
    const Table* ref_table = nullptr;
    std::optional<double> terminal;

    if (command == "freeze") {
        require_stage(sc, Stage::Freezing, command);
        const auto r = run_freezing(sc.cycle.freezing, initial_vial_state(sc.cycle.freezing, sc.cycle.T0));
        out.summary = {{"freezing", freezing_summary(r)}};
        out.tables.emplace_back("freeze_trajectory", freezing_table(r, sc.cycle.freezing.protocol));
        terminal = r.t_f5;
    } else if (command == "primary") {
        require_stage(sc, Stage::PrimaryDrying, command);
        const double T0 = require_T0(sc.primary_T0, Stage::PrimaryDrying);
        const auto r = run_primary(sc.cycle.primary, std::span<const double>(&T0, 1));
        out.summary = {{"primary_drying", primary_summary(r)}};
        out.tables.emplace_back("primary_trajectory", primary_table(r, sc.cycle.primary, sc.cycle.output_dt));
        terminal = r.t_d1;
    } else if (command == "secondary") {
        require_stage(sc, Stage::SecondaryDrying, command);
        const double T0 = require_T0(sc.secondary_T0, Stage::SecondaryDrying);
        const auto r = secondary_with_hold(sc, T0);
        out.summary = {{"secondary_drying", secondary_summary(r)}};
        out.tables.emplace_back("secondary_trajectory", secondary_table(r, sc.cycle.secondary, sc.cycle.output_dt));
        terminal = r.t_end;
    } else if (command == "cycle") {
        for (Stage s : {Stage::Freezing, Stage::PrimaryDrying, Stage::SecondaryDrying}) require_stage(sc, s, command);
        const auto r = run_full_cycle(sc.cycle);
        const auto& w = r.water;
        out.summary = {{"freezing", freezing_summary(r.freezing)},
                       {"primary_drying", primary_summary(r.primary)},
                       {"secondary_drying", secondary_summary(r.secondary)},
                       {"stage_times_s",
                        {{"t_f1", r.t_f1}, {"t_f2", r.t_f2}, {"t_f3", r.t_f3}, {"t_f4", r.t_f4},
                         {"t_f5", r.t_f5}, {"t_d1", r.t_d1}, {"t_d2", r.t_d2}}},
                       {"residence_times_s",
                        {{"freezing", r.primary_start},
                         {"primary_drying", r.t_d1 - r.primary_start},
                         {"secondary_drying", r.t_d2 - r.t_d1}}},
                       {"water_balance_kg",
                        {{"initial", w.initial},
                         {"visf_evaporated", w.visf_evaporated},
                         {"ice_sublimed", w.ice_sublimed},
                         {"bound_removed", w.bound_removed},
                         {"bound_residual", w.bound_residual},
                         {"relative_closure", w.closure()}}}};
        out.tables.emplace_back("cycle_trajectory", cycle_table(r));
        out.tables.emplace_back("freeze_trajectory", freezing_table(r.freezing, sc.cycle.freezing.protocol));
        terminal = r.t_d2;
    } else if (command == "failure") {
        require_stage(sc, Stage::PrimaryDrying, command);
        const double T0 = require_T0(sc.primary_T0, Stage::PrimaryDrying);
        const auto& m = sc.cycle.primary;
        const auto base = run_primary(m, std::span<const double>(&T0, 1));
        const auto fail = run_primary_with_condenser(m, sc.chamber, std::span<const double>(&T0, 1));
        const auto imax = static_cast<std::size_t>(
            std::max_element(fail.p_w_c.begin(), fail.p_w_c.end()) - fail.p_w_c.begin());
        out.summary = {{"baseline", primary_summary(base)},
                       {"condenser_limited", primary_summary(fail)},
                       {"plateau",
                        {{"p_w_c_Pa", fail.p_w_c[imax]},
                         {"t_s", fail.t[imax]},
                         {"flow_residual", flow_residual(fail, sc.chamber, m.geometry.A_z, imax)}}},
                       {"t_d1_increase_s", fail.t_d1 - base.t_d1},
                       {"T_bottom_peak_increase_K", peak(fail.T_bottom) - peak(base.T_bottom)}};
        out.tables.emplace_back("failure_condenser_limited", primary_table(fail, m, sc.cycle.output_dt));
        out.tables.emplace_back("failure_baseline", primary_table(base, m, sc.cycle.output_dt));
        terminal = fail.t_d1;
    } else if (command == "analyze") {
        out = analyze(sc.analysis);
    } else {
        throw std::invalid_argument("unknown command '" + command + "'");
    }
    if (!out.tables.empty()) ref_table = &out.tables.front().second;

    json comps = json::array();
    for (const auto& ref : sc.references) {
        if (ref.run != command) continue;
        if (!ref_table) throw SchemaError("references." + ref.name + ": '" + command + "' has no trajectory");
        if (!ref_table->has(ref.observable)) {
            throw SchemaError("references." + ref.name + ".observable: no column '" + ref.observable + "' in the " +
                              command + " trajectory");
        }
        ComparisonReport rep;
        try {
            rep = compare_with_reference(ref_table->column("t_s"), ref_table->column(ref.observable), ref, terminal);
        } catch (const std::domain_error& e) {
            throw SchemaError(std::string("references.") + ref.name + ": " + e.what());
        }
        out.references_passed = out.references_passed && rep.passed;
        comps.push_back(rep.to_json());
        out.comparisons.push_back(std::move(rep));
    }
    if (!comps.empty()) out.summary["references"] = comps;
    out.summary["command"] = command;
    out.summary["scenario"] = sc.name;
    return out;
}

}  // namespace lyo
