#include "lyo/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lyo/errors.hpp"

namespace lyo {

namespace {

double lerp_at(const std::vector<double>& t, const std::vector<double>& v, double x) {
    if (x <= t.front()) return v.front();
    if (x >= t.back()) return v.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double t0 = t[i - 1], t1 = t[i];
    if (t1 == t0) return v[i];
    const double w = (x - t0) / (t1 - t0);
    return v[i - 1] + w * (v[i] - v[i - 1]);
}

// Clock: uniform grid plus every stage boundary.
std::vector<double> build_clock(double t_end, double dt, std::vector<double> marks) {
    std::vector<double> clock;
    for (double t = 0.0; t < t_end; t += dt) clock.push_back(t);
    marks.push_back(t_end);
    clock.insert(clock.end(), marks.begin(), marks.end());
    std::sort(clock.begin(), clock.end());
    clock.erase(std::unique(clock.begin(), clock.end()), clock.end());
    return clock;
}

}  // namespace

std::vector<double> resample_profile(const std::vector<double>& v, std::size_t n) {
    if (v.size() == n) return v;
    if (v.size() < 2 || n < 2) throw std::invalid_argument("resample_profile: need at least two nodes");
    std::vector<double> xs(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) xs[i] = static_cast<double>(i) / static_cast<double>(v.size() - 1);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = lerp_at(xs, v, static_cast<double>(j) / static_cast<double>(n - 1));
    return out;
}

const char* cycle_stage_name(int code) {
    switch (code) {
        case 0: return "freezing";
        case 1: return "primary_drying";
        case 2: return "extra_heating";
        case 3: return "secondary_drying";
    }
    return "unknown";
}

CycleResult run_full_cycle(const CycleConfig& cfg) {
    if (!(cfg.output_dt > 0.0)) throw std::invalid_argument("CycleConfig: output_dt must be positive");
    if (!(cfg.c_w0 >= 0.0)) throw std::invalid_argument("CycleConfig: c_w0 must be non-negative");
    if (!(cfg.extra_heating_time >= 0.0)) throw std::invalid_argument("CycleConfig: extra_heating_time must be non-negative");

    CycleResult r;

    // Freezing.
    const VialState v0 = initial_vial_state(cfg.freezing, cfg.T0);
    r.freezing = run_freezing(cfg.freezing, v0);
    const auto& fr = r.freezing;
    r.t_f1 = fr.t_f1;
    r.t_f2 = fr.t_f2;
    r.t_f3 = fr.t_f3;
    r.t_f4 = fr.t_f4;
    r.t_f5 = fr.t_f5;

    double T_handoff = fr.final_state.T;
    r.m_ice_start = fr.final_state.m_i;
    r.primary_start = fr.t_f5;
    if (cfg.handoff == PrimaryHandoff::EndOfSolidification) {
        const auto it = std::find_if(fr.segments.begin(), fr.segments.end(),
                                     [](const FreezeSegment& s) { return s.stage == FreezeStage::Solidification; });
        if (it == fr.segments.end()) throw SimulationError("freezing", "no solidification segment");
        T_handoff = it->T.back();
        r.m_ice_start = it->m_i.back();
        r.primary_start = fr.t_f4;
    }

    // Drying schedules are written relative to the start of their stage.
    PrimaryModel primary = cfg.primary;
    primary.params.T_b = primary.params.T_b.shifted(r.primary_start);
    primary.params.T_c = primary.params.T_c.shifted(r.primary_start);
    primary.params.T_u = primary.params.T_u.shifted(r.primary_start);

    // Primary drying from a uniform profile.
    if (cfg.chamber) {
        r.primary = run_primary_with_condenser(primary, *cfg.chamber, std::span<const double>(&T_handoff, 1),
                                               r.primary_start);
    } else {
        r.primary = run_primary(primary, std::span<const double>(&T_handoff, 1), r.primary_start);
    }
    r.t_d1 = r.primary.t_d1;

    // Optional hold, then secondary drying from the exact end profile. The
    // secondary schedules count from the end of primary drying.
    SecondaryModel secondary = cfg.secondary;
    secondary.conditions.T_b = secondary.conditions.T_b.shifted(r.t_d1);
    secondary.conditions.T_c = secondary.conditions.T_c.shifted(r.t_d1);
    secondary.conditions.T_u = secondary.conditions.T_u.shifted(r.t_d1);
    const std::size_t ns = secondary.n_z;
    std::vector<double> T_sec = resample_profile(r.primary.final_profile(), ns);
    std::vector<double> c_sec(ns, cfg.c_w0);
    r.secondary_start = r.t_d1;
    if (cfg.extra_heating_time > 0.0) {
        r.hold = run_conduction_hold(secondary, T_sec, c_sec, r.t_d1, cfg.extra_heating_time);
        const std::size_t last = r.hold->t.size() - 1;
        T_sec = r.hold->T_profile(last);
        c_sec = r.hold->c_profile(last);
        r.secondary_start = r.hold->t_end;
    }
    r.secondary = run_secondary(secondary, T_sec, c_sec, r.secondary_start);
    r.t_d2 = r.secondary.t_end;

    // Water accounting for one vial.
    const auto& g = cfg.primary.geometry;
    const auto& dp = cfg.primary.params;
    const auto& kin = cfg.secondary.kinetics;
    const double V_e = cfg.secondary.geometry.A_z * cfg.secondary.geometry.H;
    r.water.initial = fr.m_w0;
    const double water_at_nucleation = fr.solidification.m_water_total;
    r.water.visf_evaporated = fr.m_w0 - water_at_nucleation;
    r.water.ice_sublimed = g.A_z * (dp.rho_f - dp.rho_e) * r.primary.S.back();
    r.water.bound_removed = kin.rho_d * V_e * (r.secondary.c_avg.front() - r.secondary.c_avg.back());
    r.water.bound_residual = kin.rho_d * V_e * r.secondary.c_avg.back();

    // Common output clock.
    const double freeze_end = r.primary_start;
    std::vector<double> marks{r.t_f1, r.t_f2, r.t_f3, r.t_f4, r.t_f5, r.t_d1, r.secondary_start};
    marks.erase(std::remove_if(marks.begin(), marks.end(), [&](double m) { return m > r.t_d2; }), marks.end());
    const auto clock = build_clock(r.t_d2, cfg.output_dt, marks);

    const auto& prot = cfg.freezing.protocol;
    const Schedule p_visf = visf_pressure(prot, r.t_f1);
    CycleTrace& tr = r.trace;
    for (double t : clock) {
        tr.t.push_back(t);
        if (t < freeze_end || (t == freeze_end && t == 0.0)) {
            // Freezing: the last segment that starts at or before t.
            const FreezeSegment* seg = &fr.segments.front();
            for (const auto& s : fr.segments) {
                if (!s.t.empty() && s.t.front() <= t) seg = &s;
            }
            const double T = lerp_at(seg->t, seg->T, t);
            tr.stage.push_back(0);
            tr.T_avg.push_back(T);
            tr.T_bottom.push_back(T);
            tr.T_top.push_back(T);
            tr.m_w.push_back(lerp_at(seg->t, seg->m_w, t));
            tr.m_i.push_back(lerp_at(seg->t, seg->m_i, t));
            tr.S.push_back(0.0);
            tr.c_avg.push_back(std::nan(""));
            const bool before = t < r.t_f3 || (r.t_f3 == 0.0 && t < r.t_f2);
            const Surroundings& env = before ? prot.before : prot.after;
            const bool in_visf = prot.visf && prot.mode == NucleationMode::Controlled && t >= r.t_f1 && t < r.t_f2;
            tr.p.push_back(in_visf ? p_visf(t) : prot.p_t);
            tr.T_shelf.push_back(std::nan(""));
            tr.T_wall.push_back(env.T_c(t));
            tr.T_gas.push_back(env.T_g(t));
        } else if (t <= r.t_d1) {
            const auto& P = r.primary;
            const double S = lerp_at(P.t, P.S, t);
            tr.stage.push_back(1);
            tr.T_avg.push_back(lerp_at(P.t, P.T_avg, t));
            tr.T_bottom.push_back(lerp_at(P.t, P.T_bottom, t));
            tr.T_top.push_back(lerp_at(P.t, P.T_top, t));
            tr.m_w.push_back(0.0);
            tr.m_i.push_back(r.m_ice_start * std::max(0.0, 1.0 - S / P.H));
            tr.S.push_back(S);
            tr.c_avg.push_back(std::nan(""));
            tr.p.push_back(lerp_at(P.t, P.p_w_c, t));
            tr.T_shelf.push_back(primary.params.T_b(t));
            tr.T_wall.push_back(primary.params.T_c(t));
            tr.T_gas.push_back(std::nan(""));
        } else {
            const bool holding = r.hold && t <= r.secondary_start;
            const SecondaryResult& Q = holding ? *r.hold : r.secondary;
            const auto& bc = secondary.conditions;
            tr.stage.push_back(holding ? 2 : 3);
            tr.T_avg.push_back(lerp_at(Q.t, Q.T_avg, t));
            tr.T_bottom.push_back(lerp_at(Q.t, Q.T_bottom, t));
            tr.T_top.push_back(lerp_at(Q.t, Q.T_top, t));
            tr.m_w.push_back(0.0);
            tr.m_i.push_back(0.0);
            tr.S.push_back(g.H);
            tr.c_avg.push_back(lerp_at(Q.t, Q.c_avg, t));
            tr.p.push_back(dp.p_w_c);
            tr.T_shelf.push_back(bc.T_b(t));
            tr.T_wall.push_back(bc.T_c(t));
            tr.T_gas.push_back(std::nan(""));
        }
    }
    return r;
}

}  // namespace lyo
