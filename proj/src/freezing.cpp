#include "lyo/freezing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lyo/errors.hpp"

namespace lyo {

const char* stage_name(FreezeStage s) {
    switch (s) {
        case FreezeStage::Preconditioning: return "preconditioning";
        case FreezeStage::Visf: return "visf";
        case FreezeStage::Nucleation: return "nucleation";
        case FreezeStage::Solidification: return "solidification";
        case FreezeStage::FinalCooling: return "final_cooling";
        case FreezeStage::Done: return "done";
    }
    return "unknown";
}

void FreezingProtocol::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(std::string("FreezingProtocol: ") + msg);
    };
    require(h_s1 > 0 && h_s2 > 0 && h_s3 > 0, "heat-transfer coefficients must be positive");
    require(h_m >= 0, "h_m must be non-negative");
    require(precondition_time >= 0, "precondition_time must be non-negative");
    require(p_t > 0 && p_t_visf > 0, "total pressures must be positive");
    require(visf_ramp_time >= 0, "visf_ramp_time must be non-negative");
    require(p_w_c >= 0, "p_w_c must be non-negative");
    require(k_n >= 0 && b_n >= 0, "nucleation kinetics must be non-negative");
    require(nucleation_dt > 0, "nucleation_dt must be positive");
    require(solidification_fraction >= 0.85 && solidification_fraction <= 0.95,
            "solidification_fraction must lie in [0.85, 0.95]");
    require(T_target > 0 && T_target_tol > 0, "final-cooling target must be positive");
    require(horizon > 0, "horizon must be positive");
    require(dH_fus > 0, "dH_fus must be positive");
    radiation.validate();
}

// ------------------------------------------------------------------
// Liquid stages
// ------------------------------------------------------------------

HeatTerms liquid_heat(const FreezingModel& m, const Surroundings& env, double t, double T,
                      double m_w, double m_i) {
    const auto& p = m.protocol;
    const auto& f = m.formulation;
    const double A_z = cross_section(m.d);
    const double m_s = mixture_properties(f, m.d).m_s;
    const double A_r = product_side_area(m_s, m_w, m_i, f, m.d);
    const double T_g = env.T_g(t);
    HeatTerms q{};
    q.Q_s1 = p.h_s1 * A_z * (env.T_u(t) - T);
    q.Q_s2 = p.h_s2 * A_z * (T_g - T);
    q.Q_s3 = p.h_s3 * A_r * (T_g - T) +
             radiation_exchange(T, env.T_c(t), p.radiation.F_s3, A_r, p.radiation.sigma);
    return q;
}

double water_mass_fraction(double p_w, double p_t, double M_w, double M_in) {
    const double num = p_w * M_w;
    return num / (num + (p_t - p_w) * M_in);
}

Schedule visf_pressure(const FreezingProtocol& p, double t_start) {
    if (p.visf_ramp_time <= 0.0) return Schedule({{t_start, p.p_t}, {t_start + 1e-9, p.p_t_visf}});
    return Schedule({{t_start, p.p_t}, {t_start + p.visf_ramp_time, p.p_t_visf}});
}

double evaporation_rate(const FreezingModel& m, double T, double p_t) {
    const auto& p = m.protocol;
    const auto& f = m.formulation;
    const double p_sat = std::min(psat_evaporation(T), p_t);
    const double x_sat = water_mass_fraction(p_sat, p_t, f.M_w, f.M_in);
    const double x_c = water_mass_fraction(p.p_w_c, p_t, f.M_w, f.M_in);
    return -p.h_m * cross_section(m.d) * (x_sat - x_c);
}

LiquidRates liquid_rhs(const FreezingModel& m, const Surroundings& env, double t, double T,
                       double m_w, std::optional<double> p_t) {
    const auto& f = m.formulation;
    const double m_s = mixture_properties(f, m.d).m_s;
    const double C = m_s * f.Cp_s + m_w * f.Cp_w;
    double Q = liquid_heat(m, env, t, T, m_w, 0.0).total();
    double dm_w = 0.0;
    if (p_t) {
        dm_w = evaporation_rate(m, T, *p_t);
        Q += heat_of_vaporization(T) * dm_w;
    }
    return {Q / C, dm_w};
}

// ------------------------------------------------------------------
// Nucleation
// ------------------------------------------------------------------

NucleationResult nucleate_controlled(double T_n, double m_s, double m_w, const Formulation& f,
                                     double dH_fus, double T_fw) {
    if (!(m_w > 0.0)) throw DomainError("nucleate_controlled: no liquid water");
    const double C = m_s * f.Cp_s + m_w * f.Cp_w;
    const double beta = f.K_f * m_s / f.M_s;
    const double T_eq = T_fw - beta / m_w;
    const double D = T_fw - T_n;
    // dH x^2 - (dH m_w + D C) x + (D C m_w - beta C) = 0, smaller root.
    const double b = dH_fus * m_w + D * C;
    const double c = D * C * m_w - beta * C;
    const double scale = std::abs(D * C * m_w) + std::abs(beta * C);
    if (std::abs(c) <= 1e-13 * scale) return {T_n, 0.0};
    if (c < 0.0) {
        throw DomainError("nucleate_controlled: T_n = " + std::to_string(T_n) +
                          " K is above the depressed freezing point " + std::to_string(T_eq) +
                          " K");
    }
    const double disc = b * b - 4.0 * dH_fus * c;
    if (disc < 0.0) throw DomainError("nucleate_controlled: no real solution");
    const double x = 2.0 * c / (b + std::sqrt(disc));
    return {T_n + x * dH_fus / C, x};
}

double nucleation_rate(double T, double m_s, double m_w, const FreezingModel& m) {
    const auto& f = m.formulation;
    const auto& p = m.protocol;
    const double T_fl = freezing_point(m_s, m_w, f, p.T_fw);
    if (T >= T_fl || p.k_n == 0.0) return 0.0;
    return p.k_n * std::pow(T_fl - T, p.b_n) * f.V_l;
}

double nucleation_probability(double lambda, double dt) { return -std::expm1(-lambda * dt); }

bool sample_nucleation(double lambda, double dt, Rng& rng) {
    const double u = rng.uniform();  // always drawn so the stream position is time-indexed
    return u < nucleation_probability(lambda, dt);
}

// ------------------------------------------------------------------
// Solidification
// ------------------------------------------------------------------

IceGeometry ice_geometry(double m_s, double m_w, double m_i, double V0, const Formulation& f,
                         double d) {
    const double A_z = cross_section(d);
    const double V_liq = m_s / f.rho_s + m_w / f.rho_w;
    const double V_tot = V_liq + m_i / f.rho_i;
    const double s = std::cbrt(V_liq / V0);
    IceGeometry g{0.5 * d * s, (V0 / A_z) * s, 0.0};
    g.l = V_tot / A_z - g.h_l;
    if (g.r > 0.5 * d * (1 + 1e-12) || g.l < -1e-15) {
        throw SimulationError("solidification", "ice geometry out of range (r > r_o or l < 0)");
    }
    g.l = std::max(g.l, 0.0);
    g.r = std::min(g.r, 0.5 * d);
    return g;
}

SolidificationRates solidification_rhs(const FreezingModel& m, const SolidificationContext& c,
                                       double t, double m_i) {
    const auto& f = m.formulation;
    const auto& p = m.protocol;
    const auto& env = p.after;
    const double m_w = c.m_water_total - m_i;
    if (!(m_w > 0.0)) throw SimulationError("solidification", "liquid water exhausted");
    const double beta = f.K_f * c.m_s / f.M_s;
    const double T = p.T_fw - beta / m_w;

    const IceGeometry g = ice_geometry(c.m_s, m_w, m_i, c.V0, f, m.d);
    const double A_z = cross_section(m.d);
    const double A_r = product_side_area(c.m_s, m_w, m_i, f, m.d);
    const double r_o = 0.5 * m.d;

    const double T_g = env.T_g(t);
    const double T_c = env.T_c(t);
    const double U2 = overall_htc_slab(p.h_s2, g.l, f.k_i);
    const double h3 = p.h_s3 + c.h_rad;
    const double T_side = (p.h_s3 * T_g + c.h_rad * T_c) / h3;
    const double U3 = overall_htc_cylinder(h3, r_o, g.r, f.k_i);

    const double Q = p.h_s1 * A_z * (env.T_u(t) - T) + U2 * A_z * (T_g - T) + U3 * A_r * (T_side - T);
    const double C = c.m_s * f.Cp_s + m_w * f.Cp_w;
    const double dm_i = -Q / (p.dH_fus + C * beta / (m_w * m_w));
    return {dm_i, T, Q};
}

// ------------------------------------------------------------------
// Stage machine
// ------------------------------------------------------------------

VialState initial_vial_state(const FreezingModel& model, double T0) {
    VialState s;
    s.T = T0;
    s.m_w = mixture_properties(model.formulation, model.d).m_w0;
    return s;
}

namespace {

IntegratorConfig stage_config(const FreezingModel& m, std::vector<double> atol) {
    IntegratorConfig cfg = m.integrator;
    cfg.atol_per_component = std::move(atol);
    return cfg;
}

FreezeSegment liquid_segment(FreezeStage stage, Solution sol) {
    FreezeSegment seg{stage, std::move(sol), {}, {}, {}, {}};
    for (std::size_t i = 0; i < seg.solution.size(); ++i) {
        seg.t.push_back(seg.solution.t[i]);
        seg.T.push_back(seg.solution.y[i][0]);
        seg.m_w.push_back(seg.solution.y[i][1]);
        seg.m_i.push_back(0.0);
    }
    return seg;
}

Solution integrate_liquid(const FreezingModel& m, const std::string& stage, double t0, double t1,
                          const std::vector<double>& y0, std::optional<Schedule> p_t,
                          const std::vector<EventSpec>& events) {
    const Surroundings& env = m.protocol.before;
    OdeSystem sys{2,
                  [&m, &env, p_t](double t, std::span<const double> y, std::span<double> f) {
                      const std::optional<double> pt =
                          p_t ? std::optional<double>((*p_t)(t)) : std::nullopt;
                      const LiquidRates r = liquid_rhs(m, env, t, y[0], y[1], pt);
                      f[0] = r.dT;
                      f[1] = r.dm_w;
                  },
                  {}};
    try {
        return integrate_adaptive(sys, y0, {t0, t1}, stage_config(m, {1e-6, 1e-13}), events);
    } catch (const SolverError& e) {
        throw SimulationError(stage, e.what());
    } catch (const DomainError& e) {
        throw SimulationError(stage, e.what());
    }
}

EventSpec below_temperature(const std::string& name, double T_n) {
    return {name, [T_n](double, std::span<const double> y) { return y[0] - T_n; },
            Direction::Falling, true};
}

}  // namespace

FreezingResult run_freezing(const FreezingModel& model, const VialState& initial) {
    const auto& p = model.protocol;
    const auto& f = model.formulation;
    p.validate();
    f.validate();
    if (initial.stage != FreezeStage::Preconditioning) {
        throw std::invalid_argument("run_freezing: initial stage must be preconditioning");
    }

    FreezingResult res;
    const MixtureProperties mix = mixture_properties(f, model.d);
    res.m_s = mix.m_s;
    res.m_w0 = initial.m_w;
    const double t0 = initial.t;
    std::vector<double> y{initial.T, initial.m_w};

    // -------- preconditioning (+ VISF or stochastic nucleation) --------
    if (p.mode == NucleationMode::Controlled) {
        const bool hold = p.visf;
        const double t_end = t0 + (hold ? p.precondition_time : p.horizon);
        bool reached = y[0] <= p.T_n;
        double t = t0;
        if (!reached && t_end > t0) {
            Solution sol = integrate_liquid(model, "preconditioning", t0, t_end, y, std::nullopt,
                                            {below_temperature("T_n", p.T_n)});
            reached = sol.terminated;
            t = sol.t.back();
            y = sol.y.back();
            res.segments.push_back(liquid_segment(FreezeStage::Preconditioning, std::move(sol)));
            if (!reached && !hold) {
                throw SimulationError("preconditioning",
                                      "nucleation temperature not reached within the horizon");
            }
        }
        res.t_f1 = t;
        if (!reached) {
            const Schedule pt = visf_pressure(p, t);
            Solution sol = integrate_liquid(model, "visf", t, t + p.horizon, y, pt,
                                            {below_temperature("T_n", p.T_n)});
            if (!sol.terminated) {
                throw SimulationError("visf", "nucleation temperature not reached within the horizon");
            }
            t = sol.t.back();
            y = sol.y.back();
            res.segments.push_back(liquid_segment(FreezeStage::Visf, std::move(sol)));
        }
        res.t_f2 = t;
        res.T_nucleation = p.T_n;
    } else {
        Rng rng(p.seed);
        double chunk_start = t0;
        std::uint64_t k = 0;
        bool nucleated = false;
        double t_nuc = 0.0;
        while (!nucleated) {
            if (chunk_start >= t0 + p.horizon) {
                throw SimulationError("preconditioning",
                                      "no stochastic nucleation within the horizon");
            }
            const double chunk_end = std::min(chunk_start + 3600.0, t0 + p.horizon);
            Solution sol =
                integrate_liquid(model, "preconditioning", chunk_start, chunk_end, y, std::nullopt, {});
            for (;; ++k) {
                const double tk = t0 + static_cast<double>(k) * p.nucleation_dt;
                const double tk1 = t0 + static_cast<double>(k + 1) * p.nucleation_dt;
                if (tk1 > chunk_end) break;
                const std::vector<double> yk = sol.at(tk);
                const double lambda = nucleation_rate(yk[0], mix.m_s, yk[1], model);
                if (sample_nucleation(lambda, p.nucleation_dt, rng)) {
                    nucleated = true;
                    t_nuc = tk1;
                    ++k;
                    break;
                }
            }
            if (nucleated) {
                // Truncate the stored segment at the nucleation instant.
                std::vector<double> y_nuc = sol.at(t_nuc);
                std::vector<double> f_nuc(2);
                const LiquidRates r = liquid_rhs(model, p.before, t_nuc, y_nuc[0], y_nuc[1], std::nullopt);
                f_nuc[0] = r.dT;
                f_nuc[1] = r.dm_w;
                auto it = std::lower_bound(sol.t.begin(), sol.t.end(), t_nuc);
                const auto keep = static_cast<std::size_t>(it - sol.t.begin());
                sol.t.resize(keep);
                sol.y.resize(keep);
                sol.dydt.resize(keep);
                sol.t.push_back(t_nuc);
                sol.y.push_back(y_nuc);
                sol.dydt.push_back(f_nuc);
                y = y_nuc;
            } else {
                y = sol.y.back();
            }
            chunk_start = sol.t.back();
            res.segments.push_back(liquid_segment(FreezeStage::Preconditioning, std::move(sol)));
        }
        res.t_f1 = t_nuc;
        res.t_f2 = t_nuc;
        res.T_nucleation = y[0];
    }

    // -------- nucleation jump --------
    const double m_w_before = y[1];
    res.nucleation = nucleate_controlled(res.T_nucleation, mix.m_s, m_w_before, f, p.dH_fus, p.T_fw);
    res.t_f3 = res.t_f2;
    {
        FreezeSegment seg{FreezeStage::Nucleation, {}, {res.t_f2, res.t_f3},
                          {res.T_nucleation, res.nucleation.T_fl},
                          {m_w_before, m_w_before - res.nucleation.m_i_n},
                          {0.0, res.nucleation.m_i_n}};
        res.segments.push_back(std::move(seg));
    }

    // -------- solidification --------
    SolidificationContext ctx{};
    ctx.m_s = mix.m_s;
    ctx.m_water_total = m_w_before;
    ctx.V0 = mix.m_s / f.rho_s + m_w_before / f.rho_w;
    const double T_ref = 0.5 * (res.nucleation.T_fl + p.after.T_c(res.t_f3));
    ctx.h_rad = 4.0 * p.radiation.sigma * p.radiation.F_s3 * T_ref * T_ref * T_ref;
    res.solidification = ctx;
    {
        const double target = p.solidification_fraction * ctx.m_water_total;
        const double beta = f.K_f * mix.m_s / f.M_s;
        OdeSystem sys{1,
                      [&model, &ctx](double t, std::span<const double> yy, std::span<double> ff) {
                          ff[0] = solidification_rhs(model, ctx, t, yy[0]).dm_i;
                      },
                      {}};
        EventSpec done{"solidified",
                       [target](double, std::span<const double> yy) { return yy[0] - target; },
                       Direction::Rising, true};
        const std::vector<double> y0{res.nucleation.m_i_n};
        Solution sol;
        if (y0[0] >= target) {
            sol.t = {res.t_f3};
            sol.y = {y0};
            sol.dydt = {{0.0}};
        } else {
            try {
                sol = integrate_adaptive(sys, y0, {res.t_f3, res.t_f3 + p.horizon},
                                         stage_config(model, {1e-13}), {done});
            } catch (const SolverError& e) {
                throw SimulationError("solidification", e.what());
            }
            if (!sol.terminated) {
                throw SimulationError("solidification", "end criterion not reached within the horizon");
            }
        }
        FreezeSegment seg{FreezeStage::Solidification, std::move(sol), {}, {}, {}, {}};
        for (std::size_t i = 0; i < seg.solution.size(); ++i) {
            const double m_i = seg.solution.y[i][0];
            const double m_w = ctx.m_water_total - m_i;
            seg.t.push_back(seg.solution.t[i]);
            seg.m_i.push_back(m_i);
            seg.m_w.push_back(m_w);
            seg.T.push_back(p.T_fw - beta / m_w);
        }
        res.t_f4 = seg.t.back();
        res.segments.push_back(std::move(seg));
    }

    // -------- final cooling --------
    const FreezeSegment& sol_seg = res.segments.back();
    const double m_i4 = sol_seg.m_i.back();
    const double m_w4 = sol_seg.m_w.back();
    double T = sol_seg.T.back();
    {
        const double C = mix.m_s * f.Cp_s + m_w4 * f.Cp_w + m_i4 * f.Cp_i;
        const double hi = p.T_target + p.T_target_tol;
        const double lo = p.T_target - p.T_target_tol;
        Solution sol;
        if (T <= hi && T >= lo) {
            sol.t = {res.t_f4};
            sol.y = {{T}};
            sol.dydt = {{0.0}};
        } else {
            OdeSystem sys{1,
                          [&model, C, m_w4, m_i4](double t, std::span<const double> yy,
                                                  std::span<double> ff) {
                              ff[0] = liquid_heat(model, model.protocol.after, t, yy[0], m_w4, m_i4)
                                          .total() /
                                      C;
                          },
                          {}};
            EventSpec band = T > hi
                                 ? EventSpec{"target", [hi](double, std::span<const double> yy) { return yy[0] - hi; },
                                             Direction::Falling, true}
                                 : EventSpec{"target", [lo](double, std::span<const double> yy) { return yy[0] - lo; },
                                             Direction::Rising, true};
            const std::vector<double> y0{T};
            try {
                sol = integrate_adaptive(sys, y0, {res.t_f4, res.t_f4 + p.horizon},
                                         stage_config(model, {1e-6}), {band});
            } catch (const SolverError& e) {
                throw SimulationError("final_cooling", e.what());
            }
            if (!sol.terminated) {
                throw SimulationError("final_cooling",
                                      "target temperature not reached within the horizon");
            }
        }
        FreezeSegment seg{FreezeStage::FinalCooling, std::move(sol), {}, {}, {}, {}};
        for (std::size_t i = 0; i < seg.solution.size(); ++i) {
            seg.t.push_back(seg.solution.t[i]);
            seg.T.push_back(seg.solution.y[i][0]);
            seg.m_w.push_back(m_w4);
            seg.m_i.push_back(m_i4);
        }
        res.t_f5 = seg.t.back();
        T = seg.T.back();
        res.segments.push_back(std::move(seg));
    }

    res.final_state = VialState{T, m_w4, m_i4, FreezeStage::Done, res.t_f5};
    return res;
}

}  // namespace lyo
