#include "lyo/drying_primary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lyo/errors.hpp"
#include "lyo/kernels.hpp"

namespace lyo {

void DryingParams::validate() const {
    const double positive[] = {rho_f, Cp_f, k_f, rho_e, Rp0, Rp2, dH_sub};
    for (double v : positive) {
        if (!(v > 0.0)) throw std::invalid_argument("DryingParams: properties must be positive");
    }
    if (!(rho_f > rho_e)) throw std::invalid_argument("DryingParams: rho_f must exceed rho_e");
    if (!(h_b >= 0.0) || !(Rp1 >= 0.0) || !(p_w_c >= 0.0)) {
        throw std::invalid_argument("DryingParams: h_b, Rp1 and p_w_c must be non-negative");
    }
}

void PrimaryModel::validate() const {
    params.validate();
    radiation.validate();
    geometry.validate();
    integrator.validate();
    if (n_z < 3) throw std::invalid_argument("PrimaryModel: n_z must be at least 3");
    if (!(horizon > 0.0)) throw std::invalid_argument("PrimaryModel: horizon must be positive");
}

double cake_resistance(double S, const DryingParams& dp) {
    return dp.Rp0 + dp.Rp1 * S / (dp.Rp2 + S);
}

double sublimation_flux(double T_interface, double S, const DryingParams& dp, double p_w_c) {
    const double drive = psat_sublimation(T_interface) - p_w_c;
    return drive > 0.0 ? drive / cake_resistance(std::max(S, 0.0), dp) : 0.0;
}

double sublimation_flux(double T_interface, double S, const DryingParams& dp) {
    return sublimation_flux(T_interface, S, dp, dp.p_w_c);
}

PrimaryRates primary_rhs(const PrimaryModel& m, double t, std::span<const double> T, double S,
                         double p_w_c, std::span<double> dTdt, std::vector<double>& scratch) {
    const DryingParams& dp = m.params;
    const RadiationSpec& rad = m.radiation;
    const std::size_t n = T.size();
    const double H = m.geometry.H;
    const double L = std::max(H - S, 0.5 * m.eps_front());
    const double dxi = 1.0 / static_cast<double>(n - 1);
    const double rhoC = dp.rho_f * dp.Cp_f;

    const double N_w = m.sublimation ? sublimation_flux(T[0], S, dp, p_w_c) : 0.0;
    const double dS = N_w / (dp.rho_f - dp.rho_e);

    scratch.resize(n + 2);
    std::copy(T.begin(), T.end(), scratch.begin() + 1);

    // Ghost nodes from the two flux conditions.
    const double T0 = T[0];
    const double Tu = dp.T_u(t);
    const double q_top = N_w * dp.dH_sub - rad.sigma * rad.F_s1 * (Tu * Tu * Tu * Tu - T0 * T0 * T0 * T0);
    scratch[0] = T[1] - 2.0 * dxi * L / dp.k_f * q_top;
    scratch[n + 1] = T[n - 2] - 2.0 * dxi * L * dp.h_b * (T[n - 1] - dp.T_b(t)) / dp.k_f;

    const double Tc = dp.T_c(t);
    kernels::StencilParams sp;
    sp.diff = dp.k_f / (rhoC * L * L * dxi * dxi);
    sp.adv = dS / (2.0 * L * dxi);
    sp.dxi = dxi;
    // Side radiation over the full product wall, absorbed by the frozen layer.
    sp.rad = rad.sigma * m.geometry.side_area() * rad.F_s3 / (rhoC * m.geometry.A_z * L);
    sp.Tc4 = (Tc * Tc) * (Tc * Tc);
    kernels::stencil(scratch.data(), n, sp, dTdt.data());
    return {dS, N_w};
}

PrimaryRates primary_rhs(const PrimaryModel& m, double t, std::span<const double> T, double S,
                         std::span<double> dTdt) {
    std::vector<double> scratch;
    return primary_rhs(m, t, T, S, m.params.p_w_c, dTdt, scratch);
}

std::vector<std::vector<std::size_t>> primary_pattern(std::size_t n_z, std::size_t extra) {
    const std::size_t total = n_z + 1 + extra;
    std::vector<std::size_t> all(total);
    for (std::size_t i = 0; i < total; ++i) all[i] = i;

    std::vector<std::vector<std::size_t>> pattern(total);
    // T_0 drives the flux, hence the advection in every row and the S row.
    pattern[0] = all;
    for (std::size_t j = 1; j < n_z; ++j) {
        pattern[j] = {j - 1, j};
        if (j + 1 < n_z) pattern[j].push_back(j + 1);
    }
    for (std::size_t c = n_z; c < total; ++c) pattern[c] = all;
    return pattern;
}

double profile_average(std::span<const double> T) {
    const std::size_t n = T.size();
    if (n == 1) return T[0];
    double s = 0.5 * (T[0] + T[n - 1]);
    for (std::size_t j = 1; j + 1 < n; ++j) s += T[j];
    return s / static_cast<double>(n - 1);
}

std::vector<double> PrimaryResult::profile(std::size_t i) const {
    const auto& y = solution.y.at(i);
    return {y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_z)};
}

PrimaryResult run_primary(const PrimaryModel& m, std::span<const double> initial_T, double t0,
                          const PressureCoupling* coupling) {
    m.validate();
    const std::size_t n = m.n_z;
    if (initial_T.size() != 1 && initial_T.size() != n) {
        throw std::invalid_argument("run_primary: initial profile must have 1 or n_z values");
    }

    if (coupling && !coupling->dpdt) throw std::invalid_argument("run_primary: coupling without dpdt");
    const std::size_t extra = coupling ? 1 : 0;

    std::vector<double> y0(n + 1 + extra);
    for (std::size_t j = 0; j < n; ++j) y0[j] = initial_T.size() == 1 ? initial_T[0] : initial_T[j];
    y0[n] = 0.0;
    if (coupling) y0[n + 1] = coupling->p0;

    OdeSystem sys;
    sys.size = n + 1 + extra;
    sys.pattern = primary_pattern(n, extra);
    sys.rhs = [&m, n, coupling, scratch = std::vector<double>()](
                  double t, std::span<const double> y, std::span<double> f) mutable {
        const double p = coupling ? y[n + 1] : m.params.p_w_c;
        const auto r = primary_rhs(m, t, y.first(n), y[n], p, f.first(n), scratch);
        f[n] = r.dS;
        if (coupling) f[n + 1] = coupling->dpdt(t, r.N_w, p);
    };

    IntegratorConfig cfg = m.integrator;
    if (cfg.atol_per_component.empty()) {
        cfg.atol_per_component.assign(n + 1 + extra, 1e-4);
        cfg.atol_per_component[n] = 1e-9;
        if (coupling) cfg.atol_per_component[n + 1] = coupling->atol;
    }

    const double S_end = m.geometry.H - m.eps_front();
    std::vector<EventSpec> events;
    if (m.sublimation) {
        events.push_back({"front_complete",
                          [n, S_end](double, std::span<const double> y) { return y[n] - S_end; },
                          Direction::Rising, true});
    }

    PrimaryResult res;
    res.n_z = n;
    res.H = m.geometry.H;
    res.t0 = t0;
    try {
        res.solution = integrate_adaptive(sys, y0, {t0, t0 + m.horizon}, cfg, events);
    } catch (const SolverError& e) {
        throw SimulationError("primary_drying", e.what());
    } catch (const DomainError& e) {
        throw SimulationError("primary_drying", e.what());
    }
    res.completed = res.solution.terminated;
    if (m.sublimation && !res.completed) {
        throw SimulationError("primary_drying", "sublimation front did not reach the product bottom within the horizon");
    }
    res.t_d1 = res.solution.t.back();

    const std::size_t ns = res.solution.size();
    res.t = res.solution.t;
    res.S.resize(ns);
    res.N_w.resize(ns);
    res.T_top.resize(ns);
    res.T_bottom.resize(ns);
    res.T_avg.resize(ns);
    res.p_w_c.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const auto& y = res.solution.y[i];
        const std::span<const double> T(y.data(), n);
        res.S[i] = y[n];
        res.p_w_c[i] = coupling ? y[n + 1] : m.params.p_w_c;
        res.N_w[i] = m.sublimation ? sublimation_flux(T[0], y[n], m.params, res.p_w_c[i]) : 0.0;
        res.T_top[i] = T[0];
        res.T_bottom[i] = T[n - 1];
        res.T_avg[i] = profile_average(T);
    }
    return res;
}

}  // namespace lyo
