#include "lyo/drying_secondary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lyo/drying_primary.hpp"
#include "lyo/errors.hpp"
#include "lyo/kernels.hpp"

namespace lyo {

void DesorptionKinetics::validate() const {
    if (!(f_a > 0.0)) throw std::invalid_argument("DesorptionKinetics: f_a must be positive");
    if (!(E_a >= 0.0)) throw std::invalid_argument("DesorptionKinetics: E_a must be non-negative");
    if (!(c_star >= 0.0)) throw std::invalid_argument("DesorptionKinetics: c_star must be non-negative");
    const double positive[] = {R, rho_d, k_e, rho_e, Cp_e};
    for (double v : positive) {
        if (!(v > 0.0)) throw std::invalid_argument("DesorptionKinetics: properties must be positive");
    }
    if (!(dH_des >= 0.0)) throw std::invalid_argument("DesorptionKinetics: dH_des must be non-negative");
}

void SecondaryModel::validate() const {
    kinetics.validate();
    radiation.validate();
    geometry.validate();
    integrator.validate();
    if (n_z < 3) throw std::invalid_argument("SecondaryModel: n_z must be at least 3");
    if (!(conditions.h_b >= 0.0)) throw std::invalid_argument("SecondaryModel: h_b must be non-negative");
    if (!(c_target >= 0.0)) throw std::invalid_argument("SecondaryModel: c_target must be non-negative");
    if (!(horizon > 0.0)) throw std::invalid_argument("SecondaryModel: horizon must be positive");
}

double desorption_constant(double T, const DesorptionKinetics& k) {
    return k.f_a * std::exp(-k.E_a / (k.R * T));
}

double desorption_rate(double T, double c, const DesorptionKinetics& k) {
    return desorption_constant(T, k) * (k.c_star - c);
}

void secondary_rhs(const SecondaryModel& m, double t, std::span<const double> T,
                   std::span<const double> c, std::span<double> dT, std::span<double> dc,
                   std::vector<double>& scratch) {
    const auto& kin = m.kinetics;
    const auto& bc = m.conditions;
    const auto& rad = m.radiation;
    const std::size_t n = T.size();
    const double dz = m.geometry.H / static_cast<double>(n - 1);
    const double rhoC = kin.rho_e * kin.Cp_e;

    scratch.resize(n + 2);
    std::copy(T.begin(), T.end(), scratch.begin() + 1);
    const double T0 = T[0];
    const double Tu = bc.T_u(t);
    scratch[0] = T[1] + 2.0 * dz * rad.sigma * rad.F_s1 * (Tu * Tu * Tu * Tu - T0 * T0 * T0 * T0) / kin.k_e;
    scratch[n + 1] = T[n - 2] - 2.0 * dz * bc.h_b * (T[n - 1] - bc.T_b(t)) / kin.k_e;

    const double Tc = bc.T_c(t);
    kernels::StencilParams sp;
    sp.diff = kin.k_e / (rhoC * dz * dz);
    sp.adv = 0.0;
    sp.dxi = 1.0 / static_cast<double>(n - 1);
    // sigma A_r F / (rho C V_e) with A_r = pi d H and V_e = A_z H.
    sp.rad = rad.sigma * m.geometry.side_area() * rad.F_s3 / (rhoC * m.geometry.A_z * m.geometry.H);
    sp.Tc4 = (Tc * Tc) * (Tc * Tc);
    kernels::stencil(scratch.data(), n, sp, dT.data());

    const double latent = kin.rho_d * kin.dH_des / rhoC;
    for (std::size_t j = 0; j < n; ++j) {
        dc[j] = m.desorption ? desorption_rate(T[j], c[j], kin) : 0.0;
        dT[j] += latent * dc[j];
    }
}

void secondary_rhs(const SecondaryModel& m, double t, std::span<const double> T,
                   std::span<const double> c, std::span<double> dT, std::span<double> dc) {
    std::vector<double> scratch;
    secondary_rhs(m, t, T, c, dT, dc, scratch);
}

std::vector<std::vector<std::size_t>> secondary_pattern(std::size_t n) {
    std::vector<std::vector<std::size_t>> pattern(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        auto& col = pattern[j];
        if (j > 0) col.push_back(j - 1);
        col.push_back(j);
        if (j + 1 < n) col.push_back(j + 1);
        col.push_back(n + j);
        pattern[n + j] = {j, n + j};
    }
    return pattern;
}

std::vector<double> SecondaryResult::T_profile(std::size_t i) const {
    const auto& y = solution.y.at(i);
    return {y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_z)};
}

std::vector<double> SecondaryResult::c_profile(std::size_t i) const {
    const auto& y = solution.y.at(i);
    return {y.begin() + static_cast<std::ptrdiff_t>(n_z), y.begin() + static_cast<std::ptrdiff_t>(2 * n_z)};
}

namespace {

std::vector<double> expand(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() == 1) return std::vector<double>(n, v[0]);
    if (v.size() == n) return {v.begin(), v.end()};
    throw std::invalid_argument(std::string(what) + ": profile must have 1 or n_z values");
}

void fill_observables(SecondaryResult& r) {
    const std::size_t n = r.n_z;
    const std::size_t ns = r.solution.size();
    r.t = r.solution.t;
    r.T_top.resize(ns);
    r.T_bottom.resize(ns);
    r.T_avg.resize(ns);
    r.c_avg.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const auto& y = r.solution.y[i];
        const std::span<const double> T(y.data(), n), c(y.data() + n, n);
        r.T_top[i] = T[0];
        r.T_bottom[i] = T[n - 1];
        r.T_avg[i] = profile_average(T);
        r.c_avg[i] = profile_average(c);
    }
}

SecondaryResult integrate_stage(const SecondaryModel& m, std::span<const double> initial_T,
                                std::span<const double> initial_c, double t0, double t1,
                                bool stop_at_target, const std::string& stage) {
    m.validate();
    const std::size_t n = m.n_z;
    std::vector<double> y0 = expand(initial_T, n, stage.c_str());
    const std::vector<double> c0 = expand(initial_c, n, stage.c_str());
    if (std::any_of(c0.begin(), c0.end(), [](double v) { return !(v >= 0.0); })) {
        throw std::invalid_argument(stage + ": initial bound water must be non-negative");
    }
    y0.insert(y0.end(), c0.begin(), c0.end());

    SecondaryResult res;
    res.n_z = n;
    res.H = m.geometry.H;
    res.t0 = t0;

    // Already dry, allowing for rounding in the average of a uniform profile.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * m.c_target;
    if (stop_at_target && profile_average(c0) <= m.c_target + slack) {
        res.solution.t = {t0};
        res.solution.y = {y0};
        res.solution.dydt = {std::vector<double>(2 * n, 0.0)};
        res.solution.terminated = true;
        res.completed = true;
        res.t_end = t0;
        fill_observables(res);
        return res;
    }

    OdeSystem sys;
    sys.size = 2 * n;
    sys.pattern = secondary_pattern(n);
    sys.rhs = [&m, n, scratch = std::vector<double>()](double t, std::span<const double> y,
                                                       std::span<double> f) mutable {
        secondary_rhs(m, t, y.first(n), y.subspan(n, n), f.first(n), f.subspan(n, n), scratch);
    };

    IntegratorConfig cfg = m.integrator;
    if (cfg.atol_per_component.empty()) {
        cfg.atol_per_component.assign(2 * n, 1e-4);
        std::fill(cfg.atol_per_component.begin() + static_cast<std::ptrdiff_t>(n),
                  cfg.atol_per_component.end(), 1e-7);
    }

    std::vector<EventSpec> events;
    if (stop_at_target) {
        const double target = m.c_target;
        events.push_back({"bound_water_target",
                          [n, target](double, std::span<const double> y) {
                              return profile_average(y.subspan(n, n)) - target;
                          },
                          Direction::Falling, true});
    }

    try {
        res.solution = integrate_adaptive(sys, y0, {t0, t1}, cfg, events);
    } catch (const SolverError& e) {
        throw SimulationError(stage, e.what());
    }
    res.completed = res.solution.terminated;
    if (stop_at_target && !res.completed) {
        throw SimulationError(stage, "bound-water target not reached within the horizon");
    }
    res.t_end = res.solution.t.back();
    fill_observables(res);
    return res;
}

}  // namespace

SecondaryResult run_secondary(const SecondaryModel& m, std::span<const double> initial_T,
                              std::span<const double> initial_c, double t0) {
    if (!m.desorption) throw std::invalid_argument("run_secondary: desorption is disabled");
    return integrate_stage(m, initial_T, initial_c, t0, t0 + m.horizon, true, "secondary_drying");
}

SecondaryResult run_conduction_hold(const SecondaryModel& m, std::span<const double> initial_T,
                                    std::span<const double> initial_c, double t0, double duration) {
    if (!(duration > 0.0)) throw std::invalid_argument("run_conduction_hold: duration must be positive");
    SecondaryModel hold = m;
    hold.desorption = false;
    return integrate_stage(hold, initial_T, initial_c, t0, t0 + duration, false, "extra_heating");
}

}  // namespace lyo
