#pragma once

// Primary drying: heat conduction in the frozen layer below a receding
// sublimation front.
//
// The frozen region S <= z <= H (z measured downward from the product top) is
// mapped onto xi = (z - S)/(H - S) in [0, 1] and discretized with n_z nodes,
// xi_j = j/(n_z - 1). Node 0 sits on the sublimation front, node n_z - 1 on the
// vial bottom facing the shelf. The state vector is [T_0 .. T_{n_z-1}, S].

#include <functional>
#include <span>
#include <vector>

#include "lyo/schedule.hpp"
#include "lyo/solver.hpp"
#include "lyo/thermo.hpp"

namespace lyo {

struct DryingParams {
    double rho_f = 937.0;
    double Cp_f = 2163.0;
    double k_f = 2.07;
    double rho_e = 215.0;   // dried-layer effective density
    double h_b = 15.0;      // W/m^2.K, bottom
    double Rp0 = 1.5e4;     // m/s
    double Rp1 = 3.0e7;     // 1/s
    double Rp2 = 10.0;      // 1/m
    double dH_sub = 2.84e6;
    Schedule T_b = 270.0;
    Schedule T_c = 265.0;
    Schedule T_u = 265.0;
    double p_w_c = 3.0;     // Pa

    void validate() const;
};

struct PrimaryModel {
    DryingParams params{};
    RadiationSpec radiation{};
    VialGeometry geometry = make_geometry(0.024, 7.2e-3);
    std::size_t n_z = 51;
    IntegratorConfig integrator{};
    double horizon = 1e7;    // s of simulated time before giving up
    bool sublimation = true; // false freezes the front (N_w = 0)

    // Front-completion guard: the run ends at S = H - eps_front().
    double eps_front() const { return 1e-6 * geometry.H; }
    void validate() const;
};

double cake_resistance(double S, const DryingParams& dp);

// Sublimation mass flux, kg/m^2.s, clamped at zero (no deposition).
double sublimation_flux(double T_interface, double S, const DryingParams& dp);
double sublimation_flux(double T_interface, double S, const DryingParams& dp, double p_w_c);

struct PrimaryRates {
    double dS;   // m/s
    double N_w;  // kg/m^2.s
};

// Right-hand side of the discretized system. T has n_z entries and dTdt the
// same size. p_w_c overrides the parameter value so the chamber model can
// feed its dynamic pressure. scratch is resized as needed.
PrimaryRates primary_rhs(const PrimaryModel& m, double t, std::span<const double> T, double S,
                         double p_w_c, std::span<double> dTdt, std::vector<double>& scratch);
PrimaryRates primary_rhs(const PrimaryModel& m, double t, std::span<const double> T, double S,
                         std::span<double> dTdt);

// Jacobian pattern for [T..., S] (optionally followed by extra coupled states
// that touch every row).
std::vector<std::vector<std::size_t>> primary_pattern(std::size_t n_z, std::size_t extra = 0);

struct PrimaryResult {
    Solution solution;
    std::size_t n_z = 0;
    double H = 0.0;
    double t0 = 0.0;
    double t_d1 = 0.0;
    bool completed = false;

    // Per-sample observables.
    std::vector<double> t, S, N_w, T_top, T_bottom, T_avg, p_w_c;

    std::vector<double> profile(std::size_t i) const;  // T at sample i
    std::vector<double> final_profile() const { return profile(t.size() - 1); }
};

// Chamber water pressure carried as an extra state, driven by the interface
// flux of the representative vial.
struct PressureCoupling {
    double p0 = 3.0;   // Pa at t0
    double atol = 1e-4;
    std::function<double(double t, double N_w, double p)> dpdt;
};

// Integrates from t0 until the front reaches H. initial_T holds either n_z
// values or a single value for a uniform start. Throws SimulationError tagged
// "primary_drying".
PrimaryResult run_primary(const PrimaryModel& m, std::span<const double> initial_T, double t0 = 0.0,
                          const PressureCoupling* coupling = nullptr);

// Uniform mean over the xi grid (trapezoid), i.e. the frozen-layer average.
double profile_average(std::span<const double> T);

}  // namespace lyo
