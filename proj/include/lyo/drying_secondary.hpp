#pragma once

// Secondary drying: conduction through the dried cake on a fixed grid,
// coupled node by node to first-order desorption of bound water.
//
// Nodes z_j = j*H/(n_z - 1), node 0 at the top surface (radiation only) and
// node n_z - 1 at the bottom (Robin exchange with the shelf). State layout is
// blocked: [T_0 .. T_{n-1}, c_0 .. c_{n-1}].

#include <span>
#include <vector>

#include "lyo/schedule.hpp"
#include "lyo/solver.hpp"
#include "lyo/thermo.hpp"

namespace lyo {

struct DesorptionKinetics {
    double f_a = 1.5e-3;   // 1/s
    double E_a = 6500.0;   // J/mol
    double R = kGasConstant;
    double c_star = 0.0;   // equilibrium bound water, kg/kg
    double rho_d = 212.21;
    double dH_des = 2.68e6;
    double k_e = 0.217;
    double rho_e = 215.0;
    double Cp_e = 2590.0;

    void validate() const;
};

// Arrhenius rate constant f_a exp(-E_a / R T).
double desorption_constant(double T, const DesorptionKinetics& k);
// dc/dt = k_d (c* - c).
double desorption_rate(double T, double c, const DesorptionKinetics& k);

struct SecondaryConditions {
    double h_b = 15.0;
    Schedule T_b = 295.0;
    Schedule T_c = 290.0;
    Schedule T_u = 290.0;
};

struct SecondaryModel {
    DesorptionKinetics kinetics{};
    SecondaryConditions conditions{};
    RadiationSpec radiation{};
    VialGeometry geometry = make_geometry(0.024, 7.2e-3);
    std::size_t n_z = 51;
    IntegratorConfig integrator{};
    double c_target = 0.01;   // stop when the averaged bound water reaches this
    double horizon = 1e7;     // s
    bool desorption = true;   // false: pure conduction, c frozen

    void validate() const;
};

void secondary_rhs(const SecondaryModel& m, double t, std::span<const double> T,
                   std::span<const double> c, std::span<double> dT, std::span<double> dc,
                   std::vector<double>& scratch);
void secondary_rhs(const SecondaryModel& m, double t, std::span<const double> T,
                   std::span<const double> c, std::span<double> dT, std::span<double> dc);

std::vector<std::vector<std::size_t>> secondary_pattern(std::size_t n_z);

struct SecondaryResult {
    Solution solution;
    std::size_t n_z = 0;
    double H = 0.0;
    double t0 = 0.0;
    double t_end = 0.0;     // t_d2 for a drying run
    bool completed = false; // target reached

    std::vector<double> t, T_top, T_bottom, T_avg, c_avg;

    std::vector<double> T_profile(std::size_t i) const;
    std::vector<double> c_profile(std::size_t i) const;
};

// Integrates until the volume-averaged bound water falls to c_target. Profiles
// are given either as n_z values or as one value for a uniform start. Throws
// SimulationError tagged "secondary_drying" on solver failure or timeout.
SecondaryResult run_secondary(const SecondaryModel& m, std::span<const double> initial_T,
                              std::span<const double> initial_c, double t0 = 0.0);

// Fixed-duration conduction-only continuation on the dried cake (no
// desorption, no sublimation), used for a heating hold between the drying
// stages. Tagged "extra_heating" on failure.
SecondaryResult run_conduction_hold(const SecondaryModel& m, std::span<const double> initial_T,
                                    std::span<const double> initial_c, double t0, double duration);

}  // namespace lyo
