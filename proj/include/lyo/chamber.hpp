#pragma once

// Water-vapour balance of a drying chamber whose condenser may be
// undersized. Every vial in the chamber is taken to behave like the
// simulated one, so the total vapour flow is n_vial * A_z * N_w.

#include <span>

#include "lyo/drying_primary.hpp"

namespace lyo {

struct ChamberModel {
    double V_c = 0.118;      // m^3
    double j_w_max = 1.8e-5; // kg/s, condenser capacity
    double n_vial = 200.0;
    double T_bar = 260.0;    // K, chamber gas temperature
    double p_setpoint = 3.0; // Pa, controlled pressure under normal operation
    double M_w = 0.018;
    double R = kGasConstant;

    void validate() const;
};

// Total vapour flow from the vials, kg/s.
double vapor_flow(const ChamberModel& c, double N_w, double A_z);

// dp_w,c/dt in Pa/s. Accumulates (j_w - j_w,max) R T / (V_c M_w); once the
// pressure is back at the setpoint it cannot be pumped lower.
double chamber_pressure_rhs(const ChamberModel& c, double N_w, double A_z, double p_w_c);

// Primary drying co-integrated with the chamber pressure, starting from the
// setpoint. PrimaryResult::p_w_c holds the pressure history.
PrimaryResult run_primary_with_condenser(const PrimaryModel& m, const ChamberModel& c,
                                         std::span<const double> initial_T, double t0 = 0.0);

}  // namespace lyo
