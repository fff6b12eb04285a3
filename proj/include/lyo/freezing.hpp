#pragma once

// Lumped five-stage freezing model for a single suspended vial.
//
// Stage machine: preconditioning -> (VISF) -> nucleation -> solidification ->
// final cooling. The liquid before nucleation is a single lumped node with
// state (T, m_w). Nucleation is an algebraic jump. During solidification the
// temperature is slaved to the freezing-point depression of the remaining
// liquid, which reduces the stage to one ODE in the ice mass. Ice built up on
// the bottom and side walls acts as an extra conduction resistance.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lyo/schedule.hpp"
#include "lyo/solver.hpp"
#include "lyo/thermo.hpp"

namespace lyo {

enum class FreezeStage { Preconditioning, Visf, Nucleation, Solidification, FinalCooling, Done };

const char* stage_name(FreezeStage s);

struct VialState {
    double T = 298.15;
    double m_w = 0.0;
    double m_i = 0.0;
    FreezeStage stage = FreezeStage::Preconditioning;
    double t = 0.0;
};

// Surroundings seen by the vial: gas (T_g), chamber walls (T_c) and the upper
// surface (T_u). Schedules take absolute time.
struct Surroundings {
    Schedule T_g = 268.0;
    Schedule T_c = 273.0;
    Schedule T_u = 273.0;
};

enum class NucleationMode { Controlled, Stochastic };

struct FreezingProtocol {
    Surroundings before{268.0, 273.0, 273.0};  // until nucleation
    Surroundings after{230.0, 240.0, 240.0};   // from nucleation on

    double h_s1 = 5.0;    // W/m^2.K, top
    double h_s2 = 10.0;   // bottom
    double h_s3 = 8.0;    // side (convective part only)
    double h_m = 6.34e-3; // kg/m^2.s

    bool visf = true;
    double precondition_time = 7200.0;  // s, hold before the pressure drop
    double p_t = 1e5;                   // Pa, total pressure outside VISF
    double p_t_visf = 1e4;              // Pa, VISF target
    double visf_ramp_time = 30.0;       // s, linear ramp from p_t to p_t_visf
    double p_w_c = 0.0;                 // Pa, chamber water partial pressure during VISF

    NucleationMode mode = NucleationMode::Controlled;
    double T_n = 268.0;                 // K, controlled nucleation temperature
    double k_n = 1e-9;                  // stochastic kinetics prefactor
    double b_n = 12.0;                  // stochastic kinetics exponent
    double nucleation_dt = 0.1;         // s, Bernoulli sampling interval
    std::uint64_t seed = 0;

    double solidification_fraction = 0.95;
    double T_target = 235.0;            // K, final-cooling target
    double T_target_tol = 0.5;          // K
    double horizon = 1e6;               // s, per-stage simulated-time limit

    double T_fw = kWaterFreezingPoint;
    double dH_fus = 3.34e5;
    RadiationSpec radiation{};

    void validate() const;
};

struct FreezingModel {
    Formulation formulation{};
    double d = 0.024;
    FreezingProtocol protocol{};
    IntegratorConfig integrator{};
};

// ------------------------------------------------------------------
// Stage right-hand sides (exposed for testing)
// ------------------------------------------------------------------

struct HeatTerms {
    double Q_s1, Q_s2, Q_s3;
    double total() const { return Q_s1 + Q_s2 + Q_s3; }
};

// Heat received by the liquid before nucleation.
HeatTerms liquid_heat(const FreezingModel& m, const Surroundings& env, double t, double T,
                      double m_w, double m_i);

// Mass fraction of water in a water/inert gas mixture at partial pressure p.
double water_mass_fraction(double p_w, double p_t, double M_w, double M_in);

// Total pressure schedule for a VISF starting at t_start.
Schedule visf_pressure(const FreezingProtocol& p, double t_start);

// d(m_w)/dt during VISF, kg/s (<= 0 unless the chamber is supersaturated).
double evaporation_rate(const FreezingModel& m, double T, double p_t);

struct LiquidRates {
    double dT;
    double dm_w;
};
// Preconditioning when evaporate = false, VISF otherwise.
LiquidRates liquid_rhs(const FreezingModel& m, const Surroundings& env, double t, double T,
                       double m_w, std::optional<double> p_t);

struct NucleationResult {
    double T_fl;   // temperature after nucleation
    double m_i_n;  // ice formed in the jump
};

// Adiabatic jump from T_n with m_w liquid water. Throws DomainError when T_n is
// above the depressed freezing point.
NucleationResult nucleate_controlled(double T_n, double m_s, double m_w, const Formulation& f,
                                     double dH_fus, double T_fw = kWaterFreezingPoint);

// Poisson rate lambda = k_n (T_fl - T)^b_n V_l, zero without supercooling.
double nucleation_rate(double T, double m_s, double m_w, const FreezingModel& m);
double nucleation_probability(double lambda, double dt);

// Per-run random source. uniform() is built from the raw 64-bit output so the
// stream is identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

bool sample_nucleation(double lambda, double dt, Rng& rng);

// Ice-layer geometry during solidification.
struct IceGeometry {
    double r;    // liquid core radius
    double h_l;  // liquid core height
    double l;    // bottom ice thickness
};
IceGeometry ice_geometry(double m_s, double m_w, double m_i, double V0, const Formulation& f,
                         double d);

struct SolidificationContext {
    double m_s;
    double m_water_total;  // m_w + m_i, fixed during the stage
    double V0;             // liquid volume just before nucleation
    double h_rad;          // linearized side radiation coefficient
};

struct SolidificationRates {
    double dm_i;
    double T;
    double Q_total;
};
SolidificationRates solidification_rhs(const FreezingModel& m, const SolidificationContext& c,
                                       double t, double m_i);

// ------------------------------------------------------------------
// Full stage machine
// ------------------------------------------------------------------

struct FreezeSegment {
    FreezeStage stage;
    Solution solution;  // raw integrator output for the stage
    std::vector<double> t, T, m_w, m_i;
};

struct FreezingResult {
    std::vector<FreezeSegment> segments;
    double t_f1 = 0, t_f2 = 0, t_f3 = 0, t_f4 = 0, t_f5 = 0;
    double T_nucleation = 0;  // temperature at which nucleation occurred
    NucleationResult nucleation{};
    SolidificationContext solidification{};
    VialState final_state{};
    double m_w0 = 0;
    double m_s = 0;
};

FreezingResult run_freezing(const FreezingModel& model, const VialState& initial);

// Convenience: initial state from the formulation at temperature T0.
VialState initial_vial_state(const FreezingModel& model, double T0);

}  // namespace lyo
