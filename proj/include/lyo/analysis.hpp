#pragma once

// Scale analysis: when is a lumped thermal model adequate, and which mass
// transfer step limits secondary drying.

#include <string>
#include <vector>

namespace lyo {

double biot_number(double h, double L, double k);

// First n positive roots of lambda J1(lambda) = Bi J0(lambda). Root n lies
// between the (n-1)th zero of J1 (0 for n = 1) and the nth zero of J0.
std::vector<double> cylinder_eigenvalues(double Bi, int n_terms);

// Volume-averaged (T - T_env)/(T0 - T_env) in an infinite cylinder with a
// convective surface, as a truncated eigenfunction series. Terms below
// tail_cutoff relative to the running sum are dropped.
double cylinder_transient_theta(double Bi, double Fo, int n_terms = 20, double tail_cutoff = 1e-12);

// Single-node counterpart, exp(-2 Bi Fo).
double lumped_cylinder_theta(double Bi, double Fo);

// Fourier number at which the series reaches theta (bisection).
double cylinder_fourier_to_theta(double Bi, double theta, int n_terms = 20);

struct PorousMedium {
    double porosity = 0.815;
    double tortuosity = 1.2;
    double pore_radius = 5e-6;  // m
    double D_g = 1.97e-5;       // binary gas diffusivity, m^2/s

    void validate() const;
};

struct Diffusivities {
    double D_K;    // Knudsen
    double D_e_g;  // effective ordinary
    double D_e_K;  // effective Knudsen
    double D_e;    // combined
};

// M in g/mol as required by the Knudsen correlation D_K = 97 r sqrt(T/M).
Diffusivities effective_diffusivity(const PorousMedium& p, double T, double M_g_per_mol);

enum class LimitingStep { Diffusion, Desorption };
const char* limiting_name(LimitingStep s);

struct TimeScales {
    double t_diff;  // s
    double t_des;   // s
    LimitingStep limiting;
};

TimeScales time_scales(double L, double D_e, double k_d);

// Generic diffusion time L^2 / D (used for solid-phase diffusion).
double diffusion_time(double L, double D);

}  // namespace lyo
