#pragma once

// Property correlations, radiation exchange and mixture/geometry relations
// shared by every stage model. All functions are pure.

#include <numbers>

namespace lyo {

inline constexpr double kStefanBoltzmann = 5.67e-8;    // W/m^2.K^4
inline constexpr double kGasConstant = 8.314;          // J/mol.K
inline constexpr double kWaterFreezingPoint = 273.15;  // K

// Solution fill and constituent properties (SI units throughout).
struct Formulation {
    double x_s = 0.05;     // solute mass fraction
    double V_l = 3e-6;     // liquid fill volume, m^3
    double rho_s = 1587.9;
    double rho_w = 1000.0;
    double rho_i = 917.0;
    double Cp_s = 1204.0;
    double Cp_w = 4187.0;
    double Cp_i = 2108.0;
    double k_s = 0.126;
    double k_w = 0.598;
    double k_i = 2.25;
    double M_s = 0.3423;   // kg/mol
    double M_w = 0.018;
    double M_in = 0.028;
    double K_f = 1.86;     // kg.K/mol

    void validate() const;
};

struct VialGeometry {
    double d = 0.024;  // inner diameter, m
    double A_z = 0.0;  // cross-sectional area, m^2
    double H = 0.0;    // product height, m

    double radius() const { return 0.5 * d; }
    // Side area of the full product column.
    double side_area() const { return std::numbers::pi * d * H; }
    void validate() const;
};

VialGeometry make_geometry(double d, double H);

inline double cross_section(double d) { return 0.25 * std::numbers::pi * d * d; }

struct RadiationSpec {
    double F_s1 = 0.8;    // top exchange transfer factor
    double F_s3 = 0.624;  // side exchange transfer factor
    double eps_gl = 0.8;  // glass emissivity (upper bound for both factors)
    double sigma = kStefanBoltzmann;

    void validate() const;
};

// Vapour pressure over liquid water, Pa. Throws DomainError for T <= 42.98 K.
double psat_evaporation(double T);

// Vapour pressure over ice, Pa. Throws DomainError for T <= 0.
double psat_sublimation(double T);

// Latent heat of vaporization, J/kg. Valid for 0 < T <= 647.1 K.
double heat_of_vaporization(double T);

// Equilibrium freezing point of the solution with m_w kg of liquid water.
double freezing_point(double m_s, double m_w_unfrozen, const Formulation& f,
                      double T_fw = kWaterFreezingPoint);

// Net radiant heat received by "self": sigma*A*F*(T_other^4 - T_self^4).
double radiation_exchange(double T_self, double T_other, double F, double A,
                          double sigma = kStefanBoltzmann);

// Gray two-surface enclosure transfer factor referred to area A1.
double enclosure_transfer_factor(double eps1, double A1, double eps2, double A2,
                                 double F12);

// Linearized radiation coefficient 4*sigma*F*T_ref^3 with T_ref the mean of
// the two surface temperatures.
double linearized_radiation_htc(double T_a, double T_b, double F,
                                double sigma = kStefanBoltzmann);

// Overall coefficient through a planar ice layer of thickness l (outer area basis).
double overall_htc_slab(double h, double l, double k_i);

// Overall coefficient through a cylindrical annulus r..r_o (outer area basis).
double overall_htc_cylinder(double h, double r_o, double r, double k_i);

struct MixtureProperties {
    double rho_l;  // liquid solution density
    double m_s;    // solute mass
    double m_w0;   // initial water mass
    double rho_f;  // frozen-region density
    double Cp_f;   // frozen-region heat capacity (mass-fraction mixing)
    double k_f;    // frozen-region conductivity (mass-fraction mixing)
    double H;      // product height

    // Outer side area of a cylinder of diameter d holding the given masses.
    double side_area(double m_w, double m_i, const Formulation& f, double d) const;
};

MixtureProperties mixture_properties(const Formulation& f, double d);

// Side area 4*V/d of a cylindrical product holding m_s, m_w, m_i.
double product_side_area(double m_s, double m_w, double m_i, const Formulation& f, double d);

}  // namespace lyo
