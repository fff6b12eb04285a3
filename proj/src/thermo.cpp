#include "lyo/thermo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lyo/errors.hpp"

namespace lyo {

void Formulation::validate() const {
    if (!(x_s >= 0.0 && x_s < 1.0)) {
        throw std::invalid_argument("Formulation: x_s must lie in [0, 1)");
    }
    if (!(V_l > 0.0)) {
        throw std::invalid_argument("Formulation: V_l must be positive");
    }
    const double positive[] = {rho_s, rho_w, rho_i, Cp_s, Cp_w, Cp_i, k_s,
                               k_w,   k_i,   M_s,   M_w,  M_in, K_f};
    for (double v : positive) {
        if (!(v > 0.0)) {
            throw std::invalid_argument(
                "Formulation: densities, heat capacities, conductivities and molar masses "
                "must be positive");
        }
    }
}

void VialGeometry::validate() const {
    if (!(d > 0.0)) throw std::invalid_argument("VialGeometry: d must be positive");
    if (!(H > 0.0)) throw std::invalid_argument("VialGeometry: H must be positive");
    if (std::abs(A_z - cross_section(d)) > 1e-12 * cross_section(d)) {
        throw std::invalid_argument("VialGeometry: A_z must equal pi*d^2/4");
    }
}

VialGeometry make_geometry(double d, double H) {
    VialGeometry g{d, cross_section(d), H};
    g.validate();
    return g;
}

void RadiationSpec::validate() const {
    if (!(eps_gl >= 0.0 && eps_gl <= 1.0)) {
        throw std::invalid_argument("RadiationSpec: eps_gl must lie in [0, 1]");
    }
    if (!(F_s1 >= 0.0 && F_s1 <= eps_gl) || !(F_s3 >= 0.0 && F_s3 <= eps_gl)) {
        throw std::invalid_argument(
            "RadiationSpec: transfer factors must lie in [0, eps_gl]");
    }
    if (!(sigma > 0.0)) throw std::invalid_argument("RadiationSpec: sigma must be positive");
}

double psat_evaporation(double T) {
    if (!(T > 42.98)) {
        throw DomainError("psat_evaporation: T must exceed 42.98 K, got " + std::to_string(T));
    }
    return 1e3 * std::exp(16.3872 - 3885.7 / (T - 42.98));
}

double psat_sublimation(double T) {
    if (!(T > 0.0)) {
        throw DomainError("psat_sublimation: T must be positive, got " + std::to_string(T));
    }
    return std::exp(-6139.9 / T + 28.8912);
}

double heat_of_vaporization(double T) {
    constexpr double Tc = 647.1;
    if (!(T > 0.0) || T > Tc) {
        throw DomainError("heat_of_vaporization: T must lie in (0, 647.1] K, got " +
                          std::to_string(T));
    }
    return 2.257e6 * std::pow((1.0 - T / Tc) / (1.0 - 373.15 / Tc), 0.38);
}

double freezing_point(double m_s, double m_w_unfrozen, const Formulation& f, double T_fw) {
    if (!(m_w_unfrozen > 0.0)) {
        throw DomainError("freezing_point: unfrozen water mass must be positive");
    }
    return T_fw - (f.K_f / f.M_s) * (m_s / m_w_unfrozen);
}

double radiation_exchange(double T_self, double T_other, double F, double A, double sigma) {
    const double s2 = T_self * T_self;
    const double o2 = T_other * T_other;
    return sigma * A * F * (o2 * o2 - s2 * s2);
}

double enclosure_transfer_factor(double eps1, double A1, double eps2, double A2, double F12) {
    if (!(eps1 > 0.0 && eps2 > 0.0 && A1 > 0.0 && A2 > 0.0 && F12 > 0.0)) {
        throw std::invalid_argument("enclosure_transfer_factor: arguments must be positive");
    }
    const double resistance =
        (1.0 - eps1) / (eps1 * A1) + 1.0 / (A1 * F12) + (1.0 - eps2) / (eps2 * A2);
    return 1.0 / (A1 * resistance);
}

double linearized_radiation_htc(double T_a, double T_b, double F, double sigma) {
    const double T_ref = 0.5 * (T_a + T_b);
    return 4.0 * sigma * F * T_ref * T_ref * T_ref;
}

double overall_htc_slab(double h, double l, double k_i) {
    if (!(h > 0.0) || l < 0.0 || !(k_i > 0.0)) {
        throw std::invalid_argument("overall_htc_slab: need h > 0, l >= 0, k_i > 0");
    }
    return 1.0 / (1.0 / h + l / k_i);
}

double overall_htc_cylinder(double h, double r_o, double r, double k_i) {
    if (!(h > 0.0) || !(k_i > 0.0)) {
        throw std::invalid_argument("overall_htc_cylinder: need h > 0, k_i > 0");
    }
    if (!(r > 0.0) || r > r_o) {
        throw std::invalid_argument("overall_htc_cylinder: need 0 < r <= r_o");
    }
    return 1.0 / (1.0 / h + r_o * std::log(r_o / r) / k_i);
}

double product_side_area(double m_s, double m_w, double m_i, const Formulation& f, double d) {
    return 4.0 * (m_s / f.rho_s + m_w / f.rho_w + m_i / f.rho_i) / d;
}

double MixtureProperties::side_area(double m_w, double m_i, const Formulation& f,
                                    double d) const {
    return product_side_area(m_s, m_w, m_i, f, d);
}

MixtureProperties mixture_properties(const Formulation& f, double d) {
    f.validate();
    if (!(d > 0.0)) throw std::invalid_argument("mixture_properties: d must be positive");

    MixtureProperties p{};
    p.rho_l = 1.0 / (f.x_s / f.rho_s + (1.0 - f.x_s) / f.rho_w);
    p.m_s = f.x_s * p.rho_l * f.V_l;
    p.m_w0 = (1.0 - f.x_s) * p.rho_l * f.V_l;
    p.rho_f = 1.0 / (f.x_s / f.rho_s + (1.0 - f.x_s) / f.rho_i);
    p.Cp_f = f.x_s * f.Cp_s + (1.0 - f.x_s) * f.Cp_i;
    p.k_f = f.x_s * f.k_s + (1.0 - f.x_s) * f.k_i;
    p.H = (p.m_s + p.m_w0) / (p.rho_f * cross_section(d));
    return p;
}

}  // namespace lyo
