#include "lyo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lyo/errors.hpp"

namespace lyo {

namespace {

double J0(double x) { return std::cyl_bessel_j(0.0, x); }
double J1(double x) { return std::cyl_bessel_j(1.0, x); }

template <class F>
double bisect(F f, double a, double b, double tol) {
    double fa = f(a);
    const double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw DomainError("bisect: no sign change");
    for (int it = 0; it < 200 && b - a > tol * std::max(1.0, std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// First `count` positive zeros of J_nu (nu = 0 or 1), located by scanning
// between McMahon estimates and refined by bisection.
std::vector<double> bessel_zeros(int nu, int count) {
    std::vector<double> z;
    auto f = [nu](double x) { return nu == 0 ? J0(x) : J1(x); };
    for (int k = 1; k <= count; ++k) {
        const double guess = (k + 0.5 * nu - 0.25) * std::numbers::pi;
        z.push_back(bisect(f, guess - 0.6, guess + 0.6, 1e-15));
    }
    return z;
}

}  // namespace

double biot_number(double h, double L, double k) {
    if (!(h >= 0.0) || !(L > 0.0) || !(k > 0.0)) throw DomainError("biot_number: invalid input");
    return h * L / k;
}

std::vector<double> cylinder_eigenvalues(double Bi, int n_terms) {
    if (!(Bi > 0.0)) throw DomainError("cylinder_eigenvalues: Bi must be positive");
    if (n_terms < 1) throw DomainError("cylinder_eigenvalues: need at least one term");
    const auto z0 = bessel_zeros(0, n_terms);
    const auto z1 = bessel_zeros(1, n_terms);
    std::vector<double> lam;
    lam.reserve(static_cast<std::size_t>(n_terms));
    auto f = [Bi](double x) { return x * J1(x) - Bi * J0(x); };
    for (int n = 0; n < n_terms; ++n) {
        const double lo = n == 0 ? 0.0 : z1[static_cast<std::size_t>(n - 1)];
        const double hi = z0[static_cast<std::size_t>(n)];
        lam.push_back(bisect(f, lo, hi, 1e-15));
    }
    return lam;
}

double cylinder_transient_theta(double Bi, double Fo, int n_terms, double tail_cutoff) {
    if (!(Fo >= 0.0)) throw DomainError("cylinder_transient_theta: Fo must be non-negative");
    const auto lam = cylinder_eigenvalues(Bi, n_terms);
    double sum = 0.0;
    for (double l : lam) {
        const double l2 = l * l;
        // 4 J1^2 / (l^2 (J0^2 + J1^2)) simplified with l J1 = Bi J0.
        const double term = 4.0 * Bi * Bi / (l2 * (l2 + Bi * Bi)) * std::exp(-l2 * Fo);
        sum += term;
        if (term < tail_cutoff * sum) break;
    }
    return sum;
}

double lumped_cylinder_theta(double Bi, double Fo) { return std::exp(-2.0 * Bi * Fo); }

double cylinder_fourier_to_theta(double Bi, double theta, int n_terms) {
    if (!(theta > 0.0 && theta < 1.0)) throw DomainError("cylinder_fourier_to_theta: theta must lie in (0, 1)");
    double hi = 1.0;
    while (cylinder_transient_theta(Bi, hi, n_terms) > theta) hi *= 2.0;
    return bisect([&](double Fo) { return cylinder_transient_theta(Bi, Fo, n_terms) - theta; }, 0.0, hi, 1e-13);
}

void PorousMedium::validate() const {
    if (!(porosity > 0.0 && porosity < 1.0)) throw DomainError("PorousMedium: porosity must lie in (0, 1)");
    if (!(tortuosity >= 1.0)) throw DomainError("PorousMedium: tortuosity must be at least 1");
    if (!(pore_radius > 0.0) || !(D_g > 0.0)) throw DomainError("PorousMedium: pore radius and D_g must be positive");
}

Diffusivities effective_diffusivity(const PorousMedium& p, double T, double M_g_per_mol) {
    p.validate();
    if (!(T > 0.0) || !(M_g_per_mol > 0.0)) throw DomainError("effective_diffusivity: invalid T or M");
    Diffusivities d{};
    const double f = p.porosity / p.tortuosity;
    d.D_K = 97.0 * p.pore_radius * std::sqrt(T / M_g_per_mol);
    d.D_e_g = f * p.D_g;
    d.D_e_K = f * d.D_K;
    d.D_e = 1.0 / (1.0 / d.D_e_g + 1.0 / d.D_e_K);
    return d;
}

const char* limiting_name(LimitingStep s) {
    return s == LimitingStep::Desorption ? "desorption" : "diffusion";
}

TimeScales time_scales(double L, double D_e, double k_d) {
    if (!(L > 0.0) || !(D_e > 0.0) || !(k_d > 0.0)) throw DomainError("time_scales: inputs must be positive");
    TimeScales s{};
    s.t_diff = L * L / D_e;
    s.t_des = 1.0 / k_d;
    s.limiting = s.t_des >= s.t_diff ? LimitingStep::Desorption : LimitingStep::Diffusion;
    return s;
}

double diffusion_time(double L, double D) {
    if (!(L > 0.0) || !(D > 0.0)) throw DomainError("diffusion_time: inputs must be positive");
    return L * L / D;
}

}  // namespace lyo
