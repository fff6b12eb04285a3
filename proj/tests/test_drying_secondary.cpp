#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "lyo/drying_primary.hpp"
#include "lyo/drying_secondary.hpp"
#include "lyo/errors.hpp"
#include "oracles.hpp"

using namespace lyo;

namespace {

SecondaryResult run_uniform(const SecondaryModel& m, double T0, double c0) {
    return run_secondary(m, std::span<const double>(&T0, 1), std::span<const double>(&c0, 1));
}

double pow4(double x) { return (x * x) * (x * x); }

}  // namespace

TEST_CASE("desorption kinetics") {
    DesorptionKinetics k;
    // 1.5e-3 * exp(-6500 / (8.314 * 293))
    CHECK(desorption_constant(293.0, k) == doctest::Approx(1.04e-4).epsilon(3e-3));
    CHECK(desorption_rate(293.0, 0.0, k) == 0.0);
    k.c_star = 0.02;
    CHECK(desorption_rate(293.0, 0.02, k) == 0.0);
    CHECK(desorption_rate(293.0, 0.05, k) < 0.0);
    // Arrhenius: strictly increasing with temperature.
    CHECK(desorption_constant(300.0, k) > desorption_constant(290.0, k));
}

TEST_CASE("secondary right-hand side: equilibrium and desorption sign") {
    SecondaryModel m;
    const double Teq = 290.0;
    m.conditions.T_b = Teq;
    m.conditions.T_c = Teq;
    m.conditions.T_u = Teq;
    const std::size_t n = m.n_z;
    std::vector<double> T(n, Teq), c(n, 0.0), dT(n, 1.0), dc(n, 1.0);
    secondary_rhs(m, 0.0, T, c, dT, dc);
    for (std::size_t j = 0; j < n; ++j) {
        CHECK(dT[j] == 0.0);
        CHECK(dc[j] == 0.0);
    }
    // With bound water present the only nonzero contribution is the
    // endothermic desorption term.
    std::fill(c.begin(), c.end(), 0.05);
    secondary_rhs(m, 0.0, T, c, dT, dc);
    const double latent = m.kinetics.rho_d * m.kinetics.dH_des / (m.kinetics.rho_e * m.kinetics.Cp_e);
    for (std::size_t j = 0; j < n; ++j) {
        CHECK(dc[j] < 0.0);
        CHECK(dT[j] <= 0.0);
        CHECK(dT[j] == doctest::Approx(latent * dc[j]).epsilon(1e-12));
    }
}

TEST_CASE("isothermal hold follows the closed-form exponential") {
    SecondaryModel m;
    const double T = 293.0;
    m.conditions.T_b = T;
    m.conditions.T_c = T;
    m.conditions.T_u = T;
    m.kinetics.dH_des = 0.0;  // no self-cooling: the slab stays at T
    m.integrator.rtol = 1e-9;
    m.integrator.atol_per_component.assign(2 * m.n_z, 1e-12);
    const double c0 = 0.088;
    const auto res = run_uniform(m, T, c0);
    const double kd = 1.5e-3 * std::exp(-6500.0 / (8.314 * T));
    for (std::size_t i = 0; i < res.t.size(); ++i) {
        const double exact = c0 * std::exp(-kd * (res.t[i] - res.t0));
        CHECK(std::abs(res.c_avg[i] - exact) / exact < 1e-6);
    }
    // Event time from the closed form.
    CHECK(res.t_end == doctest::Approx(std::log(c0 / 0.01) / kd).epsilon(1e-6));
}

TEST_CASE("already dry: t_d2 equals t_0") {
    SecondaryModel m;
    const double T0 = 280.0, c0 = m.c_target;
    const auto res = run_secondary(m, std::span<const double>(&T0, 1), std::span<const double>(&c0, 1), 1234.0);
    CHECK(res.t_end == 1234.0);
    CHECK(res.completed);
}

TEST_CASE("averaged bound water decreases strictly; nodes never increase") {
    SecondaryModel m;
    const std::size_t n = m.n_z;
    // Linear initial profile 5 % (top) to 20 % (bottom).
    std::vector<double> c0(n);
    for (std::size_t j = 0; j < n; ++j) c0[j] = 0.05 + 0.15 * static_cast<double>(j) / static_cast<double>(n - 1);
    const double T0 = 250.0;
    const auto res = run_secondary(m, std::span<const double>(&T0, 1), c0);
    REQUIRE(res.completed);
    CHECK(res.c_avg.back() == doctest::Approx(0.01).epsilon(1e-4));
    for (std::size_t i = 1; i < res.t.size(); ++i) {
        CHECK(res.c_avg[i] < res.c_avg[i - 1]);
        const auto a = res.c_profile(i - 1), b = res.c_profile(i);
        for (std::size_t j = 0; j < n; ++j) CHECK(b[j] <= a[j]);
    }
}

TEST_CASE("lumped-limit oracle at small Biot number") {
    // Weak shelf coupling and no top radiation: gradients are negligible and
    // a single-node balance integrated with classical RK4 must agree.
    SecondaryModel m;
    m.conditions.h_b = 1.0;
    m.radiation.F_s1 = 0.0;
    m.integrator.rtol = 1e-8;
    const double T0 = 273.0, c0 = 0.088;
    CHECK(m.conditions.h_b * m.geometry.H / m.kinetics.k_e < 0.1);
    const auto res = run_uniform(m, T0, c0);

    const auto& k = m.kinetics;
    const double H = m.geometry.H, d = m.geometry.d, Tb = 295.0, Tc = 290.0;
    const double sig = m.radiation.sigma, F3 = m.radiation.F_s3;
    auto f = [&](double T, double c, double& dT, double& dc) {
        dc = -k.f_a * std::exp(-k.E_a / (k.R * T)) * c;
        const double q = m.conditions.h_b * (Tb - T) / H + 4.0 * sig * F3 * (pow4(Tc) - pow4(T)) / d;
        dT = (q + k.rho_d * k.dH_des * dc) / (k.rho_e * k.Cp_e);
    };
    double T = T0, c = c0, t = 0.0;
    const double dt = 1.0;
    double worst = 0.0;
    while (t < res.t_end) {
        double k1T, k1c, k2T, k2c, k3T, k3c, k4T, k4c;
        f(T, c, k1T, k1c);
        f(T + 0.5 * dt * k1T, c + 0.5 * dt * k1c, k2T, k2c);
        f(T + 0.5 * dt * k2T, c + 0.5 * dt * k2c, k3T, k3c);
        f(T + dt * k3T, c + dt * k3c, k4T, k4c);
        T += dt / 6.0 * (k1T + 2 * k2T + 2 * k3T + k4T);
        c += dt / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c);
        t += dt;
        const auto y = res.solution.at(std::min(t, res.t_end));
        const double sim = profile_average(std::span<const double>(y).subspan(m.n_z, m.n_z));
        worst = std::max(worst, std::abs(sim - c) / c);
    }
    CHECK(worst < 0.01);
}

TEST_CASE("steady conduction with desorption frozen is linear") {
    SecondaryModel m;
    m.radiation.F_s3 = 0.0;
    m.conditions.T_u = 300.0;
    m.conditions.T_b = 260.0;
    m.integrator.rtol = 1e-10;
    m.integrator.atol_per_component.assign(2 * m.n_z, 1e-9);
    const double T0 = 270.0, c0 = 0.05;
    const auto res = run_conduction_hold(m, std::span<const double>(&T0, 1), std::span<const double>(&c0, 1), 0.0, 3e5);
    const auto T = res.T_profile(res.t.size() - 1);

    const double s = m.radiation.sigma * m.radiation.F_s1, k = m.kinetics.k_e, H = m.geometry.H,
                 hb = m.conditions.h_b, Tu = 300.0, Tb = 260.0;
    double lo = Tb, hi = Tu;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double q = s * (std::pow(Tu, 4) - std::pow(mid, 4));
        const double Tbot = Tb + q / hb;
        (q - k * (mid - Tbot) / H > 0.0 ? lo : hi) = mid;
    }
    const double Ttop = 0.5 * (lo + hi);
    const double Tbot = Tb + s * (std::pow(Tu, 4) - std::pow(Ttop, 4)) / hb;
    for (std::size_t j = 0; j < m.n_z; ++j) {
        const double z = static_cast<double>(j) / static_cast<double>(m.n_z - 1);
        const double exact = Ttop + (Tbot - Ttop) * z;
        CHECK(std::abs(T[j] - exact) / exact < 1e-6);
    }
    for (double v : res.c_profile(res.t.size() - 1)) CHECK(v == c0);
}

TEST_CASE("secondary energy closure by post-hoc quadrature") {
    SecondaryModel m;
    const std::size_t n = m.n_z;
    const auto res = run_uniform(m, 233.0, 0.088);
    const auto& k = m.kinetics;
    const auto& rad = m.radiation;
    const double A = m.geometry.A_z, H = m.geometry.H;

    const double boundary_in = oracle::integrate_along(res.solution, [&](double t, std::span<const double> y) {
        double t4 = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j) t4 += 0.5 * (pow4(y[j]) + pow4(y[j + 1]));
        t4 /= static_cast<double>(n - 1);
        const double bot = A * m.conditions.h_b * (m.conditions.T_b(t) - y[n - 1]);
        const double top = A * rad.sigma * rad.F_s1 * (pow4(m.conditions.T_u(t)) - pow4(y[0]));
        const double side = rad.sigma * m.geometry.side_area() * rad.F_s3 * (pow4(m.conditions.T_c(t)) - t4);
        return bot + top + side;
    });
    const double V = A * H;
    const double sensible = k.rho_e * k.Cp_e * V * (res.T_avg.back() - res.T_avg.front());
    const double desorption = k.rho_d * k.dH_des * V * (res.c_avg.front() - res.c_avg.back());
    CHECK(std::abs(boundary_in - (sensible + desorption)) / boundary_in < 5e-3);
}

TEST_CASE("hotter shelf never lengthens secondary drying") {
    double prev = 1e300;
    for (double Tb : {285.0, 295.0, 305.0}) {
        SecondaryModel m;
        m.conditions.T_b = Tb;
        const double td = run_uniform(m, 250.0, 0.088).t_end;
        CHECK(td <= prev);
        prev = td;
    }
}

TEST_CASE("grid doubling changes t_d2 by less than one percent") {
    SecondaryModel a, b;
    a.n_z = 40;
    b.n_z = 80;
    a.integrator.rtol = b.integrator.rtol = 1e-8;
    const double ta = run_uniform(a, 233.0, 0.088).t_end;
    const double tb = run_uniform(b, 233.0, 0.088).t_end;
    CHECK(std::abs(ta - tb) / tb < 0.01);

    SecondaryModel c;
    c.integrator.rtol *= 0.5;
    const double t1 = run_uniform(SecondaryModel{}, 233.0, 0.088).t_end;
    const double t2 = run_uniform(c, 233.0, 0.088).t_end;
    CHECK(std::abs(t1 - t2) / t2 < 1e-3);
}

TEST_CASE("secondary drying failures are stage-tagged") {
    SecondaryModel m;
    m.kinetics.f_a = 1e-12;
    m.horizon = 1e5;
    try {
        run_uniform(m, 280.0, 0.088);
        FAIL("expected a SimulationError");
    } catch (const SimulationError& e) {
        CHECK(e.stage() == "secondary_drying");
    }
    const double c_bad = -0.1, T0 = 280.0;
    CHECK_THROWS_AS(run_secondary(SecondaryModel{}, std::span<const double>(&T0, 1), std::span<const double>(&c_bad, 1)),
                    std::invalid_argument);
}
