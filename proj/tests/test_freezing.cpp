#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "lyo/errors.hpp"
#include "lyo/freezing.hpp"
#include "oracles.hpp"

using namespace lyo;

namespace {

FreezingModel case1() {
    FreezingModel m;
    auto& p = m.protocol;
    p.visf = false;
    p.T_n = 263.18;
    p.h_s1 = 7;
    p.h_s2 = 18;
    p.h_s3 = 15;
    p.before = {243.0, 272.0, 272.0};
    p.after = {243.0, 272.0, 272.0};
    p.T_target = 250.0;
    return m;
}

double depressed_fp(const FreezingModel& m, double m_w) {
    return freezing_point(mixture_properties(m.formulation, m.d).m_s, m_w, m.formulation);
}

}  // namespace

TEST_CASE("preconditioning is at rest when every sink equals T") {
    FreezingModel m;
    const Surroundings env{260.0, 260.0, 260.0};
    const auto r = liquid_rhs(m, env, 0.0, 260.0, 2.9e-3, std::nullopt);
    CHECK(r.dT == 0.0);
    CHECK(r.dm_w == 0.0);
}

TEST_CASE("preconditioning cools from the default start") {
    FreezingModel m;
    CHECK(liquid_rhs(m, m.protocol.before, 0.0, 298.15, 2.9e-3, std::nullopt).dT < 0.0);
}

TEST_CASE("constant-coefficient preconditioning is an exponential relaxation") {
    FreezingModel m;
    m.protocol.radiation.F_s3 = 0.0;
    const double Te = 250.0;
    const Surroundings env{Te, Te, Te};
    const auto mix = mixture_properties(m.formulation, m.d);
    const double A_z = cross_section(m.d);
    const double A_r = product_side_area(mix.m_s, mix.m_w0, 0.0, m.formulation, m.d);
    const double UA = (m.protocol.h_s1 + m.protocol.h_s2) * A_z + m.protocol.h_s3 * A_r;
    const double C = mix.m_s * m.formulation.Cp_s + mix.m_w0 * m.formulation.Cp_w;

    OdeSystem sys{2, [&](double t, std::span<const double> y, std::span<double> f) {
                      const auto r = liquid_rhs(m, env, t, y[0], y[1], std::nullopt);
                      f[0] = r.dT;
                      f[1] = r.dm_w;
                  }, {}};
    IntegratorConfig cfg;
    cfg.rtol = 1e-8;
    cfg.atol_per_component = {1e-8, 1e-14};
    const std::vector<double> y0{298.15, mix.m_w0};
    const auto sol = integrate_adaptive(sys, y0, {0.0, 5000.0}, cfg);
    for (double t : {100.0, 1000.0, 5000.0}) {
        const double exact = Te + (298.15 - Te) * std::exp(-UA * t / C);
        CHECK(sol.at(t)[0] == doctest::Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("VISF evaporation") {
    FreezingModel m;
    m.protocol.p_w_c = 0.0;
    CHECK(evaporation_rate(m, 268.0, 1e4) == doctest::Approx(-7.76e-8).epsilon(5e-3));

    // h_m = 0 reduces VISF to preconditioning.
    FreezingModel dry = m;
    dry.protocol.h_m = 0.0;
    const auto a = liquid_rhs(dry, dry.protocol.before, 0.0, 270.0, 2.9e-3, 1e4);
    const auto b = liquid_rhs(dry, dry.protocol.before, 0.0, 270.0, 2.9e-3, std::nullopt);
    CHECK(a.dT == b.dT);
    CHECK(a.dm_w == 0.0);

    // Saturated chamber: no driving force.
    FreezingModel sat = m;
    sat.protocol.p_w_c = psat_evaporation(268.0);
    CHECK(std::abs(evaporation_rate(sat, 268.0, 1e4)) < 1e-20);

    // The pressure schedule ramps linearly then holds.
    const Schedule pt = visf_pressure(m.protocol, 100.0);
    CHECK(pt(100.0) == 1e5);
    CHECK(pt(115.0) == doctest::Approx(5.5e4));
    CHECK(pt(500.0) == 1e4);
}

TEST_CASE("controlled nucleation against the fixed-point oracle") {
    Formulation f;
    const auto mix = mixture_properties(f, 0.024);
    const double m_s = mix.m_s, m_w = mix.m_w0;
    const auto r = nucleate_controlled(268.0, m_s, m_w, f, 3.34e5);
    const double C = m_s * f.Cp_s + m_w * f.Cp_w;
    const double beta = f.K_f * m_s / f.M_s;
    const auto o = oracle::nucleation_fixed_point(268.0, C, 3.34e5, beta, m_w, 273.15);
    CHECK(r.m_i_n == doctest::Approx(o.x).epsilon(1e-10));
    CHECK(r.T_fl == doctest::Approx(o.T).epsilon(1e-12));
    CHECK(r.m_i_n == doctest::Approx(1.79e-4).epsilon(0.01));
    CHECK(r.T_fl == doctest::Approx(272.84).epsilon(2e-5));

    // Both balances hold.
    const double e1 = (r.T_fl - 268.0) * C - r.m_i_n * 3.34e5;
    const double e2 = (273.15 - r.T_fl) - beta / (m_w - r.m_i_n);
    CHECK(std::abs(e1) / (r.m_i_n * 3.34e5) < 1e-9);
    CHECK(std::abs(e2) / (273.15 - r.T_fl) < 1e-9);
}

TEST_CASE("nucleation at the depressed freezing point forms no ice") {
    Formulation f;
    const auto mix = mixture_properties(f, 0.024);
    const double T_eq = freezing_point(mix.m_s, mix.m_w0, f);
    const auto r = nucleate_controlled(T_eq, mix.m_s, mix.m_w0, f, 3.34e5);
    CHECK(r.m_i_n == 0.0);
    CHECK(r.T_fl == T_eq);
    CHECK_THROWS_AS(nucleate_controlled(T_eq + 0.1, mix.m_s, mix.m_w0, f, 3.34e5), DomainError);
}

TEST_CASE("stochastic nucleation sampling") {
    FreezingModel m;
    m.protocol.k_n = 0.0;
    const auto mix = mixture_properties(m.formulation, m.d);
    CHECK(nucleation_rate(250.0, mix.m_s, mix.m_w0, m) == 0.0);
    m.protocol.k_n = 1e-9;
    CHECK(nucleation_rate(273.0, mix.m_s, mix.m_w0, m) == 0.0);
    for (double x : {0.0, 1e-6, 0.5, 3.0, 1e3}) {
        const double P = nucleation_probability(x, 1.0);
        CHECK(P >= 0.0);
        CHECK(P <= 1.0);
    }
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) CHECK_FALSE(sample_nucleation(0.0, 0.1, rng));
}

TEST_CASE("mean first-nucleation time under constant supercooling") {
    // lambda fixed by holding T; the waiting time is exponential with mean 1/lambda.
    const double lambda = 0.01, dt = 0.1;
    const int trials = 10000;
    Rng rng(2024);
    std::vector<double> times;
    times.reserve(trials);
    for (int n = 0; n < trials; ++n) {
        std::uint64_t k = 0;
        while (!sample_nucleation(lambda, dt, rng)) ++k;
        times.push_back(static_cast<double>(k + 1) * dt);
    }
    const double mean = std::accumulate(times.begin(), times.end(), 0.0) / trials;
    double var = 0.0;
    for (double t : times) var += (t - mean) * (t - mean);
    const double se = std::sqrt(var / (trials - 1)) / std::sqrt(double(trials));
    CHECK(std::abs(mean - 1.0 / lambda) < 3.0 * se);
}

TEST_CASE("stochastic runs are reproducible per seed") {
    FreezingModel m = case1();
    m.protocol.mode = NucleationMode::Stochastic;
    m.protocol.seed = 7;
    const auto a = run_freezing(m, initial_vial_state(m, 280.0));
    const auto b = run_freezing(m, initial_vial_state(m, 280.0));
    CHECK(a.t_f1 == b.t_f1);
    CHECK(a.final_state.T == b.final_state.T);
    REQUIRE(a.segments.size() == b.segments.size());
    for (std::size_t i = 0; i < a.segments.size(); ++i) {
        CHECK(a.segments[i].t == b.segments[i].t);
        CHECK(a.segments[i].T == b.segments[i].T);
    }
    m.protocol.seed = 8;
    const auto c = run_freezing(m, initial_vial_state(m, 280.0));
    CHECK(c.t_f1 != a.t_f1);
    // The nucleation instant sits on the sampling grid.
    const double k = a.t_f1 / m.protocol.nucleation_dt;
    CHECK(std::abs(k - std::round(k)) < 1e-6);
    CHECK(a.T_nucleation < depressed_fp(m, a.m_w0));
}

TEST_CASE("solidification with no net heat removal stalls") {
    FreezingModel m;
    const auto mix = mixture_properties(m.formulation, m.d);
    SolidificationContext c{mix.m_s, mix.m_w0, mix.m_s / m.formulation.rho_s + mix.m_w0 / m.formulation.rho_w, 0.0};
    const double m_i = 1e-3;
    const double T = depressed_fp(m, mix.m_w0 - m_i);
    m.protocol.after = {T, T, T};
    const auto r = solidification_rhs(m, c, 0.0, m_i);
    CHECK(std::abs(r.dm_i) < 1e-18);
    CHECK(r.T == doctest::Approx(T).epsilon(1e-14));
}

TEST_CASE("Case 1 freezing run") {
    const FreezingModel m = case1();
    const auto r = run_freezing(m, initial_vial_state(m, 280.0));

    CHECK(r.t_f1 <= r.t_f2);
    CHECK(r.t_f2 <= r.t_f3);
    CHECK(r.t_f3 <= r.t_f4);
    CHECK(r.t_f4 <= r.t_f5);

    // Jump from the nucleation temperature to about 272 K.
    CHECK(r.T_nucleation == 263.18);
    CHECK(r.nucleation.T_fl == doctest::Approx(272.0).epsilon(0.005));
    // Solidification lasts about half an hour.
    const double minutes = (r.t_f4 - r.t_f3) / 60.0;
    CHECK(minutes > 20.0);
    CHECK(minutes < 40.0);

    const auto& sol = r.segments[r.segments.size() - 2];
    REQUIRE(sol.stage == FreezeStage::Solidification);
    const double total = r.solidification.m_water_total;
    for (std::size_t i = 0; i < sol.t.size(); ++i) {
        // Mass closure and slaved temperature.
        CHECK(std::abs(sol.m_w[i] + sol.m_i[i] - total) <= 2 * std::numeric_limits<double>::epsilon() * total);
        CHECK(std::abs(sol.T[i] - depressed_fp(m, sol.m_w[i])) < 1e-9);
        if (i > 0) CHECK(sol.m_i[i] >= sol.m_i[i - 1]);
    }
    CHECK(sol.m_i.back() == doctest::Approx(0.95 * total).epsilon(1e-6));
    // Final cooling heads toward the gas/wall temperatures.
    CHECK(std::abs(r.final_state.T - 250.0) <= 0.5 + 1e-9);
}

TEST_CASE("solidification energy closure") {
    const FreezingModel m = case1();
    const auto r = run_freezing(m, initial_vial_state(m, 280.0));
    const auto& seg = r.segments[r.segments.size() - 2];
    const auto& ctx = r.solidification;
    const auto& f = m.formulation;
    const double heat_in = oracle::integrate_along(seg.solution, [&](double t, std::span<const double> y) {
        return solidification_rhs(m, ctx, t, y[0]).Q_total;
    });
    const double mw_a = seg.m_w.front(), mw_b = seg.m_w.back();
    const double beta = f.K_f * ctx.m_s / f.M_s;
    // Sensible heat along T = T_fw - beta/m_w, integrated in closed form.
    const double sensible = ctx.m_s * f.Cp_s * beta * (1.0 / mw_a - 1.0 / mw_b) +
                            f.Cp_w * beta * std::log(mw_b / mw_a);
    const double latent = -m.protocol.dH_fus * (seg.m_i.back() - seg.m_i.front());
    const double rhs = latent + sensible;
    CHECK(std::abs(heat_in - rhs) / std::abs(rhs) < 0.005);
}

TEST_CASE("default controlled cycle with VISF") {
    const FreezingModel m;
    const auto r = run_freezing(m, initial_vial_state(m, 298.15));
    CHECK(r.t_f1 == doctest::Approx(m.protocol.precondition_time));
    CHECK(r.t_f2 > r.t_f1);
    const auto& visf = r.segments[1];
    REQUIRE(visf.stage == FreezeStage::Visf);
    const double loss = (visf.m_w.front() - visf.m_w.back()) / r.m_w0;
    CHECK(loss > 0.0);
    CHECK(loss < 0.02);
    CHECK(std::abs(visf.T.back() - m.protocol.T_n) < 1e-2);
    CHECK(r.final_state.T == doctest::Approx(m.protocol.T_target).epsilon(0.5 / 235.0 + 1e-9));
}

TEST_CASE("VISF energy closure") {
    const FreezingModel m;
    const auto r = run_freezing(m, initial_vial_state(m, 298.15));
    const auto& seg = r.segments[1];
    const auto& f = m.formulation;
    const auto pt = visf_pressure(m.protocol, r.t_f1);
    const double ms = r.m_s;
    const double heat = oracle::integrate_along(seg.solution, [&](double t, std::span<const double> y) {
        const double Q = liquid_heat(m, m.protocol.before, t, y[0], y[1], 0.0).total();
        return Q + heat_of_vaporization(y[0]) * evaporation_rate(m, y[0], pt(t));
    });
    // Independent check on the temperature path: integral of C dT from samples.
    double sensible = 0.0;
    for (std::size_t i = 0; i + 1 < seg.t.size(); ++i) {
        const double Cm = ms * f.Cp_s + 0.5 * (seg.m_w[i] + seg.m_w[i + 1]) * f.Cp_w;
        sensible += Cm * (seg.T[i + 1] - seg.T[i]);
    }
    CHECK(std::abs(heat - sensible) / std::abs(sensible) < 0.005);
}

TEST_CASE("solidification fraction shifts t_f4 but not the end of freezing") {
    FreezingModel a = case1();
    FreezingModel b = case1();
    a.protocol.solidification_fraction = 0.85;
    b.protocol.solidification_fraction = 0.95;
    const auto ra = run_freezing(a, initial_vial_state(a, 280.0));
    const auto rb = run_freezing(b, initial_vial_state(b, 280.0));
    CHECK(ra.t_f4 < rb.t_f4);
    // T(t_f4) itself is fixed by the depression law at the remaining liquid
    // fraction, so the gap between the two criteria is known in closed form.
    const auto& f = a.formulation;
    const double beta = f.K_f * ra.m_s / f.M_s;
    const double M = ra.solidification.m_water_total;
    const double gap = beta / M * (1.0 / 0.05 - 1.0 / 0.15);
    const double Ta = ra.segments[ra.segments.size() - 2].T.back();
    const double Tb = rb.segments[rb.segments.size() - 2].T.back();
    CHECK((Ta - Tb) == doctest::Approx(gap).epsilon(1e-4));
    // The frozen product leaving the freezing stage is nearly the same.
    CHECK(std::abs(ra.final_state.T - rb.final_state.T) < 1.0);
    CHECK(std::abs(ra.t_f5 - rb.t_f5) / rb.t_f5 < 0.1);
}

TEST_CASE("nucleation post-state does not depend on the integrator step") {
    FreezingModel a = case1(), b = case1();
    a.integrator.rtol = 1e-4;
    b.integrator.rtol = 1e-9;
    const auto ra = run_freezing(a, initial_vial_state(a, 280.0));
    const auto rb = run_freezing(b, initial_vial_state(b, 280.0));
    CHECK(ra.nucleation.T_fl == rb.nucleation.T_fl);
    CHECK(ra.nucleation.m_i_n == rb.nucleation.m_i_n);
}

TEST_CASE("unreachable nucleation temperature is a stage-tagged failure") {
    FreezingModel m = case1();
    m.protocol.T_n = 200.0;
    m.protocol.horizon = 2e4;
    try {
        run_freezing(m, initial_vial_state(m, 280.0));
        FAIL("expected failure");
    } catch (const SimulationError& e) {
        CHECK(e.stage() == "preconditioning");
    }
    FreezingModel bad;
    bad.protocol.solidification_fraction = 0.99;
    CHECK_THROWS_AS(run_freezing(bad, initial_vial_state(bad, 298.15)), std::invalid_argument);
}
