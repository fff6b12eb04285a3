#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lyo/errors.hpp"
#include "lyo/schedule.hpp"
#include "lyo/thermo.hpp"

using namespace lyo;

TEST_CASE("evaporation saturation pressure") {
    CHECK(psat_evaporation(373.15) == doctest::Approx(1.0133e5).epsilon(5e-3));
    CHECK(psat_evaporation(273.15) == doctest::Approx(609.7).epsilon(2e-3));
    CHECK(std::abs(psat_evaporation(273.15) - 611.657) / 611.657 < 5e-3);
    CHECK(psat_evaporation(274.0) > psat_evaporation(273.0));
    CHECK_THROWS_AS(psat_evaporation(42.98), DomainError);
}

TEST_CASE("sublimation saturation pressure") {
    // Direct evaluations of exp(-6139.9/T + 28.8912).
    CHECK(psat_sublimation(273.15) == doctest::Approx(610.0).epsilon(2e-3));
    CHECK(psat_sublimation(250.0) == doctest::Approx(76.1).epsilon(3e-3));
    CHECK(psat_sublimation(233.15) == doctest::Approx(12.9).epsilon(5e-3));
    CHECK(std::abs(psat_sublimation(273.15) / psat_evaporation(273.15) - 1.0) < 0.01);
    CHECK_THROWS_AS(psat_sublimation(0.0), DomainError);
}

TEST_CASE("heat of vaporization") {
    CHECK(heat_of_vaporization(373.15) == doctest::Approx(2.257e6).epsilon(1e-12));
    CHECK(heat_of_vaporization(647.1) == 0.0);
    CHECK(heat_of_vaporization(273.15) == doctest::Approx(2.540e6).epsilon(2e-3));
    CHECK_THROWS_AS(heat_of_vaporization(700.0), DomainError);
}

TEST_CASE("freezing-point depression") {
    Formulation f;
    CHECK(freezing_point(0.0, 2.9e-3, f) == 273.15);
    CHECK(freezing_point(1.53e-4, 2.9e-3, f) == doctest::Approx(273.15 - 5.434 * 0.05276).epsilon(1e-5));
    const double d1 = 273.15 - freezing_point(1e-4, 2e-3, f);
    const double d2 = 273.15 - freezing_point(2e-4, 2e-3, f);
    CHECK(d2 == doctest::Approx(2 * d1).epsilon(1e-12));
    CHECK_THROWS_AS(freezing_point(1e-4, 0.0, f), DomainError);
}

TEST_CASE("radiation exchange") {
    CHECK(radiation_exchange(273.0, 273.0, 0.8, 1.0) == 0.0);
    // sigma * 0.8 * (290^4 - 273^4)
    CHECK(radiation_exchange(273.0, 290.0, 0.8, 1.0) == doctest::Approx(68.9).epsilon(2e-3));
    CHECK(radiation_exchange(290.0, 273.0, 0.8, 1.0) == -radiation_exchange(273.0, 290.0, 0.8, 1.0));
    // Small body inside a large enclosure: the transfer factor is its emissivity.
    CHECK(enclosure_transfer_factor(0.8, 1e-3, 0.9, 1e6, 1.0) == doctest::Approx(0.8).epsilon(1e-6));
    // Linearization error is small for moderate temperature differences.
    const double exact = radiation_exchange(290.0, 310.0, 1.0, 1.0);
    const double lin = linearized_radiation_htc(290.0, 310.0, 1.0) * 20.0;
    CHECK(std::abs(lin - exact) / exact < 0.005);
}

TEST_CASE("overall heat-transfer coefficients") {
    CHECK(overall_htc_slab(10.0, 0.0, 2.25) == 10.0);
    CHECK(overall_htc_cylinder(10.0, 0.012, 0.012, 2.25) == 10.0);
    CHECK(overall_htc_slab(10.0, 2e-3, 2.25) == doctest::Approx(9.912).epsilon(1e-4));
    CHECK(overall_htc_cylinder(8.0, 0.012, 0.006, 2.25) < 8.0);
    CHECK_THROWS(overall_htc_cylinder(8.0, 0.012, 0.013, 2.25));
    CHECK_THROWS(overall_htc_cylinder(8.0, 0.012, 0.0, 2.25));
}

TEST_CASE("mixture properties reproduce the default fill") {
    Formulation f;
    const auto p = mixture_properties(f, 0.024);
    CHECK(p.m_s == doctest::Approx(1.53e-4).epsilon(0.01));
    CHECK(p.m_w0 == doctest::Approx(2.9e-3).epsilon(0.01));
    CHECK(p.rho_f == doctest::Approx(937.0).epsilon(0.01));
    CHECK(p.H == doctest::Approx(7.2e-3).epsilon(0.01));

    Formulation pure = f;
    pure.x_s = 0.0;
    const auto q = mixture_properties(pure, 0.024);
    CHECK(q.rho_l == pure.rho_w);
    CHECK(q.m_s == 0.0);

    // Side area is affine in the masses with positive slopes.
    const double a0 = product_side_area(p.m_s, 1e-3, 1e-3, f, 0.024);
    const double a1 = product_side_area(p.m_s, 2e-3, 1e-3, f, 0.024);
    const double a2 = product_side_area(p.m_s, 3e-3, 1e-3, f, 0.024);
    CHECK(a1 > a0);
    CHECK((a2 - a1) == doctest::Approx(a1 - a0).epsilon(1e-12));
}

TEST_CASE("geometry and radiation validation") {
    CHECK(make_geometry(0.024, 7.2e-3).A_z == doctest::Approx(std::numbers::pi * 0.024 * 0.024 / 4));
    RadiationSpec r;
    r.F_s1 = 0.9;
    CHECK_THROWS(r.validate());
    Formulation f;
    f.x_s = 1.0;
    CHECK_THROWS(f.validate());
}

TEST_CASE("piecewise-linear schedules") {
    Schedule c = 270.0;
    CHECK(c(-5.0) == 270.0);
    CHECK(c(1e9) == 270.0);
    const Schedule r = Schedule::ramp(0.0, 228.15, 258.15, 0.25 / 60.0);
    CHECK(r(0.0) == 228.15);
    CHECK(r(60.0) == doctest::Approx(228.40));
    CHECK(r(1e6) == 258.15);
    CHECK(r.points().back().first == doctest::Approx(7200.0));
    CHECK_THROWS(Schedule({{0.0, 1.0}, {0.0, 2.0}}));
}
