#include <cmath>
#include <numeric>

#include "doctest.h"
#include "lyo/solver.hpp"

using namespace lyo;

namespace {

OdeSystem scalar_decay(double rate) {
    return {1, [rate](double, std::span<const double> y, std::span<double> f) { f[0] = -rate * y[0]; }, {}};
}

// y' = A y with A = V diag(-1, -1e4) V^-1, V = [[1, 1], [1, -1]].
OdeSystem stiff_pair() {
    return {2,
            [](double, std::span<const double> y, std::span<double> f) {
                const double l1 = -1.0, l2 = -1e4;
                const double a = 0.5 * (l1 + l2), b = 0.5 * (l1 - l2);
                f[0] = a * y[0] + b * y[1];
                f[1] = b * y[0] + a * y[1];
            },
            {}};
}

std::array<double, 2> stiff_pair_exact(double t, double y0, double y1) {
    // Coordinates in the eigenbasis: u = (y0 + y1)/2 on (1,1), w = (y0 - y1)/2 on (1,-1).
    const double u = 0.5 * (y0 + y1) * std::exp(-t);
    const double w = 0.5 * (y0 - y1) * std::exp(-1e4 * t);
    return {u + w, u - w};
}

}  // namespace

TEST_CASE("stiff scalar decay matches the exponential with few steps") {
    IntegratorConfig cfg;
    cfg.rtol = 1e-6;
    cfg.atol = 1e-12;
    const std::vector<double> y0{1.0};
    const auto sol = integrate_adaptive(scalar_decay(1000.0), y0, {0.0, 0.01}, cfg);
    const double exact = std::exp(-10.0);
    CHECK(std::abs(sol.back()[0] - exact) <= 10 * cfg.rtol * std::abs(exact) + 10 * cfg.atol);
    // An explicit method's stability bound h < 2.8/1000 would need many more
    // steps over a longer horizon; over [0, 10] the implicit count stays small.
    const auto longer = integrate_adaptive(scalar_decay(1000.0), y0, {0.0, 10.0}, cfg);
    CHECK(longer.stats.steps < 300);
    CHECK(std::abs(longer.back()[0]) < 1e-9);
}

TEST_CASE("zero right-hand side keeps the state exactly") {
    OdeSystem sys{3, [](double, std::span<const double>, std::span<double> f) {
                      std::fill(f.begin(), f.end(), 0.0);
                  }, {}};
    const std::vector<double> y0{1.5, -2.25, 1e-3};
    const auto sol = integrate_adaptive(sys, y0, {0.0, 100.0}, {});
    CHECK(sol.back() == y0);
    CHECK(sol.t.back() == 100.0);
}

TEST_CASE("stiff 2x2 system matches the matrix exponential") {
    for (double rtol : {1e-5, 1e-6, 1e-7}) {
        IntegratorConfig cfg;
        cfg.rtol = rtol;
        cfg.atol = 1e-12;
        const std::vector<double> y0{2.0, 0.5};
        const auto sol = integrate_adaptive(stiff_pair(), y0, {0.0, 2.0}, cfg);
        for (std::size_t i = 0; i < sol.size(); i += 7) {
            const auto ex = stiff_pair_exact(sol.t[i], y0[0], y0[1]);
            for (int c = 0; c < 2; ++c) {
                CHECK(std::abs(sol.y[i][c] - ex[c]) <= 10 * rtol * std::abs(ex[c]) + 1e-10);
            }
        }
    }
}

TEST_CASE("halving rtol does not increase the error on the closed-form problems") {
    double prev = 1e300;
    for (double rtol : {1e-4, 5e-5, 2.5e-5, 1.25e-5}) {
        IntegratorConfig cfg;
        cfg.rtol = rtol;
        cfg.atol = 1e-14;
        const std::vector<double> y0{2.0, 0.5};
        const auto sol = integrate_adaptive(stiff_pair(), y0, {0.0, 1.0}, cfg);
        const auto ex = stiff_pair_exact(1.0, 2.0, 0.5);
        const double err = std::abs(sol.back()[0] - ex[0]) + std::abs(sol.back()[1] - ex[1]);
        CHECK(err <= prev * 1.05);
        prev = err;
    }
}

TEST_CASE("explicit reference method agrees on a nonstiff problem") {
    OdeSystem osc{2, [](double, std::span<const double> y, std::span<double> f) {
                      f[0] = y[1];
                      f[1] = -y[0];
                  }, {}};
    IntegratorConfig cfg;
    cfg.rtol = 1e-8;
    cfg.atol = 1e-10;
    const std::vector<double> y0{1.0, 0.0};
    for (Method m : {Method::Sdirk4, Method::DormandPrince5}) {
        cfg.method = m;
        const auto sol = integrate_adaptive(osc, y0, {0.0, 6.0}, cfg);
        CHECK(sol.back()[0] == doctest::Approx(std::cos(6.0)).epsilon(1e-6));
        CHECK(sol.back()[1] == doctest::Approx(-std::sin(6.0)).epsilon(1e-6));
    }
}

TEST_CASE("dense output interpolates inside a step") {
    IntegratorConfig cfg;
    cfg.rtol = 1e-8;
    cfg.atol = 1e-12;
    const std::vector<double> y0{1.0};
    const auto sol = integrate_adaptive(scalar_decay(1.0), y0, {0.0, 3.0}, cfg);
    for (double t : {0.123, 1.0, 2.71}) {
        CHECK(sol.at(t)[0] == doctest::Approx(std::exp(-t)).epsilon(1e-6));
    }
}

TEST_CASE("locate_event on a linear event function") {
    EventSpec e{"lin", [](double t, std::span<const double>) { return t - 5.0; }, Direction::Any, true};
    const std::vector<double> y0{0.0}, y1{0.0}, f{0.0};
    DenseSegment seg{0.0, 10.0, y0, y1, f, f};
    const double tol = 1e-3;
    CHECK(std::abs(locate_event(seg, e, tol) - 5.0) <= tol);
}

TEST_CASE("locate_event returns a boundary zero unrefined") {
    EventSpec e{"edge", [](double t, std::span<const double>) { return t - 10.0; }, Direction::Any, true};
    const std::vector<double> y{0.0}, f{0.0};
    DenseSegment seg{0.0, 10.0, y, y, f, f};
    CHECK(locate_event(seg, e, 1e-3) == 10.0);
    DenseSegment seg2{10.0, 12.0, y, y, f, f};
    CHECK(locate_event(seg2, e, 1e-3) == 10.0);
}

TEST_CASE("locate_event rejects a segment without a sign change") {
    EventSpec e{"none", [](double t, std::span<const double>) { return t + 1.0; }, Direction::Any, true};
    const std::vector<double> y{0.0}, f{0.0};
    DenseSegment seg{0.0, 10.0, y, y, f, f};
    CHECK_THROWS_AS(locate_event(seg, e, 1e-3), std::invalid_argument);
}

TEST_CASE("terminal event truncates the solution near the true crossing") {
    // y = e^-t crosses 0.25 at t = ln 4.
    EventSpec e{"quarter", [](double, std::span<const double> y) { return y[0] - 0.25; },
                Direction::Falling, true};
    IntegratorConfig cfg;
    cfg.rtol = 1e-8;
    cfg.atol = 1e-12;
    cfg.event_tol = 1e-6;
    const std::vector<double> y0{1.0};
    const auto sol = integrate_adaptive(scalar_decay(1.0), y0, {0.0, 10.0}, cfg, {e});
    REQUIRE(sol.terminated);
    REQUIRE(sol.events.size() == 1);
    CHECK(std::abs(sol.events[0].t - std::log(4.0)) < 1e-5);
    CHECK(sol.t.back() == sol.events[0].t);
}

TEST_CASE("non-terminal events are recorded without stopping") {
    EventSpec e{"cross", [](double t, std::span<const double>) { return std::sin(t); },
                Direction::Any, false};
    const std::vector<double> y0{1.0};
    const auto sol = integrate_adaptive(scalar_decay(1.0), y0, {0.0, 10.0}, {}, {e});
    CHECK_FALSE(sol.terminated);
    REQUIRE(sol.events.size() == 3);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(sol.events[k].t - (k + 1) * M_PI) < 2e-3);
    }
}

TEST_CASE("column colouring of a tridiagonal pattern uses three groups") {
    const std::size_t n = 10;
    std::vector<std::vector<std::size_t>> pattern(n);
    for (std::size_t c = 0; c < n; ++c) {
        if (c > 0) pattern[c].push_back(c - 1);
        pattern[c].push_back(c);
        if (c + 1 < n) pattern[c].push_back(c + 1);
    }
    const auto groups = color_columns(n, pattern);
    CHECK(groups.size() == 3);
    std::size_t total = 0;
    for (const auto& g : groups) total += g.size();
    CHECK(total == n);
}

TEST_CASE("sparse and dense Jacobians give the same trajectory") {
    const std::size_t n = 20;
    auto rhs = [n](double, std::span<const double> y, std::span<double> f) {
        for (std::size_t i = 0; i < n; ++i) {
            const double l = i > 0 ? y[i - 1] : 1.0;
            const double r = i + 1 < n ? y[i + 1] : 0.0;
            f[i] = 400.0 * (l - 2 * y[i] + r) - y[i] * y[i];
        }
    };
    std::vector<std::vector<std::size_t>> pattern(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = (c > 0 ? c - 1 : 0); r <= std::min(n - 1, c + 1); ++r) pattern[c].push_back(r);
    }
    const std::vector<double> y0(n, 0.0);
    IntegratorConfig cfg;
    cfg.rtol = 1e-7;
    const auto a = integrate_adaptive({n, rhs, {}}, y0, {0.0, 1.0}, cfg);
    const auto b = integrate_adaptive({n, rhs, pattern}, y0, {0.0, 1.0}, cfg);
    for (std::size_t i = 0; i < n; ++i) CHECK(a.back()[i] == doctest::Approx(b.back()[i]).epsilon(1e-9));
    CHECK(b.stats.rhs_calls < a.stats.rhs_calls);
}

TEST_CASE("identical inputs give bit-identical output") {
    const std::vector<double> y0{2.0, 0.5};
    const auto a = integrate_adaptive(stiff_pair(), y0, {0.0, 1.0}, {});
    const auto b = integrate_adaptive(stiff_pair(), y0, {0.0, 1.0}, {});
    CHECK(a.t == b.t);
    CHECK(a.y == b.y);
}

TEST_CASE("invalid configuration and diverging problems are rejected") {
    IntegratorConfig bad;
    bad.rtol = 0.0;
    CHECK_THROWS(bad.validate());
    OdeSystem blow{1, [](double, std::span<const double> y, std::span<double> f) { f[0] = y[0] * y[0]; }, {}};
    const std::vector<double> y0{1.0};
    // Finite-time blow-up at t = 1.
    CHECK_THROWS_AS(integrate_adaptive(blow, y0, {0.0, 2.0}, {}), SolverError);
}
