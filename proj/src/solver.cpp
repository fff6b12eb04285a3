#include "lyo/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lyo {

void IntegratorConfig::validate() const {
    if (!(rtol > 0.0)) throw std::invalid_argument("IntegratorConfig: rtol must be positive");
    if (!(atol > 0.0)) throw std::invalid_argument("IntegratorConfig: atol must be positive");
    for (double a : atol_per_component) {
        if (!(a > 0.0)) throw std::invalid_argument("IntegratorConfig: atol must be positive");
    }
    if (!(max_step > 0.0)) throw std::invalid_argument("IntegratorConfig: max_step must be positive");
    if (initial_step < 0.0) throw std::invalid_argument("IntegratorConfig: initial_step must be >= 0");
    if (!(event_tol > 0.0)) throw std::invalid_argument("IntegratorConfig: event_tol must be positive");
}

// -------------------------------------------------------------
// Dense output
// -------------------------------------------------------------

void DenseSegment::eval(double t, std::span<double> out) const {
    const double h = t1 - t0;
    if (h == 0.0) {
        std::copy(y1.begin(), y1.end(), out.begin());
        return;
    }
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
}

std::vector<double> DenseSegment::derivative(double t) const {
    std::vector<double> out(y0.size());
    const double h = t1 - t0;
    if (h == 0.0) {
        std::copy(f1.begin(), f1.end(), out.begin());
        return out;
    }
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double d00 = (6 * s2 - 6 * s) / h;
    const double d10 = 3 * s2 - 4 * s + 1;
    const double d01 = (-6 * s2 + 6 * s) / h;
    const double d11 = 3 * s2 - 2 * s;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = d00 * y0[i] + d10 * f0[i] + d01 * y1[i] + d11 * f1[i];
    }
    return out;
}

std::vector<double> DenseSegment::eval(double t) const {
    std::vector<double> out(y0.size());
    eval(t, out);
    return out;
}

DenseSegment Solution::segment(std::size_t i) const {
    return DenseSegment{t[i], t[i + 1], y[i], y[i + 1], dydt[i], dydt[i + 1]};
}

std::vector<double> Solution::at(double time) const {
    if (t.empty()) throw std::logic_error("Solution::at on empty solution");
    if (time <= t.front()) return y.front();
    if (time >= t.back()) return y.back();
    auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    return segment(i).eval(time);
}

// -------------------------------------------------------------
// Event location
// -------------------------------------------------------------

namespace {

bool crosses(double ga, double gb, Direction dir) {
    switch (dir) {
        case Direction::Rising: return ga < 0.0 && gb >= 0.0;
        case Direction::Falling: return ga > 0.0 && gb <= 0.0;
        case Direction::Any: return (ga < 0.0 && gb >= 0.0) || (ga > 0.0 && gb <= 0.0);
    }
    return false;
}

}  // namespace

double locate_event(const DenseSegment& seg, const EventSpec& e, double tol) {
    std::vector<double> y(seg.y0.size());
    double a = seg.t0;
    double b = seg.t1;
    double ga = e.fn(a, seg.y0);
    double gb = e.fn(b, seg.y1);
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    if ((ga < 0.0) == (gb < 0.0)) {
        throw std::invalid_argument("locate_event: no sign change across segment");
    }
    // Illinois variant of regula falsi; keeps the bracket and returns its
    // post-crossing end.
    int side = 0;
    for (int iter = 0; iter < 200 && (b - a) > tol; ++iter) {
        double c = (a * gb - b * ga) / (gb - ga);
        if (!(c > a && c < b)) c = 0.5 * (a + b);
        seg.eval(c, y);
        const double gc = e.fn(c, y);
        if (gc == 0.0) return c;
        if ((gc < 0.0) == (gb < 0.0)) {
            b = c;
            gb = gc;
            if (side == -1) ga *= 0.5;
            side = -1;
        } else {
            a = c;
            ga = gc;
            if (side == 1) gb *= 0.5;
            side = 1;
        }
    }
    return b;
}

// -------------------------------------------------------------
// Jacobian colouring
// -------------------------------------------------------------

std::vector<std::vector<std::size_t>> color_columns(
    std::size_t n, const std::vector<std::vector<std::size_t>>& pattern) {
    std::vector<std::vector<std::size_t>> groups;
    if (pattern.empty()) {
        for (std::size_t c = 0; c < n; ++c) groups.push_back({c});
        return groups;
    }
    if (pattern.size() != n) throw std::invalid_argument("color_columns: pattern size mismatch");
    std::vector<std::vector<char>> used;  // used[g][row]
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t g = 0;
        for (; g < groups.size(); ++g) {
            bool clash = false;
            for (std::size_t r : pattern[c]) {
                if (used[g][r]) {
                    clash = true;
                    break;
                }
            }
            if (!clash) break;
        }
        if (g == groups.size()) {
            groups.emplace_back();
            used.emplace_back(n, 0);
        }
        groups[g].push_back(c);
        for (std::size_t r : pattern[c]) used[g][r] = 1;
    }
    return groups;
}

namespace {

// -------------------------------------------------------------
// Shared helpers
// -------------------------------------------------------------

class Integrator {
public:
    Integrator(const OdeSystem& sys, const IntegratorConfig& cfg,
               const std::vector<EventSpec>& events)
        : sys_(sys), cfg_(cfg), events_(events), n_(sys.size), atol_(n_, cfg.atol) {
        cfg_.validate();
        if (!sys_.rhs) throw std::invalid_argument("integrate_adaptive: missing rhs");
        if (!cfg.atol_per_component.empty()) {
            if (cfg.atol_per_component.size() != n_) {
                throw std::invalid_argument("integrate_adaptive: atol vector size mismatch");
            }
            atol_ = cfg.atol_per_component;
        }
        colors_ = color_columns(n_, sys_.pattern);
    }

    Solution run(std::span<const double> y0, double t0, double tend);

private:
    void rhs(double t, std::span<const double> y, std::span<double> f) {
        ++sol_.stats.rhs_calls;
        sys_.rhs(t, y, f);
    }

    double wrms(const std::vector<double>& v, const std::vector<double>& sc) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double r = v[i] / sc[i];
            s += r * r;
        }
        return std::sqrt(s / static_cast<double>(std::max<std::size_t>(n_, 1)));
    }

    void scales(const std::vector<double>& a, const std::vector<double>& b,
                std::vector<double>& sc) const {
        for (std::size_t i = 0; i < n_; ++i) {
            sc[i] = atol_[i] + cfg_.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
        }
    }

    double initial_step(double t0, double tend, const std::vector<double>& y0,
                        const std::vector<double>& f0, int order);
    void jacobian(double t, const std::vector<double>& y, Eigen::MatrixXd& J);
    bool step_sdirk(double t, double h, const std::vector<double>& y,
                    const std::vector<double>& f0, std::vector<double>& y_new,
                    std::vector<double>& f_new, double& err, bool& slow_newton);
    void step_dopri(double t, double h, const std::vector<double>& y,
                    const std::vector<double>& f0, std::vector<double>& y_new,
                    std::vector<double>& f_new, double& err);
    // Returns true if a terminal event stopped integration.
    bool handle_events(std::vector<double>& g_prev);

    const OdeSystem& sys_;
    IntegratorConfig cfg_;
    const std::vector<EventSpec>& events_;
    std::size_t n_;
    std::vector<double> atol_;
    std::vector<std::vector<std::size_t>> colors_;
    Solution sol_;

    Eigen::MatrixXd J_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double h_lu_ = 0.0;
    bool jac_valid_ = false;
    bool jac_fresh_ = false;
    double eta_ = 1.0;
};

// Hairer & Wanner, Solving ODEs II, Table IV.6.5 (SDIRK, order 4, L-stable).
constexpr double kGamma = 0.25;
constexpr int kStages = 5;
constexpr double kC[kStages] = {0.25, 0.75, 11.0 / 20.0, 0.5, 1.0};
constexpr double kA[kStages][kStages] = {
    {0.25, 0, 0, 0, 0},
    {0.5, 0.25, 0, 0, 0},
    {17.0 / 50.0, -1.0 / 25.0, 0.25, 0, 0},
    {371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0},
    {25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25}};
constexpr double kBhat[kStages] = {59.0 / 48.0, -17.0 / 96.0, 225.0 / 32.0, -85.0 / 12.0, 0.0};

double Integrator::initial_step(double t0, double tend, const std::vector<double>& y0,
                                const std::vector<double>& f0, int order) {
    std::vector<double> sc(n_);
    scales(y0, y0, sc);
    const double d0 = wrms(y0, sc);
    const double d1 = wrms(f0, sc);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, tend - t0);
    std::vector<double> y1(n_), f1(n_);
    for (std::size_t i = 0; i < n_; ++i) y1[i] = y0[i] + h0 * f0[i];
    rhs(t0 + h0, y1, f1);
    std::vector<double> df(n_);
    for (std::size_t i = 0; i < n_; ++i) df[i] = (f1[i] - f0[i]) / h0;
    double d2 = wrms(df, sc);
    if (!std::isfinite(d2)) d2 = 1e300;
    const double dm = std::max(d1, d2);
    const double h1 =
        dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / (order + 1));
    return std::min({100.0 * h0, h1, cfg_.max_step, tend - t0});
}

void Integrator::jacobian(double t, const std::vector<double>& y, Eigen::MatrixXd& J) {
    ++sol_.stats.jacobians;
    J.setZero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    std::vector<double> f0(n_), f1(n_), yp = y, delta(n_);
    rhs(t, y, f0);
    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    for (const auto& group : colors_) {
        for (std::size_t c : group) {
            const double typ = std::max(std::abs(y[c]), atol_[c] / cfg_.rtol);
            double d = sqrt_eps * std::max(typ, 1e-300);
            // Exactly representable perturbation.
            const double tmp = y[c] + d;
            d = tmp - y[c];
            delta[c] = d;
            yp[c] = tmp;
        }
        rhs(t, yp, f1);
        for (std::size_t c : group) {
            const auto col = static_cast<Eigen::Index>(c);
            if (sys_.pattern.empty()) {
                for (std::size_t r = 0; r < n_; ++r) {
                    J(static_cast<Eigen::Index>(r), col) = (f1[r] - f0[r]) / delta[c];
                }
            } else {
                for (std::size_t r : sys_.pattern[c]) {
                    J(static_cast<Eigen::Index>(r), col) = (f1[r] - f0[r]) / delta[c];
                }
            }
            yp[c] = y[c];
        }
    }
}

bool Integrator::step_sdirk(double t, double h, const std::vector<double>& y,
                            const std::vector<double>& f0, std::vector<double>& y_new,
                            std::vector<double>& f_new, double& err, bool& slow_newton) {
    if (!jac_valid_) {
        jacobian(t, y, J_);
        jac_valid_ = true;
        jac_fresh_ = true;
        h_lu_ = 0.0;
    }
    if (h != h_lu_) {
        ++sol_.stats.factorizations;
        const auto nn = static_cast<Eigen::Index>(n_);
        lu_.compute(Eigen::MatrixXd::Identity(nn, nn) - h * kGamma * J_);
        h_lu_ = h;
    }

    std::vector<double> sc(n_);
    scales(y, y, sc);

    std::vector<std::vector<double>> k(kStages, std::vector<double>(n_));
    std::vector<double> s(n_), z(n_), F(n_), dz(n_);
    Eigen::VectorXd G(static_cast<Eigen::Index>(n_));
    const double hg = h * kGamma;
    double theta_max = 0.0;

    for (int i = 0; i < kStages; ++i) {
        for (std::size_t m = 0; m < n_; ++m) {
            double acc = 0.0;
            for (int j = 0; j < i; ++j) acc += kA[i][j] * k[j][m];
            s[m] = y[m] + h * acc;
            z[m] = s[m] + hg * (i == 0 ? f0[m] : k[i - 1][m]);
        }
        const double ti = t + kC[i] * h;
        bool converged = false;
        double norm_old = 0.0;
        double eta = std::pow(std::max(eta_, 1e-16), 0.8);
        for (int it = 0; it < 8; ++it) {
            rhs(ti, z, F);
            for (std::size_t m = 0; m < n_; ++m) {
                G(static_cast<Eigen::Index>(m)) = -(z[m] - s[m] - hg * F[m]);
            }
            Eigen::VectorXd d = lu_.solve(G);
            bool finite = true;
            for (std::size_t m = 0; m < n_; ++m) {
                dz[m] = d(static_cast<Eigen::Index>(m));
                z[m] += dz[m];
                finite = finite && std::isfinite(z[m]);
            }
            if (!finite) return false;
            const double norm = wrms(dz, sc);
            if (it > 0) {
                const double theta = norm / norm_old;
                theta_max = std::max(theta_max, theta);
                if (theta >= 0.99) return false;
                eta = theta / (1.0 - theta);
            }
            norm_old = norm;
            if (norm == 0.0 || eta * norm <= 0.03) {
                converged = true;
                break;
            }
        }
        if (!converged) return false;
        eta_ = eta;
        for (std::size_t m = 0; m < n_; ++m) k[i][m] = (z[m] - s[m]) / hg;
    }

    y_new = z;  // stiffly accurate: y_{n+1} is the last stage value
    f_new = k[kStages - 1];

    Eigen::VectorXd e(static_cast<Eigen::Index>(n_));
    for (std::size_t m = 0; m < n_; ++m) {
        double acc = 0.0;
        for (int j = 0; j < kStages; ++j) acc += (kA[kStages - 1][j] - kBhat[j]) * k[j][m];
        e(static_cast<Eigen::Index>(m)) = h * acc;
    }
    const Eigen::VectorXd ef = lu_.solve(e);
    std::vector<double> ev(n_);
    for (std::size_t m = 0; m < n_; ++m) ev[m] = ef(static_cast<Eigen::Index>(m));
    scales(y, y_new, sc);
    err = wrms(ev, sc);
    slow_newton = theta_max > 0.3;
    return std::isfinite(err);
}

// Dormand-Prince 5(4), FSAL.
void Integrator::step_dopri(double t, double h, const std::vector<double>& y,
                            const std::vector<double>& f0, std::vector<double>& y_new,
                            std::vector<double>& f_new, double& err) {
    static constexpr double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
    static constexpr double a[7][6] = {
        {0, 0, 0, 0, 0, 0},
        {1.0 / 5, 0, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static constexpr double e[7] = {71.0 / 57600,      0, -71.0 / 16695, 71.0 / 1920,
                                    -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
    std::vector<std::vector<double>> k(7, std::vector<double>(n_));
    k[0] = f0;
    std::vector<double> tmp(n_);
    for (int i = 1; i < 7; ++i) {
        for (std::size_t m = 0; m < n_; ++m) {
            double acc = 0.0;
            for (int j = 0; j < i; ++j) acc += a[i][j] * k[j][m];
            tmp[m] = y[m] + h * acc;
        }
        rhs(t + c[i] * h, tmp, k[i]);
    }
    y_new = tmp;
    f_new = k[6];
    std::vector<double> ev(n_), sc(n_);
    for (std::size_t m = 0; m < n_; ++m) {
        double acc = 0.0;
        for (int j = 0; j < 7; ++j) acc += e[j] * k[j][m];
        ev[m] = h * acc;
    }
    scales(y, y_new, sc);
    err = wrms(ev, sc);
}

bool Integrator::handle_events(std::vector<double>& g_prev) {
    if (events_.empty()) return false;
    const std::size_t last = sol_.t.size() - 1;
    const DenseSegment seg = sol_.segment(last - 1);

    struct Hit {
        std::size_t idx;
        double t;
    };
    std::vector<Hit> hits;
    std::vector<double> g_new(events_.size());
    for (std::size_t e = 0; e < events_.size(); ++e) {
        g_new[e] = events_[e].fn(seg.t1, seg.y1);
        if (g_prev[e] != 0.0 && crosses(g_prev[e], g_new[e], events_[e].direction)) {
            hits.push_back({e, locate_event(seg, events_[e], cfg_.event_tol)});
        }
    }
    g_prev = g_new;
    if (hits.empty()) return false;
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.t < b.t; });

    for (const Hit& hit : hits) {
        std::vector<double> y_ev = hit.t == seg.t1 ? sol_.y[last] : seg.eval(hit.t);
        sol_.events.push_back({events_[hit.idx].name, hit.t, y_ev});
        if (events_[hit.idx].terminal) {
            if (hit.t < sol_.t[last]) {
                // Hermite data of the same cubic, so the shortened step is an
                // exact restriction of the accepted one.
                std::vector<double> f = seg.derivative(hit.t);
                sol_.t[last] = hit.t;
                sol_.y[last] = std::move(y_ev);
                sol_.dydt[last] = std::move(f);
            }
            sol_.terminated = true;
            return true;
        }
    }
    return false;
}

Solution Integrator::run(std::span<const double> y0_span, double t0, double tend) {
    if (y0_span.size() != n_) throw std::invalid_argument("integrate_adaptive: y0 size mismatch");
    if (!(tend > t0)) throw std::invalid_argument("integrate_adaptive: empty time span");

    std::vector<double> y(y0_span.begin(), y0_span.end());
    std::vector<double> f(n_);
    rhs(t0, y, f);
    for (double v : f) {
        if (!std::isfinite(v)) throw SolverError("integrate_adaptive: rhs not finite at y0", t0, y);
    }
    sol_.t.push_back(t0);
    sol_.y.push_back(y);
    sol_.dydt.push_back(f);

    std::vector<double> g_prev(events_.size());
    for (std::size_t e = 0; e < events_.size(); ++e) g_prev[e] = events_[e].fn(t0, y);

    const bool implicit = cfg_.method == Method::Sdirk4;
    const int order = implicit ? 3 : 4;  // embedded order drives step control
    double h = cfg_.initial_step > 0.0 ? std::min(cfg_.initial_step, tend - t0)
                                       : initial_step(t0, tend, y, f, order);
    double t = t0;
    bool last_rejected = false;
    std::vector<double> y_new(n_), f_new(n_);

    while (t < tend) {
        if (sol_.stats.steps + sol_.stats.rejected >= cfg_.max_steps) {
            throw SolverError("integrate_adaptive: maximum number of steps exceeded", t, y);
        }
        h = std::min(h, cfg_.max_step);
        if (t + h >= tend || t + 1.01 * h >= tend) h = tend - t;
        const double h_min = 1e-14 * std::max(std::abs(t), 1.0);
        if (h < h_min) throw SolverError("integrate_adaptive: step size underflow", t, y);

        double err = 0.0;
        bool slow = false;
        if (implicit) {
            const bool ok = step_sdirk(t, h, y, f, y_new, f_new, err, slow);
            if (!ok) {
                ++sol_.stats.rejected;
                if (!jac_fresh_) {
                    jac_valid_ = false;
                } else {
                    h *= 0.25;
                }
                last_rejected = true;
                continue;
            }
        } else {
            step_dopri(t, h, y, f, y_new, f_new, err);
            if (!std::isfinite(err)) err = 1e10;
        }

        const double p1 = 1.0 / (order + 1);
        if (err <= 1.0) {
            ++sol_.stats.steps;
            t = (h == tend - t) ? tend : t + h;
            y = y_new;
            f = f_new;
            sol_.t.push_back(t);
            sol_.y.push_back(y);
            sol_.dydt.push_back(f);
            if (handle_events(g_prev)) return std::move(sol_);

            jac_fresh_ = false;
            if (slow) jac_valid_ = false;
            double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -p1);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            if (!(implicit && fac >= 1.0 && fac <= 1.2)) h *= fac;
            last_rejected = false;
        } else {
            ++sol_.stats.rejected;
            h *= std::clamp(0.9 * std::pow(err, -p1), 0.1, 0.5);
            last_rejected = true;
        }
    }
    return std::move(sol_);
}

}  // namespace

Solution integrate_adaptive(const OdeSystem& system, std::span<const double> y0,
                            std::pair<double, double> t_span, const IntegratorConfig& config,
                            const std::vector<EventSpec>& events) {
    Integrator integrator(system, config, events);
    return integrator.run(y0, t_span.first, t_span.second);
}

}  // namespace lyo
