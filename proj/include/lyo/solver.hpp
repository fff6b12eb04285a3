#pragma once

// Adaptive time integration shared by every stage model.
//
// The default method is the five-stage, L-stable, stiffly accurate SDIRK of
// order 4 (embedded order 3) from Hairer & Wanner, with simplified Newton
// iterations on a finite-difference Jacobian. Columns of the Jacobian are
// grouped by a greedy colouring of the caller-supplied sparsity pattern, so a
// tridiagonal method-of-lines system costs a handful of RHS calls per
// Jacobian. Dense output is cubic Hermite on each accepted step and is used
// for event location.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lyo {

using RhsFunction =
    std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeSystem {
    std::size_t size = 0;
    RhsFunction rhs;
    // pattern[col] lists the rows of df/dy with a (possible) nonzero in that
    // column. Empty means dense.
    std::vector<std::vector<std::size_t>> pattern;
};

enum class Method { Sdirk4, DormandPrince5 };

struct IntegratorConfig {
    double rtol = 1e-6;
    double atol = 1e-9;
    std::vector<double> atol_per_component;  // overrides atol when non-empty
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  // 0 selects automatically
    Method method = Method::Sdirk4;
    double event_tol = 1e-3;  // s
    std::size_t max_steps = 2'000'000;

    void validate() const;
};

enum class Direction { Rising, Falling, Any };

struct EventSpec {
    std::string name;
    std::function<double(double t, std::span<const double> y)> fn;
    Direction direction = Direction::Any;
    bool terminal = true;
};

struct EventRecord {
    std::string name;
    double t;
    std::vector<double> y;
};

// Cubic Hermite interpolant over one accepted step.
struct DenseSegment {
    double t0, t1;
    std::span<const double> y0, y1, f0, f1;

    void eval(double t, std::span<double> out) const;
    std::vector<double> eval(double t) const;
    std::vector<double> derivative(double t) const;
};

struct SolverStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t rhs_calls = 0;
    std::size_t jacobians = 0;
    std::size_t factorizations = 0;
};

struct Solution {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
    std::vector<std::vector<double>> dydt;  // derivative at each sample (Hermite data)
    std::vector<EventRecord> events;
    bool terminated = false;  // a terminal event stopped integration
    SolverStats stats;

    std::size_t size() const { return t.size(); }
    const std::vector<double>& back() const { return y.back(); }
    DenseSegment segment(std::size_t i) const;  // step [t[i], t[i+1]]
    // Dense interpolation anywhere in [t.front(), t.back()].
    std::vector<double> at(double time) const;
};

// Integrates y' = f(t, y) from t_span.first toward t_span.second. Stops early
// at the first terminal event. Throws SolverError on step-size underflow,
// Newton failure at the minimum step, or exceeding max_steps.
Solution integrate_adaptive(const OdeSystem& system, std::span<const double> y0,
                            std::pair<double, double> t_span, const IntegratorConfig& config,
                            const std::vector<EventSpec>& events = {});

// Refines the crossing of e.fn inside a dense segment to within tol seconds.
// A zero at either end is returned as is. Throws if there is no sign change.
double locate_event(const DenseSegment& seg, const EventSpec& e, double tol);

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double t, std::vector<double> y)
        : std::runtime_error(what), t_(t), y_(std::move(y)) {}
    double t() const noexcept { return t_; }
    const std::vector<double>& state() const noexcept { return y_; }

private:
    double t_;
    std::vector<double> y_;
};

// Column groups such that no two columns in a group share a row.
std::vector<std::vector<std::size_t>> color_columns(
    std::size_t n, const std::vector<std::vector<std::size_t>>& pattern);

}  // namespace lyo
