#pragma once

#include <vector>

namespace lyo {

// Piecewise-linear (t, value) table, held constant outside its range.
class Schedule {
public:
    Schedule() = default;
    Schedule(double constant);  // NOLINT: a bare number is a constant schedule
    explicit Schedule(std::vector<std::pair<double, double>> points);

    // Linear ramp from v0 at t0 at the given rate (units per second) until
    // reaching v1, then held.
    static Schedule ramp(double t0, double v0, double v1, double rate_per_s);

    double operator()(double t) const;

    // Same table with every time moved later by dt.
    Schedule shifted(double dt) const;

    const std::vector<std::pair<double, double>>& points() const { return points_; }
    bool is_constant() const { return points_.size() == 1; }

private:
    std::vector<std::pair<double, double>> points_{{0.0, 0.0}};
};

}  // namespace lyo
