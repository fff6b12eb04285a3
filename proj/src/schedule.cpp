#include "lyo/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lyo {

Schedule::Schedule(double constant) : points_{{0.0, constant}} {}

Schedule::Schedule(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("Schedule: needs at least one point");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i].first > points_[i - 1].first)) {
            throw std::invalid_argument("Schedule: times must be strictly increasing");
        }
    }
}

Schedule Schedule::ramp(double t0, double v0, double v1, double rate_per_s) {
    if (!(rate_per_s > 0.0)) throw std::invalid_argument("Schedule::ramp: rate must be positive");
    if (v0 == v1) return Schedule(v0);
    return Schedule({{t0, v0}, {t0 + std::abs(v1 - v0) / rate_per_s, v1}});
}

double Schedule::operator()(double t) const {
    if (t <= points_.front().first) return points_.front().second;
    if (t >= points_.back().first) return points_.back().second;
    auto hi = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double x, const auto& p) { return x < p.first; });
    auto lo = hi - 1;
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

Schedule Schedule::shifted(double dt) const {
    Schedule out = *this;
    for (auto& p : out.points_) p.first += dt;
    return out;
}

}  // namespace lyo
