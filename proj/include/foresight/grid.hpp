#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "foresight/error.hpp"

namespace foresight {

// Finite time grid 0 = t_0 < t_1 < ... < t_M = T.
class TimeGrid {
public:
    static TimeGrid uniform(double horizon, std::size_t steps) {
        if (!(horizon > 0.0)) throw parameter_error("grid horizon T must be positive", "grid.T");
        if (steps == 0) throw parameter_error("grid step count M must be positive", "grid.M");
        std::vector<double> pts(steps + 1);
        for (std::size_t i = 0; i <= steps; ++i)
            pts[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
        pts.back() = horizon;
        return TimeGrid(std::move(pts));
    }

    explicit TimeGrid(std::vector<double> points) : points_(std::move(points)) {
        if (points_.size() < 2) throw parameter_error("grid needs at least two points", "grid.M");
        if (points_.front() != 0.0) throw parameter_error("grid must start at 0", "grid.T");
        for (std::size_t i = 1; i < points_.size(); ++i)
            if (!(points_[i] > points_[i - 1]))
                throw parameter_error("grid points must be strictly increasing", "grid.T");
    }

    double horizon() const noexcept { return points_.back(); }
    std::size_t steps() const noexcept { return points_.size() - 1; }
    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const noexcept { return points_[i]; }
    const std::vector<double>& points() const noexcept { return points_; }

    bool contains(double t) const noexcept { return t >= 0.0 && t <= horizon(); }

    // Index of an exact grid point; no rounding to a neighbour.
    std::size_t index_of(double t) const {
        auto it = std::lower_bound(points_.begin(), points_.end(), t);
        if (it == points_.end() || *it != t)
            throw structural_error("time " + std::to_string(t) + " is not a grid point");
        return static_cast<std::size_t>(it - points_.begin());
    }

    // Largest index i with t_i <= t.
    std::size_t floor_index(double t) const {
        if (!contains(t)) throw parameter_error("time outside [0, T]");
        auto it = std::upper_bound(points_.begin(), points_.end(), t);
        return static_cast<std::size_t>(it - points_.begin()) - 1;
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    std::vector<double> points_;
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
    if (!(a == b)) throw structural_error(std::string(what) + ": inputs live on different grids");
}

} // namespace foresight
