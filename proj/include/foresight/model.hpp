#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/grid.hpp"
#include "foresight/rng.hpp"

namespace foresight {

// Sampled price trajectory. Values are strictly positive and aligned with the
// grid points.
class Path {
public:
    Path(TimeGrid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw structural_error("path has " + std::to_string(values_.size()) + " values for " +
                                   std::to_string(grid_.size()) + " grid points");
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!(values_[i] > 0.0))
                throw path_validity_error("path value " + std::to_string(values_[i]) + " at t=" +
                                          std::to_string(grid_[i]) +
                                          " is not positive; use an absorbing or reflecting boundary");
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    double front() const noexcept { return values_.front(); }
    double back() const noexcept { return values_.back(); }
    double sup() const noexcept { return *std::max_element(values_.begin(), values_.end()); }
    double inf() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

    // Value at an exact grid time.
    double at(double t) const { return values_[grid_.index_of(t)]; }

    friend bool operator==(const Path&, const Path&) = default;

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Model specifications

struct NoBoundary {
    friend bool operator==(const NoBoundary&, const NoBoundary&) = default;
};
// Freeze at `level` on the first step that reaches or crosses it.
struct Absorb {
    double level = 0.01;
    friend bool operator==(const Absorb&, const Absorb&) = default;
};
// Fold about `level`: x -> level + |x - level| after every increment.
struct Reflect {
    double level = 0.01;
    friend bool operator==(const Reflect&, const Reflect&) = default;
};
using Boundary = std::variant<NoBoundary, Absorb, Reflect>;

struct BrownianMotion {
    double s0 = 1.0;
    double sigma = 1.0;
    Boundary boundary = Absorb{0.01};
    friend bool operator==(const BrownianMotion&, const BrownianMotion&) = default;
};

// Driftless geometric Brownian motion.
struct GeometricBM {
    double s0 = 1.0;
    double sigma = 1.0;
    friend bool operator==(const GeometricBM&, const GeometricBM&) = default;
};

// S_t = s0 + slope * t
struct LinearFV {
    double s0 = 1.0;
    double slope = 1.0;
    friend bool operator==(const LinearFV&, const LinearFV&) = default;
};

// S_t = s0 + amplitude * sin(2 pi frequency t)
struct SinusoidFV {
    double s0 = 1.0;
    double amplitude = 0.5;
    double frequency = 1.0;
    friend bool operator==(const SinusoidFV&, const SinusoidFV&) = default;
};

// Cumulative sum of uniform non-negative steps, normalised so the path rises
// from s0 to s0 + step_scale over [0, T].
struct MonotoneRandomFV {
    double s0 = 1.0;
    double step_scale = 0.5;
    friend bool operator==(const MonotoneRandomFV&, const MonotoneRandomFV&) = default;
};

using ModelSpec = std::variant<BrownianMotion, GeometricBM, LinearFV, SinusoidFV, MonotoneRandomFV>;

inline bool is_finite_variation(const ModelSpec& spec) noexcept {
    return std::holds_alternative<LinearFV>(spec) || std::holds_alternative<SinusoidFV>(spec) ||
           std::holds_alternative<MonotoneRandomFV>(spec);
}

namespace detail {

inline void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw parameter_error(std::string(field) + " must be a positive finite number", field);
}

inline void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) throw parameter_error(std::string(field) + " must be finite", field);
}

} // namespace detail

inline void validate(const ModelSpec& spec) {
    std::visit(
        [](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            detail::require_positive(m.s0, "model.s0");
            if constexpr (std::is_same_v<M, BrownianMotion>) {
                detail::require_positive(m.sigma, "model.sigma");
                std::visit(
                    [&](const auto& b) {
                        using B = std::decay_t<decltype(b)>;
                        if constexpr (!std::is_same_v<B, NoBoundary>) {
                            if (!(b.level > 0.0 && b.level < m.s0))
                                throw parameter_error("boundary level must lie strictly between 0 and model.s0",
                                                      "model.boundary_level");
                        }
                    },
                    m.boundary);
            } else if constexpr (std::is_same_v<M, GeometricBM>) {
                detail::require_positive(m.sigma, "model.sigma");
            } else if constexpr (std::is_same_v<M, LinearFV>) {
                detail::require_finite(m.slope, "model.slope");
            } else if constexpr (std::is_same_v<M, SinusoidFV>) {
                detail::require_positive(m.amplitude, "model.amplitude");
                detail::require_positive(m.frequency, "model.frequency");
                if (!(m.amplitude < m.s0))
                    throw parameter_error("sinusoid amplitude must be below model.s0", "model.amplitude");
            } else {
                detail::require_positive(m.step_scale, "model.step_scale");
            }
        },
        spec);
}

// ---------------------------------------------------------------------------
// Simulation

namespace detail {

inline std::vector<double> brownian_values(const BrownianMotion& m, const TimeGrid& grid, StreamRng& rng) {
    std::vector<double> v(grid.size());
    v[0] = m.s0;
    bool frozen = false;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (frozen) {
            v[i] = v[i - 1];
            continue;
        }
        const double dt = grid[i] - grid[i - 1];
        double x = v[i - 1] + m.sigma * std::sqrt(dt) * rng.gaussian();
        if (const auto* a = std::get_if<Absorb>(&m.boundary)) {
            if (x <= a->level) {
                x = a->level;
                frozen = true;
            }
        } else if (const auto* r = std::get_if<Reflect>(&m.boundary)) {
            x = r->level + std::abs(x - r->level);
        }
        v[i] = x;
    }
    return v;
}

inline std::vector<double> gbm_values(const GeometricBM& m, const TimeGrid& grid, StreamRng& rng) {
    std::vector<double> v(grid.size());
    v[0] = m.s0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dt = grid[i] - grid[i - 1];
        v[i] = v[i - 1] * std::exp(-0.5 * m.sigma * m.sigma * dt + m.sigma * std::sqrt(dt) * rng.gaussian());
    }
    return v;
}

inline std::vector<double> monotone_values(const MonotoneRandomFV& m, const TimeGrid& grid, StreamRng& rng) {
    std::vector<double> cum(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) cum[i] = cum[i - 1] + rng.uniform() * (grid[i] - grid[i - 1]);
    const double total = cum.back();
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = m.s0 + m.step_scale * (cum[i] / total);
    return v;
}

} // namespace detail

inline Path simulate(const ModelSpec& spec, const TimeGrid& grid, SeedSpec seed) {
    validate(spec);
    StreamRng rng(seed);
    std::vector<double> values = std::visit(
        [&](const auto& m) -> std::vector<double> {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, BrownianMotion>) {
                return detail::brownian_values(m, grid, rng);
            } else if constexpr (std::is_same_v<M, GeometricBM>) {
                return detail::gbm_values(m, grid, rng);
            } else if constexpr (std::is_same_v<M, LinearFV>) {
                std::vector<double> v(grid.size());
                for (std::size_t i = 0; i < grid.size(); ++i) v[i] = m.s0 + m.slope * grid[i];
                return v;
            } else if constexpr (std::is_same_v<M, SinusoidFV>) {
                std::vector<double> v(grid.size());
                for (std::size_t i = 0; i < grid.size(); ++i)
                    v[i] = m.s0 + m.amplitude * std::sin(2.0 * std::numbers::pi * m.frequency * grid[i]);
                return v;
            } else {
                return detail::monotone_values(m, grid, rng);
            }
        },
        spec);
    return Path(grid, std::move(values));
}

inline Path rescale(const Path& path, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw parameter_error("rescale factor must be positive", "construction.prescale");
    std::vector<double> v = path.values();
    for (double& x : v) x *= lambda;
    return Path(path.grid(), std::move(v));
}

} // namespace foresight
