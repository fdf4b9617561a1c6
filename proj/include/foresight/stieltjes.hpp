#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <utility>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/grid.hpp"
#include "foresight/model.hpp"

namespace foresight {

// Left-continuous (caglad) step function with finitely many jumps.
//
// With knots b_0 < b_1 < ... < b_K the function equals values[i] on
// (b_i, b_{i+1}] and 0 on [0, b_0] and (b_K, T]. The jump located at b_i,
// values[i] - values[i-1], takes effect immediately after b_i.
class StepFunction {
public:
    StepFunction() = default;

    StepFunction(std::vector<double> knots, std::vector<double> values)
        : knots_(std::move(knots)), values_(std::move(values)) {
        if (knots_.empty() && values_.empty()) return;
        if (knots_.size() != values_.size() + 1)
            throw structural_error("step function needs exactly one more knot than values");
        for (std::size_t i = 1; i < knots_.size(); ++i)
            if (!(knots_[i] > knots_[i - 1])) throw structural_error("step function knots must be increasing");
        if (knots_.front() < 0.0) throw structural_error("step function knots must be non-negative");
    }

    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<double>& values() const noexcept { return values_; }
    bool empty() const noexcept { return values_.empty(); }

    double operator()(double t) const noexcept {
        if (values_.empty() || t <= knots_.front() || t > knots_.back()) return 0.0;
        // first knot >= t closes the interval containing t
        auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
        return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
    }

    // Jump at knot i: value just after b_i minus value at b_i.
    double jump(std::size_t i) const noexcept {
        const double after = i < values_.size() ? values_[i] : 0.0;
        const double before = i > 0 ? values_[i - 1] : 0.0;
        return after - before;
    }

    double total_variation() const noexcept {
        double tv = 0.0;
        for (std::size_t i = 0; i < knots_.size(); ++i) tv += std::abs(jump(i));
        return tv;
    }

    double min_value() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::min(m, v);
        return m;
    }

    double max_abs_value() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    bool positive_somewhere() const noexcept {
        return std::any_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
    }

private:
    std::vector<double> knots_;
    std::vector<double> values_;
};

// a*f + b*g on the union of both knot sets.
inline StepFunction linear_combination(double a, const StepFunction& f, double b, const StepFunction& g) {
    std::vector<double> knots;
    std::merge(f.knots().begin(), f.knots().end(), g.knots().begin(), g.knots().end(), std::back_inserter(knots));
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    if (knots.empty()) return {};
    std::vector<double> values(knots.size() - 1);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double t = knots[i + 1]; // right endpoint carries the interval's value
        values[i] = a * f(t) + b * g(t);
    }
    return StepFunction(std::move(knots), std::move(values));
}

namespace detail {

inline std::vector<std::size_t> knot_indices(const StepFunction& phi, const TimeGrid& grid) {
    std::vector<std::size_t> idx;
    idx.reserve(phi.knots().size());
    for (double b : phi.knots()) idx.push_back(grid.index_of(b));
    return idx;
}

// Closed-form integral up to grid index k: completed pieces summed in time
// order, then the open piece. Shared by the pointwise and series routes so
// both give identical bits.
class StepIntegrator {
public:
    StepIntegrator(const StepFunction& phi, const Path& path)
        : phi_(phi), path_(path), idx_(knot_indices(phi, path.grid())) {}

    double at(std::size_t k) const {
        double done = 0.0;
        const auto& v = phi_.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::size_t a = idx_[i], b = idx_[i + 1];
            if (b <= k) {
                done += v[i] * (path_[b] - path_[a]);
            } else {
                if (a < k) return done + v[i] * (path_[k] - path_[a]);
                break;
            }
        }
        return done;
    }

    std::vector<double> series() const {
        const std::size_t n = path_.size();
        std::vector<double> out(n, 0.0);
        const auto& v = phi_.values();
        double done = 0.0;
        std::size_t piece = 0;
        for (std::size_t k = 0; k < n; ++k) {
            while (piece < v.size() && idx_[piece + 1] <= k) {
                done += v[piece] * (path_[idx_[piece + 1]] - path_[idx_[piece]]);
                ++piece;
            }
            if (piece < v.size() && idx_[piece] < k)
                out[k] = done + v[piece] * (path_[k] - path_[idx_[piece]]);
            else
                out[k] = done;
        }
        return out;
    }

private:
    const StepFunction& phi_;
    const Path& path_;
    std::vector<std::size_t> idx_;
};

} // namespace detail

// Pathwise integral of a step integrand, int_0^t phi dS, by telescoping.
// Knots and t must be grid points; nothing is interpolated.
inline double rs_integral_step(const StepFunction& phi, const Path& path, double t) {
    if (!path.grid().contains(t)) throw parameter_error("integration time outside [0, T]");
    const std::size_t k = path.grid().index_of(t);
    return detail::StepIntegrator(phi, path).at(k);
}

// rs_integral_step evaluated at every grid point.
inline std::vector<double> rs_integral_series(const StepFunction& phi, const Path& path) {
    return detail::StepIntegrator(phi, path).series();
}

// int_0^t S dphi = sum over knots b < t of S_b * jump(b).
inline double integral_path_wrt_step(const Path& path, const StepFunction& phi, double t) {
    if (!path.grid().contains(t)) throw parameter_error("integration time outside [0, T]");
    const std::size_t k = path.grid().index_of(t);
    const auto idx = detail::knot_indices(phi, path.grid());
    double acc = 0.0;
    for (std::size_t i = 0; i < idx.size() && idx[i] < k; ++i) acc += path[idx[i]] * phi.jump(i);
    return acc;
}

// integral_path_wrt_step at every grid point.
inline std::vector<double> integral_path_wrt_step_series(const Path& path, const StepFunction& phi) {
    const auto idx = detail::knot_indices(phi, path.grid());
    std::vector<double> out(path.size(), 0.0);
    double acc = 0.0;
    std::size_t i = 0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        for (; i < idx.size() && idx[i] < k; ++i) acc += path[idx[i]] * phi.jump(i);
        out[k] = acc;
    }
    return out;
}

// int phi dS - (phi_t S_t - phi_0 S_0 - int S dphi); zero up to rounding.
inline double integration_by_parts_residual(const StepFunction& phi, const Path& path, double t) {
    const double lhs = rs_integral_step(phi, path, t);
    const double boundary = phi(t) * path.at(t) - phi(0.0) * path.front();
    return lhs - (boundary - integral_path_wrt_step(path, phi, t));
}

// ---------------------------------------------------------------------------
// Riemann-sum refinement

struct RiemannOptions {
    bool include_jumps = true;  // add every knot to every partition
    std::size_t finest_stride = 1; // grid stride of the finest partition
};

struct RefinementReport {
    std::vector<std::size_t> partition_sizes; // number of subintervals per level
    std::vector<double> estimates;
    std::vector<double> deviations;
    double closed_form = 0.0;
    double max_deviation = 0.0;
};

// Riemann sums sum_i phi(tau_i) (S(tau_i) - S(tau_{i-1})) over nested uniform
// sub-grids, coarsest first. The integrand is sampled at the point closing
// each increment, which for a caglad integrand is the value carried on
// (tau_{i-1}, tau_i]; partitions containing every knot are therefore exact.
inline RefinementReport rs_integral_riemann(const StepFunction& phi, const Path& path, std::size_t levels,
                                            RiemannOptions opts = {}) {
    if (levels < 2) throw parameter_error("refinement needs at least two levels");
    if (opts.finest_stride == 0) throw parameter_error("finest stride must be positive");
    const TimeGrid& grid = path.grid();
    const std::size_t last = grid.size() - 1;
    const auto knots = detail::knot_indices(phi, grid);

    RefinementReport rep;
    rep.closed_form = rs_integral_step(phi, path, grid.horizon());
    for (std::size_t level = 0; level < levels; ++level) {
        const std::size_t stride = opts.finest_stride << (levels - 1 - level);
        std::vector<std::size_t> pts;
        for (std::size_t i = 0; i < last; i += stride) pts.push_back(i);
        pts.push_back(last);
        if (opts.include_jumps) {
            pts.insert(pts.end(), knots.begin(), knots.end());
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        }
        double sum = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            sum += phi(grid[pts[i]]) * (path[pts[i]] - path[pts[i - 1]]);
        rep.partition_sizes.push_back(pts.size() - 1);
        rep.estimates.push_back(sum);
        const double dev = std::abs(sum - rep.closed_form);
        rep.deviations.push_back(dev);
        rep.max_deviation = std::max(rep.max_deviation, dev);
    }
    return rep;
}

// Largest |S_u - S_v| over grid points with |u - v| <= width.
inline double modulus_of_continuity(const Path& path, std::size_t width) {
    double m = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i)
        for (std::size_t j = i + 1; j < path.size() && j <= i + width; ++j) m = std::max(m, std::abs(path[j] - path[i]));
    return m;
}

} // namespace foresight
