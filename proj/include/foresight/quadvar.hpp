#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/grid.hpp"
#include "foresight/model.hpp"

namespace foresight {

// Quadratic-variation curve on a grid: non-decreasing, qv[0] = 0.
class QVCurve {
public:
    QVCurve(TimeGrid grid, std::vector<double> qv) : grid_(std::move(grid)), qv_(std::move(qv)) {
        if (qv_.size() != grid_.size()) throw structural_error("QV curve length does not match grid");
        if (qv_.front() != 0.0) throw structural_error("QV curve must start at 0");
        for (std::size_t i = 1; i < qv_.size(); ++i)
            if (qv_[i] < qv_[i - 1]) throw structural_error("QV curve must be non-decreasing");
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return qv_; }
    double operator[](std::size_t i) const noexcept { return qv_[i]; }
    std::size_t size() const noexcept { return qv_.size(); }
    double terminal() const noexcept { return qv_.back(); }

    friend bool operator==(const QVCurve&, const QVCurve&) = default;

private:
    TimeGrid grid_;
    std::vector<double> qv_;
};

inline QVCurve realized_qv(const Path& path) {
    std::vector<double> qv(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double d = path[i] - path[i - 1];
        qv[i] = qv[i - 1] + d * d;
    }
    return QVCurve(path.grid(), std::move(qv));
}

// Model-exact QV along a simulated path. Brownian motion: sigma^2 t, frozen
// from the absorption index on. GBM: left-point quadrature of sigma^2 S^2 dt.
// Finite-variation kinds: identically zero.
inline QVCurve analytic_qv(const ModelSpec& spec, const TimeGrid& grid, const Path& path) {
    require_same_grid(grid, path.grid(), "analytic_qv");
    std::vector<double> qv(grid.size(), 0.0);
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, BrownianMotion>) {
                const double s2 = m.sigma * m.sigma;
                std::size_t stop = grid.size();
                if (const auto* a = std::get_if<Absorb>(&m.boundary)) {
                    for (std::size_t i = 0; i < path.size(); ++i)
                        if (path[i] <= a->level) {
                            stop = i;
                            break;
                        }
                }
                for (std::size_t i = 1; i < grid.size(); ++i) qv[i] = i <= stop ? s2 * grid[i] : qv[i - 1];
            } else if constexpr (std::is_same_v<M, GeometricBM>) {
                const double s2 = m.sigma * m.sigma;
                for (std::size_t i = 1; i < grid.size(); ++i)
                    qv[i] = qv[i - 1] + s2 * path[i - 1] * path[i - 1] * (grid[i] - grid[i - 1]);
            }
        },
        spec);
    return QVCurve(grid, std::move(qv));
}

// QV of lambda * S.
inline QVCurve scale_qv(const QVCurve& qv, double lambda) {
    std::vector<double> v = qv.values();
    const double l2 = lambda * lambda;
    for (double& x : v) x *= l2;
    return QVCurve(qv.grid(), std::move(v));
}

// ---------------------------------------------------------------------------
// Stopping ladder

struct StoppingLadder {
    double c = 0.0;
    double gamma = 0.5;
    std::size_t depth = 0; // N
    double rho = 0.0;
    std::size_t rho_index = 0;
    // rho_n for n = 1..N+1, stored at [n-1].
    std::vector<double> rho_n;
    std::vector<std::size_t> rho_n_index;

    double at(std::size_t n) const { return rho_n.at(n - 1); }
    std::size_t index_at(std::size_t n) const { return rho_n_index.at(n - 1); }
};

inline void validate_ladder_params(double c, double gamma, std::size_t depth) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw parameter_error("gamma must lie in (0,1)", "construction.gamma");
    if (!(c > 0.0) || !std::isfinite(c)) throw parameter_error("c must be positive", "construction.c");
    if (depth < 1) throw parameter_error("truncation depth N must be at least 1", "construction.N");
}

// rho_n = first grid time with qv >= c n^-gamma (T if never reached).
// rho is the infimum of {t : qv_t > 0}: the left end of the first grid step
// carrying positive QV, or T when the curve is identically zero.
inline StoppingLadder stopping_ladder(const QVCurve& qv, double c, double gamma, std::size_t depth) {
    validate_ladder_params(c, gamma, depth);
    const auto& v = qv.values();
    const auto& grid = qv.grid();
    const std::size_t last = grid.size() - 1;

    StoppingLadder ladder;
    ladder.c = c;
    ladder.gamma = gamma;
    ladder.depth = depth;
    ladder.rho_n.reserve(depth + 1);
    ladder.rho_n_index.reserve(depth + 1);
    for (std::size_t n = 1; n <= depth + 1; ++n) {
        const double level = c * std::pow(static_cast<double>(n), -gamma);
        auto it = std::lower_bound(v.begin(), v.end(), level);
        const std::size_t idx = it == v.end() ? last : static_cast<std::size_t>(it - v.begin());
        ladder.rho_n_index.push_back(idx);
        ladder.rho_n.push_back(grid[idx]);
    }

    auto pos = std::upper_bound(v.begin(), v.end(), 0.0);
    ladder.rho_index = pos == v.end() ? last : static_cast<std::size_t>(pos - v.begin()) - 1;
    ladder.rho = grid[ladder.rho_index];
    return ladder;
}

// Ladder for a curve with no positive QV: every time sits at T.
inline StoppingLadder degenerate_ladder(const TimeGrid& grid, double gamma, std::size_t depth) {
    StoppingLadder ladder;
    ladder.c = 0.0;
    ladder.gamma = gamma;
    ladder.depth = depth;
    const std::size_t last = grid.size() - 1;
    ladder.rho_n.assign(depth + 1, grid[last]);
    ladder.rho_n_index.assign(depth + 1, last);
    ladder.rho = grid[last];
    ladder.rho_index = last;
    return ladder;
}

} // namespace foresight
