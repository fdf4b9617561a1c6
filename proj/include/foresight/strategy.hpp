#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/grid.hpp"
#include "foresight/model.hpp"
#include "foresight/numeric.hpp"
#include "foresight/quadvar.hpp"
#include "foresight/stieltjes.hpp"

namespace foresight {

inline constexpr double default_beta = 2.0 / 3.0;

// Membership of the path in {sup S <= 1} and {<S>_T > c}.
struct EventFlags {
    bool in_Ac = false;
    double sup_S = 0.0;
    double qv_T = 0.0;
    double c = 0.0;
};

inline EventFlags detect_event(const Path& path, const QVCurve& qv, double c) {
    require_same_grid(path.grid(), qv.grid(), "detect_event");
    EventFlags f;
    f.sup_S = path.sup();
    f.qv_T = qv.terminal();
    f.c = c;
    f.in_Ac = f.sup_S <= 1.0 && f.qv_T > c;
    return f;
}

// Z_n = (S(rho_n) - S(rho_{n+1}))^+, n = 1..N, stored at [n-1].
struct Increments {
    std::vector<double> Z;
};

inline Increments increments(const Path& path, const StoppingLadder& ladder) {
    if (ladder.rho_n_index.size() != ladder.depth + 1) throw structural_error("ladder has wrong length");
    Increments inc;
    inc.Z.resize(ladder.depth);
    for (std::size_t n = 1; n <= ladder.depth; ++n) {
        const std::size_t late = ladder.index_at(n), early = ladder.index_at(n + 1);
        if (late >= path.size()) throw structural_error("ladder index beyond path");
        if (path.grid()[late] != ladder.at(n)) throw structural_error("ladder time is not on the path grid");
        inc.Z[n - 1] = late == early ? 0.0 : positive_part(path[late] - path[early]);
    }
    return inc;
}

// H_n = prod_{k<=n} 1 / (1 + beta Z_k).
struct Weights {
    double beta = default_beta;
    std::vector<double> H;

    double last() const { return H.empty() ? 1.0 : H.back(); }
};

inline Weights weights(const Increments& inc, double beta = default_beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw parameter_error("beta must lie in (0,1)", "construction.beta");
    Weights w;
    w.beta = beta;
    w.H.resize(inc.Z.size());
    double h = 1.0;
    for (std::size_t k = 0; k < inc.Z.size(); ++k) {
        h /= 1.0 + beta * inc.Z[k];
        w.H[k] = h;
    }
    return w;
}

struct StrategyPiece {
    std::size_t n = 0;
    std::size_t begin_index = 0; // rho_{n+1}, excluded
    std::size_t end_index = 0;   // rho_n, included
    double holding = 0.0;

    bool empty() const noexcept { return begin_index == end_index; }
};

// The truncated holding process: h_n on (rho_{n+1}, rho_n], zero elsewhere.
// Pieces are stored by n ascending, i.e. latest interval first.
class StrategyPath {
public:
    StrategyPath(TimeGrid grid, std::vector<StrategyPiece> pieces) : grid_(std::move(grid)), pieces_(std::move(pieces)) {
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const auto& p = pieces_[i];
            if (p.begin_index > p.end_index || p.end_index >= grid_.size())
                throw structural_error("strategy piece has an invalid interval");
            if (p.holding < 0.0) throw structural_error("strategy holdings must be non-negative");
            if (i > 0 && p.end_index > pieces_[i - 1].begin_index)
                throw structural_error("strategy pieces overlap");
        }
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<StrategyPiece>& pieces() const noexcept { return pieces_; }

    // Caglad value at t.
    double operator()(double t) const {
        if (!grid_.contains(t)) throw parameter_error("evaluation time outside [0, T]");
        for (const auto& p : pieces_)
            if (grid_[p.begin_index] < t && t <= grid_[p.end_index]) return p.holding;
        return 0.0;
    }

    // Value at every grid point.
    std::vector<double> series() const {
        std::vector<double> out(grid_.size(), 0.0);
        for (const auto& p : pieces_)
            for (std::size_t k = p.begin_index + 1; k <= p.end_index; ++k) out[k] = p.holding;
        return out;
    }

    // Index of the piece whose interval contains grid point k, or -1.
    std::ptrdiff_t piece_at_index(std::size_t k) const noexcept {
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            if (pieces_[i].begin_index < k && k <= pieces_[i].end_index) return static_cast<std::ptrdiff_t>(i);
        return -1;
    }

    StepFunction to_step_function() const {
        std::vector<double> knots;
        std::vector<double> values;
        for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
            if (it->empty()) continue;
            if (knots.empty()) knots.push_back(grid_[it->begin_index]);
            // non-empty pieces are contiguous in time
            if (knots.back() != grid_[it->begin_index]) {
                knots.push_back(grid_[it->begin_index]);
                values.push_back(0.0);
            }
            knots.push_back(grid_[it->end_index]);
            values.push_back(it->holding);
        }
        if (values.empty()) return {};
        return StepFunction(std::move(knots), std::move(values));
    }

    double total_variation() const { return to_step_function().total_variation(); }

    bool is_zero() const noexcept {
        return std::all_of(pieces_.begin(), pieces_.end(),
                           [](const StrategyPiece& p) { return p.holding == 0.0 || p.empty(); });
    }

private:
    TimeGrid grid_;
    std::vector<StrategyPiece> pieces_;
};

inline StrategyPath build_phi(const EventFlags& flags, const StoppingLadder& ladder, const Increments& inc,
                              const Weights& w, const TimeGrid& grid) {
    if (inc.Z.size() != ladder.depth || w.H.size() != ladder.depth)
        throw structural_error("increments, weights and ladder disagree on the truncation depth");
    std::vector<StrategyPiece> pieces;
    pieces.reserve(ladder.depth);
    for (std::size_t n = 1; n <= ladder.depth; ++n) {
        StrategyPiece p;
        p.n = n;
        p.begin_index = ladder.index_at(n + 1);
        p.end_index = ladder.index_at(n);
        const bool active = flags.in_Ac && inc.Z[n - 1] > 0.0;
        p.holding = active ? w.H[n - 1] : 0.0;
        pieces.push_back(p);
    }
    return StrategyPath(grid, std::move(pieces));
}

inline double evaluate_phi(const StrategyPath& phi, double t) { return phi(t); }

inline double total_variation(const StrategyPath& phi) { return phi.total_variation(); }

// Funding shortfall of the truncated construction.
//
// On a piece n < N the money account equals (H_n - H_N)/beta - H_n S(rho_{n+1})
// and on the deepest piece it is -H_N S(rho_{N+1}). With S <= 1 both are
// bounded below by -H_N sup S, which is the value reported here. It is zero
// when no piece is held.
inline double seed_capital(const EventFlags& flags, const StrategyPath& phi, const Weights& w) {
    if (!flags.in_Ac || phi.is_zero()) return 0.0;
    return w.last() * flags.sup_S;
}

// Pieces whose cash account is covered by later proceeds:
// H_n >= H_N / (1 - beta), i.e. H_n >= 3 H_N for beta = 2/3.
inline bool in_guaranteed_region(const Weights& w, std::size_t n) {
    return w.H.at(n - 1) >= w.last() / (1.0 - w.beta);
}

struct TruncationSafety {
    std::size_t checked = 0;
    std::vector<std::size_t> violations;
};

// For every guaranteed n: sum_{k>n}^N H_k Z_k >= H_n sup S, with the tail
// summed directly rather than through the telescoping identity.
inline TruncationSafety truncation_safety(const Increments& inc, const Weights& w, double sup_S) {
    TruncationSafety out;
    const std::size_t N = w.H.size();
    std::vector<double> tail(N + 1, 0.0); // tail[n] = sum_{k=n+1}^N H_k Z_k
    for (std::size_t k = N; k >= 1; --k) tail[k - 1] = tail[k] + w.H[k - 1] * inc.Z[k - 1];
    for (std::size_t n = 1; n <= N; ++n) {
        if (!in_guaranteed_region(w, n)) continue;
        ++out.checked;
        if (tail[n] < w.H[n - 1] * sup_S) out.violations.push_back(n);
    }
    return out;
}

} // namespace foresight
