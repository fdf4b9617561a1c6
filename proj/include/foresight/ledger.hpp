#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/model.hpp"
#include "foresight/quadvar.hpp"
#include "foresight/stieltjes.hpp"
#include "foresight/strategy.hpp"

namespace foresight {

// Self-financing book: V = psi + phi S and V_t = int_0^t phi dS.
struct Ledger {
    TimeGrid grid;
    std::vector<double> S;
    std::vector<double> phi;
    std::vector<double> V;
    std::vector<double> psi;
    std::vector<double> phiS;
};

inline Ledger build_ledger(const Path& path, const StrategyPath& strategy) {
    require_same_grid(path.grid(), strategy.grid(), "build_ledger");
    Ledger L{path.grid(), path.values(), strategy.series(), {}, {}, {}};
    L.V = rs_integral_series(strategy.to_step_function(), path);
    const std::size_t n = path.size();
    L.phiS.resize(n);
    L.psi.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        L.phiS[k] = L.phi[k] * L.S[k];
        L.psi[k] = L.V[k] - L.phiS[k];
    }
    return L;
}

struct VerificationTolerances {
    double identity = 1e-10; // relative, scaled by max(1, |V_T|)
};

struct VerificationReport {
    bool in_Ac = false;
    bool no_short_selling = false;      // phi >= 0 and phi_0 = 0
    bool eq_as_holds = false;           // psi >= -eps everywhere, psi >= 0 on the guaranteed region
    bool strict_after_rho = false;      // V > phi S on (rho_1, T]
    bool non_negative_wealth = false;   // V >= 0 on the guaranteed region
    bool terminal_identity_holds = false;
    bool zero_branch_holds = false;     // off A_c: V = phi S = 0
    double min_psi = 0.0;
    double min_psi_guaranteed = 0.0;
    double epsilon_N = 0.0;
    double terminal_identity_residual = 0.0;
    double V_T = 0.0;
    double expected_V_T = 0.0;
    double psi_within_piece_variation = 0.0;
    double total_variation = 0.0;
    double rho = 0.0;
    double rho_1 = 0.0;
    std::size_t guaranteed_pieces = 0;
    std::size_t active_pieces = 0;
    std::size_t strict_points_checked = 0;

    bool all_pass() const noexcept {
        const bool branch = in_Ac ? strict_after_rho : zero_branch_holds;
        return no_short_selling && eq_as_holds && non_negative_wealth && terminal_identity_holds && branch;
    }
};

inline VerificationReport verify_book(const Ledger& L, const StrategyPath& phi, const StoppingLadder& ladder,
                                         const EventFlags& flags, const Weights& H,
                                         VerificationTolerances tol = {}) {
    VerificationReport r;
    const std::size_t n = L.grid.size();
    const std::size_t last = n - 1;
    r.in_Ac = flags.in_Ac;
    r.V_T = L.V[last];
    r.rho = ladder.rho;
    r.rho_1 = ladder.rho_n.empty() ? L.grid.horizon() : ladder.at(1);
    r.total_variation = phi.total_variation();
    r.epsilon_N = seed_capital(flags, phi, H);

    const double scale = std::max(1.0, std::abs(r.V_T));
    const double slack = tol.identity * scale;

    r.no_short_selling = L.phi[0] == 0.0 &&
                         std::all_of(L.phi.begin(), L.phi.end(), [](double h) { return h >= 0.0; });

    // Mark the guaranteed region: outside every holding interval, plus the
    // pieces covered by later proceeds.
    std::vector<char> guaranteed(n, 1);
    for (const auto& p : phi.pieces()) {
        if (p.empty()) continue;
        if (p.holding > 0.0) ++r.active_pieces;
        const bool covered = in_guaranteed_region(H, p.n);
        if (covered && p.holding > 0.0) ++r.guaranteed_pieces;
        for (std::size_t k = p.begin_index + 1; k <= p.end_index; ++k) guaranteed[k] = covered ? 1 : 0;

        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t k = p.begin_index + 1; k <= p.end_index; ++k) {
            lo = std::min(lo, L.psi[k]);
            hi = std::max(hi, L.psi[k]);
        }
        r.psi_within_piece_variation = std::max(r.psi_within_piece_variation, hi - lo);
    }

    r.min_psi = *std::min_element(L.psi.begin(), L.psi.end());
    r.min_psi_guaranteed = std::numeric_limits<double>::infinity();
    double min_V_guaranteed = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        if (!guaranteed[k]) continue;
        r.min_psi_guaranteed = std::min(r.min_psi_guaranteed, L.psi[k]);
        min_V_guaranteed = std::min(min_V_guaranteed, L.V[k]);
    }
    r.eq_as_holds = r.min_psi >= -r.epsilon_N - slack && r.min_psi_guaranteed >= -slack;
    r.non_negative_wealth = min_V_guaranteed >= -slack;

    if (flags.in_Ac) {
        r.expected_V_T = (1.0 - H.last()) / H.beta;
        r.strict_after_rho = true;
        for (std::size_t k = ladder.index_at(1) + 1; k < n; ++k) {
            ++r.strict_points_checked;
            if (!(L.V[k] > L.phiS[k])) r.strict_after_rho = false;
        }
        r.zero_branch_holds = false;
    } else {
        r.expected_V_T = 0.0;
        r.strict_after_rho = false;
        r.zero_branch_holds = std::all_of(L.V.begin(), L.V.end(), [](double v) { return v == 0.0; }) &&
                              std::all_of(L.phiS.begin(), L.phiS.end(), [](double v) { return v == 0.0; });
    }
    r.terminal_identity_residual = std::abs(r.V_T - r.expected_V_T);
    r.terminal_identity_holds = r.terminal_identity_residual <= slack;
    return r;
}

// ---------------------------------------------------------------------------
// Finite-variation impossibility check

struct PropFiniteResult {
    bool found = false;
    std::optional<double> witness;
};

// First grid time where int_0^t phi dS < phi_t S_t, searched exhaustively.
inline PropFiniteResult verify_prop_finite(const Path& path, const StepFunction& phi) {
    if (phi.min_value() < 0.0) throw precondition_error("strategy takes a negative value");
    PropFiniteResult res;
    if (!phi.positive_somewhere()) return res;
    const auto V = rs_integral_series(phi, path);
    const TimeGrid& grid = path.grid();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (V[k] < phi(grid[k]) * path[k]) {
            res.found = true;
            res.witness = grid[k];
            return res;
        }
    }
    return res;
}

} // namespace foresight
