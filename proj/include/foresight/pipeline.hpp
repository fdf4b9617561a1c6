#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "foresight/config.hpp"
#include "foresight/ledger.hpp"
#include "foresight/model.hpp"
#include "foresight/parallel.hpp"
#include "foresight/quadvar.hpp"
#include "foresight/strategy.hpp"

namespace foresight {

// Everything the single-seed pipeline produces, in dependency order.
struct PipelineResult {
    std::uint64_t seed = 0;
    double prescale = 1.0;
    std::string qv_source;
    Path raw_path;
    Path path;
    QVCurve qv;
    StoppingLadder ladder;
    EventFlags flags;
    Increments Z;
    Weights H;
    StrategyPath phi;
    Ledger ledger;
    VerificationReport report;
};

// simulate -> rescale -> QV -> ladder -> event -> Z, H -> phi -> ledger -> verify
inline PipelineResult run_pipeline(const RunConfig& cfg, std::uint64_t seed) {
    const auto& k = cfg.construction;
    const TimeGrid grid = TimeGrid::uniform(cfg.grid.T, cfg.grid.M);
    Path raw = simulate(cfg.model, grid, SeedSpec{seed, cfg.seeds.stream});

    const double lambda = k.prescale_mode == PrescaleMode::foresight ? 1.0 / raw.sup() : k.prescale;
    Path path = rescale(raw, lambda);

    const bool analytic = k.qv != QVSource::realized;
    QVCurve qv = analytic ? scale_qv(analytic_qv(cfg.model, grid, raw), lambda) : realized_qv(path);

    const double c = k.c_policy == CPolicy::half_qv ? 0.5 * qv.terminal() : k.c;
    StoppingLadder ladder = c > 0.0 ? stopping_ladder(qv, c, k.gamma, k.N) : degenerate_ladder(grid, k.gamma, k.N);
    ladder.c = c;

    EventFlags flags = detect_event(path, qv, c);
    Increments Z = increments(path, ladder);
    Weights H = weights(Z, k.beta);
    StrategyPath phi = build_phi(flags, ladder, Z, H, grid);
    Ledger ledger = build_ledger(path, phi);
    VerificationReport report = verify_book(ledger, phi, ladder, flags, H, {cfg.verify.identity_tol});

    return PipelineResult{seed, lambda, analytic ? "analytic" : "realized", std::move(raw), std::move(path),
                          std::move(qv), std::move(ladder), flags, std::move(Z), std::move(H), std::move(phi),
                          std::move(ledger), report};
}

// ---------------------------------------------------------------------------
// Monte Carlo sweep

struct Proportion {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double fraction = 0.0;
    double lower = 0.0; // Wilson interval
    double upper = 0.0;
};

inline Proportion wilson(std::uint64_t successes, std::uint64_t trials, double z = 3.0) {
    Proportion p{successes, trials, 0.0, 0.0, 0.0};
    if (trials == 0) return p;
    const double n = static_cast<double>(trials);
    const double f = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (f + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(f * (1 - f) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    p.fraction = f;
    p.lower = std::max(0.0, centre - half);
    p.upper = std::min(1.0, centre + half);
    return p;
}

struct SeedOutcome {
    std::uint64_t seed = 0;
    bool in_Ac = false;
    bool strict = false;
    bool eq_as = false;
    bool all_pass = false;
    double V_T = 0.0;
    double residual = 0.0;
    double epsilon_N = 0.0;
    double min_psi = 0.0;
};

struct MCSummary {
    std::uint64_t seeds_first = 0;
    std::uint64_t paths_total = 0;
    std::uint64_t paths_in_Ac = 0;
    Proportion in_Ac;
    Proportion strict_on_Ac;
    std::uint64_t eq_as_failures = 0;
    std::uint64_t check_failures = 0;
    double mean_V_T_on_Ac = 0.0;
    double min_V_T_on_Ac = 0.0;
    double max_identity_residual = 0.0;
    double max_epsilon_N = 0.0;
    std::vector<SeedOutcome> outcomes;

    // Strictness on every A_c path and every identity within tolerance.
    bool passes() const noexcept {
        return check_failures == 0 && (paths_in_Ac == 0 || strict_on_Ac.successes == paths_in_Ac);
    }
};

inline SeedOutcome summarize(const PipelineResult& r) {
    const auto& rep = r.report;
    return {r.seed, rep.in_Ac, rep.strict_after_rho, rep.eq_as_holds, rep.all_pass(),
            rep.V_T, rep.terminal_identity_residual, rep.epsilon_N, rep.min_psi};
}

// Seeds run independently; results are merged in seed order.
inline MCSummary monte_carlo(const RunConfig& cfg) {
    validate(cfg);
    MCSummary s;
    s.seeds_first = cfg.seeds.first;
    s.paths_total = cfg.seeds.count;
    s.outcomes.resize(cfg.seeds.count);
    parallel_for(cfg.seeds.count,
                 [&](std::size_t i) { s.outcomes[i] = summarize(run_pipeline(cfg, cfg.seeds.first + i)); });

    std::uint64_t strict = 0;
    double sum_V = 0.0;
    double min_V = std::numeric_limits<double>::infinity();
    for (const auto& o : s.outcomes) {
        if (!o.eq_as) ++s.eq_as_failures;
        if (!o.all_pass) ++s.check_failures;
        s.max_identity_residual = std::max(s.max_identity_residual, o.residual);
        s.max_epsilon_N = std::max(s.max_epsilon_N, o.epsilon_N);
        if (!o.in_Ac) continue;
        ++s.paths_in_Ac;
        if (o.strict) ++strict;
        sum_V += o.V_T;
        min_V = std::min(min_V, o.V_T);
    }
    s.in_Ac = wilson(s.paths_in_Ac, s.paths_total);
    s.strict_on_Ac = wilson(strict, s.paths_in_Ac);
    if (s.paths_in_Ac > 0) {
        s.mean_V_T_on_Ac = sum_V / static_cast<double>(s.paths_in_Ac);
        s.min_V_T_on_Ac = min_V;
    }
    return s;
}

} // namespace foresight
