#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "foresight/config.hpp"
#include "foresight/lemmas.hpp"
#include "foresight/parallel.hpp"
#include "foresight/rng.hpp"

namespace foresight::lemmas {

struct PowerSpecResult {
    double a = 0.0, q = 0.0, alpha = 0.0;
    std::size_t checked = 0;
    std::vector<std::size_t> violations;
    double last_decade_ratio = 0.0;
};

struct SeqSuiteReport {
    double anchor_x1 = 0.0; // y_1 = 1, beta = 2/3; 3/5 to rounding
    std::size_t triples = 0;
    double max_telescoping_residual = 0.0;
    double telescoping_tolerance = 1e-12;
    std::vector<PowerSpecResult> sweep;
    std::size_t total_checked = 0;
    std::size_t total_violations = 0;
    // reference diagnostics for the assumption heuristic
    AssumptionReport sqrt_case;     // y_n = n^-1/2, alpha = 1/2
    AssumptionReport harmonic_case; // y_n = 1/n, alpha = 1/2

    bool passes() const noexcept {
        return total_violations == 0 && max_telescoping_residual <= telescoping_tolerance &&
               std::abs(anchor_x1 - 0.6) <= 4.0 * std::numeric_limits<double>::epsilon();
    }
};

inline SeqSuiteReport run_lemma_seq(const RunConfig& cfg) {
    const auto& lc = cfg.lemma_seq;
    SeqSuiteReport rep;

    rep.anchor_x1 = build_x(SequenceSpec::spike(1.0, 0.5, 1)).x.front();

    rep.triples = lc.triples;
    std::vector<double> residuals(lc.triples);
    parallel_for(lc.triples, [&](std::size_t i) {
        StreamRng rng(SeedSpec{cfg.seeds.first, 2000 + i});
        const double a = 0.1 + 1.9 * rng.uniform();
        const double q = 0.05 + 0.9 * rng.uniform();
        const double alpha = 0.05 + 0.9 * rng.uniform();
        const auto xs = build_x(SequenceSpec::power(a, q, alpha, lc.triple_N));
        const auto N = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(lc.triple_N)));
        const auto n = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(N) - 1));
        residuals[i] = std::abs(telescoping_residual(xs, n, N));
    });
    for (double r : residuals) rep.max_telescoping_residual = std::max(rep.max_telescoping_residual, r);

    rep.sweep.resize(lc.specs);
    parallel_for(lc.specs, [&](std::size_t i) {
        StreamRng rng(SeedSpec{cfg.seeds.first, 3000 + i});
        PowerSpecResult r;
        r.a = 0.1 + 1.9 * rng.uniform();
        r.q = 0.05 + 0.9 * rng.uniform();
        r.alpha = 0.05 + 0.9 * rng.uniform();
        const auto spec = SequenceSpec::power(r.a, r.q, r.alpha, lc.N);
        const auto ineq = verify_xn_inequality(build_x(spec));
        r.checked = ineq.checked.size();
        r.violations = ineq.violations;
        r.last_decade_ratio = check_assumption(spec, lc.threshold).last_decade_ratio;
        rep.sweep[i] = std::move(r);
    });
    for (const auto& r : rep.sweep) {
        rep.total_checked += r.checked;
        rep.total_violations += r.violations.size();
    }

    rep.sqrt_case = check_assumption(SequenceSpec::power(1.0, 0.5, 0.5, lc.N), lc.threshold);
    rep.harmonic_case = check_assumption(SequenceSpec::harmonic(0.5, lc.N), lc.threshold);
    rep.sqrt_case.partial_sums.clear();
    rep.harmonic_case.partial_sums.clear();
    return rep;
}

struct BMSuiteReport {
    std::vector<BoundCheck> bounds;
    std::size_t bound_failures = 0;
    BMIncrementSpec spec;
    LadderEstimate ladder;

    bool bounds_pass() const noexcept { return bound_failures == 0; }
    bool passes() const noexcept { return bounds_pass() && ladder.passes(); }
};

inline BMSuiteReport run_lemma_bm(const RunConfig& cfg) {
    const auto& bc = cfg.lemma_bm;
    BMSuiteReport rep;
    for (double g : bc.bound_gammas)
        for (double s : bc.bound_sigmas) rep.bounds.push_back(BoundCheck{s, g, 0, 0, {}});
    parallel_for(rep.bounds.size(), [&](std::size_t i) {
        rep.bounds[i] = check_mvt_bounds(rep.bounds[i].sigma, rep.bounds[i].gamma, bc.bound_n);
    });
    for (const auto& b : rep.bounds) rep.bound_failures += b.failure_count;

    rep.spec = BMIncrementSpec{bc.sigma, bc.gamma, bc.alpha, bc.ladder.back(), bc.samples};
    LadderOptions opt;
    opt.ladder = bc.ladder;
    opt.z_threshold = bc.z_threshold;
    opt.tail_threshold = bc.tail_threshold;
    opt.seed = cfg.seeds.first;
    rep.ladder = mc_discounted_sums(rep.spec, opt);
    return rep;
}

} // namespace foresight::lemmas
