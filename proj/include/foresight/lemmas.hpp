#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <stdexcept>
#include <string>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/numeric.hpp"
#include "foresight/parallel.hpp"
#include "foresight/rng.hpp"

namespace foresight::lemmas {

// ---------------------------------------------------------------------------
// Sequence machinery: x_n = prod_{k<=n} 1/(1 + beta y_k), beta = 2 alpha/(1+alpha)

struct SequenceSpec {
    std::function<double(std::size_t)> y; // y(n), n >= 1
    double alpha = 0.5;
    std::size_t N = 1000;
    std::string label;

    double beta() const noexcept { return 2.0 * alpha / (1.0 + alpha); }

    static SequenceSpec power(double a, double q, double alpha, std::size_t N) {
        return {[a, q](std::size_t n) { return a * std::pow(static_cast<double>(n), -q); }, alpha, N,
                "power(a=" + format_double(a) + ",q=" + format_double(q) + ")"};
    }
    static SequenceSpec zero(double alpha, std::size_t N) {
        return {[](std::size_t) { return 0.0; }, alpha, N, "zero"};
    }
    static SequenceSpec harmonic(double alpha, std::size_t N) {
        return {[](std::size_t n) { return 1.0 / static_cast<double>(n); }, alpha, N, "harmonic"};
    }
    // y_1 = height, y_n = 0 afterwards.
    static SequenceSpec spike(double height, double alpha, std::size_t N) {
        return {[height](std::size_t n) { return n == 1 ? height : 0.0; }, alpha, N, "spike"};
    }
};

inline void validate(const SequenceSpec& spec) {
    if (!spec.y) throw parameter_error("sequence generator missing", "lemma.seq");
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw parameter_error("alpha must lie in (0,1)", "lemma.seq.alpha");
    if (spec.N < 1) throw parameter_error("N must be at least 1", "lemma.seq.N");
}

struct AssumptionReport {
    std::vector<double> partial_sums; // sum_{m<=n} exp(-alpha sum_{k<=m} y_k), n = 1..N
    double total = 0.0;
    double last_decade_ratio = 0.0;   // contribution of n in (N/10, N] over total
    bool consistent_with_convergence = false;
};

// Plateau heuristic for sum_n exp(-alpha sum_{k<=n} y_k) < infinity. A small
// last-decade share is consistent with convergence; it proves nothing.
inline AssumptionReport check_assumption(const SequenceSpec& spec, double threshold = 0.01) {
    validate(spec);
    AssumptionReport rep;
    rep.partial_sums.resize(spec.N);
    compensated_sum ysum, total;
    for (std::size_t n = 1; n <= spec.N; ++n) {
        ysum.add(spec.y(n));
        total.add(std::exp(-spec.alpha * ysum.value()));
        rep.partial_sums[n - 1] = total.value();
    }
    rep.total = rep.partial_sums.back();
    const std::size_t tenth = spec.N / 10;
    const double head = tenth == 0 ? 0.0 : rep.partial_sums[tenth - 1];
    rep.last_decade_ratio = rep.total > 0.0 ? (rep.total - head) / rep.total : 0.0;
    rep.consistent_with_convergence = rep.last_decade_ratio < threshold;
    return rep;
}

struct XSeq {
    double beta = 0.0;
    std::vector<double> y;              // y_1..y_N at [n-1]
    std::vector<double> x;              // x_1..x_N at [n-1]
    std::vector<double> log_x;          // log x_n, finite where x underflows
    std::vector<double> x_partial_sums;
    std::vector<double> exp_partial_sums;

    // x_0 = 1 (empty product).
    double x_at(std::size_t n) const { return n == 0 ? 1.0 : x.at(n - 1); }
};

inline XSeq build_x(const SequenceSpec& spec) {
    validate(spec);
    XSeq xs;
    xs.beta = spec.beta();
    xs.y.resize(spec.N);
    xs.x.resize(spec.N);
    xs.log_x.resize(spec.N);
    xs.x_partial_sums.resize(spec.N);
    xs.exp_partial_sums.resize(spec.N);
    double x = 1.0;
    compensated_sum xsum, ysum, esum, logx;
    for (std::size_t n = 1; n <= spec.N; ++n) {
        const double yn = spec.y(n);
        if (!(yn >= 0.0)) throw parameter_error("sequence values must be non-negative", "lemma.seq");
        xs.y[n - 1] = yn;
        // a product factor in (0,1] can only keep x non-increasing
        x /= 1.0 + xs.beta * yn;
        xs.x[n - 1] = x;
        logx.add(-std::log1p(xs.beta * yn));
        xs.log_x[n - 1] = logx.value();
        xsum.add(x);
        ysum.add(yn);
        esum.add(std::exp(-spec.alpha * ysum.value()));
        xs.x_partial_sums[n - 1] = xsum.value();
        xs.exp_partial_sums[n - 1] = esum.value();
    }
    return xs;
}

struct XnInequalityReport {
    std::vector<std::size_t> checked;    // eligible n: x_N < (1 - beta) x_n
    std::vector<std::size_t> violations; // eligible n with x_n >= sum_{k>n}^N x_k y_k
    bool vacuous() const noexcept { return checked.empty(); }
};

// Truncated form of x_n < sum_{k>n} x_k y_k, checked scale-free as
// 1 < u_n with u_n = sum_{k>n} (x_k / x_n) y_k, so x underflow is harmless.
// u_{n-1} = (u_n + y_n) / (1 + beta y_n), u_N = 0.
inline XnInequalityReport verify_xn_inequality(const XSeq& xs) {
    XnInequalityReport rep;
    const std::size_t N = xs.x.size();
    if (N == 0) return rep;
    std::vector<double> u(N + 1, 0.0);
    for (std::size_t k = N; k >= 1; --k) u[k - 1] = (u[k] + xs.y[k - 1]) / (1.0 + xs.beta * xs.y[k - 1]);
    const double log_xN = xs.log_x.back();
    const double log_gap = std::log1p(-xs.beta);
    for (std::size_t n = 1; n < N; ++n) {
        if (!(log_xN - xs.log_x[n - 1] < log_gap)) continue;
        rep.checked.push_back(n);
        if (!(1.0 < u[n])) rep.violations.push_back(n);
    }
    return rep;
}

// beta sum_{k=n+1}^N x_k y_k - (x_n - x_N), for 0 <= n < N <= spec.N.
inline double telescoping_residual(const XSeq& xs, std::size_t n, std::size_t N) {
    if (!(n < N) || N > xs.x.size())
        throw std::out_of_range("telescoping indices need 0 <= n < N <= " + std::to_string(xs.x.size()));
    compensated_sum s;
    for (std::size_t k = n + 1; k <= N; ++k) s.add(xs.x[k - 1] * xs.y[k - 1]);
    return xs.beta * s.value() - (xs.x_at(n) - xs.x_at(N));
}

// ---------------------------------------------------------------------------
// Brownian increments xi_n = (sigma B(n^-gamma) - sigma B((n+1)^-gamma))^+

struct BMIncrementSpec {
    double sigma = 1.0;
    double gamma = 0.5;
    double alpha = 0.5;
    std::size_t N = 1000;
    std::size_t M = 10000; // Monte Carlo samples

    double p() const noexcept { return 0.5 * (gamma + 1.0); }
};

inline void validate(const BMIncrementSpec& s) {
    if (!(s.sigma > 0.0)) throw parameter_error("sigma must be positive", "lemma.bm.sigma");
    if (!(s.gamma > 0.0 && s.gamma < 1.0)) throw parameter_error("gamma must lie in (0,1)", "lemma.bm.gamma");
    if (!(s.alpha > 0.0)) throw parameter_error("alpha must be positive", "lemma.bm.alpha");
    if (s.N < 1) throw parameter_error("N must be at least 1", "lemma.bm.N");
}

// n^-gamma - (n+1)^-gamma without cancellation.
inline double time_gap(std::size_t n, double gamma) {
    const double dn = static_cast<double>(n);
    return std::pow(dn, -gamma) * -std::expm1(-gamma * std::log1p(1.0 / dn));
}

// u_n = sigma sqrt(n^-gamma - (n+1)^-gamma)
inline double u_n(std::size_t n, double sigma, double gamma) { return sigma * std::sqrt(time_gap(n, gamma)); }

struct BoundCheck {
    double sigma = 0.0;
    double gamma = 0.0;
    std::size_t checked = 0;
    std::size_t failure_count = 0;
    std::vector<std::size_t> failures; // first few failing n
};

// sqrt(gamma) sigma (n+1)^-p <= u_n <= sqrt(gamma) sigma n^-p for n = 1..n_max.
inline BoundCheck check_mvt_bounds(double sigma, double gamma, std::size_t n_max) {
    BoundCheck bc{sigma, gamma, 0, 0, {}};
    const double p = 0.5 * (gamma + 1.0);
    const double k = std::sqrt(gamma) * sigma;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double u = u_n(n, sigma, gamma);
        const double lo = k * std::pow(static_cast<double>(n + 1), -p);
        const double hi = k * std::pow(static_cast<double>(n), -p);
        ++bc.checked;
        if (lo <= u && u <= hi) continue;
        ++bc.failure_count;
        if (bc.failures.size() < 16) bc.failures.push_back(n);
    }
    return bc;
}

struct IncrementSample {
    std::vector<double> times; // t_n = n^-gamma, n = 1..N+1, at [n-1]
    std::vector<double> B;     // B(t_n)
    std::vector<double> xi;    // xi_n, n = 1..N, at [n-1]
    BoundCheck bounds;
};

// One Brownian path sampled at t_{N+1} < ... < t_1 = 1, built forward in time.
inline IncrementSample bm_increments(const BMIncrementSpec& spec, SeedSpec seed, bool with_bounds = true) {
    validate(spec);
    const std::size_t N = spec.N;
    IncrementSample s;
    s.times.resize(N + 1);
    s.B.resize(N + 1);
    s.xi.resize(N);
    for (std::size_t n = 1; n <= N + 1; ++n) s.times[n - 1] = std::pow(static_cast<double>(n), -spec.gamma);
    StreamRng rng(seed);
    s.B[N] = std::sqrt(s.times[N]) * rng.gaussian();
    for (std::size_t n = N; n >= 1; --n)
        s.B[n - 1] = s.B[n] + std::sqrt(time_gap(n, spec.gamma)) * rng.gaussian();
    for (std::size_t n = 1; n <= N; ++n) s.xi[n - 1] = positive_part(spec.sigma * s.B[n - 1] - spec.sigma * s.B[n]);
    if (with_bounds) s.bounds = check_mvt_bounds(spec.sigma, spec.gamma, N);
    return s;
}

struct LadderEstimate {
    std::vector<std::size_t> ladder;          // N values
    std::vector<double> estimates;            // E S_N, S_N = sum_{n<=N} exp(-alpha sum_{k<=n} xi_k)
    std::vector<double> std_errors;
    std::vector<double> increments;           // E(S_{2N} - S_N)
    std::vector<double> increment_std_errors;
    std::vector<double> drop_z_scores;        // (inc_i - inc_{i+1}) / se(paired difference)
    bool strictly_decreasing = false;         // every drop exceeds z_threshold
    double last_increment = 0.0;
    bool below_threshold = false;
    bool passes() const noexcept { return strictly_decreasing && below_threshold; }
};

struct LadderOptions {
    std::vector<std::size_t> ladder{100, 1000, 10000};
    double z_threshold = 3.0;
    double tail_threshold = 1.0;
    std::uint64_t seed = 0;
};

// Convergence diagnostic for E sum_n exp(-alpha sum_{k<=n} xi_k). Sample m
// uses stream m of `seed`.
inline LadderEstimate mc_discounted_sums(const BMIncrementSpec& spec, const LadderOptions& opt = {}) {
    validate(spec);
    if (spec.M < 2) throw parameter_error("need at least two samples", "lemma.bm.samples");
    if (opt.ladder.empty() || !std::is_sorted(opt.ladder.begin(), opt.ladder.end()))
        throw parameter_error("ladder must be a non-empty increasing list", "lemma.bm.ladder");
    const std::size_t L = opt.ladder.size();
    BMIncrementSpec depth = spec;
    depth.N = 2 * opt.ladder.back();

    // per sample: S_N and S_{2N} for every ladder entry
    std::vector<double> sN(spec.M * L), s2N(spec.M * L);
    parallel_for(spec.M, [&](std::size_t m) {
        const auto sample = bm_increments(depth, SeedSpec{opt.seed, m}, false);
        double xsum = 0.0, total = 0.0;
        std::size_t li = 0, lj = 0;
        for (std::size_t n = 1; n <= depth.N; ++n) {
            xsum += sample.xi[n - 1];
            total += std::exp(-spec.alpha * xsum);
            while (li < L && opt.ladder[li] == n) sN[m * L + li++] = total;
            while (lj < L && 2 * opt.ladder[lj] == n) s2N[m * L + lj++] = total;
        }
    });

    auto mean_se = [&](auto&& f) {
        compensated_sum s, s2;
        for (std::size_t m = 0; m < spec.M; ++m) s.add(f(m));
        const double mean = s.value() / static_cast<double>(spec.M);
        for (std::size_t m = 0; m < spec.M; ++m) s2.add((f(m) - mean) * (f(m) - mean));
        const double var = s2.value() / static_cast<double>(spec.M - 1);
        return std::pair{mean, std::sqrt(var / static_cast<double>(spec.M))};
    };

    LadderEstimate est;
    est.ladder = opt.ladder;
    for (std::size_t i = 0; i < L; ++i) {
        auto [m, se] = mean_se([&](std::size_t k) { return sN[k * L + i]; });
        est.estimates.push_back(m);
        est.std_errors.push_back(se);
        auto [im, ise] = mean_se([&](std::size_t k) { return s2N[k * L + i] - sN[k * L + i]; });
        est.increments.push_back(im);
        est.increment_std_errors.push_back(ise);
    }
    est.strictly_decreasing = true;
    for (std::size_t i = 0; i + 1 < L; ++i) {
        auto [d, se] = mean_se([&](std::size_t k) {
            return (s2N[k * L + i] - sN[k * L + i]) - (s2N[k * L + i + 1] - sN[k * L + i + 1]);
        });
        const double z = se > 0.0 ? d / se : (d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        est.drop_z_scores.push_back(z);
        if (!(z > opt.z_threshold)) est.strictly_decreasing = false;
    }
    est.last_increment = est.increments.back();
    est.below_threshold = est.last_increment < opt.tail_threshold;
    return est;
}

} // namespace foresight::lemmas
