#include <catch_amalgamated.hpp>

#include <cmath>

#include "foresight/lemma_suite.hpp"
#include "foresight/lemmas.hpp"
#include "oracles.hpp"

using namespace foresight;
using namespace foresight::lemmas;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("assumption diagnostic") {
    const auto z = check_assumption(SequenceSpec::zero(0.5, 1000));
    CHECK(z.total == 1000.0);
    CHECK_FALSE(z.consistent_with_convergence);

    const auto s = check_assumption(SequenceSpec::power(1.0, 0.5, 0.5, 100000));
    CHECK(s.consistent_with_convergence);
    // sum_n exp(-(1/2) H_n^(1/2)) with H^(1/2) the generalised harmonic sum
    long double ref = 0.0L, ys = 0.0L;
    for (int n = 1; n <= 100000; ++n) {
        ys += 1.0L / std::sqrt(static_cast<long double>(n));
        ref += std::exp(-0.5L * ys);
    }
    CHECK_THAT(s.total, WithinRel(static_cast<double>(ref), 1e-12));

    const auto h = check_assumption(SequenceSpec::harmonic(0.5, 100000));
    CHECK_FALSE(h.consistent_with_convergence);
}

TEST_CASE("x sequence") {
    const auto z = build_x(SequenceSpec::zero(0.5, 100));
    for (double x : z.x) CHECK(x == 1.0);
    CHECK_THAT(build_x(SequenceSpec::spike(1.0, 0.5, 1)).x[0], WithinAbs(0.6, 1e-15));

    const auto p = build_x(SequenceSpec::power(1.0, 0.5, 0.5, 10000));
    CHECK(p.x.back() < 1e-3);
    const double tail = p.x_partial_sums.back() - p.x_partial_sums[4999];
    CHECK(tail < 1e-6 * p.x_partial_sums.back());
}

TEST_CASE("inequality holds on the square-root family") {
    const auto rep = verify_xn_inequality(build_x(SequenceSpec::power(1.0, 0.5, 0.5, 10000)));
    CHECK_FALSE(rep.vacuous());
    CHECK(rep.violations.empty());
}

TEST_CASE("spike sequence makes the truncated check vacuous") {
    const auto rep = verify_xn_inequality(build_x(SequenceSpec::spike(1.0, 0.5, 1000)));
    CHECK(rep.vacuous());
}

TEST_CASE("inequality is checked where x underflows") {
    // heavy damping: x_n falls below the smallest double long before N
    const auto xs = build_x(SequenceSpec::power(2.0, 0.1, 0.9, 5000));
    CHECK(xs.x.back() < 1e-300);
    const auto rep = verify_xn_inequality(xs);
    CHECK(rep.checked.size() >= 4990);
    CHECK(rep.violations.empty());
}

TEST_CASE("telescoping residual") {
    const auto xs = build_x(SequenceSpec::power(0.7, 0.4, 0.3, 500));
    for (std::size_t N = 1; N <= 500; ++N) {
        // one-step recursion: beta x_N y_N = x_{N-1} - x_N
        CHECK(std::abs(telescoping_residual(xs, N - 1, N)) <= 2.0 * std::numeric_limits<double>::epsilon());
    }
    const auto z = build_x(SequenceSpec::zero(0.5, 50));
    CHECK(telescoping_residual(z, 3, 40) == 0.0);
    CHECK_THROWS_AS(telescoping_residual(xs, 5, 5), std::out_of_range);
    CHECK_THROWS_AS(telescoping_residual(xs, 0, 501), std::out_of_range);
}

TEST_CASE("sequence suite") {
    RunConfig cfg;
    const auto rep = run_lemma_seq(cfg);
    CHECK(rep.total_violations == 0);
    CHECK(rep.max_telescoping_residual <= 1e-12);
    CHECK(rep.passes());
}

TEST_CASE("increment scale and its bounds") {
    const double u1 = u_n(1, 1.0, 0.5);
    CHECK_THAT(u1, WithinAbs(std::sqrt(1.0 - std::pow(2.0, -0.5)), 1e-15));
    CHECK_THAT(u1, WithinAbs(0.54120, 1e-5));
    const double lo = std::sqrt(0.5) * std::pow(2.0, -0.75), hi = std::sqrt(0.5);
    CHECK_THAT(lo, WithinAbs(0.42045, 1e-5));
    CHECK(lo <= u1);
    CHECK(u1 <= hi);
    for (std::size_t n : {1, 10, 1000, 1000000}) CHECK_THAT(u_n(n, 1.3, 0.25), WithinRel(static_cast<double>(oracle::u(n, 1.3, 0.25)), 1e-12));
}

TEST_CASE("bounds hold on the full grid") {
    for (double g : {0.25, 0.5, 0.75})
        for (double s : {0.5, 1.0, 2.0}) {
            const auto bc = check_mvt_bounds(s, g, 1000000);
            CHECK(bc.checked == 1000000);
            CHECK(bc.failure_count == 0);
        }
}

TEST_CASE("increments are non-negative and have the right scale") {
    BMIncrementSpec spec{1.0, 0.5, 0.5, 200, 1};
    double m = 0.0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        const auto s = bm_increments(spec, {0, static_cast<std::uint64_t>(r)}, false);
        for (double x : s.xi) REQUIRE(x >= 0.0);
        m += s.xi[0] / reps;
    }
    // E (u G)^+ = u / sqrt(2 pi)
    const double expect = u_n(1, 1.0, 0.5) / std::sqrt(2.0 * std::numbers::pi);
    CHECK_THAT(m, WithinAbs(expect, 4.0 * 0.6 * u_n(1, 1.0, 0.5) / std::sqrt(reps)));
}

TEST_CASE("heavy damping leaves only the first term") {
    BMIncrementSpec spec{1.0, 0.5, 1000.0, 100, 200};
    LadderOptions opt;
    opt.ladder = {10, 50};
    const auto est = mc_discounted_sums(spec, opt);
    const auto exact = oracle::discounted_sum_expectation(1.0, 0.5, 1000.0, {10, 50});
    CHECK(est.estimates[0] < 2.0);
    CHECK_THAT(est.estimates[1] - est.estimates[0], WithinAbs(exact[1] - exact[0], 0.05));
}

TEST_CASE("Monte Carlo ladder agrees with the exact expectation") {
    BMIncrementSpec spec{1.0, 0.5, 0.5, 1000, 2000};
    LadderOptions opt;
    opt.ladder = {10, 100, 500};
    const auto est = mc_discounted_sums(spec, opt);
    const auto exact = oracle::discounted_sum_expectation(1.0, 0.5, 0.5, {10, 100, 500});
    const auto exact2 = oracle::discounted_sum_expectation(1.0, 0.5, 0.5, {20, 200, 1000});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(est.estimates[i] - exact[i]) <= 4.0 * est.std_errors[i]);
        CHECK(std::abs(est.increments[i] - (exact2[i] - exact[i])) <= 4.0 * est.increment_std_errors[i]);
    }
    const auto again = mc_discounted_sums(spec, opt);
    CHECK(again.estimates == est.estimates);
}

TEST_CASE("exact expectation oracle reproduces the reference ladder") {
    const auto e = oracle::discounted_sum_expectation(1.0, 0.5, 0.5, {100, 1000, 10000});
    CHECK_THAT(e[0], WithinAbs(44.37, 0.01));
    CHECK_THAT(e[1], WithinAbs(167.24, 0.01));
    CHECK_THAT(e[2], WithinAbs(349.92, 0.01));
}
