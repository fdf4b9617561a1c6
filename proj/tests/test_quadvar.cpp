#include <catch_amalgamated.hpp>

#include <cmath>

#include "foresight/model.hpp"
#include "foresight/quadvar.hpp"
#include "oracles.hpp"

using namespace foresight;
using Catch::Matchers::WithinAbs;

TEST_CASE("realized QV of a constant path is zero") {
    const auto grid = TimeGrid::uniform(1.0, 16);
    const auto q = realized_qv(Path(grid, std::vector<double>(17, 0.5)));
    for (double v : q.values()) CHECK(v == 0.0);
}

TEST_CASE("realized QV of a two-step path") {
    const auto q = realized_qv(Path(TimeGrid::uniform(1.0, 2), {1.0, 1.5, 1.0}));
    CHECK(q.values() == std::vector<double>{0.0, 0.25, 0.5});
}

TEST_CASE("realized QV of standard Brownian paths at M = 2^14") {
    const std::size_t M = 1 << 14;
    const auto grid = TimeGrid::uniform(1.0, M);
    int good = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto p = simulate(BrownianMotion{10.0, 1.0, NoBoundary{}}, grid, {s, 0});
        if (std::abs(realized_qv(p).terminal() - 1.0) <= 0.05) ++good;
    }
    // the estimator has sd sqrt(2/M) ~ 0.011, so 0.05 is over 4 sd
    CHECK(good >= 950);
}

TEST_CASE("analytic QV") {
    const auto grid = TimeGrid::uniform(1.0, 64);
    const BrownianMotion bm{1.0, 1.0, NoBoundary{}};
    const auto path = Path(grid, std::vector<double>(65, 1.0));
    const auto q = analytic_qv(bm, grid, path);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(q[k] == grid[k]);

    const auto q2 = analytic_qv(BrownianMotion{1.0, 2.0, NoBoundary{}}, grid, path);
    CHECK(q2[grid.index_of(0.25)] == 1.0);

    const auto qf = analytic_qv(LinearFV{}, grid, path);
    for (double v : qf.values()) CHECK(v == 0.0);
}

TEST_CASE("analytic QV stops growing once the path is absorbed") {
    const auto grid = TimeGrid::uniform(1.0, 4);
    const Path p(grid, {1.0, 0.5, 0.01, 0.01, 0.01});
    const auto q = analytic_qv(BrownianMotion{1.0, 1.0, Absorb{0.01}}, grid, p);
    CHECK(q.values() == std::vector<double>{0.0, 0.25, 0.5, 0.5, 0.5});
}

TEST_CASE("QV curve must start at zero and be non-decreasing") {
    const auto grid = TimeGrid::uniform(1.0, 2);
    CHECK_THROWS_AS(QVCurve(grid, {0.1, 0.2, 0.3}), structural_error);
    CHECK_THROWS_AS(QVCurve(grid, {0.0, 0.2, 0.1}), structural_error);
}

TEST_CASE("analytic ladder matches the inverted closed form") {
    const std::size_t M = 1 << 12;
    const auto grid = TimeGrid::uniform(1.0, M);
    const auto path = Path(grid, std::vector<double>(M + 1, 1.0));
    const auto qv = analytic_qv(BrownianMotion{1.0, 1.0, NoBoundary{}}, grid, path);
    const auto L = stopping_ladder(qv, 0.5, 0.5, 64);
    CHECK(L.at(1) == 0.5);
    CHECK(L.at(4) == 0.25);
    CHECK(L.at(2) >= 0.5 / std::sqrt(2.0));
    CHECK(L.at(2) - 0.5 / std::sqrt(2.0) < 1.0 / M);
    for (std::size_t n = 1; n <= 65; ++n) {
        const double level = 0.5 * std::pow(static_cast<double>(n), -0.5);
        CHECK(L.index_at(n) == oracle::analytic_hit_index(level, 1.0, 1.0, M));
    }
    CHECK(L.rho == 0.0);
    CHECK(L.rho_index == 0);
}

TEST_CASE("ladder times are non-increasing in n") {
    const auto grid = TimeGrid::uniform(1.0, 4096);
    const auto p = simulate(BrownianMotion{}, grid, {9, 0});
    const auto L = stopping_ladder(realized_qv(p), 0.3, 0.5, 64);
    for (std::size_t n = 1; n <= 64; ++n) CHECK(L.at(n + 1) <= L.at(n));
}

TEST_CASE("zero QV puts every ladder time at T") {
    const auto grid = TimeGrid::uniform(2.0, 8);
    const QVCurve q(grid, std::vector<double>(9, 0.0));
    const auto L = stopping_ladder(q, 0.5, 0.5, 4);
    for (double r : L.rho_n) CHECK(r == 2.0);
    CHECK(L.rho == 2.0);
    const auto D = degenerate_ladder(grid, 0.5, 4);
    CHECK(D.rho_n == L.rho_n);
    CHECK(D.rho == 2.0);
}

TEST_CASE("rho is the left end of the first step with positive QV") {
    const auto grid = TimeGrid::uniform(1.0, 4);
    const QVCurve q(grid, {0.0, 0.0, 0.1, 0.2, 0.6});
    const auto L = stopping_ladder(q, 0.5, 0.5, 2);
    CHECK(L.rho == 0.25);
    CHECK(L.at(1) == 1.0);
}

TEST_CASE("ladder parameter validation") {
    const auto grid = TimeGrid::uniform(1.0, 4);
    const QVCurve q(grid, {0.0, 0.1, 0.2, 0.3, 0.4});
    auto field_of = [&](double c, double g, std::size_t N) {
        try {
            stopping_ladder(q, c, g, N);
        } catch (const parameter_error& e) {
            return e.field();
        }
        return std::string{};
    };
    CHECK(field_of(0.5, 1.5, 4) == "construction.gamma");
    CHECK(field_of(0.5, 0.0, 4) == "construction.gamma");
    CHECK(field_of(0.0, 0.5, 4) == "construction.c");
    CHECK(field_of(0.5, 0.5, 0) == "construction.N");
}

// The realized-QV error at time t has sd sigma^2 sqrt(2 t dt), i.e.
// sqrt(2 t / dt) grid steps, about 256 steps at t = 1/2 and M = 2^16. The
// realized ladder is compared against the analytic one within 4 of those sd.
TEST_CASE("realized and analytic ladders agree within the estimator noise") {
    const std::size_t M = 1 << 16;
    const auto grid = TimeGrid::uniform(1.0, M);
    const double dt = 1.0 / M;
    int good = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        const auto p = simulate(BrownianMotion{10.0, 1.0, NoBoundary{}}, grid, {static_cast<std::uint64_t>(s), 0});
        const auto La = stopping_ladder(analytic_qv(BrownianMotion{10.0, 1.0, NoBoundary{}}, grid, p), 0.5, 0.5, 32);
        const auto Lr = stopping_ladder(realized_qv(p), 0.5, 0.5, 32);
        bool ok = true;
        for (std::size_t n = 1; n <= 32; ++n) {
            const double t = La.at(n);
            const double steps = 4.0 * std::sqrt(2.0 * t / dt) + 2.0;
            const double gap = std::abs(static_cast<double>(Lr.index_at(n)) - static_cast<double>(La.index_at(n)));
            ok = ok && gap <= steps;
        }
        if (ok) ++good;
    }
    CHECK(good >= seeds * 9 / 10);
}
