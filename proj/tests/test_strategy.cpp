#include <catch_amalgamated.hpp>

#include <cmath>

#include "foresight/model.hpp"
#include "foresight/quadvar.hpp"
#include "foresight/strategy.hpp"

using namespace foresight;
using Catch::Matchers::WithinAbs;

namespace {

// Ladder with rho_n at the given grid indices (n = 1..N+1).
StoppingLadder ladder_at(const TimeGrid& g, std::vector<std::size_t> idx) {
    StoppingLadder L;
    L.c = 0.5;
    L.depth = idx.size() - 1;
    for (auto k : idx) {
        L.rho_n_index.push_back(k);
        L.rho_n.push_back(g[k]);
    }
    return L;
}

Path path_of(const TimeGrid& g, std::vector<double> v) { return Path(g, std::move(v)); }

} // namespace

TEST_CASE("event detection") {
    const auto g = TimeGrid::uniform(1.0, 8);
    const auto flat = path_of(g, std::vector<double>(9, 0.5));
    CHECK_FALSE(detect_event(flat, realized_qv(flat), 0.1).in_Ac);

    const auto line = simulate(LinearFV{1.0, 1.0}, g, {0, 0});
    const auto f = detect_event(line, realized_qv(line), 0.0);
    CHECK(f.sup_S == 2.0);
    CHECK_FALSE(f.in_Ac);
}

TEST_CASE("rescaled Brownian paths land in A_c with positive frequency") {
    const auto g = TimeGrid::uniform(1.0, 2048);
    int hits = 0, low = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto p = rescale(simulate(BrownianMotion{}, g, {s, 0}), 0.4);
        const auto q = realized_qv(p);
        const auto f = detect_event(p, q, q.terminal() / 2.0);
        if (p.sup() <= 1.0) ++low;
        if (f.in_Ac) ++hits;
        if (p.sup() <= 1.0 && q.terminal() > 0.0) REQUIRE(f.in_Ac);
    }
    CHECK(hits > 0);
    CHECK(hits == low);
}

TEST_CASE("increments on a hand path") {
    const auto g = TimeGrid::uniform(1.0, 4);
    // rho_3 = 0.25, rho_2 = 0.5, rho_1 = 0.75
    const auto p = path_of(g, {1.0, 0.8, 1.0, 0.9, 1.0});
    const auto inc = increments(p, ladder_at(g, {3, 2, 1}));
    CHECK(inc.Z[0] == 0.0);
    CHECK_THAT(inc.Z[1], WithinAbs(0.2, 1e-15));
}

TEST_CASE("increment signs follow monotonicity") {
    const auto g = TimeGrid::uniform(1.0, 8);
    const auto L = ladder_at(g, {8, 6, 4, 2, 1});
    const auto down = path_of(g, {2.0, 1.9, 1.8, 1.7, 1.6, 1.5, 1.4, 1.3, 1.2});
    const auto up = path_of(g, {1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8});
    for (double z : increments(up, L).Z) CHECK(z > 0.0);
    for (double z : increments(down, L).Z) CHECK(z == 0.0);
}

TEST_CASE("weights") {
    const auto w0 = weights(Increments{{0.0, 0.0, 0.0}});
    for (double h : w0.H) CHECK(h == 1.0);
    CHECK_THAT(weights(Increments{{1.0}}).H[0], WithinAbs(0.6, 1e-15));

    // Z_k = k^-1/2: H decreasing and partial sums of H levelling off
    std::vector<double> Z;
    for (int k = 1; k <= 20000; ++k) Z.push_back(1.0 / std::sqrt(static_cast<double>(k)));
    const auto w = weights(Increments{Z});
    for (std::size_t n = 1; n < w.H.size(); ++n) REQUIRE(w.H[n] < w.H[n - 1]);
    double s5k = 0.0, s10k = 0.0, s20k = 0.0;
    for (std::size_t n = 0; n < w.H.size(); ++n) {
        if (n < 5000) s5k += w.H[n];
        if (n < 10000) s10k += w.H[n];
        s20k += w.H[n];
    }
    CHECK(s10k - s5k < 1e-6 * s5k);
    CHECK(s20k - s10k <= s10k - s5k);

    CHECK_THROWS_AS(weights(Increments{{1.0}}, 1.0), parameter_error);
}

TEST_CASE("strategy off A_c is identically zero") {
    const auto g = TimeGrid::uniform(1.0, 8);
    const auto L = ladder_at(g, {8, 4, 2});
    const Increments inc{{0.3, 0.2}};
    const auto phi = build_phi(EventFlags{false, 0.9, 1.0, 0.5}, L, inc, weights(inc), g);
    CHECK(phi.is_zero());
    CHECK(total_variation(phi) == 0.0);
    for (double v : phi.series()) CHECK(v == 0.0);
}

TEST_CASE("single active piece") {
    const auto g = TimeGrid::uniform(1.0, 8);
    const auto L = ladder_at(g, {6, 3, 1});
    const Increments inc{{0.3, 0.0}};
    const auto w = weights(inc);
    const auto phi = build_phi(EventFlags{true, 0.9, 1.0, 0.5}, L, inc, w, g);
    const double h1 = w.H[0];
    CHECK(evaluate_phi(phi, g[3]) == 0.0);
    CHECK(evaluate_phi(phi, g[4]) == h1);
    CHECK(evaluate_phi(phi, g[6]) == h1);
    CHECK(evaluate_phi(phi, g[7]) == 0.0);
    CHECK(evaluate_phi(phi, 0.0) == 0.0);
    CHECK_THAT(total_variation(phi), WithinAbs(2.0 * h1, 1e-15));
}

TEST_CASE("evaluation at ladder boundaries") {
    const auto g = TimeGrid::uniform(1.0, 8);
    const auto L = ladder_at(g, {8, 6, 3});
    const Increments inc{{0.3, 0.5}};
    const auto w = weights(inc);
    const auto phi = build_phi(EventFlags{true, 0.9, 1.0, 0.5}, L, inc, w, g);
    // (rho_2, rho_1] = (6, 8] holds H_1, (rho_3, rho_2] = (3, 6] holds H_2
    CHECK(evaluate_phi(phi, g[8]) == w.H[0]);
    CHECK(evaluate_phi(phi, g[6]) == w.H[1]);
    CHECK(evaluate_phi(phi, g[7]) == w.H[0]);
    CHECK(evaluate_phi(phi, g[3]) == 0.0);
    const double h1 = w.H[0], h2 = w.H[1];
    CHECK_THAT(total_variation(phi), WithinAbs(h2 + std::abs(h1 - h2) + h1, 1e-15));
}

TEST_CASE("total variation of seeded strategies is bounded by twice the weight sum") {
    const auto g = TimeGrid::uniform(1.0, 4096);
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto p = rescale(simulate(BrownianMotion{}, g, {s, 0}), 0.4);
        const auto q = realized_qv(p);
        const auto f = detect_event(p, q, q.terminal() / 2.0);
        const auto L = stopping_ladder(q, q.terminal() / 2.0, 0.5, 64);
        const auto inc = increments(p, L);
        const auto w = weights(inc);
        const auto phi = build_phi(f, L, inc, w, g);
        double bound = 0.0;
        for (double h : w.H) bound += 2.0 * h;
        REQUIRE(total_variation(phi) <= bound + 1e-12);
    }
}

TEST_CASE("truncation safety holds on the guaranteed region") {
    // Z large early so H_N drops well below H_n for small n
    const Increments inc{{0.0, 0.9, 0.8, 0.9, 0.7, 0.9, 0.8, 0.9}};
    const auto w = weights(inc);
    const auto ts = truncation_safety(inc, w, 1.0);
    CHECK(ts.checked > 0);
    CHECK(ts.violations.empty());
}
