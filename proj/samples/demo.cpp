// Builds the strategy on one Brownian path and prints its book at a few
// times.

#include <cstdio>

#include "foresight/foresight.hpp"

int main(int argc, char** argv) {
    using namespace foresight;
    RunConfig cfg;
    cfg.grid.M = 4096;

    // first seed whose scaled path stays below 1
    std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 0;
    auto r = run_pipeline(cfg, seed);
    while (!r.flags.in_Ac) r = run_pipeline(cfg, ++seed);

    std::printf("seed %llu  sup S = %.4f  <S>_T = %.4f  c = %.4f\n", static_cast<unsigned long long>(seed),
                r.flags.sup_S, r.flags.qv_T, r.ladder.c);
    std::printf("rho = %g  rho_1 = %.4f  rho_65 = %.6f\n", r.ladder.rho, r.ladder.at(1), r.ladder.at(65));
    std::printf("H_64 = %.6f  V_T = %.6f  3/2 (1 - H_64) = %.6f  eps(64) = %.6f\n\n", r.H.last(), r.report.V_T,
                r.report.expected_V_T, r.report.epsilon_N);

    std::printf("%8s %10s %10s %10s %10s\n", "t", "S", "phi", "psi", "V");
    const auto& L = r.ledger;
    for (std::size_t k = 0; k < L.grid.size(); k += L.grid.size() / 16)
        std::printf("%8.4f %10.6f %10.6f %10.6f %10.6f\n", L.grid[k], L.S[k], L.phi[k], L.psi[k], L.V[k]);
    const std::size_t last = L.grid.size() - 1;
    std::printf("%8.4f %10.6f %10.6f %10.6f %10.6f\n", L.grid[last], L.S[last], L.phi[last], L.psi[last], L.V[last]);
    return r.report.all_pass() ? 0 : 1;
}
