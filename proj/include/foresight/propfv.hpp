#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "foresight/config.hpp"
#include "foresight/ledger.hpp"
#include "foresight/model.hpp"
#include "foresight/parallel.hpp"
#include "foresight/quadvar.hpp"
#include "foresight/rng.hpp"
#include "foresight/stieltjes.hpp"

namespace foresight {

// Non-negative step function with 1..max_pieces pieces on grid knots and a
// positive value somewhere.
inline StepFunction random_step_function(const TimeGrid& grid, StreamRng& rng, std::size_t max_pieces) {
    const std::size_t last = grid.size() - 1;
    const std::size_t pieces =
        static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(std::min(max_pieces, last))));
    std::set<std::size_t> picked;
    while (picked.size() < pieces + 1) picked.insert(static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(last))));
    std::vector<double> knots;
    for (std::size_t i : picked) knots.push_back(grid[i]);
    std::vector<double> values(pieces);
    bool any = false;
    for (double& v : values) {
        v = rng.uniform() < 0.3 ? 0.0 : 2.0 * rng.uniform();
        any = any || v > 0.0;
    }
    if (!any) values[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pieces) - 1))] = 0.1 + rng.uniform();
    return StepFunction(std::move(knots), std::move(values));
}

// Finite-variation model of the given kind. Path 0 keeps the base
// parameters; later paths draw perturbed ones from `rng`.
inline ModelSpec fv_model(const std::string& kind, double s0, std::size_t path_index, StreamRng& rng,
                          const ModelSpec* base = nullptr) {
    const bool jitter = path_index > 0;
    if (kind == "linear") {
        LinearFV m{s0, 1.0};
        if (base && std::holds_alternative<LinearFV>(*base)) m = std::get<LinearFV>(*base);
        if (jitter) m.slope = -0.5 * m.s0 + 2.5 * m.s0 * rng.uniform();
        return m;
    }
    if (kind == "sinusoid") {
        SinusoidFV m{s0, 0.5 * s0, 1.0};
        if (base && std::holds_alternative<SinusoidFV>(*base)) m = std::get<SinusoidFV>(*base);
        if (jitter) {
            m.amplitude = m.s0 * (0.1 + 0.8 * rng.uniform());
            m.frequency = 0.5 + 2.5 * rng.uniform();
        }
        return m;
    }
    if (kind == "monotone") {
        MonotoneRandomFV m{s0, 0.5};
        if (base && std::holds_alternative<MonotoneRandomFV>(*base)) m = std::get<MonotoneRandomFV>(*base);
        if (jitter) m.step_scale = m.s0 * (0.1 + 1.9 * rng.uniform());
        return m;
    }
    throw parameter_error("unknown finite-variation kind '" + kind + "'", "prop_fv.kinds");
}

struct PropFVCase {
    std::string kind;
    std::size_t path_index = 0;
    std::size_t strategy_index = 0;
    bool positive_somewhere = false;
    bool found = false;
    double witness = -1.0;
    double max_ibp_residual = 0.0;
};

struct PropFVReport {
    std::vector<PropFVCase> cases;
    std::vector<double> path_realized_qv; // per (kind, path)
    std::size_t positive_cases = 0;
    std::size_t found_cases = 0;
    double max_ibp_residual = 0.0;
    double ibp_tolerance = 1e-10;

    bool passes() const noexcept { return found_cases == positive_cases && max_ibp_residual <= ibp_tolerance; }
};

inline PropFVReport run_prop_fv(const RunConfig& cfg) {
    validate(cfg);
    if (!is_finite_variation(cfg.model))
        throw parameter_error("prop-fv requires a finite-variation model", "model.kind");
    const TimeGrid grid = TimeGrid::uniform(cfg.grid.T, cfg.grid.M);
    const double s0 = std::visit([](const auto& m) { return m.s0; }, cfg.model);
    const auto& pc = cfg.prop_fv;

    PropFVReport rep;
    rep.ibp_tolerance = cfg.verify.identity_tol;
    const std::size_t per_kind = pc.paths * pc.strategies;
    rep.cases.resize(pc.kinds.size() * per_kind);
    rep.path_realized_qv.resize(pc.kinds.size() * pc.paths);

    parallel_for(pc.kinds.size() * pc.paths, [&](std::size_t job) {
        const std::size_t ki = job / pc.paths, p = job % pc.paths;
        const std::uint64_t seed = cfg.seeds.first + p;
        StreamRng prng(SeedSpec{seed, 1000 + ki});
        const ModelSpec model = fv_model(pc.kinds[ki], s0, p, prng, &cfg.model);
        const Path path = simulate(model, grid, SeedSpec{seed, cfg.seeds.stream});
        rep.path_realized_qv[job] = realized_qv(path).terminal();

        for (std::size_t j = 0; j < pc.strategies; ++j) {
            StreamRng rng(SeedSpec{seed, (std::uint64_t{1} << 32) + ki * pc.strategies + j});
            const StepFunction phi = random_step_function(grid, rng, pc.max_pieces);
            PropFVCase c;
            c.kind = pc.kinds[ki];
            c.path_index = p;
            c.strategy_index = j;
            c.positive_somewhere = phi.positive_somewhere();
            const auto res = verify_prop_finite(path, phi);
            c.found = res.found;
            c.witness = res.witness.value_or(-1.0);
            const auto V = rs_integral_series(phi, path);
            const auto SdPhi = integral_path_wrt_step_series(path, phi);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double r = V[k] - (phi(grid[k]) * path[k] - phi(0.0) * path.front() - SdPhi[k]);
                c.max_ibp_residual = std::max(c.max_ibp_residual, std::abs(r));
            }
            rep.cases[ki * per_kind + p * pc.strategies + j] = c;
        }
    });

    for (const auto& c : rep.cases) {
        if (c.positive_somewhere) ++rep.positive_cases;
        if (c.positive_somewhere && c.found) ++rep.found_cases;
        rep.max_ibp_residual = std::max(rep.max_ibp_residual, c.max_ibp_residual);
    }
    return rep;
}

} // namespace foresight
