// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "foresight/foresight.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace foresight;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(const char* name, bool ok, const std::string& detail) {
    std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::string& args, const fs::path& cwd) {
    const std::string cmd = "cd " + cwd.string() + " && " + FORESIGHT_CLI + " " + args + " > /dev/null 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------

void terminal_identity() {
    const RunConfig cfg;
    const auto t0 = Clock::now();
    const auto s = monte_carlo(cfg);
    const double secs = seconds_since(t0);
    std::size_t bad = 0;
    for (const auto& o : s.outcomes)
        if (o.in_Ac && !(o.residual <= 1e-10 * std::max(1.0, o.V_T))) ++bad;

    // (3/2)(1 - H_N) non-decreasing in N on fixed A_c paths
    std::size_t paths = 0, non_monotone = 0;
    double mean16 = 0.0, mean256 = 0.0;
    for (const auto& o : s.outcomes) {
        if (!o.in_Ac || paths == 25) continue;
        ++paths;
        RunConfig c = cfg;
        double prev = -1.0;
        for (std::size_t N : {16, 32, 64, 128, 256}) {
            c.construction.N = N;
            const auto r = run_pipeline(c, o.seed);
            const double v = 1.5 * (1.0 - r.H.last());
            if (v < prev || v >= 1.5) ++non_monotone;
            if (N == 16) mean16 += v;
            if (N == 256) mean256 += v;
            prev = v;
        }
    }
    const bool ok = s.paths_in_Ac >= 50 && bad == 0 && secs <= 30.0 && non_monotone == 0 && paths > 0;
    verdict("terminal-wealth identity", ok,
            fmt("%llu/1000 in A_c, %zu residual failures, max residual %.2e, %.1fs; N 16->256 on %zu paths: "
                "mean %.4f -> %.4f, %zu non-monotone",
                static_cast<unsigned long long>(s.paths_in_Ac), bad, s.max_identity_residual, secs, paths,
                mean16 / std::max<std::size_t>(paths, 1), mean256 / std::max<std::size_t>(paths, 1), non_monotone));
}

void inequality_suite() {
    const RunConfig cfg;
    RunConfig deeper = cfg;
    deeper.construction.N = 128;
    const std::size_t n = cfg.seeds.count;
    struct Row {
        bool in = false, a = false, b = false, c = false, d = false, eps_drop = false;
        double eps64 = 0.0;
        std::size_t covered = 0;
    };
    std::vector<Row> rows(n);
    parallel_for(n, [&](std::size_t i) {
        const auto r = run_pipeline(cfg, cfg.seeds.first + i);
        Row& row = rows[i];
        row.in = r.flags.in_Ac;
        if (!row.in) return;
        const auto& rep = r.report;
        const auto& L = r.ledger;
        row.a = L.phi[0] == 0.0;
        for (double h : L.phi) row.a = row.a && h >= 0.0;
        // (b) psi >= 0 on pieces with H_n >= 3 H_N
        row.b = true;
        for (const auto& p : r.phi.pieces()) {
            if (p.empty() || !(r.H.H[p.n - 1] >= 3.0 * r.H.last())) continue;
            row.covered += p.holding > 0.0;
            for (std::size_t k = p.begin_index + 1; k <= p.end_index; ++k) row.b = row.b && L.psi[k] >= -1e-12;
        }
        row.eps64 = rep.epsilon_N;
        row.c = true;
        for (double v : L.psi) row.c = row.c && v >= -row.eps64 - 1e-12;
        row.d = true;
        for (std::size_t k = r.ladder.index_at(1) + 1; k < L.grid.size(); ++k) row.d = row.d && L.V[k] > L.phiS[k];
        const auto r128 = run_pipeline(deeper, cfg.seeds.first + i);
        row.eps_drop = r128.report.epsilon_N < row.eps64;
    });
    std::size_t in = 0, a = 0, b = 0, c = 0, d = 0, drop = 0, covered = 0;
    double eps_max = 0.0, eps_mean = 0.0;
    for (const auto& r : rows) {
        if (!r.in) continue;
        ++in;
        a += r.a;
        b += r.b;
        c += r.c;
        d += r.d;
        drop += r.eps_drop;
        covered += r.covered;
        eps_max = std::max(eps_max, r.eps64);
        eps_mean += r.eps64;
    }
    const bool ok = in > 0 && a == in && b == in && c == in && d == in && drop * 100 >= 95 * in;
    verdict("inequality suite (a)-(d)", ok,
            fmt("%zu A_c paths: (a) %zu (b) %zu [%zu held pieces with H_n >= 3 H_N] (c) %zu (d) %zu; eps(64) mean %.4f max %.4f; "
                "eps(128) < eps(64) on %.1f%%",
                in, a, b, covered, c, d, eps_mean / std::max<std::size_t>(in, 1), eps_max, 100.0 * drop / std::max<std::size_t>(in, 1)));
}

void prop_finite() {
    RunConfig cfg;
    cfg.model = LinearFV{};
    const auto t0 = Clock::now();
    const auto r = run_prop_fv(cfg);
    const double secs = seconds_since(t0);
    const bool ok = r.cases.size() == 3000 && r.positive_cases == r.cases.size() &&
                    r.found_cases == r.positive_cases && r.max_ibp_residual <= 1e-10 && secs <= 10.0;
    verdict("finite-variation witnesses", ok,
            fmt("%zu/%zu witnesses over %zu cases, max IBP residual %.2e, %.2fs", r.found_cases, r.positive_cases,
                r.cases.size(), r.max_ibp_residual, secs));
}

void lemma_seq() {
    const RunConfig cfg;
    const auto t0 = Clock::now();
    const auto r = lemmas::run_lemma_seq(cfg);
    const double secs = seconds_since(t0);
    const bool ok = r.passes() && r.triples == 1000 && r.sweep.size() == 100 && secs <= 5.0;
    verdict("sequence lemma", ok,
            fmt("%zu violations over %zu eligible indices, max telescoping residual %.2e, x_1 = %.17g, %.2fs",
                r.total_violations, r.total_checked, r.max_telescoping_residual, r.anchor_x1, secs));
}

void lemma_bm() {
    const RunConfig cfg;
    const auto t0 = Clock::now();
    const auto r = lemmas::run_lemma_bm(cfg);
    const double secs = seconds_since(t0);
    const auto& l = r.ladder;
    std::string inc;
    for (std::size_t i = 0; i < l.increments.size(); ++i)
        inc += fmt("%s%.2f+-%.2f", i ? ", " : "", l.increments[i], l.increment_std_errors[i]);
    std::string z;
    for (std::size_t i = 0; i < l.drop_z_scores.size(); ++i) z += fmt("%s%.1f", i ? ", " : "", l.drop_z_scores[i]);
    const bool ok = r.bound_failures == 0 && l.strictly_decreasing && secs <= 60.0;
    verdict("Brownian lemma diagnostics", ok,
            fmt("bound failures %zu over 9 x 1e6; increments E(S_2N - S_N) = [%s], drop z = [%s]; %.1fs",
                r.bound_failures, inc.c_str(), z.c_str(), secs));
}

void qv_estimator() {
    const std::size_t M = 1 << 14;
    const auto grid = TimeGrid::uniform(1.0, M);
    std::vector<char> good(1000, 0);
    // standard Brownian increments; the level shift keeps the path positive
    // and leaves the quadratic variation unchanged
    parallel_for(1000, [&](std::size_t s) {
        const auto p = simulate(BrownianMotion{10.0, 1.0, NoBoundary{}}, grid, {s, 0});
        good[s] = std::abs(realized_qv(p).terminal() - 1.0) <= 0.05;
    });
    std::size_t n = 0;
    for (char g : good) n += g;
    verdict("QV estimator", n >= 950, fmt("%zu/1000 seeds with |qv_T - 1| <= 0.05", n));
}

void figure1(const fs::path& work) {
    const auto dir = work / "fig1";
    fs::create_directories(dir);
    const int code = cli("figure1 --out out", dir);
    bool ok = code == 0;
    std::string detail = fmt("exit %d", code);
    if (ok) {
        const auto meta = json::parse(slurp(dir / "out" / "fig1_meta.json"));
        const auto S = read_csv(dir / "out" / "fig1_S.csv");
        const auto V = read_csv(dir / "out" / "fig1_V.csv");
        const auto psi = read_csv(dir / "out" / "fig1_psi.csv");
        const auto phi = read_csv(dir / "out" / "fig1_phi.csv");
        const double eps = meta["epsilon_N"], rho = meta["rho"], rho1 = meta["rho_1"];
        bool aligned = S.size() == V.size() && V.size() == psi.size() && psi.size() == phi.size();
        bool a = phi[0][1] == 0.0, c = true, d = true, book = true, sup = true;
        for (std::size_t k = 0; aligned && k < S.size(); ++k) {
            aligned = aligned && S[k][0] == V[k][0] && V[k][0] == psi[k][0] && psi[k][0] == phi[k][0];
            a = a && phi[k][1] >= 0.0;
            c = c && psi[k][1] >= -eps - 1e-12;
            book = book && std::abs(V[k][1] - (psi[k][1] + phi[k][1] * S[k][1])) <= 1e-12;
            sup = sup && S[k][1] <= 1.0;
            if (S[k][0] > rho1) d = d && V[k][1] > phi[k][1] * S[k][1];
        }
        const bool b = meta["report"]["min_psi_guaranteed"].get<double>() >= -1e-12;
        ok = aligned && a && b && c && d && book && sup && rho == 0.0;
        detail += fmt(", seed %d, rho = %g, rho_1 = %.4f, eps(N) = %.4f; aligned %d (a) %d (b) %d (c) %d (d) %d, "
                      "V = psi + phi S %d, sup S <= 1 %d",
                      meta["seed"].get<int>(), rho, rho1, eps, aligned, a, b, c, d, book, sup);
    }
    verdict("figure 1 data", ok, detail);
}

void determinism(const fs::path& work) {
    const auto dir = work / "det";
    fs::create_directories(dir);
    std::ofstream(dir / "fv.cfg") << "model.kind = monotone\n";
    std::ofstream(dir / "bm.cfg") << "lemma.bm.samples = 400\nlemma.bm.bound_n = 10000\n";
    const std::vector<std::string> commands = {
        "run --seed 42", "mc", "figure1", "prop-fv --config fv.cfg", "lemma seq", "lemma bm --config bm.cfg"};
    std::size_t identical = 0;
    std::string bad;
    for (const auto& c : commands) {
        fs::remove_all(dir / "out");
        cli(c + " --out out", dir);
        const auto first = read_tree(dir / "out");
        fs::remove_all(dir / "out");
        cli(c + " --out out", dir);
        const auto second = read_tree(dir / "out");
        if (!first.empty() && first == second)
            ++identical;
        else
            bad += " [" + c + "]";
    }
    verdict("determinism", identical == commands.size(),
            fmt("%zu/%zu commands byte-identical on re-run%s", identical, commands.size(), bad.c_str()));
}

} // namespace

int main() {
    const auto work = fs::temp_directory_path() / "foresight_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);
    std::printf("threads: %zu\n", worker_count());
    terminal_identity();
    inequality_suite();
    prop_finite();
    lemma_seq();
    lemma_bm();
    qv_estimator();
    figure1(work);
    determinism(work);
    std::printf("%d criteria failing\n", failures);
    return failures;
}
