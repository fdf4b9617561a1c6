#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "foresight/foresight.hpp"
#include "foresight/io.hpp"

namespace fs = std::filesystem;
using foresight::io::json;

namespace {

enum Exit : int { pass = 0, verification_failure = 1, config_error = 2, no_event_seed = 3 };

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string which;
};

// Files are buffered and flushed once the command has its results.
class Writer {
public:
    explicit Writer(fs::path dir) : dir_(std::move(dir)) {}
    void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }
    void flush() const {
        for (const auto& [name, content] : files_) foresight::io::write_file(dir_ / name, content);
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

void report_error(const char* kind, const std::string& message, const std::string& field = {}) {
    json j{{"error", kind}, {"message", message}};
    if (!field.empty()) j["field"] = field;
    std::cerr << j.dump() << '\n';
}

foresight::RunConfig load(const Options& o) {
    auto cfg = o.config.empty() ? foresight::RunConfig{} : foresight::load_config(o.config);
    if (o.seed) cfg.seeds.first = *o.seed;
    if (o.out) cfg.output_dir = *o.out;
    foresight::validate(cfg);
    return cfg;
}

int cmd_run(const foresight::RunConfig& cfg) {
    const auto r = foresight::run_pipeline(cfg, cfg.seeds.first);
    Writer w(cfg.output_dir);
    w.add("path.csv", foresight::io::path_csv(r.path));
    w.add("qv.csv", foresight::io::qv_csv(r.qv));
    w.add("ledger.csv", foresight::io::ledger_csv(r.ledger));
    w.add("construction.json", foresight::io::dump(foresight::io::construction_json(cfg, r)));
    w.add("report.json", foresight::io::dump(foresight::io::report_json(cfg, r)));
    w.flush();
    const bool ok = r.report.all_pass();
    std::cout << "seed " << r.seed << (r.report.in_Ac ? " in A_c" : " outside A_c (phi = 0)")
              << ", V_T = " << foresight::format_double(r.report.V_T) << (ok ? ", all checks pass" : ", CHECK FAILED")
              << '\n';
    return ok ? pass : verification_failure;
}

int cmd_mc(const foresight::RunConfig& cfg) {
    const auto s = foresight::monte_carlo(cfg);
    Writer w(cfg.output_dir);
    w.add("mc_summary.json", foresight::io::dump(foresight::io::mc_json(cfg, s)));
    w.flush();
    std::cout << s.paths_in_Ac << "/" << s.paths_total << " paths in A_c, strict on "
              << s.strict_on_Ac.successes << ", check failures " << s.check_failures << '\n';
    return s.passes() ? pass : verification_failure;
}

int cmd_figure1(const foresight::RunConfig& cfg) {
    const auto* bm = std::get_if<foresight::BrownianMotion>(&cfg.model);
    if (!bm) {
        report_error("parameter_error", "figure1 requires the Brownian model", "model.kind");
        return config_error;
    }
    if (bm->s0 != 1.0) {
        report_error("parameter_error", "figure1 requires a Brownian path started at one", "model.s0");
        return config_error;
    }
    if (cfg.grid.T != 1.0) {
        report_error("parameter_error", "figure1 requires T = 1", "grid.T");
        return config_error;
    }
    for (std::uint64_t i = 0; i < cfg.seeds.count; ++i) {
        const auto r = foresight::run_pipeline(cfg, cfg.seeds.first + i);
        if (!r.flags.in_Ac) continue;
        const auto& L = r.ledger;
        Writer w(cfg.output_dir);
        w.add("fig1_S.csv", foresight::io::series_csv(L.grid, "S", L.S));
        w.add("fig1_V.csv", foresight::io::series_csv(L.grid, "V", L.V));
        w.add("fig1_psi.csv", foresight::io::series_csv(L.grid, "psi", L.psi));
        w.add("fig1_phi.csv", foresight::io::series_csv(L.grid, "phi", L.phi));
        json meta = foresight::io::envelope(cfg, "fig1_meta");
        meta["seed"] = r.seed;
        meta["c"] = r.ladder.c;
        meta["gamma"] = r.ladder.gamma;
        meta["N"] = r.ladder.depth;
        meta["epsilon_N"] = r.report.epsilon_N;
        meta["rho"] = r.ladder.rho;
        meta["rho_1"] = r.ladder.at(1);
        meta["T"] = cfg.grid.T;
        meta["report"] = foresight::io::report_fields(r.report);
        meta["files"] = {{"S", "fig1_S.csv"}, {"V", "fig1_V.csv"}, {"psi", "fig1_psi.csv"}, {"phi", "fig1_phi.csv"}};
        w.add("fig1_meta.json", foresight::io::dump(meta));
        w.flush();
        const bool ok = r.report.all_pass();
        std::cout << "figure1 seed " << r.seed << ", rho = " << foresight::format_double(r.ladder.rho)
                  << ", epsilon_N = " << foresight::format_double(r.report.epsilon_N)
                  << (ok ? ", all checks pass" : ", CHECK FAILED") << '\n';
        return ok ? pass : verification_failure;
    }
    json j{{"error", "no_event_seed"},
           {"message", "no seed in range lands in A_c"},
           {"seeds", {{"first", cfg.seeds.first}, {"count", cfg.seeds.count}}},
           {"hint", "widen seeds.count or lower construction.prescale"}};
    std::cerr << j.dump() << '\n';
    return no_event_seed;
}

int cmd_prop_fv(const foresight::RunConfig& cfg) {
    const auto r = foresight::run_prop_fv(cfg);
    Writer w(cfg.output_dir);
    w.add("prop_fv.json", foresight::io::dump(foresight::io::prop_fv_json(cfg, r)));
    w.flush();
    std::cout << r.found_cases << "/" << r.positive_cases << " witnesses found, max IBP residual "
              << foresight::format_double(r.max_ibp_residual) << '\n';
    return r.passes() ? pass : verification_failure;
}

int cmd_lemma(const foresight::RunConfig& cfg, const std::string& which) {
    Writer w(cfg.output_dir);
    bool ok = false;
    if (which == "seq") {
        const auto r = foresight::lemmas::run_lemma_seq(cfg);
        w.add("lemma_seq.json", foresight::io::dump(foresight::io::lemma_seq_json(cfg, r)));
        ok = r.passes();
        std::cout << "lemma seq: " << r.total_violations << " violations over " << r.total_checked
                  << " checked indices, max telescoping residual "
                  << foresight::format_double(r.max_telescoping_residual) << '\n';
    } else {
        const auto r = foresight::lemmas::run_lemma_bm(cfg);
        w.add("lemma_bm.json", foresight::io::dump(foresight::io::lemma_bm_json(cfg, r)));
        ok = r.passes();
        std::cout << "lemma bm: " << r.bound_failures << " bound failures, ladder "
                  << (r.ladder.passes() ? "passes" : "fails") << '\n';
    }
    w.flush();
    return ok ? pass : verification_failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Foresight arbitrage simulation and verification"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Config file (flat section.key = value)");
        sub->add_option("--seed", o.seed, "Seed (first seed of the range)");
        sub->add_option("--out", o.out, "Output directory");
    };
    auto* run = app.add_subcommand("run", "Single-seed pipeline");
    auto* mc = app.add_subcommand("mc", "Monte Carlo sweep over the seed range");
    auto* fig = app.add_subcommand("figure1", "Series for the four-panel illustration");
    auto* pfv = app.add_subcommand("prop-fv", "Finite-variation witness search");
    auto* lem = app.add_subcommand("lemma", "Sequence and Brownian lemma diagnostics");
    for (auto* s : {run, mc, fig, pfv, lem}) common(s);
    lem->add_option("which", o.which, "seq or bm")->required()->check(CLI::IsMember({"seq", "bm"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        report_error("usage_error", e.what());
        return config_error;
    }

    try {
        const auto cfg = load(o);
        if (run->parsed()) return cmd_run(cfg);
        if (mc->parsed()) return cmd_mc(cfg);
        if (fig->parsed()) return cmd_figure1(cfg);
        if (pfv->parsed()) return cmd_prop_fv(cfg);
        return cmd_lemma(cfg, o.which);
    } catch (const foresight::parameter_error& e) {
        report_error("parameter_error", e.what(), e.field());
    } catch (const foresight::path_validity_error& e) {
        report_error("path_validity_error", e.what(), "model.boundary");
    } catch (const std::exception& e) {
        report_error("error", e.what());
    }
    return config_error;
}
