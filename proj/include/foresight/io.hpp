#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "foresight/config.hpp"
#include "foresight/ledger.hpp"
#include "foresight/lemma_suite.hpp"
#include "foresight/numeric.hpp"
#include "foresight/pipeline.hpp"
#include "foresight/propfv.hpp"
#include "foresight/quadvar.hpp"
#include "foresight/stieltjes.hpp"

namespace foresight::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// CSV

struct Column {
    std::string name;
    const std::vector<double>* values;
};

inline std::string to_csv(std::initializer_list<Column> cols) {
    std::string out;
    std::size_t rows = 0;
    bool first = true;
    for (const auto& c : cols) {
        out += (first ? "" : ",") + c.name;
        rows = first ? c.values->size() : rows;
        if (c.values->size() != rows) throw structural_error("CSV columns differ in length");
        first = false;
    }
    out += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        first = true;
        for (const auto& c : cols) {
            if (!first) out += ',';
            out += format_double((*c.values)[r]);
            first = false;
        }
        out += '\n';
    }
    return out;
}

inline std::string path_csv(const Path& p) { return to_csv({{"t", &p.grid().points()}, {"S", &p.values()}}); }

inline std::string qv_csv(const QVCurve& q) { return to_csv({{"t", &q.grid().points()}, {"qv", &q.values()}}); }

inline std::string ledger_csv(const Ledger& L) {
    return to_csv({{"t", &L.grid.points()}, {"S", &L.S}, {"phi", &L.phi}, {"psi", &L.psi}, {"V", &L.V}});
}

inline std::string series_csv(const TimeGrid& g, const std::string& name, const std::vector<double>& v) {
    return to_csv({{"t", &g.points()}, {name, &v}});
}

inline void write_file(const std::filesystem::path& file, const std::string& content) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + file.string() + "'");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// JSON documents

inline json config_echo(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : config_to_map(cfg)) j[k] = v;
    return j;
}

inline json envelope(const RunConfig& cfg, const char* kind) {
    return json{{"schema_version", schema_version}, {"kind", kind}, {"config", config_echo(cfg)}};
}

inline json ladder_json(const StoppingLadder& l) {
    return json{{"c", l.c}, {"gamma", l.gamma}, {"N", l.depth}, {"rho", l.rho}, {"rho_n", l.rho_n}};
}

inline json construction_json(const RunConfig& cfg, const PipelineResult& r) {
    json j = envelope(cfg, "construction");
    j["seed"] = r.seed;
    j["prescale"] = r.prescale;
    j["qv_source"] = r.qv_source;
    j["in_Ac"] = r.flags.in_Ac;
    j["sup_S"] = r.flags.sup_S;
    j["qv_T"] = r.flags.qv_T;
    j["c"] = r.ladder.c;
    j["gamma"] = r.ladder.gamma;
    j["N"] = r.ladder.depth;
    j["beta"] = r.H.beta;
    j["rho"] = r.ladder.rho;
    j["rho_n"] = r.ladder.rho_n;
    j["Z_n"] = r.Z.Z;
    j["H_n"] = r.H.H;
    j["epsilon_N"] = r.report.epsilon_N;
    j["total_variation"] = r.report.total_variation;
    return j;
}

inline json report_fields(const VerificationReport& v) {
    return json{{"in_Ac", v.in_Ac},
                {"eq_as_holds", v.eq_as_holds},
                {"strict_after_rho", v.strict_after_rho},
                {"no_short_selling", v.no_short_selling},
                {"non_negative_wealth", v.non_negative_wealth},
                {"terminal_identity_holds", v.terminal_identity_holds},
                {"zero_branch_holds", v.zero_branch_holds},
                {"min_psi", v.min_psi},
                {"min_psi_guaranteed", v.min_psi_guaranteed},
                {"epsilon_N", v.epsilon_N},
                {"terminal_identity_residual", v.terminal_identity_residual},
                {"V_T", v.V_T},
                {"expected_V_T", v.expected_V_T},
                {"psi_within_piece_variation", v.psi_within_piece_variation},
                {"total_variation", v.total_variation},
                {"rho", v.rho},
                {"rho_1", v.rho_1},
                {"guaranteed_pieces", v.guaranteed_pieces},
                {"active_pieces", v.active_pieces},
                {"strict_points_checked", v.strict_points_checked},
                {"all_pass", v.all_pass()}};
}

inline json report_json(const RunConfig& cfg, const PipelineResult& r) {
    json j = envelope(cfg, "report");
    j["seed"] = r.seed;
    j["qv_source"] = r.qv_source;
    j["report"] = report_fields(r.report);
    j["regions"] = {
        {"strict", "grid points in (rho_1, T]; on (rho, rho_1] strictness only holds in the untruncated limit"},
        {"guaranteed", "pieces with H_n >= H_N/(1-beta), plus [0, rho_{N+1}] and (rho_1, T]"}};
    return j;
}

inline json proportion_json(const Proportion& p) {
    return json{{"successes", p.successes}, {"trials", p.trials}, {"fraction", p.fraction},
                {"wilson_lower", p.lower}, {"wilson_upper", p.upper}};
}

inline json mc_json(const RunConfig& cfg, const MCSummary& s) {
    json j = envelope(cfg, "mc_summary");
    j["paths_total"] = s.paths_total;
    j["paths_in_Ac"] = s.paths_in_Ac;
    j["fraction_in_Ac"] = proportion_json(s.in_Ac);
    j["fraction_strict_on_Ac"] = proportion_json(s.strict_on_Ac);
    j["mean_V_T_on_Ac"] = s.mean_V_T_on_Ac;
    j["min_V_T_on_Ac"] = s.min_V_T_on_Ac;
    j["max_identity_residual"] = s.max_identity_residual;
    j["max_epsilon_N"] = s.max_epsilon_N;
    j["eq_as_failures"] = s.eq_as_failures;
    j["check_failures"] = s.check_failures;
    j["seeds_used"] = {{"first", s.seeds_first}, {"count", s.paths_total}};
    j["passes"] = s.passes();
    return j;
}

inline json refinement_json(const RefinementReport& r) {
    return json{{"partition_sizes", r.partition_sizes}, {"estimates", r.estimates}, {"deviations", r.deviations},
                {"closed_form", r.closed_form}, {"max_deviation", r.max_deviation}};
}

inline json prop_fv_json(const RunConfig& cfg, const PropFVReport& r) {
    json j = envelope(cfg, "prop_fv");
    j["cases"] = r.cases.size();
    j["positive_cases"] = r.positive_cases;
    j["found_cases"] = r.found_cases;
    j["max_ibp_residual"] = r.max_ibp_residual;
    j["ibp_tolerance"] = r.ibp_tolerance;
    j["path_realized_qv"] = r.path_realized_qv;
    json misses = json::array();
    for (const auto& c : r.cases)
        if (c.positive_somewhere && !c.found)
            misses.push_back({{"kind", c.kind}, {"path", c.path_index}, {"strategy", c.strategy_index}});
    j["misses"] = misses;
    j["passes"] = r.passes();
    return j;
}

inline json lemma_seq_json(const RunConfig& cfg, const lemmas::SeqSuiteReport& r) {
    json j = envelope(cfg, "lemma_seq");
    j["anchor_x1"] = r.anchor_x1;
    j["triples"] = r.triples;
    j["max_telescoping_residual"] = r.max_telescoping_residual;
    j["telescoping_tolerance"] = r.telescoping_tolerance;
    j["total_checked"] = r.total_checked;
    j["total_violations"] = r.total_violations;
    json sweep = json::array();
    for (const auto& s : r.sweep)
        sweep.push_back({{"a", s.a}, {"q", s.q}, {"alpha", s.alpha}, {"checked", s.checked},
                         {"violations", s.violations}, {"last_decade_ratio", s.last_decade_ratio}});
    j["sweep"] = sweep;
    auto assumption = [](const lemmas::AssumptionReport& a) {
        return json{{"total", a.total}, {"last_decade_ratio", a.last_decade_ratio},
                    {"consistent_with_convergence", a.consistent_with_convergence}};
    };
    j["assumption_reference"] = {{"y_n=n^-1/2", assumption(r.sqrt_case)}, {"y_n=1/n", assumption(r.harmonic_case)}};
    j["note"] = "infinite sums are checked through truncated sufficient conditions";
    j["passes"] = r.passes();
    return j;
}

inline json lemma_bm_json(const RunConfig& cfg, const lemmas::BMSuiteReport& r) {
    json j = envelope(cfg, "lemma_bm");
    json bounds = json::array();
    for (const auto& b : r.bounds)
        bounds.push_back({{"sigma", b.sigma}, {"gamma", b.gamma}, {"checked", b.checked},
                          {"failure_count", b.failure_count}, {"first_failures", b.failures}});
    j["bounds"] = bounds;
    j["bound_failures"] = r.bound_failures;
    const auto& l = r.ladder;
    j["ladder"] = {{"N", l.ladder},
                   {"estimates", l.estimates},
                   {"std_errors", l.std_errors},
                   {"increments_S2N_minus_SN", l.increments},
                   {"increment_std_errors", l.increment_std_errors},
                   {"drop_z_scores", l.drop_z_scores},
                   {"strictly_decreasing", l.strictly_decreasing},
                   {"last_increment", l.last_increment},
                   {"below_threshold", l.below_threshold}};
    j["spec"] = {{"sigma", r.spec.sigma}, {"gamma", r.spec.gamma}, {"alpha", r.spec.alpha},
                 {"samples", r.spec.M}, {"p", r.spec.p()}};
    j["note"] = "a convergence diagnostic only; finiteness of the expectation cannot be established by sampling";
    j["passes"] = r.passes();
    return j;
}

} // namespace foresight::io
