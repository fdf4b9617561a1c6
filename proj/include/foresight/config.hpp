#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "foresight/error.hpp"
#include "foresight/model.hpp"
#include "foresight/numeric.hpp"
#include "foresight/strategy.hpp"

namespace foresight {

inline constexpr const char* schema_version = "foresight/1";

enum class CPolicy { half_qv, fixed };
enum class PrescaleMode { fixed, foresight };
enum class QVSource { automatic, analytic, realized };

struct GridConfig {
    double T = 1.0;
    std::size_t M = 16384;
    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct ConstructionConfig {
    CPolicy c_policy = CPolicy::half_qv;
    double c = 0.5; // used when c_policy == fixed
    double gamma = 0.5;
    std::size_t N = 64;
    double beta = default_beta;
    double prescale = 0.4;
    PrescaleMode prescale_mode = PrescaleMode::fixed;
    QVSource qv = QVSource::automatic;
    friend bool operator==(const ConstructionConfig&, const ConstructionConfig&) = default;
};

struct VerifyConfig {
    double identity_tol = 1e-10;
    friend bool operator==(const VerifyConfig&, const VerifyConfig&) = default;
};

struct SeedRange {
    std::uint64_t first = 0;
    std::uint64_t count = 1000;
    std::uint64_t stream = 0;
    friend bool operator==(const SeedRange&, const SeedRange&) = default;
};

struct PropFVConfig {
    std::vector<std::string> kinds{"linear", "sinusoid", "monotone"};
    std::size_t paths = 10;
    std::size_t strategies = 100;
    std::size_t max_pieces = 8;
    friend bool operator==(const PropFVConfig&, const PropFVConfig&) = default;
};

struct LemmaSeqConfig {
    std::size_t specs = 100;
    std::size_t N = 10000;
    std::size_t triples = 1000;
    std::size_t triple_N = 2000;
    double threshold = 0.01;
    friend bool operator==(const LemmaSeqConfig&, const LemmaSeqConfig&) = default;
};

struct LemmaBMConfig {
    double sigma = 1.0;
    double gamma = 0.5;
    double alpha = 0.5;
    std::size_t samples = 10000;
    std::vector<std::size_t> ladder{100, 1000, 10000};
    double z_threshold = 3.0;
    double tail_threshold = 1.0;
    std::size_t bound_n = 1000000;
    std::vector<double> bound_gammas{0.25, 0.5, 0.75};
    std::vector<double> bound_sigmas{0.5, 1.0, 2.0};
    friend bool operator==(const LemmaBMConfig&, const LemmaBMConfig&) = default;
};

struct RunConfig {
    ModelSpec model = BrownianMotion{};
    GridConfig grid;
    ConstructionConfig construction;
    VerifyConfig verify;
    SeedRange seeds;
    std::string output_dir = "out";
    PropFVConfig prop_fv;
    LemmaSeqConfig lemma_seq;
    LemmaBMConfig lemma_bm;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// ---------------------------------------------------------------------------
// Flat "section.key = value" text format. '#' starts a comment line.

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw parameter_error("'" + v + "' is not a number", key);
    }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
        const auto d = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw parameter_error("'" + v + "' is not a non-negative integer", key);
    }
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F&& fmt) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ",";
        s += fmt(xs[i]);
    }
    return s;
}

} // namespace detail

using ConfigMap = std::map<std::string, std::string>;

inline ConfigMap parse_config_map(const std::string& text) {
    ConfigMap kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw parameter_error("line " + std::to_string(lineno) + ": expected 'key = value'", "config");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty()) throw parameter_error("line " + std::to_string(lineno) + ": empty key", "config");
        if (kv.count(key)) throw parameter_error("duplicate key", key);
        kv[key] = value;
    }
    return kv;
}

namespace detail {

inline const char* kind_name(const ModelSpec& m) {
    switch (m.index()) {
    case 0: return "brownian";
    case 1: return "gbm";
    case 2: return "linear";
    case 3: return "sinusoid";
    default: return "monotone";
    }
}

inline ModelSpec model_from_map(ConfigMap& kv) {
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto num = [&](const char* key, double def) {
        auto v = take(key);
        return v ? parse_double(key, *v) : def;
    };
    const std::string kind = take("model.kind").value_or("brownian");
    ModelSpec spec;
    if (kind == "brownian") {
        BrownianMotion m;
        m.s0 = num("model.s0", m.s0);
        m.sigma = num("model.sigma", m.sigma);
        const std::string b = take("model.boundary").value_or("absorb");
        const double level = num("model.boundary_level", 0.01);
        if (b == "none")
            m.boundary = NoBoundary{};
        else if (b == "absorb")
            m.boundary = Absorb{level};
        else if (b == "reflect")
            m.boundary = Reflect{level};
        else
            throw parameter_error("boundary must be none, absorb or reflect", "model.boundary");
        spec = m;
    } else if (kind == "gbm") {
        GeometricBM m;
        m.s0 = num("model.s0", m.s0);
        m.sigma = num("model.sigma", m.sigma);
        spec = m;
    } else if (kind == "linear") {
        LinearFV m;
        m.s0 = num("model.s0", m.s0);
        m.slope = num("model.slope", m.slope);
        spec = m;
    } else if (kind == "sinusoid") {
        SinusoidFV m;
        m.s0 = num("model.s0", m.s0);
        m.amplitude = num("model.amplitude", m.amplitude);
        m.frequency = num("model.frequency", m.frequency);
        spec = m;
    } else if (kind == "monotone") {
        MonotoneRandomFV m;
        m.s0 = num("model.s0", m.s0);
        m.step_scale = num("model.step_scale", m.step_scale);
        spec = m;
    } else {
        throw parameter_error("unknown model kind '" + kind + "'", "model.kind");
    }
    for (const auto& [k, v] : kv)
        if (k.rfind("model.", 0) == 0) throw parameter_error("key not used by model kind '" + kind + "'", k);
    return spec;
}

inline void model_to_map(const ModelSpec& spec, ConfigMap& kv) {
    kv["model.kind"] = kind_name(spec);
    std::visit(
        [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            kv["model.s0"] = format_double(m.s0);
            if constexpr (std::is_same_v<M, BrownianMotion>) {
                kv["model.sigma"] = format_double(m.sigma);
                std::visit(
                    [&](const auto& b) {
                        using B = std::decay_t<decltype(b)>;
                        if constexpr (std::is_same_v<B, NoBoundary>) {
                            kv["model.boundary"] = "none";
                        } else {
                            kv["model.boundary"] = std::is_same_v<B, Absorb> ? "absorb" : "reflect";
                            kv["model.boundary_level"] = format_double(b.level);
                        }
                    },
                    m.boundary);
            } else if constexpr (std::is_same_v<M, GeometricBM>) {
                kv["model.sigma"] = format_double(m.sigma);
            } else if constexpr (std::is_same_v<M, LinearFV>) {
                kv["model.slope"] = format_double(m.slope);
            } else if constexpr (std::is_same_v<M, SinusoidFV>) {
                kv["model.amplitude"] = format_double(m.amplitude);
                kv["model.frequency"] = format_double(m.frequency);
            } else {
                kv["model.step_scale"] = format_double(m.step_scale);
            }
        },
        spec);
}

} // namespace detail

// Range checks for every field; the error names the offending key.
inline void validate(const RunConfig& c) {
    validate(c.model);
    if (!(c.grid.T > 0.0) || !std::isfinite(c.grid.T)) throw parameter_error("T must be positive", "grid.T");
    if (c.grid.M < 1) throw parameter_error("M must be positive", "grid.M");
    const auto& k = c.construction;
    if (!(k.gamma > 0.0 && k.gamma < 1.0)) throw parameter_error("gamma must lie in (0,1)", "construction.gamma");
    if (!(k.beta > 0.0 && k.beta < 1.0)) throw parameter_error("beta must lie in (0,1)", "construction.beta");
    if (k.N < 1) throw parameter_error("N must be at least 1", "construction.N");
    if (k.c_policy == CPolicy::fixed && !(k.c > 0.0)) throw parameter_error("c must be positive", "construction.c");
    if (!(k.prescale > 0.0) || !std::isfinite(k.prescale))
        throw parameter_error("prescale must be positive", "construction.prescale");
    if (!(c.verify.identity_tol > 0.0)) throw parameter_error("tolerance must be positive", "verify.identity_tol");
    if (c.output_dir.empty()) throw parameter_error("output directory must not be empty", "output.dir");
    for (const auto& kind : c.prop_fv.kinds)
        if (kind != "linear" && kind != "sinusoid" && kind != "monotone")
            throw parameter_error("unknown finite-variation kind '" + kind + "'", "prop_fv.kinds");
    if (c.prop_fv.max_pieces < 1) throw parameter_error("max_pieces must be at least 1", "prop_fv.max_pieces");
    if (c.lemma_seq.N < 2) throw parameter_error("N must be at least 2", "lemma.seq.N");
    if (c.lemma_seq.triple_N < 2) throw parameter_error("triple_N must be at least 2", "lemma.seq.triple_N");
    const auto& b = c.lemma_bm;
    if (!(b.sigma > 0.0)) throw parameter_error("sigma must be positive", "lemma.bm.sigma");
    if (!(b.gamma > 0.0 && b.gamma < 1.0)) throw parameter_error("gamma must lie in (0,1)", "lemma.bm.gamma");
    if (!(b.alpha > 0.0)) throw parameter_error("alpha must be positive", "lemma.bm.alpha");
    if (b.samples < 2) throw parameter_error("need at least two samples", "lemma.bm.samples");
    if (b.ladder.empty()) throw parameter_error("ladder must not be empty", "lemma.bm.ladder");
    for (std::size_t i = 0; i < b.ladder.size(); ++i)
        if (b.ladder[i] < 1 || (i > 0 && b.ladder[i] <= b.ladder[i - 1]))
            throw parameter_error("ladder must be strictly increasing positive integers", "lemma.bm.ladder");
    for (double g : b.bound_gammas)
        if (!(g > 0.0 && g < 1.0)) throw parameter_error("gammas must lie in (0,1)", "lemma.bm.bound_gammas");
    for (double s : b.bound_sigmas)
        if (!(s > 0.0)) throw parameter_error("sigmas must be positive", "lemma.bm.bound_sigmas");
}

inline RunConfig config_from_map(ConfigMap kv) {
    RunConfig c;
    c.model = detail::model_from_map(kv);

    auto take = [&](const char* key, auto&& apply) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        apply(key, it->second);
        kv.erase(it);
    };
    auto dbl = [](double& out) { return [&out](const char* k, const std::string& v) { out = detail::parse_double(k, v); }; };
    auto uint = [](auto& out) {
        return [&out](const char* k, const std::string& v) {
            out = static_cast<std::remove_reference_t<decltype(out)>>(detail::parse_uint(k, v));
        };
    };

    take("grid.T", dbl(c.grid.T));
    take("grid.M", uint(c.grid.M));

    auto& k = c.construction;
    take("construction.c_policy", [&](const char* key, const std::string& v) {
        if (v == "half_qv") k.c_policy = CPolicy::half_qv;
        else if (v == "fixed") k.c_policy = CPolicy::fixed;
        else throw parameter_error("c_policy must be half_qv or fixed", key);
    });
    take("construction.c", dbl(k.c));
    take("construction.gamma", dbl(k.gamma));
    take("construction.N", uint(k.N));
    take("construction.beta", dbl(k.beta));
    take("construction.prescale", dbl(k.prescale));
    take("construction.prescale_mode", [&](const char* key, const std::string& v) {
        if (v == "fixed") k.prescale_mode = PrescaleMode::fixed;
        else if (v == "foresight") k.prescale_mode = PrescaleMode::foresight;
        else throw parameter_error("prescale_mode must be fixed or foresight", key);
    });
    take("construction.qv", [&](const char* key, const std::string& v) {
        if (v == "auto") k.qv = QVSource::automatic;
        else if (v == "analytic") k.qv = QVSource::analytic;
        else if (v == "realized") k.qv = QVSource::realized;
        else throw parameter_error("qv must be auto, analytic or realized", key);
    });

    take("verify.identity_tol", dbl(c.verify.identity_tol));
    take("seeds.first", uint(c.seeds.first));
    take("seeds.count", uint(c.seeds.count));
    take("seeds.stream", uint(c.seeds.stream));
    take("output.dir", [&](const char*, const std::string& v) { c.output_dir = v; });

    take("prop_fv.kinds", [&](const char*, const std::string& v) { c.prop_fv.kinds = detail::split_list(v); });
    take("prop_fv.paths", uint(c.prop_fv.paths));
    take("prop_fv.strategies", uint(c.prop_fv.strategies));
    take("prop_fv.max_pieces", uint(c.prop_fv.max_pieces));

    take("lemma.seq.specs", uint(c.lemma_seq.specs));
    take("lemma.seq.N", uint(c.lemma_seq.N));
    take("lemma.seq.triples", uint(c.lemma_seq.triples));
    take("lemma.seq.triple_N", uint(c.lemma_seq.triple_N));
    take("lemma.seq.threshold", dbl(c.lemma_seq.threshold));

    auto& b = c.lemma_bm;
    take("lemma.bm.sigma", dbl(b.sigma));
    take("lemma.bm.gamma", dbl(b.gamma));
    take("lemma.bm.alpha", dbl(b.alpha));
    take("lemma.bm.samples", uint(b.samples));
    take("lemma.bm.ladder", [&](const char* key, const std::string& v) {
        b.ladder.clear();
        for (const auto& s : detail::split_list(v)) b.ladder.push_back(detail::parse_uint(key, s));
    });
    take("lemma.bm.z_threshold", dbl(b.z_threshold));
    take("lemma.bm.tail_threshold", dbl(b.tail_threshold));
    take("lemma.bm.bound_n", uint(b.bound_n));
    take("lemma.bm.bound_gammas", [&](const char* key, const std::string& v) {
        b.bound_gammas.clear();
        for (const auto& s : detail::split_list(v)) b.bound_gammas.push_back(detail::parse_double(key, s));
    });
    take("lemma.bm.bound_sigmas", [&](const char* key, const std::string& v) {
        b.bound_sigmas.clear();
        for (const auto& s : detail::split_list(v)) b.bound_sigmas.push_back(detail::parse_double(key, s));
    });

    if (!kv.empty()) throw parameter_error("unknown configuration key", kv.begin()->first);
    validate(c);
    return c;
}

inline RunConfig parse_config(const std::string& text) { return config_from_map(parse_config_map(text)); }

inline RunConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read config file '" + file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline ConfigMap config_to_map(const RunConfig& c) {
    ConfigMap kv;
    detail::model_to_map(c.model, kv);
    kv["grid.T"] = format_double(c.grid.T);
    kv["grid.M"] = std::to_string(c.grid.M);
    const auto& k = c.construction;
    kv["construction.c_policy"] = k.c_policy == CPolicy::half_qv ? "half_qv" : "fixed";
    kv["construction.c"] = format_double(k.c);
    kv["construction.gamma"] = format_double(k.gamma);
    kv["construction.N"] = std::to_string(k.N);
    kv["construction.beta"] = format_double(k.beta);
    kv["construction.prescale"] = format_double(k.prescale);
    kv["construction.prescale_mode"] = k.prescale_mode == PrescaleMode::fixed ? "fixed" : "foresight";
    kv["construction.qv"] = k.qv == QVSource::automatic ? "auto" : k.qv == QVSource::analytic ? "analytic" : "realized";
    kv["verify.identity_tol"] = format_double(c.verify.identity_tol);
    kv["seeds.first"] = std::to_string(c.seeds.first);
    kv["seeds.count"] = std::to_string(c.seeds.count);
    kv["seeds.stream"] = std::to_string(c.seeds.stream);
    kv["output.dir"] = c.output_dir;
    kv["prop_fv.kinds"] = detail::join(c.prop_fv.kinds, [](const std::string& s) { return s; });
    kv["prop_fv.paths"] = std::to_string(c.prop_fv.paths);
    kv["prop_fv.strategies"] = std::to_string(c.prop_fv.strategies);
    kv["prop_fv.max_pieces"] = std::to_string(c.prop_fv.max_pieces);
    kv["lemma.seq.specs"] = std::to_string(c.lemma_seq.specs);
    kv["lemma.seq.N"] = std::to_string(c.lemma_seq.N);
    kv["lemma.seq.triples"] = std::to_string(c.lemma_seq.triples);
    kv["lemma.seq.triple_N"] = std::to_string(c.lemma_seq.triple_N);
    kv["lemma.seq.threshold"] = format_double(c.lemma_seq.threshold);
    const auto& b = c.lemma_bm;
    kv["lemma.bm.sigma"] = format_double(b.sigma);
    kv["lemma.bm.gamma"] = format_double(b.gamma);
    kv["lemma.bm.alpha"] = format_double(b.alpha);
    kv["lemma.bm.samples"] = std::to_string(b.samples);
    kv["lemma.bm.ladder"] = detail::join(b.ladder, [](std::size_t n) { return std::to_string(n); });
    kv["lemma.bm.z_threshold"] = format_double(b.z_threshold);
    kv["lemma.bm.tail_threshold"] = format_double(b.tail_threshold);
    kv["lemma.bm.bound_n"] = std::to_string(b.bound_n);
    kv["lemma.bm.bound_gammas"] = detail::join(b.bound_gammas, format_double);
    kv["lemma.bm.bound_sigmas"] = detail::join(b.bound_sigmas, format_double);
    return kv;
}

inline std::string serialize_config(const RunConfig& c) {
    std::string out;
    for (const auto& [k, v] : config_to_map(c)) out += k + " = " + v + "\n";
    return out;
}

} // namespace foresight
