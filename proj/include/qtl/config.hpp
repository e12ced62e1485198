#pragma once

// Experiment configuration: the JSON schema (version 1), its validation, and
// resolution into concrete tasks on a shared bin set, an ansatz and a grid.
// Every validation error is a ConfigInvalid naming the offending field.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "qtl/embedding.hpp"
#include "qtl/errors.hpp"
#include "qtl/pipeline.hpp"
#include "qtl/tasks.hpp"

namespace qtl {

using Json = nlohmann::json;

inline constexpr int kConfigSchema = 1;

struct TaskDescription {
    enum class Kind { gaussian, table };
    Kind kind = Kind::gaussian;
    GaussianTaskSpec gaussian;  // bins / span_sigmas filled from the quantization block
    std::vector<double> features;
    std::array<double, 2> prior{0.5, 0.5};
    std::array<std::vector<double>, 2> cond;
};

struct ExperimentConfig {
    EmbeddingAnsatz ansatz = rx_rot_rx();
    Json ansatz_json = "rx_rot_rx";
    std::size_t grid_resolution = 16;
    std::size_t grid_cap = kDefaultGridCap;
    bool refine = false;
    std::size_t bins = 100;
    double span_sigmas = 4.0;
    TaskDescription source;
    std::optional<TaskDescription> target;
    std::vector<std::size_t> n_source{0};
    std::vector<std::size_t> n_target;
    std::vector<double> shifts;
    std::size_t replications = 200;
    BoundConfig bound;
    RademacherSettings rademacher;
    std::uint64_t master_seed = 0;
    std::string output_dir = "out";
};

namespace detail {

inline std::string join_path(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigInvalid(path + ": expected an object");
}

inline void reject_unknown(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
            throw ConfigInvalid(join_path(path, it.key()) + ": unknown key");
        }
    }
}

inline double read_number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigInvalid(path + ": expected a number");
    return j.get<double>();
}

inline std::uint64_t read_count(const Json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
        throw ConfigInvalid(path + ": expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

inline std::string read_string(const Json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigInvalid(path + ": expected a string");
    return j.get<std::string>();
}

inline bool read_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigInvalid(path + ": expected true or false");
    return j.get<bool>();
}

inline std::vector<double> read_numbers(const Json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigInvalid(path + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<std::size_t> read_counts(const Json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigInvalid(path + ": expected an array of non-negative integers");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(static_cast<std::size_t>(read_count(j[i], path + "[" + std::to_string(i) + "]")));
    }
    return out;
}

inline Gate read_gate(const Json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path, {"gate", "qubit", "target", "scale"});
    if (!j.contains("gate")) throw ConfigInvalid(path + ".gate: missing");
    Gate g;
    try {
        g.kind = parse_gate_kind(read_string(j["gate"], path + ".gate"));
    } catch (const ConfigInvalid&) {
        throw ConfigInvalid(path + ".gate: unknown gate '" + j["gate"].get<std::string>() + "'");
    }
    g.qubit = j.contains("qubit") ? static_cast<int>(read_count(j["qubit"], path + ".qubit")) : 0;
    if (j.contains("target")) g.target = static_cast<int>(read_count(j["target"], path + ".target"));
    if (j.contains("scale")) g.scale = read_number(j["scale"], path + ".scale");
    return g;
}

inline EmbeddingAnsatz read_ansatz(const Json& j, const std::string& path) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "rx_rot_rx") return rx_rot_rx();
        throw ConfigInvalid(path + ": unknown built-in ansatz '" + name + "'");
    }
    require_object(j, path);
    reject_unknown(j, path, {"name", "num_qubits", "layers"});
    if (!j.contains("num_qubits")) throw ConfigInvalid(path + ".num_qubits: missing");
    if (!j.contains("layers") || !j["layers"].is_array()) throw ConfigInvalid(path + ".layers: expected an array");
    std::vector<Layer> layers;
    for (std::size_t l = 0; l < j["layers"].size(); ++l) {
        const std::string lp = path + ".layers[" + std::to_string(l) + "]";
        const Json& lj = j["layers"][l];
        require_object(lj, lp);
        reject_unknown(lj, lp, {"data", "params"});
        Layer layer;
        for (const char* part : {"data", "params"}) {
            if (!lj.contains(part)) continue;
            const std::string pp = lp + "." + part;
            if (!lj[part].is_array()) throw ConfigInvalid(pp + ": expected an array of gates");
            auto& dst = std::string(part) == "data" ? layer.data : layer.params;
            for (std::size_t g = 0; g < lj[part].size(); ++g) {
                dst.push_back(read_gate(lj[part][g], pp + "[" + std::to_string(g) + "]"));
            }
        }
        layers.push_back(std::move(layer));
    }
    const std::string name = j.contains("name") ? read_string(j["name"], path + ".name") : "custom";
    try {
        return EmbeddingAnsatz(static_cast<int>(read_count(j["num_qubits"], path + ".num_qubits")), std::move(layers),
                               name);
    } catch (const ConfigInvalid& e) {
        throw ConfigInvalid(path + ": " + e.what());
    }
}

inline TaskDescription read_task(const Json& j, const std::string& path) {
    require_object(j, path);
    TaskDescription t;
    const std::string kind = j.contains("kind") ? read_string(j["kind"], path + ".kind") : "gaussian";
    if (kind == "gaussian") {
        reject_unknown(j, path, {"kind", "mu0", "mu1", "sigma2", "prior0"});
        for (const char* k : {"mu0", "mu1", "sigma2"}) {
            if (!j.contains(k)) throw ConfigInvalid(join_path(path, k) + ": missing");
        }
        t.gaussian.mu0 = read_number(j["mu0"], path + ".mu0");
        t.gaussian.mu1 = read_number(j["mu1"], path + ".mu1");
        t.gaussian.sigma2 = read_number(j["sigma2"], path + ".sigma2");
        if (!(t.gaussian.sigma2 > 0.0)) throw ConfigInvalid(path + ".sigma2: must be > 0");
        if (j.contains("prior0")) t.gaussian.prior0 = read_number(j["prior0"], path + ".prior0");
        if (!(t.gaussian.prior0 >= 0.0 && t.gaussian.prior0 <= 1.0)) {
            throw ConfigInvalid(path + ".prior0: must lie in [0, 1]");
        }
    } else if (kind == "table") {
        t.kind = TaskDescription::Kind::table;
        reject_unknown(j, path, {"kind", "features", "prior", "cond"});
        for (const char* k : {"features", "prior", "cond"}) {
            if (!j.contains(k)) throw ConfigInvalid(join_path(path, k) + ": missing");
        }
        t.features = read_numbers(j["features"], path + ".features");
        const auto prior = read_numbers(j["prior"], path + ".prior");
        if (prior.size() != 2) throw ConfigInvalid(path + ".prior: expected two class probabilities");
        t.prior = {prior[0], prior[1]};
        if (!j["cond"].is_array() || j["cond"].size() != 2) {
            throw ConfigInvalid(path + ".cond: expected two rows");
        }
        for (int c = 0; c < 2; ++c) t.cond[c] = read_numbers(j["cond"][c], path + ".cond[" + std::to_string(c) + "]");
        try {
            DiscreteTask(t.features, t.prior, t.cond);
        } catch (const InvalidTask& e) {
            throw ConfigInvalid(path + ": " + e.what());
        }
    } else {
        throw ConfigInvalid(path + ".kind: expected \"gaussian\" or \"table\"");
    }
    return t;
}

}  // namespace detail

inline ExperimentConfig parse_config(const Json& j) {
    using namespace detail;
    require_object(j, "config");
    reject_unknown(j, "", {"schema", "description", "ansatz", "grid", "quantization", "source", "target", "n_source",
                           "n_target", "shifts", "replications", "bound", "rademacher", "master_seed",
                           "output_dir"});
    if (!j.contains("schema")) throw ConfigInvalid("schema: missing (expected 1)");
    if (!j["schema"].is_number_integer() || j["schema"].get<int>() != kConfigSchema) {
        throw ConfigInvalid("schema: unsupported version (expected 1)");
    }
    if (j.contains("description")) read_string(j["description"], "description");

    ExperimentConfig cfg;
    if (j.contains("ansatz")) {
        cfg.ansatz = read_ansatz(j["ansatz"], "ansatz");
        cfg.ansatz_json = j["ansatz"];
    }
    if (j.contains("grid")) {
        const Json& g = j["grid"];
        require_object(g, "grid");
        reject_unknown(g, "grid", {"resolution", "refine", "cap"});
        if (g.contains("resolution")) cfg.grid_resolution = read_count(g["resolution"], "grid.resolution");
        if (g.contains("refine")) cfg.refine = read_bool(g["refine"], "grid.refine");
        if (g.contains("cap")) cfg.grid_cap = read_count(g["cap"], "grid.cap");
        if (cfg.grid_resolution < 2) throw ConfigInvalid("grid.resolution: must be >= 2");
    }
    if (j.contains("quantization")) {
        const Json& q = j["quantization"];
        require_object(q, "quantization");
        reject_unknown(q, "quantization", {"bins", "span_sigmas"});
        if (q.contains("bins")) cfg.bins = read_count(q["bins"], "quantization.bins");
        if (q.contains("span_sigmas")) cfg.span_sigmas = read_number(q["span_sigmas"], "quantization.span_sigmas");
        if (cfg.bins < 2) throw ConfigInvalid("quantization.bins: must be >= 2");
        if (!(cfg.span_sigmas > 0.0)) throw ConfigInvalid("quantization.span_sigmas: must be > 0");
    }
    if (!j.contains("source")) throw ConfigInvalid("source: missing");
    cfg.source = read_task(j["source"], "source");
    if (j.contains("target")) cfg.target = read_task(j["target"], "target");
    for (TaskDescription* t : {&cfg.source, cfg.target ? &*cfg.target : nullptr}) {
        if (t == nullptr) continue;
        t->gaussian.bins = cfg.bins;
        t->gaussian.span_sigmas = cfg.span_sigmas;
    }
    if (j.contains("n_source")) cfg.n_source = read_counts(j["n_source"], "n_source");
    if (j.contains("n_target")) cfg.n_target = read_counts(j["n_target"], "n_target");
    if (j.contains("shifts")) cfg.shifts = read_numbers(j["shifts"], "shifts");
    if (cfg.n_source.empty()) throw ConfigInvalid("n_source: must not be empty");
    if (cfg.n_target.empty()) throw ConfigInvalid("n_target: missing or empty");
    for (std::size_t i = 0; i < cfg.n_target.size(); ++i) {
        if (cfg.n_target[i] == 0) throw ConfigInvalid("n_target[" + std::to_string(i) + "]: must be >= 1");
    }
    if (j.contains("replications")) cfg.replications = read_count(j["replications"], "replications");
    if (cfg.replications == 0) throw ConfigInvalid("replications: must be >= 1");
    if (j.contains("bound")) {
        const Json& b = j["bound"];
        require_object(b, "bound");
        reject_unknown(b, "bound", {"delta", "d_st_mode", "r_mode"});
        if (b.contains("delta")) cfg.bound.delta = read_number(b["delta"], "bound.delta");
        if (!(cfg.bound.delta > 0.0 && cfg.bound.delta < 1.0)) throw ConfigInvalid("bound.delta: must lie in (0, 1)");
        if (b.contains("d_st_mode")) {
            const std::string m = read_string(b["d_st_mode"], "bound.d_st_mode");
            if (m == "trace") cfg.bound.d_st_mode = DissimilarityMode::trace;
            else if (m == "tv") cfg.bound.d_st_mode = DissimilarityMode::tv;
            else throw ConfigInvalid("bound.d_st_mode: expected \"trace\" or \"tv\"");
        }
        if (b.contains("r_mode")) {
            const std::string m = read_string(b["r_mode"], "bound.r_mode");
            if (m == "analytic_cap") cfg.bound.r_mode = ComplexityMode::analytic_cap;
            else if (m == "mc_estimate") cfg.bound.r_mode = ComplexityMode::mc_estimate;
            else throw ConfigInvalid("bound.r_mode: expected \"analytic_cap\" or \"mc_estimate\"");
        }
    }
    if (j.contains("rademacher")) {
        const Json& r = j["rademacher"];
        require_object(r, "rademacher");
        reject_unknown(r, "rademacher", {"outer", "sigma_draws", "exhaustive_max_n"});
        if (r.contains("outer")) cfg.rademacher.outer = read_count(r["outer"], "rademacher.outer");
        if (r.contains("sigma_draws")) cfg.rademacher.sigma_draws = read_count(r["sigma_draws"], "rademacher.sigma_draws");
        if (r.contains("exhaustive_max_n")) {
            cfg.rademacher.exhaustive_max_n = read_count(r["exhaustive_max_n"], "rademacher.exhaustive_max_n");
        }
        if (cfg.rademacher.outer == 0) throw ConfigInvalid("rademacher.outer: must be >= 1");
        if (cfg.rademacher.sigma_draws == 0) throw ConfigInvalid("rademacher.sigma_draws: must be >= 1");
        if (cfg.rademacher.exhaustive_max_n > 20) throw ConfigInvalid("rademacher.exhaustive_max_n: must be <= 20");
    }
    if (!j.contains("master_seed")) throw ConfigInvalid("master_seed: missing");
    cfg.master_seed = read_count(j["master_seed"], "master_seed");
    if (j.contains("output_dir")) cfg.output_dir = read_string(j["output_dir"], "output_dir");

    const std::size_t params = cfg.ansatz.num_params();
    try {
        std::size_t total = 1;
        for (std::size_t d = 0; d < params; ++d) {
            if (total > cfg.grid_cap / cfg.grid_resolution) throw GridTooLarge("grid");
            total *= cfg.grid_resolution;
        }
    } catch (const GridTooLarge&) {
        throw ConfigInvalid("grid.resolution: " + std::to_string(cfg.grid_resolution) + "^" + std::to_string(params) +
                            " points exceed grid.cap");
    }
    return cfg;
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigInvalid(origin + ": malformed JSON (" + e.what() + ")");
    }
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("config: cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(parse_json_text(buf.str(), path));
}

inline ThetaGrid make_grid(const ExperimentConfig& cfg) {
    return make_theta_grid(cfg.ansatz.num_params(), cfg.grid_resolution, cfg.grid_cap);
}

namespace detail {

inline DiscreteTask table_task(const TaskDescription& t) { return DiscreteTask(t.features, t.prior, t.cond); }

}  // namespace detail

/// Source and target on one bin set. Gaussian tasks are quantized on the
/// union span of both; table tasks must list identical features.
inline TaskPair resolve_pair(const ExperimentConfig& cfg) {
    const TaskDescription& s = cfg.source;
    const TaskDescription& t = cfg.target ? *cfg.target : cfg.source;
    using K = TaskDescription::Kind;
    if (s.kind == K::gaussian && t.kind == K::gaussian) {
        const GaussianTaskSpec specs[] = {s.gaussian, t.gaussian};
        const std::vector<double> centers = shared_bin_centers(specs);
        return {quantize_gaussian_on(s.gaussian, centers), quantize_gaussian_on(t.gaussian, centers)};
    }
    if (s.kind == K::table && t.kind == K::table) {
        if (s.features != t.features) throw ConfigInvalid("target.features: must equal source.features");
        return {detail::table_task(s), detail::table_task(t)};
    }
    throw ConfigInvalid("target.kind: source and target must both be gaussian or both be table");
}

/// One pair per shift: target = source with both means moved by the shift,
/// all quantized on one bin set covering every shifted task.
inline std::vector<TaskPair> resolve_shift_pairs(const ExperimentConfig& cfg) {
    if (cfg.source.kind != TaskDescription::Kind::gaussian) {
        throw ConfigInvalid("source.kind: shift sweeps need a gaussian source");
    }
    if (cfg.shifts.empty()) throw ConfigInvalid("shifts: missing or empty");
    std::vector<GaussianTaskSpec> specs{cfg.source.gaussian};
    for (double d : cfg.shifts) specs.push_back(cfg.source.gaussian.shifted(d));
    const std::vector<double> centers = shared_bin_centers(specs);
    std::vector<TaskPair> pairs;
    for (std::size_t i = 0; i < cfg.shifts.size(); ++i) {
        pairs.push_back({quantize_gaussian_on(cfg.source.gaussian, centers), quantize_gaussian_on(specs[i + 1], centers)});
    }
    return pairs;
}

inline const char* mode_name(DissimilarityMode m) { return m == DissimilarityMode::trace ? "trace" : "tv"; }
inline const char* mode_name(ComplexityMode m) {
    return m == ComplexityMode::analytic_cap ? "analytic_cap" : "mc_estimate";
}

namespace detail {

inline Json task_json(const TaskDescription& t) {
    if (t.kind == TaskDescription::Kind::gaussian) {
        return {{"kind", "gaussian"},
                {"mu0", t.gaussian.mu0},
                {"mu1", t.gaussian.mu1},
                {"sigma2", t.gaussian.sigma2},
                {"prior0", t.gaussian.prior0}};
    }
    return {{"kind", "table"}, {"features", t.features}, {"prior", t.prior}, {"cond", t.cond}};
}

}  // namespace detail

/// Canonical JSON form; parse_config(config_to_json(c)) reproduces c.
inline Json config_to_json(const ExperimentConfig& cfg) {
    Json j;
    j["schema"] = kConfigSchema;
    j["ansatz"] = cfg.ansatz_json;
    j["grid"] = {{"resolution", cfg.grid_resolution}, {"refine", cfg.refine}, {"cap", cfg.grid_cap}};
    j["quantization"] = {{"bins", cfg.bins}, {"span_sigmas", cfg.span_sigmas}};
    j["source"] = detail::task_json(cfg.source);
    if (cfg.target) j["target"] = detail::task_json(*cfg.target);
    j["n_source"] = cfg.n_source;
    j["n_target"] = cfg.n_target;
    if (!cfg.shifts.empty()) j["shifts"] = cfg.shifts;
    j["replications"] = cfg.replications;
    j["bound"] = {{"delta", cfg.bound.delta},
                  {"d_st_mode", mode_name(cfg.bound.d_st_mode)},
                  {"r_mode", mode_name(cfg.bound.r_mode)}};
    j["rademacher"] = {{"outer", cfg.rademacher.outer},
                       {"sigma_draws", cfg.rademacher.sigma_draws},
                       {"exhaustive_max_n", cfg.rademacher.exhaustive_max_n}};
    j["master_seed"] = cfg.master_seed;
    j["output_dir"] = cfg.output_dir;
    return j;
}

}  // namespace qtl
