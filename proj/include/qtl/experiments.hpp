#pragma once

// The three sweeps driven by an ExperimentConfig, each producing a CSV table:
// excess-risk curves over (N^S, N^T), mean-shift sweeps, and bound-term
// breakdowns.

#include <cstdint>
#include <string>
#include <vector>

#include "qtl/complexity.hpp"
#include "qtl/config.hpp"
#include "qtl/divergence.hpp"
#include "qtl/embedding_table.hpp"
#include "qtl/pipeline.hpp"
#include "qtl/report.hpp"

namespace qtl {

inline const std::vector<std::string>& risk_curve_header() {
    static const std::vector<std::string> h = [] {
        std::vector<std::string> v{"n_source", "n_target", "replications", "median", "q25",
                                   "q75",      "excess_raw_mean", "bound_value"};
        for (const auto& c : bound_component_names()) v.push_back(c);
        return v;
    }();
    return h;
}

inline const std::vector<std::string>& shift_sweep_header() {
    static const std::vector<std::string> h{"shift", "median", "q25", "q75", "bound_value", "dst_trace", "dst_tv"};
    return h;
}

inline const std::vector<std::string>& bounds_header() {
    static const std::vector<std::string> h{"n_source", "n_target", "mi_sup_source", "mi_sup_target",
                                            "cap_mi",   "cap_dim",  "r_povm_mc",     "r_joint_mc",
                                            "dst_trace", "dst_tv",  "bound_no_transfer", "bound_transfer"};
    return h;
}

inline const std::vector<std::string>& replications_header() {
    static const std::vector<std::string> h{"n_source", "n_target", "replication", "excess", "excess_raw"};
    return h;
}

inline ReplicationPlan make_plan(const ExperimentConfig& cfg, TaskPair pair, std::size_t threads) {
    return ReplicationPlan{std::move(pair), cfg.n_source,     cfg.n_target,      cfg.replications, cfg.refine,
                           cfg.bound,       cfg.rademacher, cfg.master_seed, threads};
}

struct RiskCurveResult {
    std::vector<RiskReport> reports;
    CsvTable table;
    CsvTable per_replication;
};

inline RiskCurveResult run_risk_curve(const ExperimentConfig& cfg, std::size_t threads = 0) {
    const ThetaGrid grid = make_grid(cfg);
    RiskCurveResult out;
    out.reports = replicate(make_plan(cfg, resolve_pair(cfg), threads), cfg.ansatz, grid);
    out.table.header = risk_curve_header();
    out.per_replication.header = replications_header();
    for (const RiskReport& r : out.reports) {
        std::vector<double> row{static_cast<double>(r.n_source), static_cast<double>(r.n_target),
                                static_cast<double>(r.replications), r.median, r.q25, r.q75, r.excess_raw_mean,
                                r.bound_value};
        for (double c : component_values(r.components)) row.push_back(c);
        out.table.add_row(row);
        for (std::size_t i = 0; i < r.excess.size(); ++i) {
            out.per_replication.add_row({static_cast<double>(r.n_source), static_cast<double>(r.n_target),
                                         static_cast<double>(i), r.excess[i], r.excess_raw[i]});
        }
    }
    return out;
}

struct ShiftRow {
    double shift = 0.0;
    RiskReport report;
    double dst_trace = 0.0;
    double dst_tv = 0.0;
};

struct ShiftSweepResult {
    std::vector<ShiftRow> rows;  // ascending shift
    CsvTable table;
};

/// Transfer excess risk with the target means moved by each shift. Needs a
/// single (N^S >= 1, N^T) cell; every shift reuses the same replication streams.
inline ShiftSweepResult run_shift_sweep(const ExperimentConfig& cfg, std::size_t threads = 0) {
    if (cfg.n_source.size() != 1 || cfg.n_source[0] == 0) {
        throw ConfigInvalid("n_source: shift sweeps need exactly one value >= 1");
    }
    if (cfg.n_target.size() != 1) throw ConfigInvalid("n_target: shift sweeps need exactly one value");
    ExperimentConfig sorted = cfg;
    std::sort(sorted.shifts.begin(), sorted.shifts.end());
    const std::vector<TaskPair> pairs = resolve_shift_pairs(sorted);
    const ThetaGrid grid = make_grid(cfg);
    const EmbeddingTable table(cfg.ansatz, grid, pairs.front().source.features());

    ShiftSweepResult out;
    out.table.header = shift_sweep_header();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        ShiftRow row;
        row.shift = sorted.shifts[i];
        row.report = replicate(make_plan(sorted, pairs[i], threads), cfg.ansatz, grid, table).front();
        row.dst_trace = dst_trace(pair_profiles(pairs[i], table));
        row.dst_tv = dst_tv(pairs[i]);
        out.table.add_row({row.shift, row.report.median, row.report.q25, row.report.q75, row.report.bound_value,
                           row.dst_trace, row.dst_tv});
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// Bound terms per (N^S, N^T) cell. Caps and MC estimates refer to the target
/// task at N^T; the bound columns use the configured r_mode and d_st_mode.
/// Rows with N^S = 0 report the no-transfer bound in both bound columns.
inline CsvTable run_bounds(const ExperimentConfig& cfg, std::size_t threads = 0) {
    const TaskPair pair = resolve_pair(cfg);
    const ThetaGrid grid = make_grid(cfg);
    const EmbeddingTable table(cfg.ansatz, grid, pair.source.features());
    const double mi_source = max_of(renyi2_mi_profile(table, pair.source));
    const double mi_target = max_of(renyi2_mi_profile(table, pair.target));
    const double cap_mi = rademacher_cap_mi(table, pair.target);
    const double cap_dim = rademacher_cap_dim(table, pair.target);
    const double d_trace = dst_trace(pair_profiles(pair, table));
    const double d_tv = dst_tv(pair);
    const double d_st = cfg.bound.d_st_mode == DissimilarityMode::trace ? d_trace : d_tv;

    std::map<std::size_t, RademacherPair> target_mc, source_mc;
    auto estimate = [&](std::map<std::size_t, RademacherPair>& cache, const DiscreteTask& task, TaskRole role,
                        std::size_t n) {
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
        return cache[n] = rademacher_estimates(task, table, n,
                                               complexity_settings(cfg.rademacher, cfg.master_seed, role, n, threads));
    };
    auto complexities = [&](std::map<std::size_t, RademacherPair>& cache, const DiscreteTask& task, TaskRole role,
                            std::size_t n) -> Complexities {
        if (cfg.bound.r_mode == ComplexityMode::analytic_cap) {
            return {rademacher_cap_mi(table, task), rademacher_cap_dim(table, task)};
        }
        const RademacherPair e = estimate(cache, task, role, n);
        return {e.povm.value, e.joint.value};
    };

    CsvTable out;
    out.header = bounds_header();
    for (std::size_t ns : cfg.n_source) {
        for (std::size_t nt : cfg.n_target) {
            const RademacherPair mc = estimate(target_mc, pair.target, TaskRole::target, nt);
            const Complexities tc = complexities(target_mc, pair.target, TaskRole::target, nt);
            const double no_transfer = assemble_no_transfer(cfg.bound.delta, tc, nt).value;
            const double transfer =
                ns == 0 ? no_transfer
                        : assemble_transfer(cfg.bound.delta, tc,
                                            complexities(source_mc, pair.source, TaskRole::source, ns), d_st, ns, nt)
                              .value;
            out.add_row({static_cast<double>(ns), static_cast<double>(nt), mi_source, mi_target, cap_mi, cap_dim,
                         mc.povm.value, mc.joint.value, d_trace, d_tv, no_transfer, transfer});
        }
    }
    return out;
}

}  // namespace qtl
