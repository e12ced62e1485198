#pragma once

// Two-stage transfer learning (grid pretraining of theta on source data, then
// POVM training on target data), excess risks, the no-transfer and transfer
// generalization bounds, and replicated risk statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtl/classifier.hpp"
#include "qtl/complexity.hpp"
#include "qtl/divergence.hpp"
#include "qtl/embedding.hpp"
#include "qtl/embedding_table.hpp"
#include "qtl/parallel.hpp"
#include "qtl/rng.hpp"
#include "qtl/tasks.hpp"

namespace qtl {

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainedModel {
    ThetaVector theta_hat;
    Povm povm;
    double source_train_risk = 0.0;
    double target_train_risk = 0.0;
};

struct PretrainResult {
    std::size_t index = 0;  // grid index of the coarse argmin
    ThetaVector theta;      // equals grid[index] unless refinement moved it
    double risk = 0.0;      // trained empirical risk at theta
};

/// Grid argmin of the trained source risk, lowest index on ties.
inline PretrainResult pretrain_on_table(const EmbeddingTable& table, const ThetaGrid& grid,
                                        const Dataset& source) {
    if (source.empty()) throw EmptyDataset("pretrain_theta: no source samples");
    const std::vector<double> risk = trained_risk_profile(table, source);
    const std::size_t i = tie_broken_argmin(risk);
    return {i, grid[i], risk[i]};
}

/// One round of local refinement: the 3^d neighbourhood at half the coarse
/// step. Only strict improvements (beyond the tie tolerance) move theta.
template <Embedding E>
PretrainResult refine_pretrained(const PretrainResult& coarse, const E& embedding, const ThetaGrid& grid,
                                 const Dataset& source, const std::vector<double>& features) {
    if (grid.resolution < 2) return coarse;
    const ThetaGrid local = local_refinement_grid(coarse.theta, grid.resolution);
    const EmbeddingTable table(embedding, local, features);
    const std::vector<double> risk = trained_risk_profile(table, source);
    const std::size_t i = tie_broken_argmin(risk);
    if (risk[i] < coarse.risk - kArgminTieTol) return {coarse.index, local[i], risk[i]};
    return coarse;
}

/// (theta_hat, trained source risk) minimizing the trained empirical risk over the grid.
template <Embedding E>
std::pair<ThetaVector, double> pretrain_theta(const Dataset& source, const E& embedding, const ThetaGrid& grid,
                                              bool refine = false) {
    if (source.empty()) throw EmptyDataset("pretrain_theta: no source samples");
    if (grid.size() == 0) throw ConfigInvalid("pretrain_theta: empty grid");
    std::vector<double> features;
    for (const Sample& s : source.samples) features.push_back(s.x);
    std::sort(features.begin(), features.end());
    features.erase(std::unique(features.begin(), features.end()), features.end());
    // rebin onto the distinct observed features
    Dataset local = source;
    for (Sample& s : local.samples) {
        s.bin = static_cast<std::size_t>(std::lower_bound(features.begin(), features.end(), s.x) - features.begin());
    }
    local.num_bins = features.size();
    const EmbeddingTable table(embedding, grid, features);
    PretrainResult r = pretrain_on_table(table, grid, local);
    if (refine) r = refine_pretrained(r, embedding, grid, local, features);
    return {r.theta, r.risk};
}

/// Target-stage training at a fixed, pretrained theta.
template <Embedding E>
TrainedModel fit_target_stage(const ThetaVector& theta, double source_risk, const Dataset& target,
                              const E& embedding) {
    if (target.empty()) throw EmptyDataset("transfer_learn: no target samples");
    TrainedPovm t = train_povm(target, embedding, theta);
    return {theta, std::move(t.povm), source_risk, t.empirical_risk};
}

template <Embedding E>
TrainedModel transfer_learn(const Dataset& source, const Dataset& target, const E& embedding,
                            const ThetaGrid& grid, bool refine = false) {
    if (target.empty()) throw EmptyDataset("transfer_learn: no target samples");
    const auto [theta, risk] = pretrain_theta(source, embedding, grid, refine);
    return fit_target_stage(theta, risk, target, embedding);
}

/// Smallest minimum expected risk over the grid.
template <Embedding E>
double grid_min_risk(const DiscreteTask& task, const E& embedding, const ThetaGrid& grid) {
    const EmbeddingTable table(embedding, grid, task.features());
    const auto profile = risk_profile(table, task);
    return *std::min_element(profile.begin(), profile.end());
}

/// Target risk of the trained model minus `reference` (the grid-min target risk). Unclamped.
template <Embedding E>
double excess_risk_against(const TrainedModel& model, const DiscreteTask& target, const E& embedding,
                           double reference) {
    return expected_risk(model.povm, target, embedding, model.theta_hat) - reference;
}

template <Embedding E>
double transfer_excess_risk(const TrainedModel& model, const DiscreteTask& target, const E& embedding,
                            const ThetaGrid& grid) {
    return excess_risk_against(model, target, embedding, grid_min_risk(target, embedding, grid));
}

/// Excess risk of joint (theta, POVM) training on target data alone.
template <Embedding E>
double no_transfer_excess_risk(const Dataset& target_data, const DiscreteTask& target, const E& embedding,
                               const ThetaGrid& grid, bool refine = false) {
    if (target_data.empty()) throw EmptyDataset("no_transfer_excess_risk");
    return transfer_excess_risk(transfer_learn(target_data, target_data, embedding, grid, refine), target,
                                embedding, grid);
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

enum class DissimilarityMode { trace, tv };
enum class ComplexityMode { mc_estimate, analytic_cap };

struct BoundConfig {
    double delta = 0.5;
    DissimilarityMode d_st_mode = DissimilarityMode::trace;
    ComplexityMode r_mode = ComplexityMode::analytic_cap;

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0)) throw ConfigInvalid("bound.delta must lie in (0, 1)");
    }
};

/// The two Rademacher complexities of one task at one sample size.
struct Complexities {
    double povm = 0.0;   // sup over theta of the POVM-class complexity
    double joint = 0.0;  // joint (theta, POVM) complexity
};

struct BoundComponents {
    double complexity_term = 0.0;
    double confidence_term = 0.0;
    double dissimilarity_term = 0.0;
    double source_complexity_term = 0.0;
    double source_confidence_term = 0.0;
};

struct BoundResult {
    double value = 0.0;
    BoundComponents components;
};

inline const std::vector<std::string>& bound_component_names() {
    static const std::vector<std::string> names{"complexity_term", "confidence_term", "dissimilarity_term",
                                                "source_complexity_term", "source_confidence_term"};
    return names;
}

inline std::vector<double> component_values(const BoundComponents& c) {
    return {c.complexity_term, c.confidence_term, c.dissimilarity_term, c.source_complexity_term,
            c.source_confidence_term};
}

/// 2(R_joint + R_povm)/sqrt(N) + sqrt(2 log(2/delta) / N).
inline BoundResult assemble_no_transfer(double delta, const Complexities& target, std::size_t n_target) {
    if (n_target == 0) throw ConfigInvalid("bound_no_transfer: n_target must be >= 1");
    const double n = static_cast<double>(n_target);
    BoundResult r;
    r.components.complexity_term = 2.0 * (target.joint + target.povm) / std::sqrt(n);
    r.components.confidence_term = std::sqrt(2.0 / n * std::log(2.0 / delta));
    r.value = r.components.complexity_term + r.components.confidence_term;
    return r;
}

/// 4 R^T_povm/sqrt(N^T) + sqrt(2 log(3/delta)/N^T) + D^ST
///   + 2(R^S_joint + R^S_povm)/sqrt(N^S) + sqrt(2 log(3/delta)/N^S).
inline BoundResult assemble_transfer(double delta, const Complexities& target, const Complexities& source,
                                     double d_st, std::size_t n_source, std::size_t n_target) {
    if (n_source == 0 || n_target == 0) throw ConfigInvalid("bound_transfer: sample sizes must be >= 1");
    const double nt = static_cast<double>(n_target), ns = static_cast<double>(n_source);
    BoundResult r;
    auto& c = r.components;
    c.complexity_term = 4.0 * target.povm / std::sqrt(nt);
    c.confidence_term = std::sqrt(2.0 * std::log(3.0 / delta) / nt);
    c.dissimilarity_term = d_st;
    c.source_complexity_term = 2.0 * (source.joint + source.povm) / std::sqrt(ns);
    c.source_confidence_term = std::sqrt(2.0 * std::log(3.0 / delta) / ns);
    r.value = c.complexity_term + c.confidence_term + c.dissimilarity_term + c.source_complexity_term +
              c.source_confidence_term;
    return r;
}

/// Complexities of `task` at sample size n, either as caps or as MC estimates.
inline Complexities task_complexities(ComplexityMode mode, const DiscreteTask& task, const EmbeddingTable& table,
                                      std::size_t n, const RademacherSettings& settings) {
    if (mode == ComplexityMode::analytic_cap) {
        return {rademacher_cap_mi(table, task), rademacher_cap_dim(table, task)};
    }
    const RademacherPair est = rademacher_estimates(task, table, n, settings);
    return {est.povm.value, est.joint.value};
}

inline double dissimilarity(DissimilarityMode mode, const TaskPair& pair, const EmbeddingTable& table) {
    return mode == DissimilarityMode::trace ? dst_trace(pair_profiles(pair, table)) : dst_tv(pair);
}

template <Embedding E>
BoundResult bound_no_transfer(const BoundConfig& cfg, const DiscreteTask& task, const E& embedding,
                              const ThetaGrid& grid, std::size_t n_target, const RademacherSettings& settings = {}) {
    cfg.validate();
    const EmbeddingTable table(embedding, grid, task.features());
    return assemble_no_transfer(cfg.delta, task_complexities(cfg.r_mode, task, table, n_target, settings),
                                n_target);
}

template <Embedding E>
BoundResult bound_transfer(const BoundConfig& cfg, const TaskPair& pair, const E& embedding, const ThetaGrid& grid,
                           std::size_t n_source, std::size_t n_target, const RademacherSettings& settings = {}) {
    cfg.validate();
    if (!pair.aligned()) throw UnalignedSupport("bound_transfer: tasks must share feature bins");
    const EmbeddingTable table(embedding, grid, pair.source.features());
    return assemble_transfer(cfg.delta, task_complexities(cfg.r_mode, pair.target, table, n_target, settings),
                             task_complexities(cfg.r_mode, pair.source, table, n_source, settings),
                             dissimilarity(cfg.d_st_mode, pair, table), n_source, n_target);
}

// ---------------------------------------------------------------------------
// Replication
// ---------------------------------------------------------------------------

struct RiskReport {
    std::size_t n_source = 0;  // 0: no-transfer baseline
    std::size_t n_target = 0;
    std::size_t replications = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double excess_raw_mean = 0.0;
    double bound_value = 0.0;
    BoundComponents components;
    std::vector<double> excess;      // clamped, per replication
    std::vector<double> excess_raw;  // unclamped, per replication
};

/// Linear-interpolation quantile of sorted data (position q * (n - 1)).
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw EmptyDataset("quantile of no values");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline void summarize(RiskReport& r) {
    std::vector<double> s = r.excess;
    std::sort(s.begin(), s.end());
    r.replications = s.size();
    r.median = sorted_quantile(s, 0.5);
    r.q25 = sorted_quantile(s, 0.25);
    r.q75 = sorted_quantile(s, 0.75);
    double sum = 0.0;
    for (double v : r.excess_raw) sum += v;
    r.excess_raw_mean = sum / static_cast<double>(r.excess_raw.size());
}

/// Everything one sweep needs, already resolved to tasks on a shared bin set.
struct ReplicationPlan {
    TaskPair pair;
    std::vector<std::size_t> n_source;  // 0 entries give the no-transfer baseline
    std::vector<std::size_t> n_target;
    std::size_t replications = 200;
    bool refine = false;
    BoundConfig bound;
    RademacherSettings rademacher;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

enum class TaskRole : std::uint64_t { source = 0x5c, target = 0x7a };

/// Estimator settings for one (task, sample size): the draw stream is keyed
/// by the master seed, the task role and n, so every command that needs the
/// same estimate reproduces it exactly.
inline RademacherSettings complexity_settings(RademacherSettings base, std::uint64_t master_seed, TaskRole role,
                                              std::size_t n, std::size_t threads) {
    base.seed = derive_stream(master_seed ^ static_cast<std::uint64_t>(role), n, StreamRole::rademacher);
    base.threads = threads;
    return base;
}

namespace detail {

/// Target-stage model and its raw excess risk at a pretrained point.
template <Embedding E>
double staged_excess(const PretrainResult& pre, const Dataset& target_data, const DiscreteTask& target,
                     const E& embedding, double reference) {
    return excess_risk_against(fit_target_stage(pre.theta, pre.risk, target_data, embedding), target, embedding,
                               reference);
}

}  // namespace detail

/// Runs every (N^S, N^T) cell of the plan. Replication r draws its source and
/// target datasets from streams (seed, r, role); datasets of different sizes
/// in one replication are prefixes of each other.
template <Embedding E>
std::vector<RiskReport> replicate(const ReplicationPlan& plan, const E& embedding, const ThetaGrid& grid,
                                  const EmbeddingTable& table) {
    plan.bound.validate();
    if (plan.replications == 0) throw ConfigInvalid("replications must be >= 1");
    if (plan.n_source.empty() || plan.n_target.empty()) throw ConfigInvalid("n_source and n_target must be nonempty");
    for (std::size_t n : plan.n_target) {
        if (n == 0) throw ConfigInvalid("n_target values must be >= 1");
    }
    if (!plan.pair.aligned()) throw UnalignedSupport("replicate: tasks must share feature bins");
    const DiscreteTask& source = plan.pair.source;
    const DiscreteTask& target = plan.pair.target;
    const std::vector<double>& features = source.features();
    if (features != table.features() || table.num_points() != grid.size()) {
        throw UnalignedSupport("replicate: table does not match the plan's bins and grid");
    }
    const std::vector<double> target_profile = risk_profile(table, target);
    const double reference = *std::min_element(target_profile.begin(), target_profile.end());

    const std::size_t max_nt = *std::max_element(plan.n_target.begin(), plan.n_target.end());
    const std::size_t max_ns = *std::max_element(plan.n_source.begin(), plan.n_source.end());
    const std::size_t cols = plan.n_source.size() * plan.n_target.size();

    // raw[r][cell]
    std::vector<std::vector<double>> raw(plan.replications, std::vector<double>(cols));
    parallel_for(plan.replications, plan.threads, [&](std::size_t r) {
        const Dataset target_all = sample_dataset(target, max_nt, derive_stream(plan.seed, r, StreamRole::target_data));
        const Dataset source_all =
            sample_dataset(source, max_ns, derive_stream(plan.seed, r, StreamRole::source_data));
        for (std::size_t a = 0; a < plan.n_source.size(); ++a) {
            const std::size_t ns = plan.n_source[a];
            std::optional<PretrainResult> pre;
            if (ns > 0) {
                Dataset src = source_all;
                src.samples.resize(ns);
                pre = pretrain_on_table(table, grid, src);
                if (plan.refine) pre = refine_pretrained(*pre, embedding, grid, src, features);
            }
            for (std::size_t b = 0; b < plan.n_target.size(); ++b) {
                Dataset tgt = target_all;
                tgt.samples.resize(plan.n_target[b]);
                PretrainResult p;
                if (pre) {
                    p = *pre;
                } else {
                    p = pretrain_on_table(table, grid, tgt);
                    if (plan.refine) p = refine_pretrained(p, embedding, grid, tgt, features);
                }
                raw[r][a * plan.n_target.size() + b] = detail::staged_excess(p, tgt, target, embedding, reference);
            }
        }
    });

    // bounds once per cell, complexities cached per (task, n)
    std::map<std::size_t, Complexities> target_c, source_c;
    auto complexities = [&](std::map<std::size_t, Complexities>& cache, const DiscreteTask& task, std::size_t n,
                            TaskRole role) {
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
        return cache[n] = task_complexities(plan.bound.r_mode, task, table, n,
                                            complexity_settings(plan.rademacher, plan.seed, role, n, plan.threads));
    };
    const double d_st = dissimilarity(plan.bound.d_st_mode, plan.pair, table);

    std::vector<RiskReport> reports;
    for (std::size_t a = 0; a < plan.n_source.size(); ++a) {
        for (std::size_t b = 0; b < plan.n_target.size(); ++b) {
            RiskReport rep;
            rep.n_source = plan.n_source[a];
            rep.n_target = plan.n_target[b];
            for (std::size_t r = 0; r < plan.replications; ++r) {
                const double v = raw[r][a * plan.n_target.size() + b];
                rep.excess_raw.push_back(v);
                rep.excess.push_back(std::max(0.0, v));
            }
            summarize(rep);
            const Complexities tc = complexities(target_c, target, rep.n_target, TaskRole::target);
            const BoundResult bound =
                rep.n_source == 0
                    ? assemble_no_transfer(plan.bound.delta, tc, rep.n_target)
                    : assemble_transfer(plan.bound.delta, tc, complexities(source_c, source, rep.n_source, TaskRole::source),
                                        d_st, rep.n_source, rep.n_target);
            rep.bound_value = bound.value;
            rep.components = bound.components;
            reports.push_back(std::move(rep));
        }
    }
    return reports;
}

template <Embedding E>
std::vector<RiskReport> replicate(const ReplicationPlan& plan, const E& embedding, const ThetaGrid& grid) {
    return replicate(plan, embedding, grid, EmbeddingTable(embedding, grid, plan.pair.source.features()));
}

}  // namespace qtl
