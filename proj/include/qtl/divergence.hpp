#pragma once

// Task-based distances between embedding parameters and the two
// source/target dissimilarity measures (trace-based and TV-based).
// Suprema and argmins over theta are restricted to a ThetaGrid.

#include <algorithm>
#include <cmath>
#include <vector>

#include "qtl/classifier.hpp"
#include "qtl/embedding.hpp"
#include "qtl/embedding_table.hpp"
#include "qtl/tasks.hpp"

namespace qtl {

struct TaskPair {
    DiscreteTask source;
    DiscreteTask target;

    bool aligned() const { return source.features() == target.features(); }
};

/// d(theta, theta') = |R_theta' - R_theta| for the task's minimum expected risk.
template <Embedding E>
double task_distance(const DiscreteTask& task, const ThetaVector& theta, const ThetaVector& theta2,
                     const E& embedding) {
    return std::abs(min_expected_risk(task, embedding, theta2) -
                    min_expected_risk(task, embedding, theta));
}

/// Source and target risk profiles over one grid.
struct PairProfiles {
    std::vector<double> source;
    std::vector<double> target;
};

inline PairProfiles pair_profiles(const TaskPair& pair, const EmbeddingTable& table) {
    return {risk_profile(table, pair.source), risk_profile(table, pair.target)};
}

inline double dst_trace(const PairProfiles& profiles) {
    double best = 0.0;
    for (std::size_t p = 0; p < profiles.source.size(); ++p) {
        best = std::max(best, 2.0 * std::abs(profiles.source[p] - profiles.target[p]));
    }
    return best;
}

/// 2 * max over the grid of |R^S_theta - R^T_theta|.
template <Embedding E>
double dst_trace(const TaskPair& pair, const E& embedding, const ThetaGrid& grid) {
    if (grid.size() == 0) throw ConfigInvalid("dst_trace: empty grid");
    if (!pair.aligned()) throw UnalignedSupport("dst_trace: tasks must share feature bins");
    const EmbeddingTable table(embedding, grid, pair.source.features());
    return dst_trace(pair_profiles(pair, table));
}

/// 2 TV(p^T_c, p^S_c) + 2 sum_c p^S_c(c) TV(p^T(x|c), p^S(x|c)).
inline double dst_tv(const TaskPair& pair) {
    if (!pair.aligned()) throw UnalignedSupport("dst_tv: tasks must share feature bins");
    const auto& s = pair.source;
    const auto& t = pair.target;
    double value = 2.0 * tv_distance(t.prior(), s.prior());
    for (int c = 0; c < 2; ++c) value += 2.0 * s.prior(c) * tv_distance(t.cond(c), s.cond(c));
    return value;
}

struct DissimilarityReport {
    double d_st = 0.0;
    double max_violation = 0.0;   // max of d^T - d^S - d_st (<= 0 when satisfied)
    std::size_t worst_index = 0;  // grid index attaining max_violation
    ThetaVector worst_theta;
    std::size_t violations = 0;   // points exceeding the 1e-9 slack
    std::size_t source_argmin = 0;
    std::size_t target_argmin = 0;

    bool passed() const noexcept { return violations == 0; }
};

inline constexpr double kDissimilaritySlack = 1e-9;

inline DissimilarityReport check_dissimilarity(const PairProfiles& profiles, const ThetaGrid& grid,
                                               double d_st) {
    DissimilarityReport r;
    r.d_st = d_st;
    r.source_argmin = tie_broken_argmin(profiles.source);
    r.target_argmin = tie_broken_argmin(profiles.target);
    const double best_s = profiles.source[r.source_argmin];
    const double best_t = profiles.target[r.target_argmin];
    r.max_violation = -INFINITY;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const double lhs = std::abs(profiles.target[p] - best_t);
        const double rhs = std::abs(profiles.source[p] - best_s) + d_st;
        const double v = lhs - rhs;
        if (v > r.max_violation) {
            r.max_violation = v;
            r.worst_index = p;
        }
        if (v > kDissimilaritySlack) ++r.violations;
    }
    r.worst_theta = grid[r.worst_index];
    return r;
}

/// Checks d^T(theta, theta*_T) <= d^S(theta, theta*_S) + d_st at every grid point.
template <Embedding E>
DissimilarityReport check_dissimilarity(const TaskPair& pair, const E& embedding,
                                        const ThetaGrid& grid, double d_st) {
    if (!pair.aligned()) throw UnalignedSupport("check_dissimilarity: tasks must share feature bins");
    const EmbeddingTable table(embedding, grid, pair.source.features());
    return check_dissimilarity(pair_profiles(pair, table), grid, d_st);
}

}  // namespace qtl
