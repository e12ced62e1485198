#pragma once

// Precomputed rho_theta(x) for every (grid point, feature bin) pair.
//
// Grid sweeps only ever need linear combinations sum_b w_b rho_theta(x_b) for
// all theta at once, so the table stores one column per bin holding the
// column-major n x n density of every grid point stacked vertically.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qtl/classifier.hpp"
#include "qtl/embedding.hpp"
#include "qtl/qmath.hpp"
#include "qtl/tasks.hpp"

namespace qtl {

class EmbeddingTable {
public:
    template <Embedding E>
    EmbeddingTable(const E& embedding, const ThetaGrid& grid, std::span<const double> features)
        : dim_(static_cast<Eigen::Index>(embedding.dim())),
          block_(dim_ * dim_),
          num_points_(grid.size()),
          features_(features.begin(), features.end()),
          values_(block_ * static_cast<Eigen::Index>(grid.size()),
                  static_cast<Eigen::Index>(features.size())) {
        for (std::size_t p = 0; p < num_points_; ++p) {
            for (std::size_t b = 0; b < features_.size(); ++b) {
                const DensityMatrix rho = embedding.density(grid[p], features_[b]);
                values_.col(static_cast<Eigen::Index>(b)).segment(offset(p), block_) =
                    rho.matrix().reshaped();
            }
        }
    }

    Eigen::Index dim() const noexcept { return dim_; }
    std::size_t num_points() const noexcept { return num_points_; }
    std::size_t num_bins() const noexcept { return features_.size(); }
    const std::vector<double>& features() const noexcept { return features_; }

    /// sum_b weights[b] * rho_p(x_b) for every grid point p, stacked.
    ComplexVector weighted_sums(std::span<const double> weights) const {
        if (weights.size() != features_.size()) throw DimMismatch("EmbeddingTable: weight count");
        ComplexVector out = ComplexVector::Zero(values_.rows());
        for (std::size_t b = 0; b < weights.size(); ++b) {
            if (weights[b] != 0.0) out += weights[b] * values_.col(static_cast<Eigen::Index>(b));
        }
        return out;
    }

    /// View of grid point p's matrix inside a stacked vector from weighted_sums.
    Eigen::Map<const ComplexMatrix> block(const ComplexVector& stacked, std::size_t p) const {
        return Eigen::Map<const ComplexMatrix>(stacked.data() + offset(p), dim_, dim_);
    }

    Eigen::Map<const ComplexMatrix> density(std::size_t p, std::size_t b) const {
        return Eigen::Map<const ComplexMatrix>(
            values_.col(static_cast<Eigen::Index>(b)).data() + offset(p), dim_, dim_);
    }

private:
    Eigen::Index offset(std::size_t p) const { return block_ * static_cast<Eigen::Index>(p); }

    Eigen::Index dim_;
    Eigen::Index block_;
    std::size_t num_points_;
    std::vector<double> features_;
    ComplexMatrix values_;
};

inline constexpr double kArgminTieTol = 1e-12;

/// First index whose value is within 1e-12 of the minimum (lowest grid index wins ties).
inline std::size_t tie_broken_argmin(std::span<const double> values) {
    if (values.empty()) throw ConfigInvalid("argmin over an empty set");
    double best = values[0];
    for (double v : values) best = std::min(best, v);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] <= best + kArgminTieTol) return i;
    }
    return 0;
}

/// Minimum expected risk 1/2 - T(p0 rho0, p1 rho1) at every grid point.
inline std::vector<double> risk_profile(const EmbeddingTable& table, const DiscreteTask& task) {
    if (task.features() != table.features()) throw UnalignedSupport("risk_profile: task bins differ from table bins");
    std::vector<double> w(task.num_bins());
    for (std::size_t b = 0; b < w.size(); ++b) w[b] = task.joint(0, b) - task.joint(1, b);
    const ComplexVector sums = table.weighted_sums(w);
    std::vector<double> risk(table.num_points());
    for (std::size_t p = 0; p < risk.size(); ++p) {
        risk[p] = std::clamp(0.5 - 0.5 * trace_norm(table.block(sums, p)), 0.0, 0.5);
    }
    return risk;
}

/// Per-bin signed empirical weights (N_{0,b} - N_{1,b}) / N.
inline std::vector<double> empirical_difference_weights(const Dataset& data, std::size_t num_bins) {
    if (data.empty()) throw EmptyDataset("empirical_difference_weights");
    std::vector<double> w(num_bins, 0.0);
    const double inv = 1.0 / static_cast<double>(data.size());
    for (const Sample& s : data.samples) w.at(s.bin) += s.label == 0 ? inv : -inv;
    return w;
}

/// Trained (Helstrom-minimized) empirical risk at every grid point.
inline std::vector<double> trained_risk_profile(const EmbeddingTable& table, const Dataset& data) {
    const ComplexVector sums = table.weighted_sums(empirical_difference_weights(data, table.num_bins()));
    std::vector<double> risk(table.num_points());
    for (std::size_t p = 0; p < risk.size(); ++p) {
        risk[p] = std::clamp(0.5 - 0.5 * trace_norm(table.block(sums, p)), 0.0, 0.5);
    }
    return risk;
}

}  // namespace qtl
