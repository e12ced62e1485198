#pragma once

// Finite joint task distributions p(c, x), datasets drawn from them, and the
// class-average densities they induce through an embedding.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qtl/embedding.hpp"
#include "qtl/errors.hpp"
#include "qtl/qmath.hpp"
#include "qtl/rng.hpp"

namespace qtl {

inline constexpr double kProbTol = 1e-12;

/// Binary task over a finite, strictly increasing feature support.
class DiscreteTask {
public:
    DiscreteTask(std::vector<double> features, std::array<double, 2> prior,
                 std::array<std::vector<double>, 2> cond)
        : features_(std::move(features)), prior_(prior), cond_(std::move(cond)) {
        const std::size_t b = features_.size();
        if (b == 0) throw InvalidTask("empty feature support");
        for (std::size_t i = 1; i < b; ++i) {
            if (!(features_[i] > features_[i - 1])) {
                throw InvalidTask("features must be strictly increasing");
            }
        }
        if (prior_[0] < 0.0 || prior_[1] < 0.0 || std::abs(prior_[0] + prior_[1] - 1.0) > kProbTol) {
            throw InvalidTask("prior must be a probability vector");
        }
        for (int c = 0; c < 2; ++c) {
            if (cond_[c].size() != b) throw InvalidTask("conditional table size mismatch");
            double s = 0.0;
            for (double v : cond_[c]) {
                if (!(v >= 0.0)) throw InvalidTask("negative conditional probability");
                s += v;
            }
            if (std::abs(s - 1.0) > kProbTol) {
                throw InvalidTask("conditional row " + std::to_string(c) + " sums to " +
                                  std::to_string(s));
            }
        }
    }

    std::size_t num_bins() const noexcept { return features_.size(); }
    const std::vector<double>& features() const noexcept { return features_; }
    double feature(std::size_t i) const { return features_[i]; }
    const std::array<double, 2>& prior() const noexcept { return prior_; }
    double prior(int c) const { return prior_[c]; }
    const std::vector<double>& cond(int c) const { return cond_[c]; }
    double joint(int c, std::size_t i) const { return prior_[c] * cond_[c][i]; }
    double marginal(std::size_t i) const { return joint(0, i) + joint(1, i); }

    std::vector<double> marginal() const {
        std::vector<double> p(num_bins());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = marginal(i);
        return p;
    }

private:
    std::vector<double> features_;
    std::array<double, 2> prior_;
    std::array<std::vector<double>, 2> cond_;
};

/// Per-class Gaussian feature model with shared variance.
struct GaussianTaskSpec {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double sigma2 = 1.0;
    double prior0 = 0.5;
    std::size_t bins = 100;
    double span_sigmas = 4.0;

    void validate() const {
        if (!(sigma2 > 0.0)) throw DegenerateSpec("sigma2 must be > 0");
        if (!(prior0 >= 0.0 && prior0 <= 1.0)) throw DegenerateSpec("prior0 must lie in [0, 1]");
        if (bins < 2) throw DegenerateSpec("bins must be >= 2");
        if (!(span_sigmas >= 0.0)) throw DegenerateSpec("span_sigmas must be >= 0");
    }

    GaussianTaskSpec shifted(double delta) const {
        GaussianTaskSpec s = *this;
        s.mu0 += delta;
        s.mu1 += delta;
        return s;
    }
};

/// `count` centers uniformly spanning [lo, hi].
inline std::vector<double> uniform_bin_centers(double lo, double hi, std::size_t count) {
    if (count < 2) throw DegenerateSpec("need at least two bins");
    if (!(hi > lo)) throw DegenerateSpec("zero-width quantization span");
    std::vector<double> c(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) c[i] = lo + step * static_cast<double>(i);
    return c;
}

/// Centers covering every spec's [min mu - k sigma, max mu + k sigma], so that
/// tasks built on them share one sample space. Bin count and k come from the first spec.
inline std::vector<double> shared_bin_centers(std::span<const GaussianTaskSpec> specs) {
    if (specs.empty()) throw DegenerateSpec("no task specs");
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : specs) {
        s.validate();
        const double k = specs.front().span_sigmas * std::sqrt(s.sigma2);
        lo = std::min(lo, std::min(s.mu0, s.mu1) - k);
        hi = std::max(hi, std::max(s.mu0, s.mu1) + k);
    }
    return uniform_bin_centers(lo, hi, specs.front().bins);
}

/// Gaussian class conditionals evaluated at `centers` and renormalized.
inline DiscreteTask quantize_gaussian_on(const GaussianTaskSpec& spec, std::vector<double> centers) {
    spec.validate();
    std::array<std::vector<double>, 2> cond;
    const std::array<double, 2> mu{spec.mu0, spec.mu1};
    for (int c = 0; c < 2; ++c) {
        cond[c].resize(centers.size());
        double total = 0.0;
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double z = centers[i] - mu[c];
            cond[c][i] = std::exp(-0.5 * z * z / spec.sigma2);
            total += cond[c][i];
        }
        if (!(total > 0.0)) throw DegenerateSpec("class " + std::to_string(c) + " has no mass on the bins");
        for (double& v : cond[c]) v /= total;
    }
    return DiscreteTask(std::move(centers), {spec.prior0, 1.0 - spec.prior0}, std::move(cond));
}

inline DiscreteTask quantize_gaussian_task(const GaussianTaskSpec& spec) {
    spec.validate();
    const GaussianTaskSpec one[] = {spec};
    return quantize_gaussian_on(spec, shared_bin_centers(one));
}

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

struct Sample {
    int label = 0;
    std::size_t bin = 0;
    double x = 0.0;
};

struct Dataset {
    std::vector<Sample> samples;
    std::uint64_t seed = 0;
    std::size_t num_bins = 0;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }

    std::array<std::size_t, 2> class_counts() const {
        std::array<std::size_t, 2> n{0, 0};
        for (const Sample& s : samples) ++n[s.label];
        return n;
    }
};

namespace detail {

inline std::size_t inverse_cdf(const std::vector<double>& cumulative, double u) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
    if (i >= cumulative.size()) {
        // u beyond the rounded total: fall back to the last bin with mass
        i = cumulative.size() - 1;
        while (i > 0 && cumulative[i] == cumulative[i - 1]) --i;
    }
    return i;
}

}  // namespace detail

/// n i.i.d. draws: c ~ prior, then x ~ cond[c]. Sample j uses stream
/// positions 2j and 2j+1, so smaller datasets from a seed are prefixes of larger ones.
inline Dataset sample_dataset(const DiscreteTask& task, std::size_t n, std::uint64_t seed) {
    Dataset d;
    d.seed = seed;
    d.num_bins = task.num_bins();
    d.samples.reserve(n);
    std::array<std::vector<double>, 2> cumulative;
    for (int c = 0; c < 2; ++c) {
        cumulative[c].resize(task.num_bins());
        std::partial_sum(task.cond(c).begin(), task.cond(c).end(), cumulative[c].begin());
    }
    const SplitMixStream rng(seed);
    for (std::size_t j = 0; j < n; ++j) {
        const int c = rng.uniform_at(2 * j) < task.prior(0) ? 0 : 1;
        const std::size_t bin = detail::inverse_cdf(cumulative[c], rng.uniform_at(2 * j + 1));
        d.samples.push_back({c, bin, task.feature(bin)});
    }
    return d;
}

/// The dataset's empirical measure as a task on `features` (both classes must occur).
inline DiscreteTask empirical_task(const Dataset& data, const std::vector<double>& features) {
    if (data.empty()) throw EmptyDataset("empirical_task");
    const auto counts = data.class_counts();
    if (counts[0] == 0 || counts[1] == 0) throw InvalidTask("empirical_task: a class is unobserved");
    std::array<std::vector<double>, 2> cond{std::vector<double>(features.size(), 0.0),
                                            std::vector<double>(features.size(), 0.0)};
    for (const Sample& s : data.samples) cond[s.label].at(s.bin) += 1.0;
    for (int c = 0; c < 2; ++c) {
        for (double& v : cond[c]) v /= static_cast<double>(counts[c]);
    }
    const double n = static_cast<double>(data.size());
    return DiscreteTask(features, {counts[0] / n, counts[1] / n}, std::move(cond));
}

/// CSV dump: index,label,x_value,bin_index
inline void write_dataset_csv(std::ostream& os, const Dataset& data) {
    os << "index,label,x_value,bin_index\n";
    char buf[64];
    for (std::size_t j = 0; j < data.size(); ++j) {
        const Sample& s = data.samples[j];
        std::snprintf(buf, sizeof buf, "%.12g", s.x);
        os << j << ',' << s.label << ',' << buf << ',' << s.bin << '\n';
    }
}

// ---------------------------------------------------------------------------
// Embedded class densities
// ---------------------------------------------------------------------------

/// Class-c average density rho_{theta|c} = sum_i p(x_i|c) rho_theta(x_i).
template <Embedding E>
DensityMatrix class_average_density(const DiscreteTask& task, const E& embedding,
                                    const ThetaVector& theta, int c) {
    if (c != 0 && c != 1) throw InvalidTask("class index must be 0 or 1");
    const auto n = static_cast<Eigen::Index>(embedding.dim());
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < task.num_bins(); ++i) {
        const double w = task.cond(c)[i];
        if (w == 0.0) continue;
        acc += w * embedding.density(theta, task.feature(i)).matrix();
    }
    return DensityMatrix(acc);
}

struct WeightedDensity {
    double weight = 0.0;  // empirical class fraction N_c / N
    ComplexMatrix mat;    // average of rho_theta(x_j) over the class (zero when empty)

    ComplexMatrix weighted() const { return weight * mat; }
};

template <Embedding E>
WeightedDensity empirical_class_density(const Dataset& data, const E& embedding,
                                        const ThetaVector& theta, int c) {
    if (data.empty()) throw EmptyDataset("empirical_class_density");
    const auto n = static_cast<Eigen::Index>(embedding.dim());
    WeightedDensity out{0.0, ComplexMatrix::Zero(n, n)};
    std::size_t count = 0;
    for (const Sample& s : data.samples) {
        if (s.label != c) continue;
        out.mat += embedding.density(theta, s.x).matrix();
        ++count;
    }
    if (count > 0) {
        out.mat /= static_cast<double>(count);
        out.weight = static_cast<double>(count) / static_cast<double>(data.size());
    }
    return out;
}

/// 0.5 * sum |p_i - q_i|
inline double tv_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw DimMismatch("tv_distance: " + std::to_string(p.size()) + " vs " + std::to_string(q.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

}  // namespace qtl
