#pragma once

// 2-Renyi mutual information between input register and embedding, Monte-Carlo
// Rademacher complexity estimators with exact inner suprema, and the analytic
// caps on both complexities.
//
// Inner supremum. Writing the loss as
//   l_j = delta_{c_j}(1) + Tr(M_1 Delta_j rho_theta(x_j)),  Delta_j = +1 (c_j = 0), -1 (c_j = 1),
// the sup over 0 <= M_1 <= I of sum_j sigma_j l_j / sqrt(N) is
//   [sum_j sigma_j delta_{c_j}(1) + pos(sum_j sigma_j Delta_j rho_theta(x_j))] / sqrt(N),
// where pos() is the positive-eigenvalue sum.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qtl/embedding.hpp"
#include "qtl/embedding_table.hpp"
#include "qtl/parallel.hpp"
#include "qtl/qmath.hpp"
#include "qtl/rng.hpp"
#include "qtl/tasks.hpp"

namespace qtl {

namespace detail {

/// Tr sqrt(S) for PSD S.
inline double trace_sqrt(const MatrixView& s) {
    double t = 0.0;
    for (double v : hermitian_eig(s).eigenvalues) {
        if (v < -tol::psd_input) throw NotPSD("trace_sqrt: eigenvalue " + std::to_string(v));
        t += v > 0.0 ? std::sqrt(v) : 0.0;
    }
    return t;
}

}  // namespace detail

/// I_2(X; R_theta) = 2 log2 Tr sqrt(sum_x p(x) rho_theta(x)^2), in bits.
template <Embedding E>
double renyi2_mi(const DiscreteTask& task, const E& embedding, const ThetaVector& theta) {
    const auto n = static_cast<Eigen::Index>(embedding.dim());
    ComplexMatrix s = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < task.num_bins(); ++i) {
        const double p = task.marginal(i);
        if (p == 0.0) continue;
        const ComplexMatrix rho = embedding.density(theta, task.feature(i)).matrix();
        s += p * rho * rho;
    }
    return 2.0 * std::log2(detail::trace_sqrt(s));
}

/// I_2 at every grid point of a table.
inline std::vector<double> renyi2_mi_profile(const EmbeddingTable& table, const DiscreteTask& task) {
    if (task.features() != table.features()) throw UnalignedSupport("renyi2_mi_profile");
    const std::vector<double> p = task.marginal();
    std::vector<double> out(table.num_points());
    ComplexMatrix s(table.dim(), table.dim());
    for (std::size_t g = 0; g < out.size(); ++g) {
        s.setZero();
        for (std::size_t b = 0; b < p.size(); ++b) {
            if (p[b] == 0.0) continue;
            const auto rho = table.density(g, b);
            s.noalias() += p[b] * (rho * rho);
        }
        out[g] = 2.0 * std::log2(detail::trace_sqrt(s));
    }
    return out;
}

inline double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

/// 0.5 * sqrt(max over grid of 2^{I_2}).
inline double rademacher_cap_mi(const EmbeddingTable& table, const DiscreteTask& task) {
    return 0.5 * std::sqrt(std::exp2(max_of(renyi2_mi_profile(table, task))));
}

template <Embedding E>
double rademacher_cap_mi(const DiscreteTask& task, const E& embedding, const ThetaGrid& grid) {
    if (grid.size() == 0) throw ConfigInvalid("rademacher_cap_mi: empty grid");
    return rademacher_cap_mi(EmbeddingTable(embedding, grid, task.features()), task);
}

/// n * sqrt(E_{p(x)}[max over grid of Tr rho_theta(x)^2]); exactly n for pure embeddings.
inline double rademacher_cap_dim(const EmbeddingTable& table, const DiscreteTask& task) {
    if (task.features() != table.features()) throw UnalignedSupport("rademacher_cap_dim");
    double expectation = 0.0;
    for (std::size_t b = 0; b < table.num_bins(); ++b) {
        const double p = task.marginal(b);
        if (p == 0.0) continue;
        double best = 0.0;
        for (std::size_t g = 0; g < table.num_points(); ++g) {
            const auto rho = table.density(g, b);
            best = std::max(best, (rho * rho).trace().real());
        }
        expectation += p * std::min(best, 1.0);
    }
    return static_cast<double>(table.dim()) * std::sqrt(expectation);
}

template <Embedding E>
double rademacher_cap_dim(const E& embedding, const DiscreteTask& task, const ThetaGrid& grid) {
    return rademacher_cap_dim(EmbeddingTable(embedding, grid, task.features()), task);
}

/// Tr sqrt(E_{p(x)}[kappa(x)^2]) with kappa(x) = S(x)|0><0|S(x)^dagger for the
/// single data-encoding block S of a one-time-encoding ansatz.
inline double one_time_encoding_cap(const DiscreteTask& task, const EmbeddingAnsatz& ansatz) {
    const std::vector<Gate>& gates = ansatz.encoding_gates();  // throws NotOneTimeEncoding
    const EmbeddingAnsatz encoder(ansatz.num_qubits(), {Layer{gates, {}}}, ansatz.name() + ":encoder");
    const auto n = static_cast<Eigen::Index>(encoder.dim());
    ComplexMatrix s = ComplexMatrix::Zero(n, n);
    const ThetaVector none;
    for (std::size_t i = 0; i < task.num_bins(); ++i) {
        const double p = task.marginal(i);
        if (p == 0.0) continue;
        const ComplexMatrix kappa = encoder.density(none, task.feature(i)).matrix();
        s += p * kappa * kappa;
    }
    return detail::trace_sqrt(s);
}

// ---------------------------------------------------------------------------
// Monte-Carlo Rademacher estimators
// ---------------------------------------------------------------------------

struct RademacherSettings {
    std::size_t outer = 50;             // data redraws
    std::size_t sigma_draws = 100;      // sign vectors per data draw (MC mode)
    std::size_t exhaustive_max_n = 12;  // enumerate all 2^N sign vectors when N <= this
    std::uint64_t seed = 0;
    std::size_t threads = 1;            // 0 = auto
};

struct RademacherEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t outer_draws = 0;
    std::size_t sigma_draws = 0;  // sign vectors per data draw actually used
    std::size_t n = 0;
    bool exhaustive = false;
    std::size_t argmax_index = 0;  // grid point attaining the outer sup (POVM estimator)
};

/// Both estimators from one shared set of (data, sigma) draws.
struct RademacherPair {
    RademacherEstimate povm;   // sup_theta E[sup_M ...]
    RademacherEstimate joint;  // E[sup_{theta, M} ...]
};

namespace detail {

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double std_error_of_mean(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace detail

namespace detail {

// Results of one data draw: per-grid-point mean of the inner sup over sign
// vectors, the mean of the per-sign-vector max over grid points, and
// sign-level second moments (only kept when error bars need them).
struct RademacherDraw {
    std::vector<double> point_mean;
    double joint_mean = 0.0;
    std::vector<double> point_sq;
    std::vector<double> joint_samples;
};

inline RademacherDraw rademacher_draw(const DiscreteTask& task, const EmbeddingTable& table, std::size_t n,
                                      const RademacherSettings& settings, std::size_t k, bool exhaustive,
                                      std::size_t per_draw, bool keep_samples) {
    const std::size_t points = table.num_points();
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const Dataset data = sample_dataset(task, n, derive_stream(settings.seed, k, StreamRole::rademacher));
    const SplitMixStream signs(derive_stream(settings.seed, k, StreamRole::rademacher_signs));

    RademacherDraw out;
    out.point_mean.assign(points, 0.0);
    if (keep_samples) out.point_sq.assign(points, 0.0);
    std::vector<double> weights(table.num_bins());
    std::vector<int> sigma(n);
    double joint_sum = 0.0;
    for (std::size_t s = 0; s < per_draw; ++s) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint64_t bit = exhaustive ? (s >> j) & 1U : signs.at(s * n + j) >> 63;
            sigma[j] = bit ? -1 : 1;
        }
        std::fill(weights.begin(), weights.end(), 0.0);
        double scalar = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const Sample& smp = data.samples[j];
            weights[smp.bin] += (smp.label == 0 ? sigma[j] : -sigma[j]) * inv_sqrt_n;
            if (smp.label == 1) scalar += sigma[j] * inv_sqrt_n;
        }
        const ComplexVector sums = table.weighted_sums(weights);
        double best = -INFINITY;
        for (std::size_t p = 0; p < points; ++p) {
            const double v = scalar + positive_part_trace(table.block(sums, p));
            out.point_mean[p] += v;
            if (keep_samples) out.point_sq[p] += v * v;
            best = std::max(best, v);
        }
        joint_sum += best;
        if (keep_samples) out.joint_samples.push_back(best);
    }
    for (double& v : out.point_mean) v /= static_cast<double>(per_draw);
    out.joint_mean = joint_sum / static_cast<double>(per_draw);
    return out;
}

}  // namespace detail

/// Both Rademacher estimators on one shared set of draws. Data draw k uses
/// stream (seed, k); with N <= exhaustive_max_n every sign vector is
/// enumerated, otherwise `sigma_draws` random ones are used per data draw.
/// Error bars come from the spread across data draws, or across sign vectors
/// when there is a single data draw.
inline RademacherPair rademacher_estimates(const DiscreteTask& task, const EmbeddingTable& table,
                                           std::size_t n, const RademacherSettings& settings) {
    if (n == 0) throw ConfigInvalid("rademacher: sample size must be >= 1");
    if (settings.outer == 0 || settings.sigma_draws == 0) throw ConfigInvalid("rademacher: draw counts must be >= 1");
    if (task.features() != table.features()) throw UnalignedSupport("rademacher: task bins differ from table bins");

    const bool exhaustive = n <= settings.exhaustive_max_n && n < 32;
    const std::size_t per_draw = exhaustive ? (std::size_t{1} << n) : settings.sigma_draws;
    const bool keep_samples = settings.outer == 1 && !exhaustive;

    std::vector<detail::RademacherDraw> draws(settings.outer);
    parallel_for(settings.outer, settings.threads, [&](std::size_t k) {
        draws[k] = detail::rademacher_draw(task, table, n, settings, k, exhaustive, per_draw, keep_samples);
    });

    RademacherPair out;
    for (RademacherEstimate* e : {&out.povm, &out.joint}) {
        e->outer_draws = settings.outer;
        e->sigma_draws = per_draw;
        e->n = n;
        e->exhaustive = exhaustive;
    }

    const std::size_t points = table.num_points();
    std::vector<double> point_value(points, 0.0);
    for (const auto& d : draws) {
        for (std::size_t p = 0; p < points; ++p) point_value[p] += d.point_mean[p];
    }
    for (double& v : point_value) v /= static_cast<double>(settings.outer);
    const std::size_t arg = static_cast<std::size_t>(
        std::max_element(point_value.begin(), point_value.end()) - point_value.begin());
    out.povm.value = point_value[arg];
    out.povm.argmax_index = arg;

    std::vector<double> joint_means(settings.outer), argmax_means(settings.outer);
    for (std::size_t k = 0; k < settings.outer; ++k) {
        joint_means[k] = draws[k].joint_mean;
        argmax_means[k] = draws[k].point_mean[arg];
    }
    out.joint.value = detail::mean(joint_means);

    if (settings.outer >= 2) {
        out.povm.std_error = detail::std_error_of_mean(argmax_means);
        out.joint.std_error = detail::std_error_of_mean(joint_means);
    } else if (keep_samples && per_draw >= 2) {
        const double m = draws[0].point_mean[arg];
        const double s = static_cast<double>(per_draw);
        const double var = std::max(0.0, (draws[0].point_sq[arg] - s * m * m) / (s - 1.0));
        out.povm.std_error = std::sqrt(var / s);
        out.joint.std_error = detail::std_error_of_mean(draws[0].joint_samples);
    }
    return out;
}

template <Embedding E>
RademacherEstimate rademacher_povm(const DiscreteTask& task, const E& embedding, const ThetaGrid& grid,
                                   std::size_t n, std::size_t outer, std::size_t sigma_draws,
                                   std::uint64_t seed) {
    const EmbeddingTable table(embedding, grid, task.features());
    RademacherSettings s;
    s.outer = outer;
    s.sigma_draws = sigma_draws;
    s.seed = seed;
    return rademacher_estimates(task, table, n, s).povm;
}

template <Embedding E>
RademacherEstimate rademacher_joint(const DiscreteTask& task, const E& embedding, const ThetaGrid& grid,
                                    std::size_t n, std::size_t outer, std::size_t sigma_draws,
                                    std::uint64_t seed) {
    const EmbeddingTable table(embedding, grid, task.features());
    RademacherSettings s;
    s.outer = outer;
    s.sigma_draws = sigma_draws;
    s.seed = seed;
    return rademacher_estimates(task, table, n, s).joint;
}

}  // namespace qtl
