#pragma once

// Reference computations that share no numerical code with the library.
// Single-qubit quantities go through Bloch vectors: a Hermitian 2x2 matrix
// (t I + s.sigma)/2 has eigenvalues (t +- |s|)/2.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "qtl/qtl.hpp"

namespace oracle {

using cd = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline constexpr double pi = 3.14159265358979323846;

/// Eigenvalues (ascending) of [[a, z], [conj z, d]] from the characteristic quadratic.
inline std::array<double, 2> eig2(double a, cd z, double d) {
    const double mid = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(z));
    return {mid - rad, mid + rad};
}

inline std::array<double, 2> eig2(const qtl::ComplexMatrix& m) { return eig2(m(0, 0).real(), m(0, 1), m(1, 1).real()); }

inline double trace_distance2(const qtl::ComplexMatrix& a, const qtl::ComplexMatrix& b) {
    const auto e = eig2(a - b);
    return 0.5 * (std::abs(e[0]) + std::abs(e[1]));
}

/// R_X(x) Rot(t1, t2, t3) R_X(x) |0>, multiplied out by hand.
inline std::array<cd, 2> rx_rot_rx_state(double t1, double t2, double t3, double x) {
    const cd i(0.0, 1.0);
    const double c = std::cos(x / 2), s = std::sin(x / 2);
    // R_X(x)|0> = (c, -i s)
    cd a = c, b = -i * s;
    const double ct = std::cos(t2 / 2), st = std::sin(t2 / 2);
    const cd r00 = std::exp(-i * (t1 + t3) / 2.0) * ct, r01 = -std::exp(-i * (t1 - t3) / 2.0) * st;
    const cd r10 = std::exp(i * (t1 - t3) / 2.0) * st, r11 = std::exp(i * (t1 + t3) / 2.0) * ct;
    const cd a1 = r00 * a + r01 * b, b1 = r10 * a + r11 * b;
    a = c * a1 - i * s * b1;
    b = -i * s * a1 + c * b1;
    return {a, b};
}

inline Vec3 bloch(const std::array<cd, 2>& psi) {
    const double n = std::norm(psi[0]) + std::norm(psi[1]);
    const cd ab = std::conj(psi[0]) * psi[1];
    return {2.0 * ab.real() / n, 2.0 * ab.imag() / n, (std::norm(psi[0]) - std::norm(psi[1])) / n};
}

inline Vec3 bloch_at(const qtl::ThetaVector& th, double x) { return bloch(rx_rot_rx_state(th[0], th[1], th[2], x)); }

inline double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
inline double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// (trace, Bloch part) of sum_k w_k rho_k, i.e. t = sum w_k, s = sum w_k r_k.
struct Mix {
    double t = 0.0;
    Vec3 s{0.0, 0.0, 0.0};
    void add(double w, const Vec3& r) {
        t += w;
        for (int k = 0; k < 3; ++k) s[k] += w * r[k];
    }
};

/// Trace norm of (t I + s.sigma)/2.
inline double trace_norm(const Mix& m) { return std::max(std::abs(m.t), norm3(m.s)); }

/// 1/2 - T(p0 rho0, p1 rho1) for the circuit at theta.
inline double min_risk(const qtl::DiscreteTask& task, const qtl::ThetaVector& th) {
    Mix d;
    for (std::size_t i = 0; i < task.num_bins(); ++i) {
        d.add(task.joint(0, i) - task.joint(1, i), bloch_at(th, task.feature(i)));
    }
    return 0.5 - 0.5 * trace_norm(d);
}

/// Helstrom M_1 as (mode, direction): mode 0 -> zero, 1 -> identity, 2 -> (I + u.sigma)/2.
struct M1 {
    int mode = 0;
    Vec3 u{0.0, 0.0, 0.0};
    double prob(const Vec3& r) const {
        if (mode == 0) return 0.0;
        if (mode == 1) return 1.0;
        return 0.5 * (1.0 + dot3(u, r));
    }
};

/// Trained POVM from data at theta with the library's conventions: eigenvalues
/// of (a1 - a0) above 1e-10 go to M_1, a single observed class is always answered.
inline M1 train(const qtl::Dataset& data, const qtl::ThetaVector& th, double* empirical_risk = nullptr) {
    std::array<std::size_t, 2> counts{0, 0};
    for (const auto& s : data.samples) ++counts[s.label];
    Mix d;  // a1 - a0
    const double inv = 1.0 / static_cast<double>(data.size());
    for (const auto& s : data.samples) d.add(s.label == 1 ? inv : -inv, bloch_at(th, s.x));
    M1 m;
    if (counts[0] == 0 || counts[1] == 0) {
        m.mode = counts[1] > 0 ? 1 : 0;
        if (empirical_risk) *empirical_risk = 0.0;
        return m;
    }
    const double r = norm3(d.s);
    const double hi = 0.5 * (d.t + r), lo = 0.5 * (d.t - r);
    if (lo > 1e-10) {
        m.mode = 1;
    } else if (hi > 1e-10) {
        m.mode = 2;
        for (int k = 0; k < 3; ++k) m.u[k] = d.s[k] / r;
    }
    if (empirical_risk) *empirical_risk = 0.5 - 0.5 * std::max(std::abs(d.t), r);
    return m;
}

inline double expected_risk(const M1& m, const qtl::DiscreteTask& task, const qtl::ThetaVector& th) {
    double err = 0.0;
    for (std::size_t i = 0; i < task.num_bins(); ++i) {
        const Vec3 r = bloch_at(th, task.feature(i));
        err += task.joint(0, i) * m.prob(r) + task.joint(1, i) * (1.0 - m.prob(r));
    }
    return err;
}

inline std::size_t first_min(const std::vector<double>& v) {
    const double best = *std::min_element(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] <= best + 1e-12) return i;
    }
    return 0;
}

/// Bloch vectors of every (grid point, bin), evaluated once.
struct BlochTable {
    std::vector<std::vector<Vec3>> rows;  // rows[p][b]

    BlochTable(const qtl::ThetaGrid& grid, const std::vector<double>& features) : rows(grid.size()) {
        for (std::size_t p = 0; p < grid.size(); ++p) {
            for (double x : features) rows[p].push_back(bloch_at(grid[p], x));
        }
    }
};

/// Same rule as train(), with the sample states looked up by bin.
inline M1 train_row(const qtl::Dataset& data, const std::vector<Vec3>& row, double* empirical_risk) {
    std::array<std::size_t, 2> counts{0, 0};
    Mix d;
    const double inv = 1.0 / static_cast<double>(data.size());
    for (const auto& s : data.samples) {
        ++counts[s.label];
        d.add(s.label == 1 ? inv : -inv, row[s.bin]);
    }
    M1 m;
    if (counts[0] == 0 || counts[1] == 0) {
        m.mode = counts[1] > 0 ? 1 : 0;
        *empirical_risk = 0.0;
        return m;
    }
    const double r = norm3(d.s);
    if (0.5 * (d.t - r) > 1e-10) {
        m.mode = 1;
    } else if (0.5 * (d.t + r) > 1e-10) {
        m.mode = 2;
        for (int k = 0; k < 3; ++k) m.u[k] = d.s[k] / r;
    }
    *empirical_risk = 0.5 - 0.5 * std::max(std::abs(d.t), r);
    return m;
}

/// Raw transfer excess risk of one replication, recomputed point by point:
/// argmin of the trained source risk, then target training at that point.
inline double staged_excess(const qtl::Dataset& source, const qtl::Dataset& target, const qtl::DiscreteTask& task,
                            const BlochTable& table) {
    std::vector<double> risk(table.rows.size()), ref(table.rows.size());
    for (std::size_t p = 0; p < table.rows.size(); ++p) {
        train_row(source, table.rows[p], &risk[p]);
        Mix d;
        for (std::size_t b = 0; b < task.num_bins(); ++b) d.add(task.joint(0, b) - task.joint(1, b), table.rows[p][b]);
        ref[p] = 0.5 - 0.5 * trace_norm(d);
    }
    const std::vector<Vec3>& row = table.rows[first_min(risk)];
    double unused = 0.0;
    const M1 m = train_row(target, row, &unused);
    double err = 0.0;
    for (std::size_t b = 0; b < task.num_bins(); ++b) {
        err += task.joint(0, b) * m.prob(row[b]) + task.joint(1, b) * (1.0 - m.prob(row[b]));
    }
    return err - *std::min_element(ref.begin(), ref.end());
}

/// Monte-Carlo class-c average Bloch vector from `draws` samples.
inline Vec3 sampled_class_bloch(const qtl::DiscreteTask& task, const qtl::ThetaVector& th, int c, std::size_t draws,
                                std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::discrete_distribution<std::size_t> pick(task.cond(c).begin(), task.cond(c).end());
    std::vector<Vec3> cache(task.num_bins());
    for (std::size_t i = 0; i < cache.size(); ++i) cache[i] = bloch_at(th, task.feature(i));
    Vec3 acc{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < draws; ++k) {
        const Vec3& r = cache[pick(gen)];
        for (int j = 0; j < 3; ++j) acc[j] += r[j];
    }
    for (double& v : acc) v /= static_cast<double>(draws);
    return acc;
}

/// Rademacher inner value for one sign vector at theta, brute force over a
/// family of candidate M_1: 0, I and rank-one projectors on random directions,
/// optionally joined by the projector along the Bloch part of the signed sum.
inline double inner_sup_search(const std::vector<int>& sigma, const qtl::Dataset& data, const qtl::ThetaVector& th,
                               std::size_t directions, std::uint64_t seed, bool with_spectral) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    const double n = static_cast<double>(data.size());
    double base = 0.0;
    Mix d;  // sum sigma_j Delta_j rho_j
    for (std::size_t j = 0; j < data.size(); ++j) {
        const auto& s = data.samples[j];
        if (s.label == 1) base += sigma[j];
        d.add(sigma[j] * (s.label == 0 ? 1.0 : -1.0), bloch_at(th, s.x));
    }
    // Tr(M_1 D) for M_1 = 0, I, and rank-one projectors
    double best = std::max(0.0, d.t);
    for (std::size_t k = 0; k < directions; ++k) {
        Vec3 u{g(gen), g(gen), g(gen)};
        const double r = norm3(u);
        for (double& v : u) v /= r;
        best = std::max(best, 0.5 * (d.t + dot3(u, d.s)));
    }
    if (with_spectral && norm3(d.s) > 0.0) {
        Vec3 u = d.s;
        const double r = norm3(u);
        for (double& v : u) v /= r;
        best = std::max(best, 0.5 * (d.t + r));
    }
    return (base + best) / std::sqrt(n);
}

/// Mixed-state embedding: rho(x) = (I + r(x).sigma)/2 with |r| = sqrt(2 purity - 1).
struct ShrunkEmbedding {
    double purity = 0.5;
    std::size_t dim() const { return 2; }
    std::size_t num_params() const { return 1; }
    qtl::DensityMatrix density(const qtl::ThetaVector& th, double x) const {
        const double len = std::sqrt(std::max(0.0, 2.0 * purity - 1.0));
        const double a = x + th[0];
        qtl::ComplexMatrix m(2, 2);
        m << 0.5 * (1.0 + len * std::cos(a)), 0.5 * len * std::sin(a),
             0.5 * len * std::sin(a), 0.5 * (1.0 - len * std::cos(a));
        return qtl::DensityMatrix(m);
    }
};

/// Pure embedding onto one of `n` computational basis states (x rounded to an index).
struct BasisEmbedding {
    std::size_t n = 2;
    std::size_t dim() const { return n; }
    std::size_t num_params() const { return 1; }
    qtl::DensityMatrix density(const qtl::ThetaVector&, double x) const {
        qtl::ComplexVector psi = qtl::ComplexVector::Zero(static_cast<Eigen::Index>(n));
        psi(static_cast<Eigen::Index>(std::lround(x)) % static_cast<Eigen::Index>(n)) = 1.0;
        return qtl::DensityMatrix::pure(psi);
    }
};

static_assert(qtl::Embedding<ShrunkEmbedding>);
static_assert(qtl::Embedding<BasisEmbedding>);

/// Uniform task over features 0..n-1 with the given class split of bins.
inline qtl::DiscreteTask uniform_basis_task(std::size_t n) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<double>(i);
    std::vector<double> u(n, 1.0 / static_cast<double>(n));
    return qtl::DiscreteTask(f, {0.5, 0.5}, {u, u});
}

}  // namespace oracle
