#pragma once

// Binary POVM classifiers: loss and risk evaluation, Helstrom synthesis and the
// closed-form minimum risk, training on datasets, and the exact
// generalization-error supremum.
//
// With M_0 = I - M_1 every risk in this file is affine in M_1:
//   R(M) = p_1 + Tr(M_1 (A_0 - A_1)),   A_c = p_c rho_{theta|c},
// and sup / inf of Tr(M_1 B) over 0 <= M_1 <= I are the positive / negative
// eigenvalue sums of B.

#include <algorithm>
#include <cmath>
#include <utility>

#include "qtl/embedding.hpp"
#include "qtl/errors.hpp"
#include "qtl/qmath.hpp"
#include "qtl/tasks.hpp"

namespace qtl {

inline constexpr double kPovmTol = 1e-9;
inline constexpr double kHelstromZeroTol = 1e-10;

class Povm {
public:
    Povm(const MatrixView& m0, const MatrixView& m1) {
        require_square(m0, "Povm");
        if (m0.rows() != m1.rows() || m0.cols() != m1.cols()) throw DimMismatch("Povm: element sizes differ");
        if (hermitian_defect(m0) > kPovmTol || hermitian_defect(m1) > kPovmTol) {
            throw NotHermitian("Povm: elements must be Hermitian");
        }
        m0_ = 0.5 * (m0 + m0.adjoint());
        m1_ = 0.5 * (m1 + m1.adjoint());
        const auto n = m0_.rows();
        if ((m0_ + m1_ - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > kPovmTol) {
            throw NotPSD("Povm: elements do not sum to identity");
        }
        if (hermitian_eig(m0_).eigenvalues.minCoeff() < -kPovmTol ||
            hermitian_eig(m1_).eigenvalues.minCoeff() < -kPovmTol) {
            throw NotPSD("Povm: element is not positive semi-definite");
        }
    }

    /// (I - M_1, M_1)
    static Povm from_m1(const MatrixView& m1) {
        return Povm(ComplexMatrix::Identity(m1.rows(), m1.cols()) - m1, m1);
    }

    /// (M_0 = I, M_1 = 0) for c = 0, and the reverse for c = 1.
    static Povm always(int c, Eigen::Index dim) {
        const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
        const ComplexMatrix zero = ComplexMatrix::Zero(dim, dim);
        return c == 0 ? Povm(id, zero) : Povm(zero, id);
    }

    const ComplexMatrix& m0() const noexcept { return m0_; }
    const ComplexMatrix& m1() const noexcept { return m1_; }
    const ComplexMatrix& element(int c) const { return c == 0 ? m0_ : m1_; }
    Eigen::Index dim() const noexcept { return m0_.rows(); }

    Povm swapped() const { return Povm(m1_, m0_); }

private:
    ComplexMatrix m0_, m1_;
};

/// Probability of error 1 - Tr(M_c rho), clamped to [0, 1].
inline double loss(const Povm& povm, const DensityMatrix& rho, int c) {
    if (povm.dim() != rho.dim()) throw DimMismatch("loss: POVM and state dimensions differ");
    const double v = 1.0 - (povm.element(c) * rho.matrix()).trace().real();
    return std::clamp(v, 0.0, 1.0);
}

/// p_c * rho_{theta|c} for both classes.
template <Embedding E>
std::pair<ComplexMatrix, ComplexMatrix> weighted_class_densities(const DiscreteTask& task,
                                                                 const E& embedding,
                                                                 const ThetaVector& theta) {
    return {task.prior(0) * class_average_density(task, embedding, theta, 0).matrix(),
            task.prior(1) * class_average_density(task, embedding, theta, 1).matrix()};
}

template <Embedding E>
double expected_risk(const Povm& povm, const DiscreteTask& task, const E& embedding,
                     const ThetaVector& theta) {
    double correct = 0.0;
    for (int c = 0; c < 2; ++c) {
        if (task.prior(c) == 0.0) continue;
        const DensityMatrix rho = class_average_density(task, embedding, theta, c);
        if (rho.dim() != povm.dim()) throw DimMismatch("expected_risk");
        correct += task.prior(c) * (povm.element(c) * rho.matrix()).trace().real();
    }
    return std::clamp(1.0 - correct, 0.0, 1.0);
}

template <Embedding E>
double empirical_risk(const Povm& povm, const Dataset& data, const E& embedding,
                      const ThetaVector& theta) {
    if (data.empty()) throw EmptyDataset("empirical_risk");
    double total = 0.0;
    for (const Sample& s : data.samples) total += loss(povm, embedding.density(theta, s.x), s.label);
    return total / static_cast<double>(data.size());
}

/// Helstrom measurement for weighted densities a0 = p0 rho0, a1 = p1 rho1:
/// M_1 projects onto the eigenspace of (a1 - a0) with eigenvalue > 1e-10.
inline Povm helstrom(const MatrixView& a0, const MatrixView& a1) {
    if (a0.rows() != a1.rows() || a0.cols() != a1.cols()) throw DimMismatch("helstrom");
    require_hermitian(a0, "helstrom");
    require_hermitian(a1, "helstrom");
    for (const MatrixView* a : {&a0, &a1}) {
        if (hermitian_eig(*a).eigenvalues.minCoeff() < -tol::psd_input) {
            throw NotPSD("helstrom: weighted density has a negative eigenvalue");
        }
    }
    const Spectrum s = hermitian_eig(a1 - a0);
    const auto n = a0.rows();
    ComplexMatrix m1 = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (s.eigenvalues(i) > kHelstromZeroTol) m1 += s.eigenvectors.col(i) * s.eigenvectors.col(i).adjoint();
    }
    return Povm::from_m1(m1);
}

/// 1/2 - T(p0 rho0, p1 rho1) from the weighted densities.
inline double helstrom_risk(const MatrixView& a0, const MatrixView& a1) {
    return std::clamp(0.5 - trace_distance(a0, a1), 0.0, 0.5);
}

template <Embedding E>
double min_expected_risk(const DiscreteTask& task, const E& embedding, const ThetaVector& theta) {
    const auto [a0, a1] = weighted_class_densities(task, embedding, theta);
    return helstrom_risk(a0, a1);
}

struct TrainedPovm {
    Povm povm;
    double empirical_risk;
};

/// Empirical-risk minimizer over all binary POVMs at fixed theta. When only one
/// class was observed the POVM always answers that class.
template <Embedding E>
TrainedPovm train_povm(const Dataset& data, const E& embedding, const ThetaVector& theta) {
    if (data.empty()) throw EmptyDataset("train_povm");
    const WeightedDensity d0 = empirical_class_density(data, embedding, theta, 0);
    const WeightedDensity d1 = empirical_class_density(data, embedding, theta, 1);
    const auto n = static_cast<Eigen::Index>(embedding.dim());
    if (d0.weight == 0.0) return {Povm::always(1, n), 0.0};
    if (d1.weight == 0.0) return {Povm::always(0, n), 0.0};
    const ComplexMatrix a0 = d0.weighted(), a1 = d1.weighted();
    return {helstrom(a0, a1), helstrom_risk(a0, a1)};
}

/// sup over M of |R(M) - R_hat(M)| in closed form.
template <Embedding E>
double generalization_error(const DiscreteTask& task, const Dataset& data, const E& embedding,
                            const ThetaVector& theta) {
    if (data.empty()) throw EmptyDataset("generalization_error");
    const auto [a0, a1] = weighted_class_densities(task, embedding, theta);
    const WeightedDensity d0 = empirical_class_density(data, embedding, theta, 0);
    const WeightedDensity d1 = empirical_class_density(data, embedding, theta, 1);
    const double c0 = task.prior(1) - d1.weight;
    const ComplexMatrix b = (a0 - a1) - (d0.weighted() - d1.weighted());
    const auto [pos, neg] = signed_part_traces(b);
    return std::max(std::abs(c0 + pos), std::abs(c0 + neg));
}

}  // namespace qtl
