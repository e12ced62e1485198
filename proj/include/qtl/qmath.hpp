#pragma once

// Dense complex-matrix kernel: Hermitian spectra, trace norm, trace distance,
// PSD square root. Every routine accepts matrices through Eigen::Ref so that
// views into larger buffers (see EmbeddingTable) can be passed without copies.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "qtl/errors.hpp"

namespace qtl {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using MatrixView = Eigen::Ref<const ComplexMatrix>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

namespace tol {
inline constexpr double hermitian_input = 1e-8;  // accepted asymmetry of inputs
inline constexpr double density = 1e-10;         // density-matrix invariants
inline constexpr double clamp = 1e-10;           // eigenvalues in [-clamp, 0) -> 0
inline constexpr double psd_input = 1e-8;        // below -psd_input: NotPSD
}  // namespace tol

struct Spectrum {
    RealVector eigenvalues;     // descending
    ComplexMatrix eigenvectors; // columns, unitary
};

/// Largest entrywise |A - A^dagger|.
inline double hermitian_defect(const MatrixView& a) {
    if (a.rows() != a.cols()) return INFINITY;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_square(const MatrixView& a, const char* where) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw DimMismatch(std::string(where) + ": matrix must be square and non-empty");
    }
}

inline void require_hermitian(const MatrixView& a, const char* where) {
    require_square(a, where);
    if (!a.allFinite()) throw NumericalFailure(std::string(where) + ": non-finite entries");
    const double defect = hermitian_defect(a);
    if (defect > tol::hermitian_input) {
        throw NotHermitian(std::string(where) + ": max |A - A^dagger| = " + std::to_string(defect));
    }
}

namespace detail {

inline RealVector eigenvalues_only(const MatrixView& a, const char* where) {
    require_hermitian(a, where);
    if (a.rows() == 2) {
        // closed form; grid sweeps call this millions of times on qubit blocks
        const double p = a(0, 0).real(), q = a(1, 1).real();
        const Complex off = 0.5 * (a(0, 1) + std::conj(a(1, 0)));
        const double mid = 0.5 * (p + q), rad = std::hypot(0.5 * (p - q), std::abs(off));
        RealVector ev(2);
        ev << mid - rad, mid + rad;
        return ev;
    }
    const ComplexMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure(std::string(where) + ": eigensolver did not converge");
    }
    return solver.eigenvalues();  // ascending
}

}  // namespace detail

/// Spectral decomposition of a Hermitian matrix; eigenvalues sorted descending.
inline Spectrum hermitian_eig(const MatrixView& a) {
    require_hermitian(a, "hermitian_eig");
    const ComplexMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("hermitian_eig: eigensolver did not converge");
    }
    const Eigen::Index n = sym.rows();
    Spectrum out{RealVector(n), ComplexMatrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
        out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

/// Sum of |eigenvalues| of a Hermitian matrix.
inline double trace_norm(const MatrixView& a) {
    return detail::eigenvalues_only(a, "trace_norm").cwiseAbs().sum();
}

/// Sum of the strictly positive eigenvalues. This is sup Tr(M a) over 0 <= M <= I.
inline double positive_part_trace(const MatrixView& a) {
    const RealVector ev = detail::eigenvalues_only(a, "positive_part_trace");
    double s = 0.0;
    for (double v : ev) s += v > 0.0 ? v : 0.0;
    return s;
}

/// Sum of the strictly negative eigenvalues (a non-positive number).
/// This is inf Tr(M a) over 0 <= M <= I.
inline double negative_part_trace(const MatrixView& a) {
    const RealVector ev = detail::eigenvalues_only(a, "negative_part_trace");
    double s = 0.0;
    for (double v : ev) s += v < 0.0 ? v : 0.0;
    return s;
}

/// Both positive and negative parts from one decomposition.
inline std::pair<double, double> signed_part_traces(const MatrixView& a) {
    const RealVector ev = detail::eigenvalues_only(a, "signed_part_traces");
    double pos = 0.0, neg = 0.0;
    for (double v : ev) (v > 0.0 ? pos : neg) += v;
    return {pos, neg};
}

/// T(rho, sigma) = ||rho - sigma||_1 / 2. Arguments need not be unit-trace.
inline double trace_distance(const MatrixView& rho, const MatrixView& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw DimMismatch("trace_distance: " + std::to_string(rho.rows()) + " vs " +
                          std::to_string(sigma.rows()));
    }
    return 0.5 * trace_norm(rho - sigma);
}

inline ComplexMatrix from_spectrum(const RealVector& values, const ComplexMatrix& vectors) {
    return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

/// Principal square root of a PSD matrix. Eigenvalues in [-1e-8, 0) are clamped.
inline ComplexMatrix psd_sqrt(const MatrixView& a) {
    Spectrum s = hermitian_eig(a);
    for (double& v : s.eigenvalues) {
        if (v < -tol::psd_input) {
            throw NotPSD("psd_sqrt: eigenvalue " + std::to_string(v));
        }
        v = v > 0.0 ? std::sqrt(v) : 0.0;
    }
    return from_spectrum(s.eigenvalues, s.eigenvectors);
}

/// Hermitian, positive semi-definite, unit-trace matrix.
class DensityMatrix {
public:
    /// Validates and normalizes: symmetrizes, clamps tiny negative eigenvalues.
    explicit DensityMatrix(const MatrixView& m) {
        require_square(m, "DensityMatrix");
        if (!m.allFinite()) throw NumericalFailure("DensityMatrix: non-finite entries");
        const double defect = hermitian_defect(m);
        if (defect > tol::density) {
            throw NotHermitian("DensityMatrix: max |A - A^dagger| = " + std::to_string(defect));
        }
        mat_ = 0.5 * (m + m.adjoint());
        const double tr = mat_.trace().real();
        if (std::abs(tr - 1.0) > tol::density) {
            throw NotPSD("DensityMatrix: trace " + std::to_string(tr) + " != 1");
        }
        Spectrum s = hermitian_eig(mat_);
        bool clamped = false;
        for (double& v : s.eigenvalues) {
            if (v < -tol::clamp) throw NotPSD("DensityMatrix: eigenvalue " + std::to_string(v));
            if (v < 0.0) {
                v = 0.0;
                clamped = true;
            }
        }
        if (clamped) mat_ = from_spectrum(s.eigenvalues, s.eigenvectors);
    }

    /// |psi><psi| for a (normalized) state vector.
    static DensityMatrix pure(const ComplexVector& psi) {
        DensityMatrix d;
        const double norm2 = psi.squaredNorm();
        d.mat_ = psi * psi.adjoint() / norm2;
        return d;
    }

    const ComplexMatrix& matrix() const noexcept { return mat_; }
    Eigen::Index dim() const noexcept { return mat_.rows(); }
    double purity() const { return (mat_ * mat_).trace().real(); }

private:
    DensityMatrix() = default;
    ComplexMatrix mat_;
};

}  // namespace qtl
