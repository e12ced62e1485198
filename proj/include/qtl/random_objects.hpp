#pragma once

// Random matrices, POVMs and tasks for property checks.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "qtl/classifier.hpp"
#include "qtl/qmath.hpp"
#include "qtl/rng.hpp"
#include "qtl/tasks.hpp"

namespace qtl {

class RandomObjects {
public:
    explicit RandomObjects(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return lo + (hi - lo) * rng_.uniform(); }
    double normal() { return normal_(rng_); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_.uniform() * static_cast<double>(n)) % n; }

    ComplexMatrix ginibre(Eigen::Index n) {
        ComplexMatrix g(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(normal(), normal());
        }
        return g;
    }

    /// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
    ComplexMatrix unitary(Eigen::Index n) {
        const Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(n));
        ComplexMatrix q = qr.householderQ();
        const ComplexMatrix r = qr.matrixQR();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = std::abs(r(i, i));
            if (a > 0.0) q.col(i) *= r(i, i) / a;
        }
        return q;
    }

    /// Mixed state G G^dagger / Tr, or a pure state with probability `pure_fraction`.
    DensityMatrix density(Eigen::Index n, double pure_fraction = 0.25) {
        if (uniform() < pure_fraction) {
            ComplexVector psi(n);
            for (Eigen::Index i = 0; i < n; ++i) psi(i) = Complex(normal(), normal());
            return DensityMatrix::pure(psi);
        }
        const ComplexMatrix g = ginibre(n);
        ComplexMatrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        return DensityMatrix(0.5 * (rho + rho.adjoint()));
    }

    Povm povm(Eigen::Index n) {
        const ComplexMatrix u = unitary(n);
        RealVector ev(n);
        const bool projective = uniform() < 0.3;
        for (Eigen::Index i = 0; i < n; ++i) ev(i) = projective ? (uniform() < 0.5 ? 0.0 : 1.0) : uniform();
        ComplexMatrix m1 = from_spectrum(ev, u);
        return Povm::from_m1(0.5 * (m1 + m1.adjoint()));
    }

    std::vector<double> simplex(std::size_t n) {
        std::vector<double> p(n);
        double s = 0.0;
        for (double& v : p) s += (v = -std::log(1.0 - uniform()));
        for (double& v : p) v /= s;
        return p;
    }

    /// Task on `bins` sorted random features in [-pi, pi].
    DiscreteTask task(std::size_t bins) {
        std::vector<double> f(bins);
        for (std::size_t i = 0; i < bins; ++i) f[i] = -kPi + kTwoPi * (static_cast<double>(i) + uniform(0.05, 0.95)) / bins;
        const double p0 = uniform(0.1, 0.9);
        return DiscreteTask(f, {p0, 1.0 - p0}, {simplex(bins), simplex(bins)});
    }

    GaussianTaskSpec gaussian(std::size_t bins) {
        GaussianTaskSpec s;
        s.mu0 = uniform(-2.0, 2.0);
        s.mu1 = uniform(-2.0, 2.0);
        s.sigma2 = uniform(0.1, 1.5);
        s.prior0 = uniform(0.2, 0.8);
        s.bins = bins;
        return s;
    }

    SplitMixStream& engine() { return rng_; }

private:
    SplitMixStream rng_;
    std::normal_distribution<double> normal_;
};

}  // namespace qtl
