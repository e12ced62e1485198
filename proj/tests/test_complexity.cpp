#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qtl/complexity.hpp"
#include "qtl/random_objects.hpp"

using namespace qtl;

namespace {

/// Every x maps to |0>.
struct ConstantEmbedding {
    std::size_t dim() const { return 2; }
    std::size_t num_params() const { return 1; }
    DensityMatrix density(const ThetaVector&, double) const {
        return DensityMatrix::pure((ComplexVector(2) << 1.0, 0.0).finished());
    }
};

const ThetaGrid single{{ThetaVector{0.0}}, 0};

EmbeddingAnsatz one_time_ansatz() {
    return EmbeddingAnsatz(1, {Layer{{Gate{GateKind::rx, 0}}, {Gate{GateKind::rot, 0}}}}, "rx_then_rot");
}

}  // namespace

TEST(Renyi2, Examples) {
    RandomObjects rnd(1);
    const DiscreteTask t = rnd.task(9);
    EXPECT_NEAR(renyi2_mi(t, ConstantEmbedding{}, ThetaVector{0.0}), 0.0, 1e-12);
    EXPECT_NEAR(renyi2_mi(oracle::uniform_basis_task(2), oracle::BasisEmbedding{2}, ThetaVector{0.0}), 1.0, 1e-9);
    EXPECT_NEAR(renyi2_mi(oracle::uniform_basis_task(4), oracle::BasisEmbedding{4}, ThetaVector{0.0}), 2.0, 1e-9);
}

TEST(Renyi2, RangeForPureQubitEmbeddings) {
    RandomObjects rnd(2);
    const EmbeddingAnsatz ansatz = rx_rot_rx();
    for (int i = 0; i < 100; ++i) {
        const DiscreteTask t = rnd.task(1 + rnd.index(10));
        const double mi = renyi2_mi(t, ansatz, {rnd.uniform(0, 6), rnd.uniform(0, 6), rnd.uniform(0, 6)});
        EXPECT_GE(mi, -1e-12);
        EXPECT_LE(mi, 1.0 + 1e-12);
    }
}

TEST(Renyi2, ProfileMatchesPointwise) {
    RandomObjects rnd(3);
    const EmbeddingAnsatz ansatz = rx_rot_rx();
    const DiscreteTask t = rnd.task(6);
    const ThetaGrid grid = make_theta_grid(ansatz, 3);
    const auto prof = renyi2_mi_profile(EmbeddingTable(ansatz, grid, t.features()), t);
    for (std::size_t p = 0; p < grid.size(); ++p) EXPECT_NEAR(prof[p], renyi2_mi(t, ansatz, grid[p]), 1e-12);
}

TEST(CapMi, Examples) {
    RandomObjects rnd(4);
    const DiscreteTask t = rnd.task(5);
    EXPECT_NEAR(rademacher_cap_mi(t, ConstantEmbedding{}, single), 0.5, 1e-12);
    EXPECT_LE(rademacher_cap_mi(t, rx_rot_rx(), make_theta_grid(3, 4)), 0.5 * std::sqrt(2.0) + 1e-12);
    EXPECT_NEAR(rademacher_cap_mi(oracle::uniform_basis_task(4), oracle::BasisEmbedding{4}, single), 1.0, 1e-9);
    EXPECT_NEAR(rademacher_cap_mi(oracle::uniform_basis_task(2), oracle::BasisEmbedding{2}, single), 0.5 * std::sqrt(2.0), 1e-9);
}

TEST(CapDim, Examples) {
    RandomObjects rnd(5);
    const DiscreteTask t = rnd.task(5);
    EXPECT_NEAR(rademacher_cap_dim(rx_rot_rx(), t, make_theta_grid(3, 3)), 2.0, 1e-9);
    const EmbeddingAnsatz two(2, {Layer{{Gate{GateKind::ry, 0}, Gate{GateKind::ry, 1}}, {Gate{GateKind::cnot, 0, 1}}}});
    EXPECT_NEAR(rademacher_cap_dim(two, t, make_theta_grid(0, 2)), 4.0, 1e-9);
    EXPECT_NEAR(rademacher_cap_dim(oracle::ShrunkEmbedding{0.5}, t, make_theta_grid(1, 4)), 2.0 * std::sqrt(0.5), 1e-9);
    EXPECT_NEAR(rademacher_cap_dim(oracle::ShrunkEmbedding{0.8}, t, make_theta_grid(1, 4)), 2.0 * std::sqrt(0.8), 1e-9);
}

TEST(OneTimeEncodingCap, Examples) {
    const EmbeddingAnsatz ansatz = one_time_ansatz();
    ASSERT_EQ(ansatz.encoding_kind(), EncodingKind::one_time);
    const DiscreteTask constant({0.0}, {0.5, 0.5}, {{{1.0}, {1.0}}});
    EXPECT_NEAR(one_time_encoding_cap(constant, ansatz), 1.0, 1e-12);
    // R_X(0)|0> and R_X(pi)|0> are orthogonal
    const DiscreteTask orth({0.0, kPi}, {0.5, 0.5}, {{{0.5, 0.5}, {0.5, 0.5}}});
    EXPECT_NEAR(one_time_encoding_cap(orth, ansatz), std::sqrt(2.0), 1e-12);
    EXPECT_THROW(one_time_encoding_cap(orth, rx_rot_rx()), NotOneTimeEncoding);
}

TEST(OneTimeEncodingCap, EqualsRenyiFormOfTheEncoder) {
    RandomObjects rnd(6);
    const EmbeddingAnsatz encoder(1, {Layer{{Gate{GateKind::rx, 0}}, {}}});
    for (int i = 0; i < 20; ++i) {
        const DiscreteTask t = rnd.task(2 + rnd.index(8));
        EXPECT_NEAR(one_time_encoding_cap(t, one_time_ansatz()), std::exp2(0.5 * renyi2_mi(t, encoder, ThetaVector{})),
                    1e-12);
    }
}

TEST(Rademacher, SingleSampleIsExactlyOneHalf) {
    RandomObjects rnd(7);
    const EmbeddingAnsatz ansatz = rx_rot_rx();
    const ThetaGrid grid = make_theta_grid(ansatz, 4);
    for (int i = 0; i < 5; ++i) {
        const DiscreteTask t = rnd.task(2 + rnd.index(6));
        const RademacherEstimate p = rademacher_povm(t, ansatz, grid, 1, 10, 50, rnd.engine()());
        const RademacherEstimate j = rademacher_joint(t, ansatz, grid, 1, 10, 50, rnd.engine()());
        EXPECT_TRUE(p.exhaustive);
        EXPECT_EQ(p.sigma_draws, 2u);
        EXPECT_NEAR(p.value, 0.5, 1e-12);
        EXPECT_NEAR(j.value, 0.5, 1e-12);
    }
}

TEST(Rademacher, ClosedFormInnerSupBeatsRandomSearch) {
    RandomObjects rnd(8);
    const EmbeddingAnsatz ansatz = rx_rot_rx();
    int triples = 0;
    for (int i = 0; i < 10; ++i) {
        const DiscreteTask t = rnd.task(6);
        const std::size_t n = 2 + rnd.index(6);
        const Dataset d = sample_dataset(t, n, rnd.engine()());
        const ThetaVector th{rnd.uniform(0, 6), rnd.uniform(0, 6), rnd.uniform(0, 6)};
        for (int k = 0; k < 5; ++k, ++triples) {
            std::vector<int> sigma(n);
            for (int& s : sigma) s = rnd.uniform() < 0.5 ? 1 : -1;
            // closed form from the library's kernel
            double base = 0.0;
            ComplexMatrix dm = ComplexMatrix::Zero(2, 2);
            for (std::size_t j = 0; j < n; ++j) {
                const Sample& s = d.samples[j];
                if (s.label == 1) base += sigma[j];
                dm += sigma[j] * (s.label == 0 ? 1.0 : -1.0) * embed(ansatz, th, s.x).matrix();
            }
            const double closed = (base + positive_part_trace(dm)) / std::sqrt(static_cast<double>(n));
            const std::uint64_t seed = rnd.engine()();
            EXPECT_LE(oracle::inner_sup_search(sigma, d, th, 10000, seed, false), closed + 1e-12);
            EXPECT_NEAR(oracle::inner_sup_search(sigma, d, th, 10000, seed, true), closed, 1e-6);
        }
    }
    EXPECT_EQ(triples, 50);
}

TEST(Rademacher, ExhaustiveEstimateMatchesBruteForce) {
    RandomObjects rnd(9);
    const EmbeddingAnsatz ansatz = rx_rot_rx();
    const ThetaGrid grid = make_theta_grid(ansatz, 2);
    const DiscreteTask t = rnd.task(5);
    const std::size_t n = 4, outer = 3;
    RademacherSettings s;
    s.outer = outer;
    s.seed = 1234;
    const RademacherPair est = rademacher_estimates(t, EmbeddingTable(ansatz, grid, t.features()), n, s);
    ASSERT_TRUE(est.povm.exhaustive);

    std::vector<double> point(grid.size(), 0.0);
    double joint = 0.0;
    for (std::size_t k = 0; k < outer; ++k) {
        const Dataset d = sample_dataset(t, n, derive_stream(s.seed, k, StreamRole::rademacher));
        for (std::size_t mask = 0; mask < (1u << n); ++mask) {
            std::vector<int> sigma(n);
            for (std::size_t j = 0; j < n; ++j) sigma[j] = (mask >> j) & 1 ? -1 : 1;
            double best = -1e300;
            for (std::size_t p = 0; p < grid.size(); ++p) {
                const double v = oracle::inner_sup_search(sigma, d, grid[p], 0, 0, true);
                point[p] += v;
                best = std::max(best, v);
            }
            joint += best;
        }
    }
    const double scale = 1.0 / static_cast<double>(outer << n);
    EXPECT_NEAR(est.povm.value, *std::max_element(point.begin(), point.end()) * scale, 1e-12);
    EXPECT_NEAR(est.joint.value, joint * scale, 1e-12);
}

TEST(Rademacher, SingletonGridMakesBothEstimatorsEqual) {
    RandomObjects rnd(10);
    const DiscreteTask t = rnd.task(8);
    const ThetaGrid one{{ThetaVector{0.4, 1.3, 2.2}}, 0};
    for (std::size_t n : {3u, 20u}) {
        const auto p = rademacher_povm(t, rx_rot_rx(), one, n, 6, 40, 77);
        const auto j = rademacher_joint(t, rx_rot_rx(), one, n, 6, 40, 77);
        EXPECT_EQ(p.value, j.value);
    }
}

TEST(Rademacher, JointDominatesAndCapsHold) {
    RandomObjects rnd(11);
    const EmbeddingAnsatz ansatz = rx_rot_rx();
    const ThetaGrid grid = make_theta_grid(ansatz, 4);
    for (int i = 0; i < 8; ++i) {
        const DiscreteTask t = rnd.task(3 + rnd.index(8));
        const EmbeddingTable table(ansatz, grid, t.features());
        RademacherSettings s;
        s.outer = 10;
        s.sigma_draws = 50;
        s.seed = rnd.engine()();
        const std::size_t n = 1 + rnd.index(30);
        const RademacherPair e = rademacher_estimates(t, table, n, s);
        EXPECT_GE(e.joint.value, e.povm.value - 1e-12);
        EXPECT_GE(e.povm.value, 0.0);
        EXPECT_LE(e.povm.value, rademacher_cap_mi(table, t) + 3 * e.povm.std_error);
        EXPECT_LE(e.joint.value, rademacher_cap_dim(table, t) + 3 * e.joint.std_error);
        EXPECT_LE(e.joint.value, 2.0 + 3 * e.joint.std_error);
    }
}

TEST(Rademacher, DoublingSignDrawsIsConsistent) {
    RandomObjects rnd(12);
    const EmbeddingAnsatz ansatz = rx_rot_rx();
    const ThetaGrid grid = make_theta_grid(ansatz, 4);
    const DiscreteTask t = rnd.task(10);
    const auto a = rademacher_povm(t, ansatz, grid, 40, 20, 100, 5);
    const auto b = rademacher_povm(t, ansatz, grid, 40, 20, 200, 5);
    EXPECT_FALSE(a.exhaustive);
    EXPECT_LT(std::abs(a.value - b.value), 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST(Rademacher, ThreadCountDoesNotChangeResults) {
    RandomObjects rnd(13);
    const EmbeddingAnsatz ansatz = rx_rot_rx();
    const DiscreteTask t = rnd.task(10);
    const EmbeddingTable table(ansatz, make_theta_grid(ansatz, 4), t.features());
    RademacherSettings s;
    s.outer = 7;
    s.seed = 3;
    s.threads = 1;
    const RademacherPair a = rademacher_estimates(t, table, 25, s);
    s.threads = 3;
    const RademacherPair b = rademacher_estimates(t, table, 25, s);
    EXPECT_EQ(a.povm.value, b.povm.value);
    EXPECT_EQ(a.joint.value, b.joint.value);
    EXPECT_EQ(a.joint.std_error, b.joint.std_error);
}

TEST(Rademacher, RejectsEmptyDraws) {
    RandomObjects rnd(14);
    const DiscreteTask t = rnd.task(4);
    EXPECT_THROW(rademacher_povm(t, rx_rot_rx(), make_theta_grid(3, 2), 0, 1, 1, 0), ConfigInvalid);
    EXPECT_THROW(rademacher_povm(t, rx_rot_rx(), make_theta_grid(3, 2), 3, 0, 1, 0), ConfigInvalid);
}
