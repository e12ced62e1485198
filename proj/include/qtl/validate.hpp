#pragma once

// Cross-module property suite behind `qtl validate`. Each family reports its
// largest observed violation (<= 0 or within slack means satisfied).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "qtl/classifier.hpp"
#include "qtl/complexity.hpp"
#include "qtl/divergence.hpp"
#include "qtl/embedding.hpp"
#include "qtl/embedding_table.hpp"
#include "qtl/pipeline.hpp"
#include "qtl/random_objects.hpp"
#include "qtl/report.hpp"

namespace qtl {

struct PropertyResult {
    std::string name;
    std::size_t checks = 0;
    double max_violation = -INFINITY;
    double slack = 0.0;

    bool passed() const { return checks > 0 && max_violation <= slack; }
    void record(double violation) {
        ++checks;
        max_violation = std::max(max_violation, violation);
    }
};

struct ValidationOptions {
    std::uint64_t seed = 0;
    bool corrupt_helstrom = false;  // negative control: swap the Helstrom outcomes
    double effort = 1.0;            // scales every case count
};

namespace detail {

inline std::size_t scaled(double effort, std::size_t n) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(effort * static_cast<double>(n))));
}

inline double povm_risk(const Povm& m, const MatrixView& a0, const MatrixView& a1) {
    return 1.0 - (m.m0() * a0).trace().real() - (m.m1() * a1).trace().real();
}

}  // namespace detail

inline std::vector<PropertyResult> run_validation(const ValidationOptions& opt) {
    RandomObjects rnd(derive_stream(opt.seed, 0, StreamRole::validation));
    std::vector<PropertyResult> out;
    out.reserve(32);  // families hand out references into this vector
    auto family = [&](const char* name, double slack) -> PropertyResult& {
        out.push_back({name, 0, -INFINITY, slack});
        return out.back();
    };

    {
        PropertyResult& sym = family("trace_distance_symmetry", 1e-12);
        PropertyResult& tri = family("trace_distance_triangle", 1e-10);
        PropertyResult& uni = family("trace_distance_unitary_invariance", 1e-9);
        PropertyResult& rng = family("trace_distance_range", 1e-12);
        PropertyResult& pos = family("positive_part_identity", 1e-9);
        for (std::size_t i = 0; i < detail::scaled(opt.effort, 300); ++i) {
            const Eigen::Index n = Eigen::Index{1} << (1 + rnd.index(3));
            const DensityMatrix a = rnd.density(n), b = rnd.density(n), c = rnd.density(n);
            const ComplexMatrix u = rnd.unitary(n);
            const double ab = trace_distance(a.matrix(), b.matrix());
            sym.record(std::abs(ab - trace_distance(b.matrix(), a.matrix())));
            tri.record(trace_distance(a.matrix(), c.matrix()) - ab - trace_distance(b.matrix(), c.matrix()));
            const ComplexMatrix ua = u * a.matrix() * u.adjoint(), ub = u * b.matrix() * u.adjoint();
            uni.record(std::abs(trace_distance(ua, ub) - ab));
            rng.record(std::max(-ab, ab - 1.0));
            const ComplexMatrix h = a.matrix() - 0.7 * b.matrix();
            pos.record(std::abs(positive_part_trace(h) - 0.5 * (h.trace().real() + trace_norm(h))));
        }
    }

    {
        PropertyResult& opt_risk = family("helstrom_optimality", 1e-9);
        PropertyResult& closed = family("helstrom_closed_form", 1e-10);
        const EmbeddingAnsatz ansatz = rx_rot_rx();
        for (std::size_t i = 0; i < detail::scaled(opt.effort, 50); ++i) {
            const DiscreteTask task = rnd.task(2 + rnd.index(8));
            const ThetaVector theta{rnd.uniform(0, kTwoPi), rnd.uniform(0, kTwoPi), rnd.uniform(0, kTwoPi)};
            const auto [a0, a1] = weighted_class_densities(task, ansatz, theta);
            Povm best = helstrom(a0, a1);
            if (opt.corrupt_helstrom) best = best.swapped();
            const double achieved = detail::povm_risk(best, a0, a1);
            closed.record(std::abs(achieved - helstrom_risk(a0, a1)));
            for (std::size_t k = 0; k < detail::scaled(opt.effort, 2000); ++k) {
                opt_risk.record(achieved - detail::povm_risk(rnd.povm(2), a0, a1));
            }
        }
    }

    {
        PropertyResult& order = family("dst_trace_le_dst_tv", 1e-9);
        PropertyResult& def_trace = family("dissimilarity_with_dst_trace", 0.0);
        PropertyResult& def_tv = family("dissimilarity_with_dst_tv", 0.0);
        const EmbeddingAnsatz ansatz = rx_rot_rx();
        const ThetaGrid grid = make_theta_grid(ansatz, 6);
        for (std::size_t i = 0; i < detail::scaled(opt.effort, 20); ++i) {
            const GaussianTaskSpec specs[] = {rnd.gaussian(40), rnd.gaussian(40)};
            const auto centers = shared_bin_centers(specs);
            const TaskPair pair{quantize_gaussian_on(specs[0], centers), quantize_gaussian_on(specs[1], centers)};
            const EmbeddingTable table(ansatz, grid, centers);
            const PairProfiles prof = pair_profiles(pair, table);
            const double dt = dst_trace(prof), dv = dst_tv(pair);
            order.record(dt - dv);
            def_trace.record(static_cast<double>(check_dissimilarity(prof, grid, dt).violations));
            def_tv.record(static_cast<double>(check_dissimilarity(prof, grid, dv).violations));
        }
    }

    {
        PropertyResult& mi = family("renyi2_mi_nonnegative", 1e-12);
        const EmbeddingAnsatz ansatz = rx_rot_rx();
        for (std::size_t i = 0; i < detail::scaled(opt.effort, 100); ++i) {
            const DiscreteTask task = rnd.task(1 + rnd.index(12));
            const ThetaVector theta{rnd.uniform(0, kTwoPi), rnd.uniform(0, kTwoPi), rnd.uniform(0, kTwoPi)};
            mi.record(-renyi2_mi(task, ansatz, theta));
        }
    }

    {
        PropertyResult& exact = family("rademacher_single_sample_exact", 1e-12);
        PropertyResult& caps = family("rademacher_below_caps", 0.0);
        PropertyResult& dominance = family("rademacher_joint_dominates_povm", 1e-12);
        const EmbeddingAnsatz ansatz = rx_rot_rx();
        const ThetaGrid grid = make_theta_grid(ansatz, 4);
        for (std::size_t i = 0; i < detail::scaled(opt.effort, 10); ++i) {
            const DiscreteTask task = rnd.task(2 + rnd.index(6));
            const EmbeddingTable table(ansatz, grid, task.features());
            RademacherSettings s;
            s.outer = 8;
            s.sigma_draws = 64;
            s.seed = rnd.engine()();
            const std::size_t n = 1 + rnd.index(8);
            const RademacherPair one = rademacher_estimates(task, table, 1, s);
            exact.record(std::max(std::abs(one.povm.value - 0.5), std::abs(one.joint.value - 0.5)));
            const RademacherPair est = rademacher_estimates(task, table, n, s);
            caps.record(est.povm.value - rademacher_cap_mi(table, task) - 3.0 * est.povm.std_error);
            caps.record(est.joint.value - rademacher_cap_dim(table, task) - 3.0 * est.joint.std_error);
            dominance.record(est.povm.value - est.joint.value);
        }
    }

    {
        PropertyResult& bound = family("generalization_error_dominates_povms", 1e-9);
        PropertyResult& attained = family("generalization_error_attained", 1e-9);
        const EmbeddingAnsatz ansatz = rx_rot_rx();
        for (std::size_t i = 0; i < detail::scaled(opt.effort, 30); ++i) {
            const DiscreteTask task = rnd.task(2 + rnd.index(8));
            const Dataset data = sample_dataset(task, 1 + rnd.index(20), rnd.engine()());
            const ThetaVector theta{rnd.uniform(0, kTwoPi), rnd.uniform(0, kTwoPi), rnd.uniform(0, kTwoPi)};
            const double g = generalization_error(task, data, ansatz, theta);
            for (std::size_t k = 0; k < detail::scaled(opt.effort, 300); ++k) {
                const Povm m = rnd.povm(2);
                bound.record(std::abs(expected_risk(m, task, ansatz, theta) - empirical_risk(m, data, ansatz, theta)) - g);
            }
            // the supremum is reached at a spectral projector of the risk difference
            const auto [a0, a1] = weighted_class_densities(task, ansatz, theta);
            const WeightedDensity d0 = empirical_class_density(data, ansatz, theta, 0);
            const WeightedDensity d1 = empirical_class_density(data, ansatz, theta, 1);
            const Spectrum s = hermitian_eig((a0 - a1) - (d0.weighted() - d1.weighted()));
            double best = 0.0;
            for (int mode = 0; mode < 2; ++mode) {
                ComplexMatrix m1 = ComplexMatrix::Zero(2, 2);
                for (Eigen::Index e = 0; e < 2; ++e) {
                    if ((mode == 0) == (s.eigenvalues(e) > 0.0)) m1 += s.eigenvectors.col(e) * s.eigenvectors.col(e).adjoint();
                }
                const Povm m = Povm::from_m1(m1);
                best = std::max(best, std::abs(expected_risk(m, task, ansatz, theta) - empirical_risk(m, data, ansatz, theta)));
            }
            attained.record(std::abs(best - g));
        }
    }

    {
        PropertyResult& staged = family("staged_equals_joint_training", 0.0);
        const EmbeddingAnsatz ansatz = rx_rot_rx();
        const ThetaGrid grid = make_theta_grid(ansatz, 4);
        for (std::size_t i = 0; i < detail::scaled(opt.effort, 10); ++i) {
            const DiscreteTask task = rnd.task(3 + rnd.index(6));
            const Dataset data = sample_dataset(task, 2 + rnd.index(10), rnd.engine()());
            const TrainedModel model = transfer_learn(data, data, ansatz, grid);
            // joint minimization of the empirical risk over (theta, POVM), point by point
            std::size_t best = 0;
            double best_risk = INFINITY;
            std::vector<double> risks;
            for (std::size_t p = 0; p < grid.size(); ++p) risks.push_back(train_povm(data, ansatz, grid[p]).empirical_risk);
            best = tie_broken_argmin(risks);
            best_risk = risks[best];
            const TrainedPovm joint = train_povm(data, ansatz, grid[best]);
            double v = model.theta_hat == grid[best] ? 0.0 : 1.0;
            v = std::max(v, std::abs(model.target_train_risk - best_risk) > 1e-12 ? 1.0 : 0.0);
            v = std::max(v, (model.povm.m1() - joint.povm.m1()).cwiseAbs().maxCoeff() > 1e-12 ? 1.0 : 0.0);
            staged.record(v);
        }
    }
    return out;
}

inline bool print_validation(std::ostream& os, const std::vector<PropertyResult>& results) {
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed();
        os << (r.passed() ? "PASS " : "FAIL ") << r.name << "  checks=" << r.checks
           << "  max_violation=" << format_number(r.max_violation) << "  slack=" << format_number(r.slack) << '\n';
    }
    os << (all ? "all properties passed" : "some properties FAILED") << " (" << results.size() << " families)\n";
    return all;
}

}  // namespace qtl
