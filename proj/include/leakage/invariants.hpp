// invariants.hpp: Seeded random instances and the property checks run by `leakage verify`.
// Every check records the measured value against its limit, so a report carries the slack as
// well as the verdict.

#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "leakage/bloch_solver.hpp"
#include "leakage/bounds.hpp"
#include "leakage/dynamics.hpp"
#include "leakage/random.hpp"
#include "leakage/schrieffer_wolff.hpp"

namespace leakage {

struct InvariantCheck {
    std::string name;
    std::size_t evaluated = 0;
    std::size_t failures = 0;
    double worst_value = 0.0;  // value at the smallest slack seen
    double worst_limit = 0.0;
    double min_slack = std::numeric_limits<double>::infinity();  // limit - value
};

struct InvariantReport {
    std::vector<InvariantCheck> checks;
    std::size_t instances = 0;
    std::vector<std::string> errors;  // instances that threw, with the message

    bool passed() const {
        if (!errors.empty()) return false;
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.failures == 0; });
    }

    std::size_t failures() const {
        std::size_t n = errors.size();
        for (const auto& c : checks) n += c.failures;
        return n;
    }

    /// value <= limit passes.
    void record(const std::string& name, double value, double limit) {
        auto it = std::find_if(checks.begin(), checks.end(), [&](const auto& c) { return c.name == name; });
        if (it == checks.end()) {
            checks.push_back({name});
            it = std::prev(checks.end());
        }
        ++it->evaluated;
        const double slack = limit - value;
        if (!(value <= limit)) ++it->failures;
        if (!(slack >= it->min_slack)) {
            it->min_slack = std::isnan(slack) ? -std::numeric_limits<double>::infinity() : slack;
            it->worst_value = value;
            it->worst_limit = limit;
        }
    }

    void merge(const InvariantReport& other) {
        instances += other.instances;
        errors.insert(errors.end(), other.errors.begin(), other.errors.end());
        for (const auto& c : other.checks) {
            auto it = std::find_if(checks.begin(), checks.end(), [&](const auto& d) { return d.name == c.name; });
            if (it == checks.end()) {
                checks.push_back(c);
                continue;
            }
            it->evaluated += c.evaluated;
            it->failures += c.failures;
            if (c.min_slack < it->min_slack) {
                it->min_slack = c.min_slack;
                it->worst_value = c.worst_value;
                it->worst_limit = c.worst_limit;
            }
        }
    }
};

struct RandomSuiteOptions {
    std::size_t instances = 100;
    std::uint64_t seed = 0;
    int min_dim = 4;
    int max_dim = 32;
    int min_groups = 2;
    int max_groups = 4;
    double max_x = 0.02;
    bool zero_perturbation = false;
};

struct CheckOptions {
    double series_tol = kDefaultSeriesTol;
    std::size_t leakage_points = 10000;  // grid over [0, 1000 dim / ||H||]
    std::size_t distance_points = 400;
    double slack = kViolationSlack;
};

inline Matrix random_unitary(RandomStream& rng, Index n) {
    Matrix z(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) z(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
    }
    Eigen::HouseholderQR<Matrix> qr(z);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

inline Matrix random_hermitian(RandomStream& rng, Index n) {
    Matrix z(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) z(i, j) = Complex(rng.normal(), rng.normal());
    }
    return hermitian_part(z);
}

/// Instance i of the seeded suite: eigenvalue clusters of width <= 0.5 centred 2 apart, rotated by a
/// random unitary, with a random Hermitian V scaled so that x = ||V|| / (gamma eta) < max_x.
inline ProblemInstance random_instance(const RandomSuiteOptions& opt, std::size_t i) {
    RandomStream rng(opt.seed, "invariants.instance." + std::to_string(i));
    const int n = static_cast<int>(rng.uniform_int(opt.min_dim, opt.max_dim));
    const int m = static_cast<int>(rng.uniform_int(opt.min_groups, std::min(opt.max_groups, n)));
    std::vector<int> sizes(static_cast<std::size_t>(m), 1);
    for (int extra = n - m; extra > 0; --extra) ++sizes[static_cast<std::size_t>(rng.uniform_int(0, m - 1))];

    RealVector energies(n);
    std::vector<Interval> intervals;
    Index pos = 0;
    for (int k = 0; k < m; ++k) {
        const double centre = 2.0 * k;
        const double width = rng.uniform(0.0, 0.5);
        for (int s = 0; s < sizes[static_cast<std::size_t>(k)]; ++s) {
            energies(pos++) = centre + width * (rng.uniform() - 0.5);
        }
        intervals.push_back({centre - 0.5, centre + 0.5});
    }
    const Matrix u = random_unitary(rng, n);
    const Matrix h0 = hermitian_part(u * energies.cast<Complex>().asDiagonal() * u.adjoint());
    auto part = partition_by_intervals(herm_eig(h0), intervals);

    const double gamma = rng.uniform(0.5, 5.0);
    const double x = opt.max_x * rng.uniform(0.05, 1.0);
    Matrix v = Matrix::Zero(n, n);
    if (!opt.zero_perturbation) {
        v = random_hermitian(rng, n);
        v *= x * gamma * part.gap / operator_norm(v);
        v = hermitian_part(v);
    }
    return make_instance(OperatorMatrix::hermitian(h0), OperatorMatrix::hermitian(v), gamma, std::move(part));
}

namespace detail {

inline double off_block_norm(const SpectralPartition& part, const Matrix& m) {
    double worst = 0.0;
    const Index n = m.rows();
    for (std::size_t k = 0; k < part.size(); ++k) {
        const Matrix q = identity(n) - part.projections[k];
        worst = std::max(worst, operator_norm(q * m * part.projections[k]));
        worst = std::max(worst, operator_norm(part.projections[k] * m * q));
    }
    return worst;
}

inline double spectrum_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

inline std::vector<double> to_std(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

} // namespace detail

/// Partition, Bloch, Schrieffer-Wolff and dynamics invariants on one instance.
inline void check_instance(const ProblemInstance& inst, const CheckOptions& opt, InvariantReport& report) {
    ++report.instances;
    const auto& part = inst.partition;
    const Index n = inst.dim();
    const Matrix h = inst.hamiltonian();
    const double h_norm = operator_norm(h);
    const double h_scale = std::max(1.0, h_norm);
    const double h0_norm = operator_norm(inst.h0.matrix());

    // partition
    Matrix sum_p = Matrix::Zero(n, n);
    double comm = 0.0;
    for (const auto& p : part.projections) {
        sum_p += p;
        comm = std::max(comm, operator_norm(commutator(p, inst.h0.matrix())));
    }
    report.record("partition.completeness", operator_norm(sum_p - identity(n)), 1e-12 * std::sqrt(double(n)));
    report.record("partition.commutes_with_h0", comm, 1e-10 * std::max(1.0, h0_norm));
    double brute_gap = std::numeric_limits<double>::infinity();
    const RealVector& e = part.eig.eigenvalues;
    for (Index a = 0; a < n; ++a) {
        for (Index b = 0; b < n; ++b) {
            if (part.group_of[std::size_t(a)] != part.group_of[std::size_t(b)]) {
                brute_gap = std::min(brute_gap, std::abs(e(a) - e(b)));
            }
        }
    }
    report.record("partition.gap_matches_brute_force", std::abs(brute_gap - part.gap), 1e-12 * std::max(1.0, h0_norm));

    const double x = inst.x();
    const auto lin = bounds::leakage_bound(inst.v_norm, inst.gamma, inst.eta());
    const bool bloch_ok = 4.0 * bounds::kPi * x < 1.0;

    // leakage over a long grid: sharp bound under the Bloch hypothesis, linear bound always
    {
        const double t_max = 1000.0 * double(n) / std::max(h_norm, 1e-300);
        const auto grid = uniform_grid(t_max, opt.leakage_points);
        const LeakageEvaluator leak(inst);
        std::vector<double> worst(grid.size(), 0.0);
        parallel_for(grid.size(), [&](std::size_t i) {
            const auto values = leak.leakage(grid[i]);
            worst[i] = *std::max_element(values.begin(), values.end());
        });
        const double max_leak = *std::max_element(worst.begin(), worst.end());
        report.record("leakage.at_most_one", max_leak, 1.0 + 1e-12);
        if (bloch_ok) report.record("leakage.sharp_bound", max_leak, *lin.sharp + opt.slack);
        if (lin.linear <= 2.0) report.record("leakage.linear_bound", max_leak, lin.linear + opt.slack);
        if (inst.v_norm == 0.0) report.record("leakage.zero_when_unperturbed", max_leak, 1e-12);
    }
    if (!bloch_ok) return;

    // Bloch series
    const BlochSolution bloch = solve_bloch_series(inst, opt.series_tol);
    const double delta = bloch.delta_bound;
    const double res_tol = 10.0 * opt.series_tol * h_scale;
    double r_bloch = 0.0, r_right = 0.0, r_left = 0.0;
    for (std::size_t k = 0; k < part.size(); ++k) {
        const Matrix& ok = bloch.omega_blocks[k];
        const Matrix& pk = part.projections[k];
        r_bloch = std::max(r_bloch, operator_norm(h * ok - ok * h * ok));
        r_right = std::max(r_right, operator_norm(ok * pk - ok));
        r_left = std::max(r_left, operator_norm(pk * ok - pk));
    }
    report.record("bloch.residual_equation", r_bloch, res_tol);
    report.record("bloch.residual_right_projection", r_right, res_tol);
    report.record("bloch.residual_left_projection", r_left, res_tol);

    const double omega_dist = operator_norm(bloch.omega - identity(n));
    report.record("bloch.omega_minus_identity", omega_dist, delta + opt.slack);
    report.record("bloch.delta_below_one", delta, 1.0 - 1e-15);
    report.record("bloch.omega_norm", operator_norm(bloch.omega), 1.0 + delta + opt.slack);
    const Matrix omega_inv = invert(bloch.omega);
    report.record("bloch.omega_inverse_norm", operator_norm(omega_inv), 1.0 / (1.0 - delta) + opt.slack);
    report.record("bloch.omega_inverse_minus_identity", operator_norm(omega_inv - identity(n)),
                  delta / (1.0 - delta) + opt.slack);

    const double ratio = bounds::kPi * inst.v_norm / inst.eta();
    for (std::size_t j = 0; j < bloch.term_norms.size(); ++j) {
        const double bound = std::pow(ratio, double(j)) * bounds::catalan_double(unsigned(j));
        report.record("bloch.catalan_term_bound", bloch.term_norms[j], bound + 1e-12 * std::max(1.0, bound));
    }
    if (bloch.omega_terms.size() > 1) {
        // order one: Omega^(1)_ab = -V_ab / (E_a - E_b) between different groups, zero inside groups
        const Matrix o1 = detail::to_eigenbasis(part, bloch.omega_terms[1]);
        const Matrix v_eig = detail::to_eigenbasis(part, inst.v.matrix());
        double worst = 0.0;
        for (Index a = 0; a < n; ++a) {
            for (Index b = 0; b < n; ++b) {
                const bool same = part.group_of[std::size_t(a)] == part.group_of[std::size_t(b)];
                const Complex expected = same ? Complex(0.0) : -v_eig(a, b) / (e(a) - e(b));
                worst = std::max(worst, std::abs(o1(a, b) - expected));
            }
        }
        report.record("bloch.first_order_closed_form", worst, 1e-10 * std::max(1.0, inst.v_norm / inst.eta()));
    }

    report.record("bloch.h_bloch_block_diagonal", detail::off_block_norm(part, bloch.h_bloch), 1e-9 * h_scale);
    {
        Eigen::ComplexEigenSolver<Matrix> ces(bloch.h_bloch, false);
        std::vector<double> re;
        double imag = 0.0;
        for (Index i = 0; i < n; ++i) {
            re.push_back(ces.eigenvalues()(i).real());
            imag = std::max(imag, std::abs(ces.eigenvalues()(i).imag()));
        }
        const auto eig_h = herm_eig(h);
        const double dist = std::max(imag, detail::spectrum_distance(re, detail::to_std(eig_h.eigenvalues)));
        report.record("bloch.isospectral", dist, 1e-8 * h_scale);
    }

    // Appendix F type inequalities on the Gram matrix
    {
        const Matrix gram = hermitian_part(bloch.omega.adjoint() * bloch.omega);
        const double lim = 1.0 - 2.0 * delta - delta * delta;
        report.record("sw.gram_minus_identity", operator_norm(gram - identity(n)), 2.0 * delta + delta * delta + opt.slack);
        if (lim > 0.0) {
            const Matrix g_inv_sqrt = inv_sqrt_psd(gram);
            report.record("sw.gram_inv_sqrt_norm", operator_norm(g_inv_sqrt), 1.0 / std::sqrt(lim) + opt.slack);
            report.record("sw.gram_inv_sqrt_minus_identity", operator_norm(g_inv_sqrt - identity(n)),
                          1.0 / std::sqrt(lim) - 1.0 + opt.slack);
        }
    }

    if (!bounds::sw_domain(x)) return;
    const SWSolution sw = sw_transform(inst, bloch);
    report.record("sw.unitarity", operator_norm(sw.w.adjoint() * sw.w - identity(n)), 1e-10);
    report.record("sw.w_minus_identity", sw.w_identity_distance, bounds::sw_identity_distance_bound(delta) + opt.slack);
    report.record("sw.h_sw_hermiticity_defect", sw.h_sw_hermiticity_defect, 1e-10 * h_scale);
    report.record("sw.h_sw_block_diagonal", detail::off_block_norm(part, sw.h_sw), 1e-9 * h_scale);
    report.record("sw.isospectral",
                  detail::spectrum_distance(detail::to_std(herm_eig(sw.h_sw).eigenvalues),
                                            detail::to_std(herm_eig(h).eigenvalues)),
                  1e-8 * h_scale);
    double rot = 0.0, idem = 0.0, herm = 0.0, comm_h = 0.0, rank = 0.0, conj = 0.0;
    Matrix sum_pt = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < part.size(); ++k) {
        const Matrix& pt = sw.perturbed_projections[k];
        rot = std::max(rot, operator_norm(sw.w * part.projections[k] - direct_rotation(inst, bloch, k)));
        idem = std::max(idem, operator_norm(pt * pt - pt));
        herm = std::max(herm, operator_norm(pt - pt.adjoint()));
        comm_h = std::max(comm_h, operator_norm(commutator(pt, h)));
        rank = std::max(rank, std::abs(pt.trace().real() - double(part.groups[k].size())));
        conj = std::max(conj, operator_norm(sw.w * part.projections[k] * sw.w.adjoint() - pt));
        sum_pt += pt;
    }
    report.record("sw.direct_rotation_identity", rot, 1e-9);
    report.record("projection.idempotent", idem, 1e-10);
    report.record("projection.hermitian", herm, 1e-10);
    report.record("projection.commutes_with_h", comm_h, 1e-9 * h_scale);
    report.record("projection.rank", rank, 1e-9);
    report.record("projection.complete", operator_norm(sum_pt - identity(n)), 1e-10);
    report.record("projection.equals_rotated_projection", conj, 1e-9);

    // evolution distances
    {
        const double t_max = 100.0 * double(n) / std::max(h_norm, 1e-300);
        const auto grid = uniform_grid(t_max, opt.distance_points);
        const DistanceEvaluator db(inst, bloch_generator(bloch));
        const DistanceEvaluator ds(inst, sw_generator(sw));
        std::vector<double> d_bloch(grid.size()), d_sw(grid.size());
        parallel_for(grid.size(), [&](std::size_t i) {
            d_bloch[i] = db.distance(grid[i]);
            d_sw[i] = ds.distance(grid[i]);
        });
        report.record("dynamics.d_bloch_bound", *std::max_element(d_bloch.begin(), d_bloch.end()),
                      *lin.sharp + opt.slack);
        report.record("dynamics.d_sw_bound", *std::max_element(d_sw.begin(), d_sw.end()),
                      bounds::sw_distance_bound(x) + opt.slack);
    }
}

/// The two forms of the Schrieffer-Wolff threshold must agree away from the boundary itself.
inline void check_threshold_equivalence(std::uint64_t seed, std::size_t samples, InvariantReport& report) {
    RandomStream rng(seed, "invariants.threshold_grid");
    std::size_t disagreements = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double eta = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        const double v = std::exp(rng.uniform(std::log(1e-3), std::log(1.0)));
        const double gamma = bounds::gamma_threshold_sw(v, eta) * std::exp(rng.uniform(-1.0, 1.0));
        const double x = v / (gamma * eta);
        const bool by_gamma = gamma > bounds::gamma_threshold_sw(v, eta);
        const bool by_delta = 4.0 * bounds::kPi * x < 1.0 && bounds::delta_of(x) < bounds::kSqrt2Minus1;
        const double rel = std::abs(gamma / bounds::gamma_threshold_sw(v, eta) - 1.0);
        if (by_gamma != by_delta && rel > 1e-12) ++disagreements;
    }
    report.record("bounds.threshold_equivalence", double(disagreements), 0.0);
}

/// Monotonicity and the closed-form identities of the scalar bounds on a uniform grid.
inline void check_scalar_bounds(std::size_t points, InvariantReport& report) {
    const double x_max = 1.0 / (4.0 * bounds::kPi);
    double worst_identity = 0.0, worst_linear = 0.0;
    double prev_d = -1.0, prev_e = -1.0, prev_s = -1.0;
    std::size_t non_monotone = 0;
    for (std::size_t i = 1; i <= points; ++i) {
        const double x = x_max * double(i) / double(points + 1);
        const double d = bounds::delta_of(x);
        const double eps = bounds::epsilon_of(x);
        worst_identity = std::max(worst_identity, std::abs(eps - 2.0 * d / (1.0 - d)) / eps);
        if (eps <= 2.0) worst_linear = std::max(worst_linear, eps - 9.0 * bounds::kPi * x);
        if (d <= prev_d || eps <= prev_e) ++non_monotone;
        prev_d = d;
        prev_e = eps;
        if (bounds::sw_domain(x)) {
            const double s = bounds::sw_distance_bound(x);
            if (s <= prev_s) ++non_monotone;
            prev_s = s;
        }
    }
    report.record("bounds.epsilon_delta_identity", worst_identity, 1e-12);
    report.record("bounds.epsilon_below_linear", worst_linear, 0.0);
    report.record("bounds.monotone", double(non_monotone), 0.0);
}

/// The seeded random suite plus the scalar checks.
inline InvariantReport run_invariant_suite(const RandomSuiteOptions& suite, const CheckOptions& checks = {}) {
    InvariantReport report;
    for (std::size_t i = 0; i < suite.instances; ++i) {
        try {
            check_instance(random_instance(suite, i), checks, report);
        } catch (const std::exception& ex) {
            report.errors.push_back("instance " + std::to_string(i) + ": " + ex.what());
        }
    }
    check_threshold_equivalence(suite.seed, 1000, report);
    check_scalar_bounds(1000, report);
    return report;
}

} // namespace leakage
