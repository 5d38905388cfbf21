// dynamics.hpp: Exact evolution under H, leakage L_k(t) = ||Q_k e^{-itH} P_k||, distances to the
// effective evolutions, and the sweeps built on them (gamma scaling, truncation convergence).

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leakage/bloch_solver.hpp"
#include "leakage/bounds.hpp"
#include "leakage/operator_core.hpp"
#include "leakage/parallel.hpp"
#include "leakage/schrieffer_wolff.hpp"

namespace leakage {

inline constexpr double kViolationSlack = 1e-9;
inline constexpr double kDefaultTMax = 200.0;
inline constexpr std::size_t kDefaultTPoints = 2001;

inline std::vector<double> uniform_grid(double t_max, std::size_t n_points) {
    if (n_points < 2 || !(t_max > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "dynamics", "uniform_grid", "need t_max > 0 and at least 2 points");
    }
    std::vector<double> t(n_points);
    for (std::size_t i = 0; i < n_points; ++i) t[i] = t_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
    return t;
}

/// Leakage out of every group from one eigendecomposition of H. The eigenvectors of H are
/// expressed in the H0 eigenbasis, where P_k selects the rows of group k, so
/// L_k(t) = || A[not k, :] e^{-it Lambda} A[k, :]^dag ||.
class LeakageEvaluator {
public:
    explicit LeakageEvaluator(const ProblemInstance& inst) : part_(&inst.partition) {
        const HermitianEigenSystem eig_h = herm_eig(inst.hamiltonian());
        energies_ = eig_h.eigenvalues;
        const Matrix a = inst.partition.eig.eigenvectors.adjoint() * eig_h.eigenvectors;
        for (std::size_t k = 0; k < part_->size(); ++k) {
            IndexGroup outside;
            for (Index i = 0; i < a.rows(); ++i) {
                if (part_->group_of[static_cast<std::size_t>(i)] != static_cast<int>(k)) outside.push_back(i);
            }
            inside_rows_.push_back(a(part_->groups[k], Eigen::all));
            outside_rows_.push_back(a(outside, Eigen::all));
        }
    }

    std::size_t groups() const noexcept { return part_->size(); }

    double leakage(std::size_t k, double t) const {
        const Vector phases = (energies_ * Complex(0.0, -t)).array().exp().matrix();
        return block_norm(k, phases);
    }

    std::vector<double> leakage(double t) const {
        const Vector phases = (energies_ * Complex(0.0, -t)).array().exp().matrix();
        std::vector<double> out(groups());
        for (std::size_t k = 0; k < groups(); ++k) out[k] = block_norm(k, phases);
        return out;
    }

private:
    double block_norm(std::size_t k, const Vector& phases) const {
        const Matrix block = (outside_rows_[k] * phases.asDiagonal()) * inside_rows_[k].adjoint();
        return spectral_norm(block);
    }

    const SpectralPartition* part_;
    RealVector energies_;
    std::vector<Matrix> inside_rows_;
    std::vector<Matrix> outside_rows_;
};

inline double leakage_at(const ProblemInstance& inst, std::size_t k, double t) {
    if (k >= inst.partition.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "dynamics", "leakage_at", "group index out of range");
    }
    return LeakageEvaluator(inst).leakage(k, t);
}

/// An effective generator: either Hermitian (H_SW), or H_Bloch together with the wave operator
/// Omega, whose propagator is Omega^{-1} e^{-itH} Omega.
struct EffectiveGenerator {
    Matrix generator;
    std::optional<Matrix> similarity;
};

inline EffectiveGenerator bloch_generator(const BlochSolution& bloch) { return {bloch.h_bloch, bloch.omega}; }

inline EffectiveGenerator sw_generator(const SWSolution& sw) { return {sw.h_sw, std::nullopt}; }

// Both propagators are expressed in the eigenbasis Q of H, where e^{-itH} is the diagonal D:
//   Bloch: Q^dag Omega^{-1} e^{-itH} Omega Q = M D M^{-1} with M = Q^dag Omega^{-1} Q,
//   SW:    Q^dag e^{-itH_SW} Q = S E S^dag with S = Q^dag R, R the eigenvectors of H_SW.
class DistanceEvaluator {
public:
    DistanceEvaluator(const ProblemInstance& inst, const EffectiveGenerator& gen) {
        const HermitianEigenSystem eig_h = herm_eig(inst.hamiltonian());
        energies_ = eig_h.eigenvalues;
        const Matrix& q = eig_h.eigenvectors;
        if (gen.similarity) {
            left_ = q.adjoint() * invert(*gen.similarity) * q;
            right_ = q.adjoint() * (*gen.similarity) * q;
            gen_energies_ = energies_;
        } else {
            const HermitianEigenSystem eig_gen = herm_eig(gen.generator);
            gen_energies_ = eig_gen.eigenvalues;
            left_ = q.adjoint() * eig_gen.eigenvectors;
            right_ = left_.adjoint();
        }
    }

    /// ||e^{-itH} - e^{-it Gen}||
    double distance(double t) const {
        const Vector d = (energies_ * Complex(0.0, -t)).array().exp().matrix();
        const Vector e = (gen_energies_ * Complex(0.0, -t)).array().exp().matrix();
        Matrix diff = -(left_ * e.asDiagonal()) * right_;
        diff.diagonal() += d;
        return spectral_norm(diff);
    }

private:
    RealVector energies_;
    RealVector gen_energies_;
    Matrix left_;
    Matrix right_;
};

inline double evolution_distance(const ProblemInstance& inst, const EffectiveGenerator& gen, double t) {
    return DistanceEvaluator(inst, gen).distance(t);
}

struct Violation {
    std::string kind;  // "leakage_sharp", "leakage_linear", "d_bloch", "d_sw"
    int k = -1;
    double t = 0.0;
    double value = 0.0;
    double bound = 0.0;
};

struct LeakageReport {
    std::vector<double> times;
    std::vector<std::vector<double>> per_block_leakage;  // [k][t]
    std::vector<double> d_bloch_series;                  // empty unless computed
    std::vector<double> d_sw_series;
    bounds::BoundReport bounds;
    double max_leakage = 0.0;
    std::vector<Violation> violations;
    std::optional<int> bloch_order;
};

struct ExperimentOptions {
    bool distances = true;
    double series_tol = kDefaultSeriesTol;
    double violation_slack = kViolationSlack;
    const BlochSolution* bloch = nullptr;  // reused when given, otherwise solved here
    const SWSolution* sw = nullptr;
};

/// Leakage time series for every group, optionally the Bloch and SW evolution distances, the
/// bound report for the instance, and every sample that exceeds an applicable bound.
inline LeakageReport run_leakage_experiment(const ProblemInstance& inst, std::span<const double> times,
                                            const ExperimentOptions& options = {}) {
    LeakageReport report;
    report.times.assign(times.begin(), times.end());
    report.bounds = bounds::bound_report(inst.v_norm, inst.gamma, inst.eta());
    const std::size_t nt = times.size();
    const std::size_t ng = inst.partition.size();
    report.per_block_leakage.assign(ng, std::vector<double>(nt, 0.0));

    const LeakageEvaluator leak(inst);
    parallel_for(nt, [&](std::size_t i) {
        const auto values = leak.leakage(times[i]);
        for (std::size_t k = 0; k < ng; ++k) report.per_block_leakage[k][i] = values[k];
    });

    const bool bloch_ok = inst.gamma > bounds::gamma_threshold_bloch(inst.v_norm, inst.eta());
    if (options.distances && bloch_ok) {
        std::optional<BlochSolution> own_bloch;
        if (!options.bloch) own_bloch = solve_bloch_series(inst, options.series_tol);
        const BlochSolution& bloch = options.bloch ? *options.bloch : *own_bloch;
        report.bloch_order = bloch.order;
        const DistanceEvaluator d_bloch(inst, bloch_generator(bloch));
        report.d_bloch_series.assign(nt, 0.0);
        parallel_for(nt, [&](std::size_t i) { report.d_bloch_series[i] = d_bloch.distance(times[i]); });
        if (report.bounds.d_sw_bound) {
            std::optional<SWSolution> own_sw;
            if (!options.sw) own_sw = sw_transform(inst, bloch);
            const DistanceEvaluator d_sw(inst, sw_generator(options.sw ? *options.sw : *own_sw));
            report.d_sw_series.assign(nt, 0.0);
            parallel_for(nt, [&](std::size_t i) { report.d_sw_series[i] = d_sw.distance(times[i]); });
        }
    }

    const double slack = options.violation_slack;
    const auto& b = report.bounds;
    for (std::size_t k = 0; k < ng; ++k) {
        for (std::size_t i = 0; i < nt; ++i) {
            const double value = report.per_block_leakage[k][i];
            report.max_leakage = std::max(report.max_leakage, value);
            if (bloch_ok && b.epsilon && value > *b.epsilon + slack) {
                report.violations.push_back({"leakage_sharp", static_cast<int>(k), times[i], value, *b.epsilon});
            }
            if (b.leakage_linear <= 2.0 && value > b.leakage_linear + slack) {
                report.violations.push_back({"leakage_linear", static_cast<int>(k), times[i], value, b.leakage_linear});
            }
        }
    }
    for (std::size_t i = 0; i < report.d_bloch_series.size(); ++i) {
        if (b.epsilon && report.d_bloch_series[i] > *b.epsilon + slack) {
            report.violations.push_back({"d_bloch", -1, times[i], report.d_bloch_series[i], *b.epsilon});
        }
    }
    for (std::size_t i = 0; i < report.d_sw_series.size(); ++i) {
        if (b.d_sw_bound && report.d_sw_series[i] > *b.d_sw_bound + slack) {
            report.violations.push_back({"d_sw", -1, times[i], report.d_sw_series[i], *b.d_sw_bound});
        }
    }
    return report;
}

/// Maximum over the grid and over all groups of L_k(t).
inline double max_leakage(const ProblemInstance& inst, std::span<const double> times) {
    const LeakageEvaluator leak(inst);
    std::vector<double> per_time(times.size(), 0.0);
    parallel_for(times.size(), [&](std::size_t i) {
        const auto values = leak.leakage(times[i]);
        per_time[i] = *std::max_element(values.begin(), values.end());
    });
    return per_time.empty() ? 0.0 : *std::max_element(per_time.begin(), per_time.end());
}

struct ScalingFit {
    std::vector<double> parameters;  // gamma, or v0 for perturbation sweeps
    std::vector<double> max_leakage;
    double slope = 0.0;
    double intercept = 0.0;
};

namespace detail {

// Least-squares line through (log xs, log ys); rejects fewer than 4 points or less than 1.5 decades.
inline ScalingFit fit_log_log(std::vector<double> params, std::vector<double> leak, std::vector<double> abscissa,
                              const char* op) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (leak[i] > 1e-13 && std::isfinite(leak[i])) {
            lx.push_back(std::log(abscissa[i]));
            ly.push_back(std::log(leak[i]));
        }
    }
    if (lx.size() < 4) {
        throw Error(ErrorCode::DegenerateSweep, "dynamics", op,
                    "only " + std::to_string(lx.size()) + " sweep points with nonzero leakage");
    }
    const auto [lo, hi] = std::minmax_element(lx.begin(), lx.end());
    if ((*hi - *lo) / std::log(10.0) < 1.5) {
        throw Error(ErrorCode::DegenerateSweep, "dynamics", op, "sweep spans less than 1.5 decades");
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    ScalingFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.parameters = std::move(params);
    fit.max_leakage = std::move(leak);
    return fit;
}

} // namespace detail

/// Max leakage over the grid for each gamma (H0, V and partition fixed) and the log-log slope
/// against gamma.
inline ScalingFit gamma_scaling_sweep(const ProblemInstance& templ, std::span<const double> gammas,
                                      std::span<const double> times) {
    if (templ.v_norm == 0.0) {
        throw Error(ErrorCode::DegenerateSweep, "dynamics", "gamma_scaling_sweep", "V = 0: every leakage vanishes");
    }
    std::vector<double> leak;
    for (double gamma : gammas) {
        if (!(gamma > bounds::gamma_threshold_bloch(templ.v_norm, templ.eta()))) {
            throw Error(ErrorCode::GammaBelowThreshold, "dynamics", "gamma_scaling_sweep",
                        "gamma = " + std::to_string(gamma) + " is below the Bloch threshold");
        }
        ProblemInstance inst = templ;
        inst.gamma = gamma;
        leak.push_back(max_leakage(inst, times));
    }
    std::vector<double> params(gammas.begin(), gammas.end());
    return detail::fit_log_log(params, std::move(leak), params, "gamma_scaling_sweep");
}

/// Sweep of the perturbation strength at fixed gamma. The slope is taken against gamma / v0, the
/// effective coupling ratio, so it is directly comparable with a gamma sweep (expected near -1).
inline ScalingFit perturbation_scaling_sweep(const std::function<ProblemInstance(double)>& build,
                                             std::span<const double> strengths, std::span<const double> times) {
    std::vector<double> leak;
    std::vector<double> ratio;
    for (double v0 : strengths) {
        if (!(v0 > 0.0)) {
            throw Error(ErrorCode::DegenerateSweep, "dynamics", "perturbation_scaling_sweep", "strengths must be positive");
        }
        const ProblemInstance inst = build(v0);
        if (!(inst.gamma > bounds::gamma_threshold_bloch(inst.v_norm, inst.eta()))) {
            throw Error(ErrorCode::GammaBelowThreshold, "dynamics", "perturbation_scaling_sweep",
                        "v0 = " + std::to_string(v0) + " puts gamma below the Bloch threshold");
        }
        leak.push_back(max_leakage(inst, times));
        ratio.push_back(inst.gamma / v0);
    }
    return detail::fit_log_log(std::vector<double>(strengths.begin(), strengths.end()), std::move(leak),
                               std::move(ratio), "perturbation_scaling_sweep");
}

struct TruncationStudy {
    std::vector<int> cutoffs;
    std::vector<double> leakage;
    std::vector<double> differences;  // |L(K_{i+1}) - L(K_i)|
    bool monotone = true;             // differences non-increasing
};

/// Leakage out of group k at t_probe for a sequence of truncations of the same system.
inline TruncationStudy truncation_convergence_study(const std::function<ProblemInstance(int)>& build,
                                                    std::span<const int> cutoffs, double t_probe, std::size_t k) {
    if (cutoffs.empty() || !std::is_sorted(cutoffs.begin(), cutoffs.end()) ||
        std::adjacent_find(cutoffs.begin(), cutoffs.end()) != cutoffs.end()) {
        throw Error(ErrorCode::InvalidArgument, "dynamics", "truncation_convergence_study",
                    "cutoffs must be strictly increasing");
    }
    TruncationStudy study;
    std::optional<Interval> reference;
    std::size_t reference_size = 0;
    for (int cutoff : cutoffs) {
        const ProblemInstance inst = build(cutoff);
        if (k >= inst.partition.size()) {
            throw Error(ErrorCode::GroupNotPreserved, "dynamics", "truncation_convergence_study",
                        "group " + std::to_string(k) + " missing at cutoff " + std::to_string(cutoff));
        }
        const Interval iv = inst.partition.component_intervals[k];
        const std::size_t size = inst.partition.groups[k].size();
        if (!reference) {
            reference = iv;
            reference_size = size;
        } else {
            const double tol = 1e-8 * std::max({1.0, std::abs(iv.lo), std::abs(iv.hi)});
            if (size != reference_size || std::abs(iv.lo - reference->lo) > tol || std::abs(iv.hi - reference->hi) > tol) {
                throw Error(ErrorCode::GroupNotPreserved, "dynamics", "truncation_convergence_study",
                            "group " + std::to_string(k) + " changes at cutoff " + std::to_string(cutoff));
            }
        }
        study.cutoffs.push_back(cutoff);
        study.leakage.push_back(leakage_at(inst, k, t_probe));
    }
    for (std::size_t i = 1; i < study.leakage.size(); ++i) {
        study.differences.push_back(std::abs(study.leakage[i] - study.leakage[i - 1]));
        if (i >= 2 && study.differences[i - 1] > study.differences[i - 2]) study.monotone = false;
    }
    return study;
}

} // namespace leakage
