// bloch_solver.hpp: Perturbative solution of the Bloch equations for H = gamma H0 + V.
//
// The wave operator is the series Omega = sum_j gamma^{-j} Omega^(j) with Omega^(0) = 1 and,
// for j >= 1 and every group k,
//
//   [H0, Omega_k^(j)] = Q_k Y_k^(j) P_k,
//   Y_k^(j) = -V Omega_k^(j-1) + sum_{i=1}^{j-1} Omega_k^(i) V Omega_k^(j-1-i),
//
// where Omega_k^(i) = Omega^(i) P_k. In the eigenbasis of H0 each Sylvester equation is an entrywise
// division by eigenvalue differences, so the recursion runs entirely in that basis and the result
// is rotated back once. The series is truncated at the first order whose Catalan tail bound
// drops below the requested tolerance.

#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "leakage/bounds.hpp"
#include "leakage/operator_core.hpp"
#include "leakage/spectral_partition.hpp"

namespace leakage {

inline constexpr double kDefaultSeriesTol = 1e-12;
inline constexpr int kDefaultMaxOrder = 64;

struct ProblemInstance {
    OperatorMatrix h0;
    OperatorMatrix v;
    double gamma = 1.0;
    SpectralPartition partition;
    double v_norm = 0.0;

    Index dim() const noexcept { return h0.dim(); }
    double eta() const noexcept { return partition.gap; }
    double x() const noexcept { return v_norm / (gamma * partition.gap); }
    Matrix hamiltonian() const { return gamma * h0.matrix() + v.matrix(); }
};

inline ProblemInstance make_instance(OperatorMatrix h0, OperatorMatrix v, double gamma, SpectralPartition partition) {
    if (h0.dim() != v.dim() || h0.dim() != partition.dim()) {
        throw Error(ErrorCode::InvalidArgument, "bloch_solver", "ProblemInstance",
                    "H0, V and the partition must share one dimension");
    }
    if (!(gamma > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bloch_solver", "ProblemInstance", "gamma must be positive");
    }
    if (!is_hermitian(h0.matrix()) || !is_hermitian(v.matrix())) {
        throw Error(ErrorCode::NonHermitianInput, "bloch_solver", "ProblemInstance", "H0 and V must be Hermitian");
    }
    ProblemInstance inst{OperatorMatrix::hermitian(h0.matrix()), OperatorMatrix::hermitian(v.matrix()), gamma,
                         std::move(partition), 0.0};
    inst.v_norm = operator_norm(inst.v.matrix());
    return inst;
}

/// Partition H0 by threshold clustering and wrap everything into an instance.
inline ProblemInstance make_instance(const Matrix& h0, const Matrix& v, double gamma, double split_threshold) {
    auto eig = herm_eig(h0);
    auto part = partition_by_threshold(eig, split_threshold);
    return make_instance(OperatorMatrix::hermitian(h0), OperatorMatrix::hermitian(v), gamma, std::move(part));
}

struct BlochSolution {
    std::vector<Matrix> omega_terms;  // Omega^(j), j = 0..order
    std::vector<double> term_norms;   // ||Omega^(j)||
    Matrix omega;
    std::vector<Matrix> omega_blocks;  // Omega_k = Omega P_k
    Matrix h_bloch;
    int order = 0;  // J
    double tail_bound = 0.0;
    double delta_bound = 0.0;
};

namespace detail {

inline Matrix to_eigenbasis(const SpectralPartition& part, const Matrix& m) {
    return part.eig.eigenvectors.adjoint() * m * part.eig.eigenvectors;
}

inline Matrix from_eigenbasis(const SpectralPartition& part, const Matrix& m) {
    return part.eig.eigenvectors * m * part.eig.eigenvectors.adjoint();
}

// Fill the (outside k, inside k) block of x_eig with y(a, b) / (E_a - E_b), where y_cols holds the
// columns of group k.
inline void divide_offblock(const SpectralPartition& part, std::size_t k, const Matrix& y_cols, Matrix& x_eig,
                            const char* op) {
    const RealVector& e = part.eig.eigenvalues;
    const double guard = 0.5 * part.gap;
    const IndexGroup& g = part.groups[k];
    for (std::size_t col = 0; col < g.size(); ++col) {
        const Index b = g[col];
        for (Index a = 0; a < e.size(); ++a) {
            if (part.group_of[static_cast<std::size_t>(a)] == static_cast<int>(k)) continue;
            const double diff = e(a) - e(b);
            if (std::abs(diff) < guard) {
                throw Error(ErrorCode::ZeroGap, "bloch_solver", op,
                            "eigenvalue difference " + std::to_string(diff) + " below half the declared gap " +
                                std::to_string(part.gap));
            }
            x_eig(a, b) = y_cols(a, static_cast<Index>(col)) / diff;
        }
    }
}

// Omega^(j) in the H0 eigenbasis from the lower orders (also in the eigenbasis).
// v_terms[m] caches V Omega^(m).
inline Matrix recursion_step_eig(const SpectralPartition& part, const Matrix& v_eig, const std::vector<Matrix>& terms,
                                 const std::vector<Matrix>& v_terms, const char* op) {
    const std::size_t j = terms.size();
    const Index n = v_eig.rows();
    Matrix next = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < part.size(); ++k) {
        const IndexGroup& g = part.groups[k];
        // Y_k^(j) P_k, restricted to the columns of group k.
        Matrix y = -v_terms[j - 1](Eigen::all, g);
        for (std::size_t i = 1; i < j; ++i) {
            y.noalias() += terms[i](Eigen::all, g) * v_terms[j - 1 - i](g, g);
        }
        divide_offblock(part, k, y, next, op);
    }
    return next;
}

} // namespace detail

/// Solve [H0, X] = Q_k Y P_k for X = Q_k X P_k.
inline Matrix solve_block_sylvester(const SpectralPartition& part, std::size_t k, const Matrix& y) {
    if (k >= part.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "bloch_solver", "solve_block_sylvester", "group index out of range");
    }
    if (!(part.gap > 0.0)) {
        throw Error(ErrorCode::ZeroGap, "bloch_solver", "solve_block_sylvester", "partition gap is not positive");
    }
    const Matrix y_eig = detail::to_eigenbasis(part, y);
    Matrix x_eig = Matrix::Zero(y.rows(), y.cols());
    detail::divide_offblock(part, k, y_eig(Eigen::all, part.groups[k]), x_eig, "solve_block_sylvester");
    return detail::from_eigenbasis(part, x_eig);
}

/// Omega^(j) from Omega^(0..j-1) (all in the original basis); prior[0] must be the identity.
inline Matrix bloch_recursion_step(const ProblemInstance& inst, const std::vector<Matrix>& prior) {
    if (prior.empty()) {
        throw Error(ErrorCode::InvalidArgument, "bloch_solver", "bloch_recursion_step", "prior must hold Omega^(0)");
    }
    const auto& part = inst.partition;
    const Matrix v_eig = detail::to_eigenbasis(part, inst.v.matrix());
    std::vector<Matrix> terms;
    std::vector<Matrix> v_terms;
    terms.reserve(prior.size());
    for (const auto& p : prior) {
        terms.push_back(detail::to_eigenbasis(part, p));
        v_terms.push_back(v_eig * terms.back());
    }
    return detail::from_eigenbasis(part, detail::recursion_step_eig(part, v_eig, terms, v_terms, "bloch_recursion_step"));
}

/// H_Bloch = sum_k P_k H Omega_k.
inline Matrix assemble_h_bloch(const ProblemInstance& inst, const BlochSolution& sol) {
    const Matrix h = inst.hamiltonian();
    Matrix out = Matrix::Zero(h.rows(), h.cols());
    for (std::size_t k = 0; k < inst.partition.size(); ++k) {
        out.noalias() += inst.partition.projections[k] * h * sol.omega_blocks[k];
    }
    return out;
}

/// Smallest J with catalan_tail(x, J) < tol; -1 if none up to j_max.
inline int required_order(double x, double tol, int j_max) {
    for (int order = 0; order <= j_max; ++order) {
        if (bounds::catalan_tail(x, order) < tol) return order;
    }
    return -1;
}

inline BlochSolution solve_bloch_series(const ProblemInstance& inst, double tol = kDefaultSeriesTol,
                                        int j_max = kDefaultMaxOrder) {
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bloch_solver", "solve_bloch_series", "tol must be positive");
    }
    const double threshold = bounds::gamma_threshold_bloch(inst.v_norm, inst.eta());
    if (!(inst.gamma > threshold)) {
        throw Error(ErrorCode::GammaBelowThreshold, "bloch_solver", "solve_bloch_series",
                    "gamma = " + std::to_string(inst.gamma) + " <= 4 pi ||V|| / eta = " + std::to_string(threshold));
    }
    const double x = inst.x();
    const int order = required_order(x, tol, j_max);
    if (order < 0) {
        throw Error(ErrorCode::NotConverged, "bloch_solver", "solve_bloch_series",
                    "Catalan tail stays above " + std::to_string(tol) + " through order " + std::to_string(j_max));
    }

    const auto& part = inst.partition;
    const Index n = inst.dim();
    const Matrix v_eig = detail::to_eigenbasis(part, inst.v.matrix());
    std::vector<Matrix> terms{identity(n)};
    std::vector<Matrix> v_terms{v_eig};
    for (int j = 1; j <= order; ++j) {
        terms.push_back(detail::recursion_step_eig(part, v_eig, terms, v_terms, "solve_bloch_series"));
        v_terms.push_back(v_eig * terms.back());
    }

    BlochSolution sol;
    sol.order = order;
    sol.tail_bound = bounds::catalan_tail(x, order);
    sol.delta_bound = bounds::delta_of(x);
    Matrix omega_eig = Matrix::Zero(n, n);
    double scale = 1.0;
    for (const auto& term : terms) {
        omega_eig += scale * term;
        scale /= inst.gamma;
        sol.omega_terms.push_back(detail::from_eigenbasis(part, term));
        sol.term_norms.push_back(operator_norm(term));
    }
    sol.omega = detail::from_eigenbasis(part, omega_eig);
    for (std::size_t k = 0; k < part.size(); ++k) sol.omega_blocks.push_back(sol.omega * part.projections[k]);
    sol.h_bloch = assemble_h_bloch(inst, sol);
    return sol;
}

} // namespace leakage
