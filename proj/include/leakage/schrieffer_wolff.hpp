// schrieffer_wolff.hpp: Unitary Schrieffer-Wolff transformation W = Omega (Omega^dag Omega)^{-1/2},
// the Hermitian block-diagonal generator H_SW = W^dag H W, and the perturbed projections
// P~_k = Omega_k (Omega_k^dag Omega_k)^{-1} Omega_k^dag.

#pragma once

#include <string>
#include <vector>

#include "leakage/bloch_solver.hpp"
#include "leakage/bounds.hpp"
#include "leakage/operator_core.hpp"

namespace leakage {

struct SWSolution {
    Matrix w;
    Matrix h_sw;                              // Hermitian part of W^dag H W
    double h_sw_hermiticity_defect = 0.0;     // ||X - X^dag|| of the raw product X = W^dag H W
    std::vector<Matrix> perturbed_projections;
    double w_identity_distance = 0.0;                 // ||W - 1||
    std::vector<double> projection_shifts;            // ||P~_k - P_k||
};

namespace detail {

// Columns Omega u_b for the eigenvectors u_b of group k: Omega_k restricted to range(P_k).
inline Matrix block_columns(const ProblemInstance& inst, const BlochSolution& bloch, std::size_t k) {
    return bloch.omega * inst.partition.eig.eigenvectors(Eigen::all, inst.partition.groups[k]);
}

inline Matrix block_gram(const Matrix& cols, const char* op) {
    const Matrix gram = hermitian_part(cols.adjoint() * cols);
    const RealVector s = singular_values(gram);
    if (!(s(s.size() - 1) > kPsdFloor) || s(0) / s(s.size() - 1) > kCondMax) {
        throw Error(ErrorCode::SingularBlockGram, "schrieffer_wolff", op, "Omega_k^dag Omega_k is singular on range(P_k)");
    }
    return gram;
}

} // namespace detail

/// P~_k = Omega_k (Omega_k^dag Omega_k)^{-1} Omega_k^dag with the inverse taken on range(P_k).
inline Matrix perturbed_projection(const ProblemInstance& inst, const BlochSolution& bloch, std::size_t k) {
    if (k >= inst.partition.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "schrieffer_wolff", "perturbed_projection", "group index out of range");
    }
    const Matrix cols = detail::block_columns(inst, bloch, k);
    const Matrix gram = detail::block_gram(cols, "perturbed_projection");
    const Matrix p = cols * gram.ldlt().solve(cols.adjoint());
    return hermitian_part(p);
}

/// Omega_k (Omega_k^dag Omega_k)^{-1/2}, the direct rotation of range(P_k) onto the perturbed subspace.
inline Matrix direct_rotation(const ProblemInstance& inst, const BlochSolution& bloch, std::size_t k) {
    const Matrix cols = detail::block_columns(inst, bloch, k);
    const Matrix gram = detail::block_gram(cols, "direct_rotation");
    const Matrix basis = inst.partition.eig.eigenvectors(Eigen::all, inst.partition.groups[k]);
    return cols * inv_sqrt_psd(gram) * basis.adjoint();
}

inline SWSolution sw_transform(const ProblemInstance& inst, const BlochSolution& bloch) {
    const double x = inst.x();
    if (!bounds::sw_domain(x)) {
        throw Error(ErrorCode::GammaBelowSWThreshold, "schrieffer_wolff", "sw_transform",
                    "gamma = " + std::to_string(inst.gamma) + " <= 2 pi / (sqrt 2 - 1) ||V|| / eta = " +
                        std::to_string(bounds::gamma_threshold_sw(inst.v_norm, inst.eta())));
    }
    const Index n = inst.dim();
    const Matrix gram = hermitian_part(bloch.omega.adjoint() * bloch.omega);

    SWSolution sw;
    sw.w = bloch.omega * inv_sqrt_psd(gram);
    const Matrix raw = sw.w.adjoint() * inst.hamiltonian() * sw.w;
    sw.h_sw_hermiticity_defect = operator_norm(raw - raw.adjoint());
    sw.h_sw = hermitian_part(raw);
    sw.w_identity_distance = operator_norm(sw.w - identity(n));
    for (std::size_t k = 0; k < inst.partition.size(); ++k) {
        sw.perturbed_projections.push_back(perturbed_projection(inst, bloch, k));
        sw.projection_shifts.push_back(operator_norm(sw.perturbed_projections.back() - inst.partition.projections[k]));
    }
    return sw;
}

} // namespace leakage
