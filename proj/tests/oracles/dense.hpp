// Brute-force dense oracles: Kronecker-form Sylvester solves, exact wave operators from the
// eigenvectors of H, Pade matrix exponentials, Neumann-series inverses, pairwise gaps.

#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <vector>

#include "leakage/leakage.hpp"

namespace oracle {

using leakage::Complex;
using leakage::Index;
using leakage::Matrix;

// Minimum-norm solution of A X - X B = Y through the N^2 x N^2 Kronecker system.
inline Matrix sylvester_kron(const Matrix& a, const Matrix& b, const Matrix& y) {
    const Index n = a.rows();
    const Index m = b.rows();
    const Matrix ia = Matrix::Identity(m, m);
    const Matrix ib = Matrix::Identity(n, n);
    Matrix k = Matrix::Zero(n * m, n * m);
    // vec(A X) = (I kron A) vec X, vec(X B) = (B^T kron I) vec X
    for (Index p = 0; p < m; ++p) {
        for (Index q = 0; q < m; ++q) {
            k.block(p * n, q * n, n, n) = ia(p, q) * a - b(q, p) * ib;
        }
    }
    const Eigen::Map<const leakage::Vector> vy(y.data(), n * m);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(k);
    cod.setThreshold(1e-12);
    const leakage::Vector vx = cod.solve(vy);
    return Eigen::Map<const Matrix>(vx.data(), n, m);
}

inline Matrix expm(const Matrix& m) { return m.exp(); }

// sum_n (1 - M)^n until the terms vanish
inline Matrix neumann_inverse(const Matrix& m, int max_terms = 2000) {
    const Index n = m.rows();
    const Matrix d = Matrix::Identity(n, n) - m;
    Matrix term = Matrix::Identity(n, n);
    Matrix sum = term;
    for (int i = 0; i < max_terms; ++i) {
        term = term * d;
        sum += term;
        if (term.norm() < 1e-18) break;
    }
    return sum;
}

inline double brute_gap(const leakage::RealVector& e, const std::vector<int>& group_of) {
    double gap = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < e.size(); ++a) {
        for (Index b = 0; b < e.size(); ++b) {
            if (group_of[std::size_t(a)] != group_of[std::size_t(b)]) gap = std::min(gap, std::abs(e(a) - e(b)));
        }
    }
    return gap;
}

// Spectral projections of H onto the eigenvalues with the same ranks as each group of H0 (valid
// while the perturbation keeps the clusters ordered).
inline std::vector<Matrix> exact_projections(const leakage::ProblemInstance& inst) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(inst.hamiltonian());
    std::vector<Matrix> out;
    for (const auto& g : inst.partition.groups) {
        const Matrix u = es.eigenvectors()(Eigen::all, g);
        out.push_back(u * u.adjoint());
    }
    return out;
}

// The Bloch wave operator from exact eigenvectors: Omega_k = Pt_k U_k (U_k^dag Pt_k U_k)^{-1} U_k^dag,
// which satisfies P_k Omega_k = P_k and range(Omega_k) = range(Pt_k).
inline Matrix exact_wave_operator(const leakage::ProblemInstance& inst) {
    const auto pt = exact_projections(inst);
    const Index n = inst.dim();
    Matrix omega = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < pt.size(); ++k) {
        const Matrix u = inst.partition.eig.eigenvectors(Eigen::all, inst.partition.groups[k]);
        const Matrix b = u.adjoint() * pt[k] * u;
        omega += pt[k] * u * b.inverse() * u.adjoint();
    }
    return omega;
}

// Column phases of b aligned to a (each column multiplied by the phase of its overlap with a).
inline Matrix align_phases(const Matrix& a, Matrix b) {
    for (Index j = 0; j < b.cols(); ++j) {
        const Complex overlap = b.col(j).dot(a.col(j));
        if (std::abs(overlap) > 0.0) b.col(j) *= overlap / std::abs(overlap);
    }
    return b;
}

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline leakage::ProblemInstance rabi_instance(double v = 0.05, double gamma = 1.0) {
    Matrix h0 = Matrix::Zero(2, 2);
    h0(1, 1) = 1.0;
    return leakage::make_instance(h0, v * pauli_x(), gamma, 0.5);
}

} // namespace oracle
