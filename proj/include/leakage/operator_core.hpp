// operator_core.hpp: Dense complex operators: Hermitian eigensystems, operator norm,
// propagators, inverse square roots and inverses. Everything else builds on these.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "leakage/error.hpp"

namespace leakage {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Configuration constants.
inline constexpr double kHermitianRelTol = 1e-12;
inline constexpr double kPsdFloor = 1e-12;
inline constexpr double kCondMax = 1e12;

inline double max_abs_entry(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& m) {
    return max_abs_entry(m - m.adjoint());
}

inline bool is_hermitian(const Matrix& m, double rel_tol = kHermitianRelTol) {
    return hermiticity_defect(m) <= rel_tol * max_abs_entry(m);
}

inline Matrix hermitian_part(const Matrix& m) {
    return 0.5 * (m + m.adjoint());
}

inline Matrix identity(Index dim) {
    return Matrix::Identity(dim, dim);
}

/// Square complex matrix with an optional Hermiticity promise that is checked on construction.
class OperatorMatrix {
public:
    OperatorMatrix() : entries_(identity(1)) {}

    explicit OperatorMatrix(Matrix entries, bool hermitian_hint = false)
        : entries_(std::move(entries)), hermitian_(hermitian_hint) {
        if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
            throw Error(ErrorCode::InvalidArgument, "operator_core", "OperatorMatrix",
                        "entries must form a non-empty square matrix");
        }
        if (hermitian_ && !is_hermitian(entries_)) {
            throw Error(ErrorCode::NonHermitianInput, "operator_core", "OperatorMatrix",
                        "hermitian_hint set but max|M - M^dag| = " + std::to_string(hermiticity_defect(entries_)));
        }
    }

    static OperatorMatrix hermitian(Matrix entries) { return OperatorMatrix(std::move(entries), true); }

    Index dim() const noexcept { return entries_.rows(); }
    const Matrix& matrix() const noexcept { return entries_; }
    bool hermitian_hint() const noexcept { return hermitian_; }

    operator const Matrix&() const noexcept { return entries_; }

private:
    Matrix entries_;
    bool hermitian_ = false;
};

struct HermitianEigenSystem {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns
    Index source_dim = 0;

    Index dim() const noexcept { return source_dim; }

    Matrix reconstruct() const {
        return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
    }
};

inline RealVector singular_values(const Matrix& m) {
    if (m.size() == 0) return RealVector();
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues();
}

/// Largest singular value.
inline double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return singular_values(m)(0);
}

/// Largest singular value as the square root of the top eigenvalue of the smaller Gram matrix.
/// Direct (not iterative) and cheaper than a full SVD; used inside per-time loops.
inline double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const Matrix gram = m.cols() <= m.rows() ? Matrix(m.adjoint() * m) : Matrix(m * m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues()(gram.rows() - 1)));
}

inline HermitianEigenSystem herm_eig(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw Error(ErrorCode::InvalidArgument, "operator_core", "herm_eig", "matrix must be square and non-empty");
    }
    if (!is_hermitian(m)) {
        throw Error(ErrorCode::NonHermitianInput, "operator_core", "herm_eig",
                    "max|M - M^dag| = " + std::to_string(hermiticity_defect(m)));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NotConverged, "operator_core", "herm_eig", "eigensolver did not converge");
    }
    return HermitianEigenSystem{solver.eigenvalues(), solver.eigenvectors(), m.rows()};
}

inline HermitianEigenSystem herm_eig(const OperatorMatrix& m) {
    return herm_eig(m.matrix());
}

/// e^{-itM} from the eigensystem of M.
inline Matrix unitary_propagator(const HermitianEigenSystem& eig, double t) {
    const Vector phases = (eig.eigenvalues * Complex(0.0, -t)).array().exp().matrix();
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

// Spectral function f(M) for Hermitian M.
template <class F>
Matrix hermitian_function(const HermitianEigenSystem& eig, F&& f) {
    RealVector values(eig.eigenvalues.size());
    for (Index i = 0; i < values.size(); ++i) values(i) = f(eig.eigenvalues(i));
    return eig.eigenvectors * values.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
}

/// M^{-1/2} for Hermitian positive definite M. Inputs built from products such as
/// A^dag A are symmetrized first, so only their Hermitian part matters.
inline Matrix inv_sqrt_psd(const Matrix& m, double psd_floor = kPsdFloor) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw Error(ErrorCode::InvalidArgument, "operator_core", "inv_sqrt_psd", "matrix must be square and non-empty");
    }
    if (hermiticity_defect(m) > 1e-10 * std::max(1.0, max_abs_entry(m))) {
        throw Error(ErrorCode::NonHermitianInput, "operator_core", "inv_sqrt_psd", "input is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
    const RealVector& lambda = solver.eigenvalues();
    if (lambda.minCoeff() <= psd_floor) {
        throw Error(ErrorCode::NotPositiveDefinite, "operator_core", "inv_sqrt_psd",
                    "smallest eigenvalue " + std::to_string(lambda.minCoeff()) + " <= floor");
    }
    const RealVector scale = lambda.array().rsqrt().matrix();
    return solver.eigenvectors() * scale.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
}

inline Matrix sqrt_psd(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
    const RealVector scale = solver.eigenvalues().cwiseMax(0.0).array().sqrt().matrix();
    return solver.eigenvectors() * scale.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
}

inline double condition_number(const Matrix& m) {
    const RealVector s = singular_values(m);
    const double smin = s(s.size() - 1);
    return smin == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / smin;
}

/// Inverse through the SVD; refuses matrices with condition number above cond_max.
inline Matrix invert(const Matrix& m, double cond_max = kCondMax) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw Error(ErrorCode::InvalidArgument, "operator_core", "invert", "matrix must be square and non-empty");
    }
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (!(smin > 0.0) || s(0) / smin > cond_max) {
        throw Error(ErrorCode::SingularMatrix, "operator_core", "invert",
                    "condition number exceeds " + std::to_string(cond_max));
    }
    const RealVector inv_s = s.cwiseInverse();
    return svd.matrixV() * inv_s.cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
}

inline Matrix commutator(const Matrix& a, const Matrix& b) {
    return a * b - b * a;
}

} // namespace leakage
