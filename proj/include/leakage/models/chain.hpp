// chain.hpp: Tight-binding ring of n unit cells with three sites each, plus seeded on-site disorder.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

#include "leakage/error.hpp"
#include "leakage/operator_core.hpp"
#include "leakage/random.hpp"

namespace leakage::models {

struct ChainSpec {
    int n_cells = 50;
    double g1 = 1.0;
    double g2 = 1.5;
    double g3 = 2.0;
    double disorder_strength = 0.01;  // target ||V||
    std::uint64_t seed = 0;
};

struct ModelMatrices {
    Matrix h0;
    Matrix v;
};

/// Sites 3j, 3j+1, 3j+2 of cell j are linked by g1, g2 and g3 links 3j+2 to 3j+3, wrapping
/// around the ring. V = diag(r_i) with r_i uniform on [-1, 1], rescaled so ||V|| equals the
/// requested disorder strength.
inline ModelMatrices build_chain(const ChainSpec& spec) {
    if (spec.n_cells < 2) {
        throw Error(ErrorCode::InvalidArgument, "models", "build_chain", "n_cells must be at least 2");
    }
    if (!std::isfinite(spec.g1) || !std::isfinite(spec.g2) || !std::isfinite(spec.g3) ||
        !(spec.disorder_strength >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "models", "build_chain", "couplings must be finite, disorder >= 0");
    }
    const Index n = 3 * static_cast<Index>(spec.n_cells);
    ModelMatrices out{Matrix::Zero(n, n), Matrix::Zero(n, n)};
    const std::array<double, 3> g{spec.g1, spec.g2, spec.g3};
    for (Index site = 0; site < n; ++site) {
        const Index next = (site + 1) % n;
        const double c = g[static_cast<std::size_t>(site % 3)];
        out.h0(site, next) += c;
        out.h0(next, site) += c;
    }
    if (spec.disorder_strength > 0.0) {
        RandomStream rng(spec.seed, "chain.disorder");
        RealVector r(n);
        for (Index i = 0; i < n; ++i) r(i) = rng.uniform(-1.0, 1.0);
        const double peak = r.cwiseAbs().maxCoeff();
        if (peak > 0.0) r *= spec.disorder_strength / peak;
        out.v.diagonal() = r.cast<Complex>();
    }
    return out;
}

/// Bloch Hamiltonian of one unit cell at quasi-momentum k.
inline Matrix chain_bloch_matrix(double k, double g1, double g2, double g3) {
    Matrix h = Matrix::Zero(3, 3);
    h(0, 1) = g1;
    h(1, 0) = g1;
    h(1, 2) = g2;
    h(2, 1) = g2;
    h(0, 2) = g3 * std::exp(Complex(0.0, -k));
    h(2, 0) = g3 * std::exp(Complex(0.0, k));
    return h;
}

/// Roots of E^3 - E (g1^2 + g2^2 + g3^2) - 2 g1 g2 g3 cos k = 0, ascending (trigonometric form).
inline std::array<double, 3> chain_dispersion(double k, double g1, double g2, double g3) {
    const double p = g1 * g1 + g2 * g2 + g3 * g3;
    const double q = 2.0 * g1 * g2 * g3 * std::cos(k);
    std::array<double, 3> roots{0.0, 0.0, 0.0};
    if (p == 0.0) return roots;
    const double m = 2.0 * std::sqrt(p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int i = 0; i < 3; ++i) roots[static_cast<std::size_t>(i)] = m * std::cos(theta - 2.0 * std::numbers::pi * i / 3.0);
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace leakage::models
