// transmon.hpp: Transmon bandgap expansion and the finite-transparency perturbation bound.
// Energies are in units of E_C.

#pragma once

#include <cmath>
#include <string>

#include "leakage/error.hpp"

namespace leakage::models {

struct TransmonSpec {
    double ej_over_ec = 90.0;
    double transparency_d = 1e-3;
};

/// Asymptotic estimate of the k-th bandgap eta_k / E_C: the four leading terms in powers of
/// (E_J / 2E_C)^{-1/2}; the remainder is dropped.
inline double transmon_bandgap(int k, double ej_over_ec) {
    if (k < 0 || !(ej_over_ec > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "models", "transmon_bandgap", "need k >= 0 and E_J/E_C > 0");
    }
    const double kk = k;
    const double r = ej_over_ec / 2.0;
    const double s = std::sqrt(r);
    const double c1 = 3.0 / 32.0 + 3.0 / 32.0 * (2 * kk + 1) + (3 * kk * kk + 3 * kk + 1) / 16.0;
    const double c2 = 3.0 / 256.0 + (2 * kk + 1) / 16.0 + 5.0 / 128.0 * (3 * kk * kk + 3 * kk + 1) +
                      5.0 / 256.0 * (4 * kk * kk * kk + 5 * kk * kk + 4 * kk + 1);
    const double eta = 4.0 * s - 1.0 - kk - c1 / s - c2 / r;
    if (!(eta > 0.0)) {
        throw Error(ErrorCode::NonpositiveBandgap, "models", "transmon_bandgap",
                    "expansion gives eta_" + std::to_string(k) + " = " + std::to_string(eta));
    }
    return eta;
}

/// Upper bound on ||V|| / E_C from the finite barrier transparency: (E_J/E_C) D / (8 (1 - D/2)).
inline double transmon_perturbation_norm(double ej_over_ec, double transparency_d) {
    if (!(transparency_d > 0.0 && transparency_d < 1.0) || !(ej_over_ec > 0.0)) {
        throw Error(ErrorCode::OutOfDomain, "models", "transmon_perturbation_norm", "need 0 < D < 1 and E_J/E_C > 0");
    }
    return ej_over_ec * transparency_d / (8.0 * (1.0 - transparency_d / 2.0));
}

} // namespace leakage::models
