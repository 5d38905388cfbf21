// bounds.hpp: Closed-form scalar bounds: delta(x), epsilon(x), Catalan numbers and series tails,
// the Schrieffer-Wolff distance bound, the eternal leakage bound and its linear form, and the
// model-specific bounds built from them. Here x = ||V|| / (gamma * eta).

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "leakage/error.hpp"
#include "leakage/models/transmon.hpp"

namespace leakage::bounds {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2Minus1 = std::numbers::sqrt2 - 1.0;

namespace detail {

inline void require_domain(double x, const char* op) {
    if (!(x >= 0.0) || !(4.0 * kPi * x < 1.0)) {
        throw Error(ErrorCode::OutOfDomain, "bounds", op, "need 0 <= x < 1/(4 pi), got x = " + std::to_string(x));
    }
}

} // namespace detail

/// delta(x) = (1 - sqrt(1 - 4 pi x))^2 / (4 pi x), evaluated as 4 pi x / (1 + sqrt(1 - 4 pi x))^2
/// which has no cancellation and gives delta(0) = 0.
inline double delta_of(double x) {
    detail::require_domain(x, "delta_of");
    const double a = 4.0 * kPi * x;
    const double s = std::sqrt(1.0 - a);
    return a / ((1.0 + s) * (1.0 + s));
}

/// epsilon(x) = 1 / sqrt(1 - 4 pi x) - 1.
inline double epsilon_of(double x) {
    detail::require_domain(x, "epsilon_of");
    const double a = 4.0 * kPi * x;
    const double s = std::sqrt(1.0 - a);
    return a / (s * (1.0 + s));
}

inline BigInt catalan(unsigned j) {
    std::vector<BigInt> c(j + 1);
    c[0] = 1;
    for (unsigned n = 0; n < j; ++n) {
        BigInt sum = 0;
        for (unsigned i = 0; i <= n; ++i) sum += c[i] * c[n - i];
        c[n + 1] = sum;
    }
    return c[j];
}

inline double catalan_double(unsigned j) {
    long double c = 1.0L;
    for (unsigned n = 0; n < j; ++n) c = c * 2.0L * (2.0L * n + 1.0L) / (n + 2.0L);
    return static_cast<double>(c);
}

/// sum_{j > J} (pi x)^j C_j, as the generating function G(pi x) = 2 / (1 + sqrt(1 - 4 pi x))
/// minus the partial sum through order J. Evaluated in long double.
inline double catalan_tail(double x, int order) {
    detail::require_domain(x, "catalan_tail");
    if (order < 0) {
        throw Error(ErrorCode::InvalidArgument, "bounds", "catalan_tail", "order must be nonnegative");
    }
    const long double y = kPi * static_cast<long double>(x);
    const long double g = 2.0L / (1.0L + std::sqrt(1.0L - 4.0L * y));
    long double term = 1.0L;
    long double partial = 1.0L;
    for (int n = 0; n < order; ++n) {
        term *= y * 2.0L * (2.0L * n + 1.0L) / (n + 2.0L);
        partial += term;
    }
    const long double tail = g - partial;
    return tail > 0.0L ? static_cast<double>(tail) : 0.0;
}

inline bool sw_domain(double x) {
    return x >= 0.0 && kPi * x < kSqrt2Minus1 / 2.0;
}

/// Bound on ||e^{-itH} - e^{-itH_SW}||: 2 (1 / sqrt(sqrt(1 - 4 pi x) - 2 pi x) - 1).
/// Requires delta(x) < sqrt(2) - 1.
inline double sw_distance_bound(double x) {
    if (!sw_domain(x)) {
        throw Error(ErrorCode::OutOfDomain, "bounds", "sw_distance_bound",
                    "need delta(x) < sqrt(2) - 1, got x = " + std::to_string(x));
    }
    const double s = std::sqrt(1.0 - 4.0 * kPi * x);
    const double u = s - 2.0 * kPi * x;
    const double one_minus_u = 4.0 * kPi * x / (1.0 + s) + 2.0 * kPi * x;
    const double root = std::sqrt(u);
    return 2.0 * one_minus_u / (root * (1.0 + root));
}

/// Theorem-2 style bound on ||W - 1||: (1 + delta) / sqrt(1 - 2 delta - delta^2) - 1.
inline double sw_identity_distance_bound(double delta) {
    return (1.0 + delta) / std::sqrt(1.0 - 2.0 * delta - delta * delta) - 1.0;
}

inline double gamma_threshold_bloch(double v_norm, double eta) { return 4.0 * kPi * v_norm / eta; }

inline double gamma_threshold_sw(double v_norm, double eta) { return 2.0 * kPi / kSqrt2Minus1 * v_norm / eta; }

struct LeakageBound {
    std::optional<double> sharp;  // epsilon(x), absent when 4 pi x >= 1
    double linear = 0.0;          // 9 pi x, always defined
};

inline LeakageBound leakage_bound(double v_norm, double gamma, double eta) {
    if (!(eta > 0.0) || !(gamma > 0.0) || !(v_norm >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bounds", "leakage_bound", "need eta > 0, gamma > 0, ||V|| >= 0");
    }
    const double x = v_norm / (gamma * eta);
    LeakageBound out;
    out.linear = 9.0 * kPi * x;
    if (4.0 * kPi * x < 1.0) out.sharp = epsilon_of(x);
    return out;
}

/// Harmonic-chain band leakage bound (1 - 4 pi v0 / (omega - 4g))^{-1/2} - 1.
inline double harmonic_chain_bound(double v0, double omega, double g) {
    if (!(omega > 4.0 * g) || !(v0 >= 0.0) || !(4.0 * kPi * v0 < omega - 4.0 * g)) {
        throw Error(ErrorCode::OutOfDomain, "bounds", "harmonic_chain_bound",
                    "need omega > 4g and 4 pi v0 < omega - 4g");
    }
    return epsilon_of(v0 / (omega - 4.0 * g));
}

/// Transmon leakage bound with eta = eta_1 from the bandgap expansion and
/// ||V|| <= E_J D / (8 (1 - D/2)), all in units of E_C.
inline double transmon_leakage_bound(double ej_over_ec, double transparency_d) {
    if (!(transparency_d > 0.0 && transparency_d < 1.0)) {
        throw Error(ErrorCode::OutOfDomain, "bounds", "transmon_leakage_bound", "need 0 < D < 1");
    }
    const double eta = models::transmon_bandgap(1, ej_over_ec);
    const double a = kPi * transparency_d / (2.0 - transparency_d) * ej_over_ec / eta;
    if (!(a < 1.0)) {
        throw Error(ErrorCode::OutOfDomain, "bounds", "transmon_leakage_bound", "bound argument outside domain");
    }
    const double s = std::sqrt(1.0 - a);
    return a / (s * (1.0 + s));
}

struct BoundReport {
    double x = 0.0;
    std::optional<double> v_norm;
    std::optional<double> gamma;
    std::optional<double> eta;
    std::optional<double> delta;
    std::optional<double> epsilon;
    std::optional<double> d_sw_bound;
    double leakage_linear = 0.0;
    std::optional<double> gamma_threshold_bloch;
    std::optional<double> gamma_threshold_sw;
};

inline BoundReport bound_report_from_x(double x) {
    if (!(x >= 0.0)) {
        throw Error(ErrorCode::OutOfDomain, "bounds", "bound_report", "x must be nonnegative");
    }
    BoundReport r;
    r.x = x;
    r.leakage_linear = 9.0 * kPi * x;
    if (4.0 * kPi * x < 1.0) {
        r.delta = delta_of(x);
        r.epsilon = epsilon_of(x);
        if (*r.delta < kSqrt2Minus1) r.d_sw_bound = sw_distance_bound(x);
    }
    return r;
}

inline BoundReport bound_report(double v_norm, double gamma, double eta) {
    if (!(eta > 0.0) || !(gamma > 0.0) || !(v_norm >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bounds", "bound_report", "need eta > 0, gamma > 0, ||V|| >= 0");
    }
    BoundReport r = bound_report_from_x(v_norm / (gamma * eta));
    r.v_norm = v_norm;
    r.gamma = gamma;
    r.eta = eta;
    r.gamma_threshold_bloch = gamma_threshold_bloch(v_norm, eta);
    r.gamma_threshold_sw = gamma_threshold_sw(v_norm, eta);
    return r;
}

} // namespace leakage::bounds
