// Extended-precision (50 digit) reference formulas, written from the closed forms directly
// rather than the rearranged forms used by the library.

#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using Float = boost::multiprecision::cpp_bin_float_50;

inline Float pi() { return boost::math::constants::pi<Float>(); }

// (1 - sqrt(1 - 4 pi x))^2 / (4 pi x)
inline Float delta(Float x) {
    const Float a = 4 * pi() * x;
    const Float s = sqrt(1 - a);
    return (1 - s) * (1 - s) / a;
}

inline Float epsilon(Float x) { return 1 / sqrt(1 - 4 * pi() * x) - 1; }

inline Float sw_bound(Float x) { return 2 * (1 / sqrt(sqrt(1 - 4 * pi() * x) - 2 * pi() * x) - 1); }

inline Float catalan(unsigned j) {
    Float c = 1;
    for (unsigned n = 0; n < j; ++n) c = c * 2 * (2 * n + 1) / (n + 2);
    return c;
}

// sum_{j = from}^{to} (pi x)^j C_j by direct summation
inline Float catalan_sum(Float x, unsigned from, unsigned to) {
    Float sum = 0;
    for (unsigned j = from; j <= to; ++j) sum += pow(pi() * x, j) * catalan(j);
    return sum;
}

inline Float transmon_bandgap(int k, Float ej_over_ec) {
    const Float r = ej_over_ec / 2;
    const Float kk = k;
    const Float c1 = Float(3) / 32 + Float(3) / 32 * (2 * kk + 1) + (3 * kk * kk + 3 * kk + 1) / 16;
    const Float c2 = Float(3) / 256 + (2 * kk + 1) / 16 + Float(5) / 128 * (3 * kk * kk + 3 * kk + 1) +
                     Float(5) / 256 * (4 * kk * kk * kk + 5 * kk * kk + 4 * kk + 1);
    return 4 * sqrt(r) - 1 - kk - c1 / sqrt(r) - c2 / r;
}

inline Float transmon_v(Float ej_over_ec, Float d) { return ej_over_ec * d / (8 * (1 - d / 2)); }

// (1 - pi D / (2 - D) * (E_J/E_C) / eta_1)^{-1/2} - 1
inline Float transmon_bound(Float ej_over_ec, Float d) {
    return 1 / sqrt(1 - pi() * d / (2 - d) * ej_over_ec / transmon_bandgap(1, ej_over_ec)) - 1;
}

// Two-level Rabi: H = diag(0, gamma) + v sigma_x, population transfer amplitude peaks at
// v / sqrt(v^2 + gamma^2 / 4).
inline Float rabi_max_leakage(Float v, Float gamma) { return v / sqrt(v * v + gamma * gamma / 4); }

} // namespace oracle
