// harmonic_chain.hpp: Open chain of harmonic oscillators on the single-excitation ladder basis
// |k, i> (k quanta on site i), truncated at a Fock cutoff, with a band-coupling ladder perturbation.

#pragma once

#include <vector>

#include "leakage/error.hpp"
#include "leakage/operator_core.hpp"
#include "leakage/spectral_partition.hpp"

namespace leakage::models {

struct HarmonicChainSpec {
    int n_sites = 4;
    double omega = 10.0;
    double g = 1.0;
    int fock_cutoff = 12;  // levels k = 0..fock_cutoff
    double v0 = 0.05;
};

struct HarmonicChainModel {
    Matrix h0;
    Matrix v;
    std::vector<Interval> band_intervals;  // one per Fock level, disjoint when omega > 4g
    double v_norm = 0.0;                   // actual ||V||, below v0 at finite cutoff
};

inline Index harmonic_index(const HarmonicChainSpec& spec, int level, int site) {
    return static_cast<Index>(level) * spec.n_sites + site;
}

/// H0 = omega (k + 1/2) on every |k, i> with hopping -g between neighbouring sites of one level;
/// V = (v0 / 2) (|k, i><k+1, i| + h.c.).
inline HarmonicChainModel build_harmonic_chain(const HarmonicChainSpec& spec) {
    if (spec.n_sites < 2 || spec.fock_cutoff < 2) {
        throw Error(ErrorCode::InvalidArgument, "models", "build_harmonic_chain", "need n_sites >= 2 and fock_cutoff >= 2");
    }
    if (!(spec.omega > 0.0) || !(spec.g >= 0.0) || !(spec.v0 >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "models", "build_harmonic_chain", "need omega > 0, g >= 0, v0 >= 0");
    }
    const int levels = spec.fock_cutoff + 1;
    const Index n = static_cast<Index>(levels) * spec.n_sites;
    HarmonicChainModel out{Matrix::Zero(n, n), Matrix::Zero(n, n), {}, 0.0};
    for (int k = 0; k < levels; ++k) {
        for (int i = 0; i < spec.n_sites; ++i) {
            const Index a = harmonic_index(spec, k, i);
            out.h0(a, a) = spec.omega * (k + 0.5);
            if (i + 1 < spec.n_sites) {
                const Index b = harmonic_index(spec, k, i + 1);
                out.h0(a, b) = -spec.g;
                out.h0(b, a) = -spec.g;
            }
            if (k + 1 < levels) {
                const Index up = harmonic_index(spec, k + 1, i);
                out.v(a, up) = spec.v0 / 2.0;
                out.v(up, a) = spec.v0 / 2.0;
            }
        }
        const double center = spec.omega * (k + 0.5);
        const double half_width = spec.omega / 4.0 + spec.g;
        out.band_intervals.push_back({center - half_width, center + half_width});
    }
    out.v_norm = operator_norm(out.v);
    return out;
}

} // namespace leakage::models
