// spectral_partition.hpp: Coarse-grained spectral decomposition of H0: groups of eigenvalues,
// their projections, the gap between groups, and spectrum truncation.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leakage/operator_core.hpp"

namespace leakage {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

using IndexGroup = std::vector<Index>;

/// Partition of the eigenvalue indices of H0 into at least two groups with
/// pairwise disjoint eigenvalue ranges.
struct SpectralPartition {
    HermitianEigenSystem eig;
    std::vector<IndexGroup> groups;
    std::vector<Matrix> projections;
    double gap = 0.0;
    std::vector<Interval> component_intervals;  // [min, max] eigenvalue of each group
    std::vector<int> group_of;                  // eigenvalue index -> group

    Index dim() const noexcept { return eig.dim(); }
    std::size_t size() const noexcept { return groups.size(); }
};

namespace detail {

inline std::vector<Interval> group_ranges(const RealVector& e, const std::vector<IndexGroup>& groups) {
    std::vector<Interval> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Index i : g) {
            lo = std::min(lo, e(i));
            hi = std::max(hi, e(i));
        }
        out.push_back({lo, hi});
    }
    return out;
}

// Smallest |E_a - E_b| over indices in different groups. The closest cross-group pair is always
// adjacent in sorted order.
inline double cross_group_gap(const RealVector& e, const std::vector<int>& group_of) {
    std::vector<Index> order(static_cast<std::size_t>(e.size()));
    for (Index i = 0; i < e.size(); ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return e(a) < e(b); });
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < order.size(); ++i) {
        const Index a = order[i - 1];
        const Index b = order[i];
        if (group_of[static_cast<std::size_t>(a)] != group_of[static_cast<std::size_t>(b)]) {
            gap = std::min(gap, e(b) - e(a));
        }
    }
    return gap;
}

inline Matrix group_projection(const HermitianEigenSystem& eig, const IndexGroup& g) {
    const Matrix u = eig.eigenvectors(Eigen::all, g);
    return u * u.adjoint();
}

} // namespace detail

/// Build a partition from explicit groups. The gap is computed from the eigenvalues unless
/// declared_gap is given, in which case it is taken as stated (partition files carry it).
inline SpectralPartition partition_from_groups(HermitianEigenSystem eig, std::vector<IndexGroup> groups,
                                               std::optional<double> declared_gap = std::nullopt) {
    const Index n = eig.dim();
    if (groups.size() < 2) {
        throw Error(ErrorCode::NoGapFound, "spectral_partition", "partition_from_groups",
                    "a partition needs at least two groups");
    }
    std::vector<int> group_of(static_cast<std::size_t>(n), -1);
    for (std::size_t k = 0; k < groups.size(); ++k) {
        if (groups[k].empty()) {
            throw Error(ErrorCode::InvalidArgument, "spectral_partition", "partition_from_groups", "empty group");
        }
        std::sort(groups[k].begin(), groups[k].end());
        for (Index i : groups[k]) {
            if (i < 0 || i >= n) {
                throw Error(ErrorCode::IndexOutOfRange, "spectral_partition", "partition_from_groups",
                            "eigenvalue index " + std::to_string(i) + " out of range");
            }
            auto& slot = group_of[static_cast<std::size_t>(i)];
            if (slot != -1) {
                throw Error(ErrorCode::InvalidArgument, "spectral_partition", "partition_from_groups",
                            "eigenvalue index " + std::to_string(i) + " assigned twice");
            }
            slot = static_cast<int>(k);
        }
    }
    for (Index i = 0; i < n; ++i) {
        if (group_of[static_cast<std::size_t>(i)] == -1) {
            throw Error(ErrorCode::UncoveredEigenvalue, "spectral_partition", "partition_from_groups",
                        "eigenvalue index " + std::to_string(i) + " not assigned");
        }
    }

    SpectralPartition part;
    part.component_intervals = detail::group_ranges(eig.eigenvalues, groups);
    for (std::size_t k = 0; k < groups.size(); ++k) {
        for (std::size_t l = k + 1; l < groups.size(); ++l) {
            const auto& a = part.component_intervals[k];
            const auto& b = part.component_intervals[l];
            if (a.lo <= b.hi && b.lo <= a.hi) {
                throw Error(ErrorCode::OverlappingIntervals, "spectral_partition", "partition_from_groups",
                            "eigenvalue ranges of groups " + std::to_string(k) + " and " + std::to_string(l) +
                                " overlap");
            }
        }
    }
    const double measured = detail::cross_group_gap(eig.eigenvalues, group_of);
    part.gap = declared_gap.value_or(measured);
    if (!(part.gap > 0.0)) {
        throw Error(ErrorCode::NoGapFound, "spectral_partition", "partition_from_groups", "gap is not positive");
    }
    part.projections.reserve(groups.size());
    for (const auto& g : groups) part.projections.push_back(detail::group_projection(eig, g));
    part.group_of = std::move(group_of);
    part.groups = std::move(groups);
    part.eig = std::move(eig);
    return part;
}

/// Split the sorted spectrum wherever two neighbouring eigenvalues differ by more than
/// split_threshold. Degenerate eigenvalues always land in the same group.
inline SpectralPartition partition_by_threshold(const HermitianEigenSystem& eig, double split_threshold) {
    if (!(split_threshold > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "spectral_partition", "partition_by_threshold",
                    "split_threshold must be positive");
    }
    const RealVector& e = eig.eigenvalues;
    std::vector<IndexGroup> groups(1);
    groups.back().push_back(0);
    for (Index i = 1; i < e.size(); ++i) {
        if (e(i) - e(i - 1) > split_threshold) groups.emplace_back();
        groups.back().push_back(i);
    }
    if (groups.size() < 2) {
        throw Error(ErrorCode::NoGapFound, "spectral_partition", "partition_by_threshold",
                    "no adjacent eigenvalue difference exceeds " + std::to_string(split_threshold));
    }
    return partition_from_groups(eig, std::move(groups));
}

/// Assign every eigenvalue to the (unique) user interval containing it.
inline SpectralPartition partition_by_intervals(const HermitianEigenSystem& eig, std::span<const Interval> intervals) {
    for (std::size_t a = 0; a < intervals.size(); ++a) {
        if (intervals[a].lo > intervals[a].hi) {
            throw Error(ErrorCode::InvalidArgument, "spectral_partition", "partition_by_intervals",
                        "interval with lo > hi");
        }
        for (std::size_t b = a + 1; b < intervals.size(); ++b) {
            if (intervals[a].lo <= intervals[b].hi && intervals[b].lo <= intervals[a].hi) {
                throw Error(ErrorCode::OverlappingIntervals, "spectral_partition", "partition_by_intervals",
                            "intervals " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
            }
        }
    }
    std::vector<IndexGroup> by_interval(intervals.size());
    for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
        const double x = eig.eigenvalues(i);
        auto it = std::find_if(intervals.begin(), intervals.end(), [x](const Interval& iv) { return iv.contains(x); });
        if (it == intervals.end()) {
            throw Error(ErrorCode::UncoveredEigenvalue, "spectral_partition", "partition_by_intervals",
                        "eigenvalue " + std::to_string(x) + " lies in no interval");
        }
        by_interval[static_cast<std::size_t>(it - intervals.begin())].push_back(i);
    }
    std::vector<IndexGroup> groups;
    for (auto& g : by_interval) {
        if (!g.empty()) groups.push_back(std::move(g));
    }
    return partition_from_groups(eig, std::move(groups));
}

inline Matrix projection(const SpectralPartition& part, std::size_t k) {
    if (k >= part.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "spectral_partition", "projection",
                    "group " + std::to_string(k) + " of " + std::to_string(part.size()));
    }
    return part.projections[k];
}

inline Matrix complement(const SpectralPartition& part, std::size_t k) {
    if (k >= part.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "spectral_partition", "complement",
                    "group " + std::to_string(k) + " of " + std::to_string(part.size()));
    }
    return identity(part.dim()) - part.projections[k];
}

/// H0 restricted to the window, with every eigenvalue outside it replaced by the anchor energy.
inline Matrix truncate_spectrum(const HermitianEigenSystem& eig, Interval window, double anchor) {
    const RealVector& e = eig.eigenvalues;
    bool any_inside = false;
    bool anchor_found = false;
    const double tol = 1e-12 * std::max(1.0, e.cwiseAbs().maxCoeff());
    for (Index i = 0; i < e.size(); ++i) {
        if (window.contains(e(i))) {
            any_inside = true;
            if (std::abs(e(i) - anchor) <= tol) anchor_found = true;
        }
    }
    if (!any_inside) {
        throw Error(ErrorCode::EmptyWindow, "spectral_partition", "truncate_spectrum", "window holds no eigenvalue");
    }
    if (!anchor_found) {
        throw Error(ErrorCode::AnchorOutsideWindow, "spectral_partition", "truncate_spectrum",
                    "anchor " + std::to_string(anchor) + " is not an eigenvalue inside the window");
    }
    return hermitian_function(eig, [&](double x) { return window.contains(x) ? x : anchor; });
}

} // namespace leakage
