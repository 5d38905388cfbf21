// serialization.hpp: JSON encodings of matrices, partitions, solutions and reports, plus the
// leakage CSV. Doubles are written in shortest round-trip form; non-finite values become null.

#pragma once

#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>

#include "leakage/bloch_solver.hpp"
#include "leakage/bounds.hpp"
#include "leakage/dynamics.hpp"
#include "leakage/invariants.hpp"
#include "leakage/schrieffer_wolff.hpp"
#include "leakage/spectral_partition.hpp"

namespace leakage {

using Json = nlohmann::ordered_json;

inline std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

inline Json number(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

inline Json number(const std::optional<double>& value) { return value ? number(*value) : Json(nullptr); }

inline Json matrix_to_json(const Matrix& m) {
    Json entries = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) entries.push_back(Json::array({number(m(i, j).real()), number(m(i, j).imag())}));
    }
    return Json{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

inline Matrix matrix_from_json(const Json& j) {
    const auto fail = [](const std::string& msg) {
        return Error(ErrorCode::ConfigInvalid, "serialization", "matrix_from_json", msg);
    };
    if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) throw fail("expected {\"dim\", \"entries\"}");
    if (!j["dim"].is_number_integer() || j["dim"].get<long>() < 1) throw fail("dim must be a positive integer");
    const Index n = j["dim"].get<Index>();
    const Json& entries = j["entries"];
    if (!entries.is_array() || static_cast<Index>(entries.size()) != n * n) {
        throw fail("entries must hold dim^2 = " + std::to_string(n * n) + " pairs");
    }
    Matrix m(n, n);
    for (Index k = 0; k < n * n; ++k) {
        const Json& e = entries[static_cast<std::size_t>(k)];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw fail("entry " + std::to_string(k) + " is not [re, im]");
        }
        m(k / n, k % n) = Complex(e[0].get<double>(), e[1].get<double>());
    }
    return m;
}

inline Json partition_to_json(const SpectralPartition& part) {
    Json groups = Json::array();
    for (const auto& g : part.groups) groups.push_back(g);
    Json intervals = Json::array();
    for (const auto& iv : part.component_intervals) intervals.push_back(Json::array({number(iv.lo), number(iv.hi)}));
    return Json{{"groups", std::move(groups)}, {"gap", number(part.gap)}, {"intervals", std::move(intervals)}};
}

/// Groups (and optionally a declared gap) applied to the eigensystem of H0.
inline SpectralPartition partition_from_json(const Json& j, const HermitianEigenSystem& eig) {
    if (!j.is_object() || !j.contains("groups") || !j["groups"].is_array()) {
        throw Error(ErrorCode::ConfigInvalid, "serialization", "partition_from_json", "expected a \"groups\" array");
    }
    std::vector<IndexGroup> groups;
    try {
        for (const auto& g : j["groups"]) groups.push_back(g.get<IndexGroup>());
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::ConfigInvalid, "serialization", "partition_from_json", ex.what());
    }
    std::optional<double> gap;
    if (j.contains("gap") && !j["gap"].is_null()) gap = j["gap"].get<double>();
    return partition_from_groups(eig, std::move(groups), gap);
}

inline Json bound_report_to_json(const bounds::BoundReport& b) {
    return Json{{"x", number(b.x)},
                {"v_norm", number(b.v_norm)},
                {"gamma", number(b.gamma)},
                {"eta", number(b.eta)},
                {"delta", number(b.delta)},
                {"epsilon", number(b.epsilon)},
                {"d_sw_bound", number(b.d_sw_bound)},
                {"leakage_linear", number(b.leakage_linear)},
                {"gamma_threshold_bloch", number(b.gamma_threshold_bloch)},
                {"gamma_threshold_sw", number(b.gamma_threshold_sw)}};
}

inline Json bloch_to_json(const BlochSolution& sol, bool include_matrices = true) {
    Json j{{"order", sol.order},
           {"tail_bound", number(sol.tail_bound)},
           {"delta_bound", number(sol.delta_bound)},
           {"term_norms", Json::array()}};
    for (double v : sol.term_norms) j["term_norms"].push_back(number(v));
    if (include_matrices) {
        j["omega"] = matrix_to_json(sol.omega);
        j["h_bloch"] = matrix_to_json(sol.h_bloch);
        j["omega_terms"] = Json::array();
        for (const auto& t : sol.omega_terms) j["omega_terms"].push_back(matrix_to_json(t));
    }
    return j;
}

inline Json sw_to_json(const SWSolution& sw, bool include_matrices = true) {
    Json j{{"w_identity_distance", number(sw.w_identity_distance)},
           {"h_sw_hermiticity_defect", number(sw.h_sw_hermiticity_defect)},
           {"projection_shifts", Json::array()}};
    for (double v : sw.projection_shifts) j["projection_shifts"].push_back(number(v));
    if (include_matrices) {
        j["w"] = matrix_to_json(sw.w);
        j["h_sw"] = matrix_to_json(sw.h_sw);
        j["perturbed_projections"] = Json::array();
        for (const auto& p : sw.perturbed_projections) j["perturbed_projections"].push_back(matrix_to_json(p));
    }
    return j;
}

inline Json leakage_report_to_json(const LeakageReport& r) {
    Json j{{"max_leakage", number(r.max_leakage)},
           {"bloch_order", r.bloch_order ? Json(*r.bloch_order) : Json(nullptr)},
           {"bounds", bound_report_to_json(r.bounds)},
           {"times", Json::array()},
           {"per_block_leakage", Json::array()},
           {"d_bloch_series", Json::array()},
           {"d_sw_series", Json::array()},
           {"violations", Json::array()}};
    for (double t : r.times) j["times"].push_back(number(t));
    for (const auto& row : r.per_block_leakage) {
        Json arr = Json::array();
        for (double v : row) arr.push_back(number(v));
        j["per_block_leakage"].push_back(std::move(arr));
    }
    for (double v : r.d_bloch_series) j["d_bloch_series"].push_back(number(v));
    for (double v : r.d_sw_series) j["d_sw_series"].push_back(number(v));
    for (const auto& v : r.violations) {
        j["violations"].push_back(
            Json{{"kind", v.kind}, {"k", v.k}, {"t", number(v.t)}, {"value", number(v.value)}, {"bound", number(v.bound)}});
    }
    return j;
}

/// Columns t,k,leakage,d_bloch,d_sw; one row per (t, k), distances left empty when not computed.
inline std::string leakage_report_csv(const LeakageReport& r) {
    std::string out = "t,k,leakage,d_bloch,d_sw\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        for (std::size_t k = 0; k < r.per_block_leakage.size(); ++k) {
            out += format_double(r.times[i]);
            out += ',';
            out += std::to_string(k);
            out += ',';
            out += format_double(r.per_block_leakage[k][i]);
            out += ',';
            if (i < r.d_bloch_series.size()) out += format_double(r.d_bloch_series[i]);
            out += ',';
            if (i < r.d_sw_series.size()) out += format_double(r.d_sw_series[i]);
            out += '\n';
        }
    }
    return out;
}

inline Json invariant_report_to_json(const InvariantReport& r) {
    Json j{{"passed", r.passed()}, {"instances", r.instances}, {"failures", r.failures()}, {"checks", Json::array()},
           {"errors", r.errors}};
    for (const auto& c : r.checks) {
        j["checks"].push_back(Json{{"name", c.name},
                                   {"passed", c.failures == 0},
                                   {"evaluated", c.evaluated},
                                   {"failures", c.failures},
                                   {"min_slack", number(c.min_slack)},
                                   {"worst_value", number(c.worst_value)},
                                   {"worst_limit", number(c.worst_limit)}});
    }
    return j;
}

inline Json scaling_fit_to_json(const ScalingFit& fit) {
    Json j{{"slope", number(fit.slope)}, {"intercept", number(fit.intercept)}, {"points", Json::array()}};
    for (std::size_t i = 0; i < fit.parameters.size(); ++i) {
        j["points"].push_back(Json{{"parameter", number(fit.parameters[i])}, {"max_leakage", number(fit.max_leakage[i])}});
    }
    return j;
}

inline Json truncation_study_to_json(const TruncationStudy& s) {
    Json j{{"cutoffs", s.cutoffs}, {"leakage", Json::array()}, {"differences", Json::array()}, {"monotone", s.monotone}};
    for (double v : s.leakage) j["leakage"].push_back(number(v));
    for (double v : s.differences) j["differences"].push_back(number(v));
    return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::ConfigInvalid, "serialization", "write_text", "cannot write " + path.string());
    }
    out << text;
    if (!out) throw Error(ErrorCode::ConfigInvalid, "serialization", "write_text", "write failed for " + path.string());
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

inline Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "serialization", "read_json", "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::ConfigInvalid, "serialization", "read_json", path.string() + ": " + ex.what());
    }
}

} // namespace leakage
