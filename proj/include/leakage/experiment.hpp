// experiment.hpp: Experiment configuration (JSON) and the run / verify / sweep / model pipelines
// behind the command-line tool. Every pipeline writes summary.json, including on failure.
//
// Exit codes: 0 ok, 1 other error, 2 configuration, 3 convergence or threshold, 4 bound violation.

#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "leakage/bloch_solver.hpp"
#include "leakage/bounds.hpp"
#include "leakage/dynamics.hpp"
#include "leakage/invariants.hpp"
#include "leakage/models.hpp"
#include "leakage/schrieffer_wolff.hpp"
#include "leakage/serialization.hpp"

namespace leakage {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitViolation = 4;

inline int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigInvalid:
        case ErrorCode::InvalidArgument:
            return kExitConfig;
        case ErrorCode::GammaBelowThreshold:
        case ErrorCode::GammaBelowSWThreshold:
        case ErrorCode::NotConverged:
            return kExitConvergence;
        default:
            return kExitError;
    }
}

struct OutputSpec {
    std::string kind;    // leakage | bounds | bloch | sw | partition | invariants | sweep
    std::string path;    // relative to the output directory
    std::string format;  // json | csv (csv only for leakage)
};

struct PartitionSpec {
    std::optional<double> threshold;
    std::vector<Interval> intervals;
    std::optional<std::vector<IndexGroup>> groups;
    std::optional<double> gap;  // declared gap for explicit groups
};

struct ModelConfig {
    std::string kind;  // chain | harmonic | transmon | custom
    models::ChainSpec chain;
    models::HarmonicChainSpec harmonic;
    models::TransmonSpec transmon;
    Matrix h0;
    Matrix v;
};

struct SweepSpec {
    std::vector<double> gammas;
    std::vector<double> v0s;
    std::vector<int> cutoffs;
    double t_probe = 50.0;
    std::size_t group = 0;
};

struct ExperimentConfig {
    ModelConfig model;
    double gamma = 1.0;
    PartitionSpec partition;
    double t_max = kDefaultTMax;
    std::size_t n_points = kDefaultTPoints;
    double series_tol = kDefaultSeriesTol;
    double residual_tol = 1e-9;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> stages{"bloch", "sw", "dynamics"};
    bool distances = true;
    bool invariants = true;
    std::vector<OutputSpec> outputs;
    RandomSuiteOptions suite;
    SweepSpec sweep;

    bool has_stage(const std::string& s) const { return std::find(stages.begin(), stages.end(), s) != stages.end(); }
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& msg) {
    throw Error(ErrorCode::ConfigInvalid, "cli_reporting", "parse_config", msg);
}

inline void allow_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) config_error(where + " must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) config_error("unknown key \"" + item.key() + "\" in " + where);
    }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        config_error(where + "." + key + " has the wrong type");
    }
}

inline double positive(double v, const std::string& what) {
    if (!(v > 0.0) || !std::isfinite(v)) config_error(what + " must be positive and finite");
    return v;
}

inline Matrix load_matrix(const Json& j, const std::filesystem::path& base, const std::string& what) {
    if (j.is_string()) {
        const std::filesystem::path p = base / j.get<std::string>();
        return matrix_from_json(read_json(p));
    }
    if (j.is_object()) return matrix_from_json(j);
    config_error(what + " must be a matrix object or a path to one");
}

inline ModelConfig parse_model(const Json& j, const std::filesystem::path& base) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) config_error("model.kind is required");
    ModelConfig m;
    m.kind = j["kind"].get<std::string>();
    if (m.kind == "chain") {
        allow_keys(j, "model", {"kind", "n_cells", "g", "disorder_strength"});
        m.chain.n_cells = get_or(j, "n_cells", m.chain.n_cells, "model");
        if (m.chain.n_cells < 2) config_error("model.n_cells must be at least 2");
        const auto g = get_or(j, "g", std::vector<double>{m.chain.g1, m.chain.g2, m.chain.g3}, "model");
        if (g.size() != 3) config_error("model.g must hold three couplings");
        m.chain.g1 = g[0];
        m.chain.g2 = g[1];
        m.chain.g3 = g[2];
        m.chain.disorder_strength = get_or(j, "disorder_strength", m.chain.disorder_strength, "model");
        if (!(m.chain.disorder_strength >= 0.0)) config_error("model.disorder_strength must be nonnegative");
    } else if (m.kind == "harmonic") {
        allow_keys(j, "model", {"kind", "n_sites", "omega", "g", "fock_cutoff", "v0"});
        m.harmonic.n_sites = get_or(j, "n_sites", m.harmonic.n_sites, "model");
        m.harmonic.omega = positive(get_or(j, "omega", m.harmonic.omega, "model"), "model.omega");
        m.harmonic.g = get_or(j, "g", m.harmonic.g, "model");
        m.harmonic.fock_cutoff = get_or(j, "fock_cutoff", m.harmonic.fock_cutoff, "model");
        m.harmonic.v0 = get_or(j, "v0", m.harmonic.v0, "model");
        if (m.harmonic.n_sites < 2 || m.harmonic.fock_cutoff < 2) config_error("model needs n_sites >= 2, fock_cutoff >= 2");
        if (!(m.harmonic.g >= 0.0) || !(m.harmonic.v0 >= 0.0)) config_error("model.g and model.v0 must be nonnegative");
    } else if (m.kind == "transmon") {
        allow_keys(j, "model", {"kind", "ej_over_ec", "transparency_d"});
        m.transmon.ej_over_ec = positive(get_or(j, "ej_over_ec", m.transmon.ej_over_ec, "model"), "model.ej_over_ec");
        m.transmon.transparency_d = get_or(j, "transparency_d", m.transmon.transparency_d, "model");
        if (!(m.transmon.transparency_d > 0.0 && m.transmon.transparency_d < 1.0)) {
            config_error("model.transparency_d must lie in (0, 1)");
        }
    } else if (m.kind == "custom") {
        allow_keys(j, "model", {"kind", "h0", "v"});
        if (!j.contains("h0") || !j.contains("v")) config_error("custom model needs h0 and v");
        m.h0 = load_matrix(j["h0"], base, "model.h0");
        m.v = load_matrix(j["v"], base, "model.v");
        if (m.h0.rows() != m.v.rows()) config_error("model.h0 and model.v differ in dimension");
    } else {
        config_error("model.kind must be chain, harmonic, transmon or custom");
    }
    return m;
}

inline PartitionSpec parse_partition(const Json& j) {
    allow_keys(j, "partition", {"threshold", "intervals", "groups", "gap"});
    PartitionSpec p;
    const int modes = int(j.contains("threshold")) + int(j.contains("intervals")) + int(j.contains("groups"));
    if (modes != 1) config_error("partition needs exactly one of threshold, intervals, groups");
    if (j.contains("threshold")) p.threshold = positive(get_or(j, "threshold", 0.0, "partition"), "partition.threshold");
    if (j.contains("intervals")) {
        const auto raw = get_or(j, "intervals", std::vector<std::vector<double>>{}, "partition");
        for (const auto& iv : raw) {
            if (iv.size() != 2 || !(iv[0] <= iv[1])) config_error("partition.intervals entries must be [lo, hi]");
            p.intervals.push_back({iv[0], iv[1]});
        }
    }
    if (j.contains("groups")) p.groups = get_or(j, "groups", std::vector<IndexGroup>{}, "partition");
    if (j.contains("gap")) {
        if (!p.groups) config_error("partition.gap is only meaningful with explicit groups");
        p.gap = positive(get_or(j, "gap", 0.0, "partition"), "partition.gap");
    }
    return p;
}

} // namespace detail

inline ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base_dir = ".") {
    using namespace detail;
    allow_keys(j, "config", {"model", "gamma", "partition", "t_grid", "tolerances", "seed", "stages", "distances",
                             "invariants", "outputs", "verify", "sweep"});
    ExperimentConfig c;
    if (!j.contains("model")) config_error("model is required");
    c.model = parse_model(j["model"], base_dir);
    c.gamma = positive(get_or(j, "gamma", c.gamma, "config"), "gamma");
    if (j.contains("partition")) c.partition = parse_partition(j["partition"]);
    if (j.contains("t_grid")) {
        allow_keys(j["t_grid"], "t_grid", {"t_max", "n_points"});
        c.t_max = positive(get_or(j["t_grid"], "t_max", c.t_max, "t_grid"), "t_grid.t_max");
        c.n_points = get_or(j["t_grid"], "n_points", c.n_points, "t_grid");
        if (c.n_points < 2) config_error("t_grid.n_points must be at least 2");
    }
    if (j.contains("tolerances")) {
        allow_keys(j["tolerances"], "tolerances", {"series_tol", "residual_tol"});
        c.series_tol = positive(get_or(j["tolerances"], "series_tol", c.series_tol, "tolerances"), "series_tol");
        c.residual_tol = positive(get_or(j["tolerances"], "residual_tol", c.residual_tol, "tolerances"), "residual_tol");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0) {
            config_error("seed must be a nonnegative integer");
        }
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("stages")) {
        c.stages = get_or(j, "stages", c.stages, "config");
        for (const auto& s : c.stages) {
            if (s != "bloch" && s != "sw" && s != "dynamics") config_error("unknown stage \"" + s + "\"");
        }
    }
    c.distances = get_or(j, "distances", c.distances, "config");
    c.invariants = get_or(j, "invariants", c.invariants, "config");
    if (j.contains("outputs")) {
        if (!j["outputs"].is_array()) config_error("outputs must be an array");
        for (const auto& o : j["outputs"]) {
            allow_keys(o, "outputs[]", {"kind", "path", "format"});
            OutputSpec spec{get_or<std::string>(o, "kind", "", "outputs[]"), get_or<std::string>(o, "path", "", "outputs[]"),
                            get_or<std::string>(o, "format", "json", "outputs[]")};
            static const std::set<std::string> kinds{"leakage", "bounds", "bloch", "sw", "partition", "invariants", "sweep"};
            if (!kinds.count(spec.kind)) config_error("unknown output kind \"" + spec.kind + "\"");
            if (spec.path.empty()) config_error("outputs[].path is required");
            if (spec.format != "json" && !(spec.format == "csv" && spec.kind == "leakage")) {
                config_error("format " + spec.format + " is not available for " + spec.kind);
            }
            c.outputs.push_back(spec);
        }
    }
    if (j.contains("verify")) {
        const Json& v = j["verify"];
        allow_keys(v, "verify", {"instances", "seed", "min_dim", "max_dim", "min_groups", "max_groups", "max_x",
                                 "zero_perturbation"});
        c.suite.instances = get_or(v, "instances", c.suite.instances, "verify");
        c.suite.seed = get_or(v, "seed", c.seed.value_or(0), "verify");
        c.suite.min_dim = get_or(v, "min_dim", c.suite.min_dim, "verify");
        c.suite.max_dim = get_or(v, "max_dim", c.suite.max_dim, "verify");
        c.suite.min_groups = get_or(v, "min_groups", c.suite.min_groups, "verify");
        c.suite.max_groups = get_or(v, "max_groups", c.suite.max_groups, "verify");
        c.suite.max_x = positive(get_or(v, "max_x", c.suite.max_x, "verify"), "verify.max_x");
        c.suite.zero_perturbation = get_or(v, "zero_perturbation", c.suite.zero_perturbation, "verify");
        if (c.suite.min_dim < 2 || c.suite.max_dim < c.suite.min_dim || c.suite.min_groups < 2 ||
            c.suite.max_groups < c.suite.min_groups || c.suite.min_groups > c.suite.min_dim) {
            config_error("verify dimension or group ranges are inconsistent");
        }
    } else {
        c.suite.seed = c.seed.value_or(0);
    }
    if (j.contains("sweep")) {
        const Json& s = j["sweep"];
        allow_keys(s, "sweep", {"gammas", "v0s", "cutoffs", "t_probe", "group"});
        c.sweep.gammas = get_or(s, "gammas", c.sweep.gammas, "sweep");
        c.sweep.v0s = get_or(s, "v0s", c.sweep.v0s, "sweep");
        c.sweep.cutoffs = get_or(s, "cutoffs", c.sweep.cutoffs, "sweep");
        c.sweep.t_probe = get_or(s, "t_probe", c.sweep.t_probe, "sweep");
        c.sweep.group = get_or(s, "group", c.sweep.group, "sweep");
    }
    if (c.model.kind == "chain" && c.model.chain.disorder_strength > 0.0 && !c.seed) {
        config_error("seed is required for a chain with disorder");
    }
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_json(path), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

inline std::vector<double> time_grid(const ExperimentConfig& c) { return uniform_grid(c.t_max, c.n_points); }

struct BuiltModel {
    Matrix h0;
    Matrix v;
    std::vector<Interval> default_intervals;  // from the model, used when no partition is configured
};

inline BuiltModel build_model(const ExperimentConfig& c) {
    const auto& m = c.model;
    if (m.kind == "chain") {
        models::ChainSpec spec = m.chain;
        spec.seed = c.seed.value_or(0);
        auto mm = models::build_chain(spec);
        return {std::move(mm.h0), std::move(mm.v), {}};
    }
    if (m.kind == "harmonic") {
        auto hm = models::build_harmonic_chain(m.harmonic);
        return {std::move(hm.h0), std::move(hm.v), std::move(hm.band_intervals)};
    }
    if (m.kind == "custom") return {m.h0, m.v, {}};
    throw Error(ErrorCode::ConfigInvalid, "cli_reporting", "build_model", "the transmon model has no matrices");
}

inline SpectralPartition build_partition(const ExperimentConfig& c, const HermitianEigenSystem& eig,
                                         const std::vector<Interval>& default_intervals) {
    const auto& p = c.partition;
    if (p.threshold) return partition_by_threshold(eig, *p.threshold);
    if (!p.intervals.empty()) return partition_by_intervals(eig, p.intervals);
    if (p.groups) return partition_from_groups(eig, *p.groups, p.gap);
    if (!default_intervals.empty()) return partition_by_intervals(eig, default_intervals);
    if (c.model.kind == "chain") return partition_by_threshold(eig, 0.5);
    throw Error(ErrorCode::ConfigInvalid, "cli_reporting", "build_partition", "a custom model needs a partition");
}

inline ProblemInstance build_instance(const ExperimentConfig& c) {
    BuiltModel m = build_model(c);
    if (!is_hermitian(m.h0) || !is_hermitian(m.v)) {
        throw Error(ErrorCode::NonHermitianInput, "cli_reporting", "build_instance", "H0 and V must be Hermitian");
    }
    auto eig = herm_eig(m.h0);
    auto part = build_partition(c, eig, m.default_intervals);
    return make_instance(OperatorMatrix::hermitian(m.h0), OperatorMatrix::hermitian(m.v), c.gamma, std::move(part));
}

struct RunResult {
    int exit_code = kExitOk;
    Json summary;
};

namespace detail {

inline Json error_json(const Error& e) {
    return Json{{"code", std::string(to_string(e.code()))},
                {"module", e.module()},
                {"operation", e.operation()},
                {"message", e.what()}};
}

inline Json summary_header(const ExperimentConfig& c, const char* command) {
    return Json{{"command", command},
                {"model", c.model.kind},
                {"gamma", number(c.gamma)},
                {"seed", c.seed ? Json(*c.seed) : Json(nullptr)},
                {"status", "ok"}};
}

// Runs body; errors become an "error" entry and the mapped exit code. summary.json is written last.
template <class Body>
RunResult guarded(const std::filesystem::path& out_dir, Json summary, Body&& body) {
    RunResult result;
    try {
        result.exit_code = body(summary);
    } catch (const Error& e) {
        summary["error"] = error_json(e);
        result.exit_code = exit_code_for(e.code());
    } catch (const std::exception& e) {
        summary["error"] = Json{{"code", "Internal"}, {"module", "cli_reporting"}, {"operation", "run"}, {"message", e.what()}};
        result.exit_code = kExitError;
    }
    if (result.exit_code != kExitOk) summary["status"] = "failed";
    summary["exit_code"] = result.exit_code;
    write_json(out_dir / "summary.json", summary);
    result.summary = std::move(summary);
    return result;
}

inline void write_output(const std::filesystem::path& out_dir, const OutputSpec& o, const Json& payload,
                         const std::string* csv = nullptr) {
    if (o.format == "csv" && csv) {
        write_text(out_dir / o.path, *csv);
    } else {
        write_json(out_dir / o.path, payload);
    }
}

inline double bloch_residual(const ProblemInstance& inst, const BlochSolution& bloch) {
    const Matrix h = inst.hamiltonian();
    double worst = 0.0;
    for (const auto& ok : bloch.omega_blocks) worst = std::max(worst, operator_norm(h * ok - ok * h * ok));
    return worst / std::max(1.0, operator_norm(h));
}

} // namespace detail

inline void run_transmon(const ExperimentConfig& c, Json& summary) {
    const auto& t = c.model.transmon;
    const double eta = models::transmon_bandgap(1, t.ej_over_ec);
    const double v_norm = models::transmon_perturbation_norm(t.ej_over_ec, t.transparency_d);
    summary["eta_1"] = number(eta);
    summary["v_norm"] = number(v_norm);
    summary["bounds"] = bound_report_to_json(bounds::bound_report(v_norm, 1.0, eta));
    summary["transmon_leakage_bound"] = number(bounds::transmon_leakage_bound(t.ej_over_ec, t.transparency_d));
    summary["max_leakage"] = nullptr;
}

/// Build the instance, solve the requested stages, simulate, check, and write every output.
inline RunResult run_experiment(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
    return detail::guarded(out_dir, detail::summary_header(c, "run"), [&](Json& summary) -> int {
        if (c.model.kind == "transmon") {
            run_transmon(c, summary);
            for (const auto& o : c.outputs) {
                if (o.kind == "bounds") detail::write_output(out_dir, o, summary["bounds"]);
            }
            return kExitOk;
        }
        const ProblemInstance inst = build_instance(c);
        const auto bound = bounds::bound_report(inst.v_norm, inst.gamma, inst.eta());
        summary["dim"] = inst.dim();
        summary["groups"] = inst.partition.size();
        summary["bounds"] = bound_report_to_json(bound);
        int code = kExitOk;

        std::optional<BlochSolution> bloch;
        std::optional<SWSolution> sw;
        if (c.has_stage("bloch") || c.has_stage("sw")) {
            bloch = solve_bloch_series(inst, c.series_tol);
            const double residual = detail::bloch_residual(inst, *bloch);
            summary["bloch"] = Json{{"order", bloch->order},
                                    {"delta", number(bloch->delta_bound)},
                                    {"tail_bound", number(bloch->tail_bound)},
                                    {"omega_identity_distance", number(operator_norm(bloch->omega - identity(inst.dim())))},
                                    {"relative_residual", number(residual)}};
            if (residual > c.residual_tol) {
                throw Error(ErrorCode::NotConverged, "bloch_solver", "solve_bloch_series",
                            "Bloch equation residual " + format_double(residual) + " exceeds residual_tol");
            }
        }
        if (c.has_stage("sw")) {
            sw = sw_transform(inst, *bloch);
            summary["sw"] = Json{{"w_identity_distance", number(sw->w_identity_distance)},
                                 {"h_sw_hermiticity_defect", number(sw->h_sw_hermiticity_defect)}};
        }

        std::optional<LeakageReport> report;
        if (c.has_stage("dynamics")) {
            ExperimentOptions opt;
            opt.distances = c.distances;
            opt.series_tol = c.series_tol;
            opt.bloch = bloch ? &*bloch : nullptr;
            opt.sw = sw ? &*sw : nullptr;
            const auto grid = time_grid(c);
            report = run_leakage_experiment(inst, grid, opt);
            summary["max_leakage"] = number(report->max_leakage);
            auto max_of = [](const std::vector<double>& v) {
                return v.empty() ? Json(nullptr) : number(*std::max_element(v.begin(), v.end()));
            };
            summary["max_d_bloch"] = max_of(report->d_bloch_series);
            summary["max_d_sw"] = max_of(report->d_sw_series);
            summary["violations"] = report->violations.size();
            if (!report->violations.empty()) code = kExitViolation;
        } else {
            summary["max_leakage"] = nullptr;
        }

        if (c.invariants) {
            CheckOptions opt;
            opt.series_tol = c.series_tol;
            opt.leakage_points = c.n_points;
            opt.distance_points = std::min<std::size_t>(c.n_points, 201);
            InvariantReport inv;
            check_instance(inst, opt, inv);
            summary["invariants"] = Json{{"passed", inv.passed()}, {"failures", inv.failures()}, {"checks", inv.checks.size()}};
            if (!inv.passed()) code = kExitViolation;
            for (const auto& o : c.outputs) {
                if (o.kind == "invariants") detail::write_output(out_dir, o, invariant_report_to_json(inv));
            }
        }

        for (const auto& o : c.outputs) {
            if (o.kind == "bounds") detail::write_output(out_dir, o, summary["bounds"]);
            if (o.kind == "partition") detail::write_output(out_dir, o, partition_to_json(inst.partition));
            if (o.kind == "bloch" && bloch) detail::write_output(out_dir, o, bloch_to_json(*bloch));
            if (o.kind == "sw" && sw) detail::write_output(out_dir, o, sw_to_json(*sw));
            if (o.kind == "leakage" && report) {
                const std::string csv = leakage_report_csv(*report);
                detail::write_output(out_dir, o, leakage_report_to_json(*report), &csv);
            }
        }
        return code;
    });
}

/// Invariant checks on the configured instance plus the seeded random suite.
inline RunResult verify_experiment(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
    return detail::guarded(out_dir, detail::summary_header(c, "verify"), [&](Json& summary) -> int {
        CheckOptions opt;
        opt.series_tol = c.series_tol;
        InvariantReport report;
        if (c.model.kind != "transmon") {
            CheckOptions own = opt;
            own.leakage_points = c.n_points;
            own.distance_points = std::min<std::size_t>(c.n_points, 201);
            check_instance(build_instance(c), own, report);
        }
        report.merge(run_invariant_suite(c.suite, opt));
        const Json j = invariant_report_to_json(report);
        write_json(out_dir / "invariants.json", j);
        for (const auto& o : c.outputs) {
            if (o.kind == "invariants") detail::write_output(out_dir, o, j);
        }
        summary["invariants"] = Json{{"passed", report.passed()},
                                     {"instances", report.instances},
                                     {"failures", report.failures()},
                                     {"checks", report.checks.size()}};
        return report.passed() ? kExitOk : kExitViolation;
    });
}

/// Gamma sweep, v0 sweep, or truncation study, depending on what the sweep section holds.
inline RunResult sweep_experiment(const ExperimentConfig& c, const std::filesystem::path& out_dir) {
    return detail::guarded(out_dir, detail::summary_header(c, "sweep"), [&](Json& summary) -> int {
        const auto grid = time_grid(c);
        const auto& s = c.sweep;
        const int modes = int(!s.gammas.empty()) + int(!s.v0s.empty()) + int(!s.cutoffs.empty());
        if (modes != 1) {
            throw Error(ErrorCode::ConfigInvalid, "cli_reporting", "sweep", "sweep needs exactly one of gammas, v0s, cutoffs");
        }
        Json result;
        if (!s.gammas.empty()) {
            const auto fit = gamma_scaling_sweep(build_instance(c), s.gammas, grid);
            result = scaling_fit_to_json(fit);
            result["kind"] = "gamma";
            summary["slope"] = number(fit.slope);
        } else if (!s.v0s.empty()) {
            if (c.model.kind != "harmonic" && c.model.kind != "chain") {
                throw Error(ErrorCode::ConfigInvalid, "cli_reporting", "sweep", "v0 sweeps need a chain or harmonic model");
            }
            const auto build = [&](double v0) {
                ExperimentConfig cc = c;
                if (cc.model.kind == "harmonic") cc.model.harmonic.v0 = v0;
                else cc.model.chain.disorder_strength = v0;
                return build_instance(cc);
            };
            const auto fit = perturbation_scaling_sweep(build, s.v0s, grid);
            result = scaling_fit_to_json(fit);
            result["kind"] = "v0";
            summary["slope"] = number(fit.slope);
        } else {
            if (c.model.kind != "harmonic") {
                throw Error(ErrorCode::ConfigInvalid, "cli_reporting", "sweep", "truncation studies need the harmonic model");
            }
            const auto build = [&](int cutoff) {
                ExperimentConfig cc = c;
                cc.model.harmonic.fock_cutoff = cutoff;
                return build_instance(cc);
            };
            const auto study = truncation_convergence_study(build, s.cutoffs, s.t_probe, s.group);
            result = truncation_study_to_json(study);
            result["kind"] = "truncation";
            summary["final_difference"] = study.differences.empty() ? Json(nullptr) : number(study.differences.back());
            summary["monotone"] = study.monotone;
        }
        write_json(out_dir / "sweep.json", result);
        for (const auto& o : c.outputs) {
            if (o.kind == "sweep") detail::write_output(out_dir, o, result);
        }
        return kExitOk;
    });
}

/// Writes the requested matrices (h0, v, h, partition) as JSON files named after them.
inline RunResult emit_model(const ExperimentConfig& c, const std::vector<std::string>& what,
                            const std::filesystem::path& out_dir) {
    return detail::guarded(out_dir, detail::summary_header(c, "model"), [&](Json& summary) -> int {
        const ProblemInstance inst = build_instance(c);
        Json written = Json::array();
        for (const auto& name : what) {
            Json payload;
            if (name == "h0") payload = matrix_to_json(inst.h0.matrix());
            else if (name == "v") payload = matrix_to_json(inst.v.matrix());
            else if (name == "h") payload = matrix_to_json(inst.hamiltonian());
            else if (name == "partition") payload = partition_to_json(inst.partition);
            else throw Error(ErrorCode::ConfigInvalid, "cli_reporting", "model", "cannot emit \"" + name + "\"");
            write_json(out_dir / (name + ".json"), payload);
            written.push_back(name + ".json");
        }
        summary["dim"] = inst.dim();
        summary["v_norm"] = number(inst.v_norm);
        summary["eta"] = number(inst.eta());
        summary["written"] = written;
        return kExitOk;
    });
}

} // namespace leakage
