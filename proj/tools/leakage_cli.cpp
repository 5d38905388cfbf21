// leakage: command-line front end: run, verify, bounds, model, sweep.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "leakage/leakage.hpp"

namespace fs = std::filesystem;
using namespace leakage;

namespace {

// Loads the config, applying a command-line seed. Config errors are reported (and summarized when
// an output directory is known) with exit code 2.
std::optional<ExperimentConfig> load(const std::string& path, std::optional<std::uint64_t> seed, const fs::path& out,
                                     const char* command, int& exit_code) {
    try {
        Json j = read_json(path);
        if (seed) j["seed"] = *seed;
        const fs::path p(path);
        return parse_config(j, p.has_parent_path() ? p.parent_path() : fs::path("."));
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_code = exit_code_for(e.code());
        try {
            write_json(out / "summary.json", Json{{"command", command},
                                                  {"status", "failed"},
                                                  {"error", Json{{"code", std::string(to_string(e.code()))},
                                                                 {"module", e.module()},
                                                                 {"operation", e.operation()},
                                                                 {"message", e.what()}}},
                                                  {"exit_code", exit_code}});
        } catch (const Error&) {
            // output directory unusable; stderr already has the message
        }
        return std::nullopt;
    }
}

int report(const RunResult& r) {
    if (r.summary.contains("error")) std::cerr << "error: " << r.summary["error"]["message"].get<std::string>() << "\n";
    std::cout << r.summary.dump(2) << "\n";
    return r.exit_code;
}

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    for (char ch : text) {
        if (ch == ',') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else if (ch != ' ') {
            item += ch;
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Leakage bounds and effective Hamiltonians for H = gamma H0 + V"};
    app.require_subcommand(1);

    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Solve, simulate and check one configured experiment");
    run->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out, "Output directory");

    auto* verify = app.add_subcommand("verify", "Run the invariant suites");
    verify->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    verify->add_option("--seed", seed, "Override the config seed");
    verify->add_option("--out", out, "Output directory");

    std::optional<double> x, v_norm, gamma, eta, ej_over_ec, transparency;
    auto* bnd = app.add_subcommand("bounds", "Evaluate the scalar bounds");
    bnd->add_option("--x", x, "Bound argument ||V|| / (gamma eta)");
    bnd->add_option("--v-norm", v_norm, "||V||");
    bnd->add_option("--gamma", gamma, "gamma");
    bnd->add_option("--eta", eta, "Spectral gap of H0");
    bnd->add_option("--config", config, "Take ||V||, gamma and eta from a configured instance");
    bnd->add_option("--ej-over-ec", ej_over_ec, "Transmon E_J / E_C");
    bnd->add_option("--transparency", transparency, "Transmon barrier transparency D");

    std::string emit = "h0,v";
    auto* model = app.add_subcommand("model", "Write model matrices as JSON");
    model->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    model->add_option("--emit", emit, "Comma list of h0, v, h, partition");
    model->add_option("--seed", seed, "Override the config seed");
    model->add_option("--out", out, "Output directory");

    std::vector<double> gamma_list, v0_list;
    auto* sweep = app.add_subcommand("sweep", "Gamma or v0 scaling sweep, or truncation study");
    sweep->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--gamma-list", gamma_list, "Gamma values")->delimiter(',');
    sweep->add_option("--v0-list", v0_list, "Perturbation strengths")->delimiter(',');
    sweep->add_option("--seed", seed, "Override the config seed");
    sweep->add_option("--out", out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    int exit_code = kExitOk;
    const fs::path out_dir(out);

    if (*bnd) {
        try {
            Json j;
            if (x) {
                j = bound_report_to_json(bounds::bound_report_from_x(*x));
            } else if (v_norm && gamma && eta) {
                j = bound_report_to_json(bounds::bound_report(*v_norm, *gamma, *eta));
            } else if (!config.empty()) {
                const ExperimentConfig c = load_config(config);
                if (c.model.kind == "transmon") {
                    run_transmon(c, j);
                } else {
                    const ProblemInstance inst = build_instance(c);
                    j = bound_report_to_json(bounds::bound_report(inst.v_norm, inst.gamma, inst.eta()));
                }
            } else if (ej_over_ec && transparency) {
                j = Json{{"eta_1", models::transmon_bandgap(1, *ej_over_ec)},
                         {"v_norm", models::transmon_perturbation_norm(*ej_over_ec, *transparency)},
                         {"transmon_leakage_bound", bounds::transmon_leakage_bound(*ej_over_ec, *transparency)}};
            } else {
                std::cerr << "error: bounds needs --x, or --v-norm --gamma --eta, or --config, or "
                             "--ej-over-ec --transparency\n";
                return kExitConfig;
            }
            std::cout << j.dump(2) << "\n";
            return kExitOk;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return exit_code_for(e.code());
        }
    }

    const char* command = *run ? "run" : *verify ? "verify" : *model ? "model" : "sweep";
    auto cfg = load(config, seed, out_dir, command, exit_code);
    if (!cfg) return exit_code;

    if (*run) return report(run_experiment(*cfg, out_dir));
    if (*verify) return report(verify_experiment(*cfg, out_dir));
    if (*model) return report(emit_model(*cfg, split(emit), out_dir));
    if (!gamma_list.empty()) {
        cfg->sweep = {};
        cfg->sweep.gammas = gamma_list;
    } else if (!v0_list.empty()) {
        cfg->sweep = {};
        cfg->sweep.v0s = v0_list;
    }
    return report(sweep_experiment(*cfg, out_dir));
}
