#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "leakage/leakage.hpp"
#include "oracles/dense.hpp"

using namespace leakage;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InvalidArgument;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json rabi_config(std::size_t points = 201) {
    Json j = Json::parse(R"({
      "model": {
        "kind": "custom",
        "h0": {"dim": 2, "entries": [[0, 0], [0, 0], [0, 0], [1, 0]]},
        "v": {"dim": 2, "entries": [[0, 0], [0.05, 0], [0.05, 0], [0, 0]]}
      },
      "gamma": 1.0,
      "partition": {"threshold": 0.5},
      "outputs": [
        {"kind": "leakage", "path": "leakage.csv", "format": "csv"},
        {"kind": "leakage", "path": "leakage.json"},
        {"kind": "bounds", "path": "bounds.json"}
      ]
    })");
    j["t_grid"] = Json{{"t_max", 20.0}, {"n_points", points}};
    return j;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const char* cli = std::getenv("LEAKAGE_CLI");
        if (!cli) GTEST_SKIP() << "LEAKAGE_CLI not set";
        cli_ = cli;
        const char* configs = std::getenv("LEAKAGE_CONFIGS");
        if (configs) configs_ = configs;
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("leakage_cli_" + std::to_string(::getpid()) + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    void TearDown() override {
        if (!dir_.empty()) fs::remove_all(dir_);
    }

    fs::path write_config(const std::string& name, const Json& j) const {
        const fs::path p = dir_ / name;
        write_json(p, j);
        return p;
    }

    // Runs the CLI with stdout and stderr captured to files in the test directory.
    int run(const std::string& args, const std::string& env = "") const {
        const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + cli_ + "\" " + args + " > \"" +
                                (dir_ / "stdout.txt").string() + "\" 2> \"" + (dir_ / "stderr.txt").string() + "\"";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    Json summary(const fs::path& out) const { return read_json(out / "summary.json"); }

    std::string cli_;
    fs::path configs_;
    fs::path dir_;
};

} // namespace

TEST(ParseConfig, RejectsInvalidInput) {
    Json unknown = rabi_config();
    unknown["colour"] = "blue";
    EXPECT_EQ(code_of([&] { parse_config(unknown); }), ErrorCode::ConfigInvalid);
    EXPECT_EQ(code_of([] { parse_config(Json::object()); }), ErrorCode::ConfigInvalid);
    Json stage = rabi_config();
    stage["stages"] = {"bloch", "fourier"};
    EXPECT_EQ(code_of([&] { parse_config(stage); }), ErrorCode::ConfigInvalid);
    Json csv = rabi_config();
    csv["outputs"] = Json::array({{{"kind", "bounds"}, {"path", "b.csv"}, {"format", "csv"}}});
    EXPECT_EQ(code_of([&] { parse_config(csv); }), ErrorCode::ConfigInvalid);
    Json gamma = rabi_config();
    gamma["gamma"] = -1.0;
    EXPECT_EQ(code_of([&] { parse_config(gamma); }), ErrorCode::ConfigInvalid);
    Json chain = Json::parse(R"({"model": {"kind": "chain", "n_cells": 10, "disorder_strength": 0.01}})");
    EXPECT_EQ(code_of([&] { parse_config(chain); }), ErrorCode::ConfigInvalid);
    chain["seed"] = 1;
    EXPECT_NO_THROW(parse_config(chain));
    Json two_modes = rabi_config();
    two_modes["partition"] = Json{{"threshold", 0.5}, {"groups", {{0}, {1}}}};
    EXPECT_EQ(code_of([&] { parse_config(two_modes); }), ErrorCode::ConfigInvalid);
}

TEST(ParseConfig, Defaults) {
    const auto c = parse_config(Json::parse(R"({"model": {"kind": "harmonic"}})"));
    EXPECT_EQ(c.gamma, 1.0);
    EXPECT_EQ(c.t_max, kDefaultTMax);
    EXPECT_EQ(c.n_points, kDefaultTPoints);
    EXPECT_TRUE(c.has_stage("bloch") && c.has_stage("sw") && c.has_stage("dynamics"));
    const auto inst = build_instance(c);
    EXPECT_EQ(inst.partition.size(), 13u);
}

TEST(Serialization, MatrixRoundTrip) {
    RandomStream rng(5, "test.matrix_json");
    Matrix m(4, 4);
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
    const Json j = Json::parse(matrix_to_json(m).dump());
    EXPECT_EQ((matrix_from_json(j) - m).norm(), 0.0);
    EXPECT_EQ(code_of([] { matrix_from_json(Json::parse(R"({"dim": 2, "entries": [[1, 0]]})")); }), ErrorCode::ConfigInvalid);
    EXPECT_EQ(code_of([] { matrix_from_json(Json::parse(R"({"dim": 0, "entries": []})")); }), ErrorCode::ConfigInvalid);
}

TEST(Serialization, PartitionRoundTrip) {
    const auto inst = oracle::rabi_instance();
    const Json j = partition_to_json(inst.partition);
    const auto back = partition_from_json(j, inst.partition.eig);
    EXPECT_EQ(back.groups, inst.partition.groups);
    EXPECT_EQ(back.gap, inst.partition.gap);
}

TEST(Serialization, ShortestRoundTripDoubles) {
    for (double v : {0.1, 1.0 / 3.0, 2.9e-3, 1e-300, -7.25}) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_TRUE(number(std::numeric_limits<double>::infinity()).is_null());
}

TEST(Serialization, ExitCodes) {
    EXPECT_EQ(exit_code_for(ErrorCode::ConfigInvalid), 2);
    EXPECT_EQ(exit_code_for(ErrorCode::GammaBelowThreshold), 3);
    EXPECT_EQ(exit_code_for(ErrorCode::NotConverged), 3);
    EXPECT_EQ(exit_code_for(ErrorCode::ZeroGap), 1);
}

TEST_F(CliTest, RunWritesOutputsAndSummary) {
    const auto cfg = write_config("rabi.json", rabi_config());
    const fs::path out = dir_ / "out";
    ASSERT_EQ(run("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 0) << slurp(dir_ / "stderr.txt");
    const Json s = summary(out);
    EXPECT_EQ(s["status"], "ok");
    EXPECT_EQ(s["exit_code"], 0);
    EXPECT_EQ(s["violations"], 0);
    EXPECT_TRUE(s["invariants"]["passed"].get<bool>());
    const std::string csv = slurp(out / "leakage.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,k,leakage,d_bloch,d_sw");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 201 * 2);
    const Json leak = read_json(out / "leakage.json");
    EXPECT_LE(leak["max_leakage"].get<double>(), 0.0996);
    const Json b = read_json(out / "bounds.json");
    EXPECT_NEAR(b["epsilon"].get<double>(), bounds::epsilon_of(0.05), 1e-15);
}

TEST_F(CliTest, OutputsAreByteIdenticalAcrossRunsAndThreadCounts) {
    const auto cfg = write_config("rabi.json", rabi_config());
    const fs::path a = dir_ / "a", b = dir_ / "b";
    ASSERT_EQ(run("run --config \"" + cfg.string() + "\" --out \"" + a.string() + "\"", "LEAKAGE_THREADS=1"), 0);
    ASSERT_EQ(run("run --config \"" + cfg.string() + "\" --out \"" + b.string() + "\"", "LEAKAGE_THREADS=4"), 0);
    for (const char* f : {"summary.json", "leakage.csv", "leakage.json", "bounds.json"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
        EXPECT_FALSE(slurp(a / f).empty()) << f;
    }
}

TEST_F(CliTest, ConfigErrorsExitTwoWithSummary) {
    Json bad = rabi_config();
    bad["unexpected"] = 1;
    const auto cfg = write_config("bad.json", bad);
    const fs::path out = dir_ / "out";
    fs::create_directories(out);
    EXPECT_EQ(run("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 2);
    const Json s = summary(out);
    EXPECT_EQ(s["status"], "failed");
    EXPECT_EQ(s["error"]["code"], "ConfigInvalid");
    EXPECT_EQ(run("run"), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("bounds"), 2);
}

TEST_F(CliTest, BelowThresholdExitsThree) {
    if (configs_.empty()) GTEST_SKIP() << "LEAKAGE_CONFIGS not set";
    const fs::path out = dir_ / "out";
    EXPECT_EQ(run("run --config \"" + (configs_ / "chain_below_threshold.json").string() + "\" --out \"" + out.string() + "\""), 3);
    const Json s = summary(out);
    EXPECT_EQ(s["error"]["code"], "GammaBelowThreshold");
    EXPECT_EQ(s["error"]["module"], "bloch_solver");
}

TEST_F(CliTest, InvariantFailureExitsFour) {
    // the declared gap disagrees with the spectrum, which the partition check reports
    Json j = rabi_config();
    j["partition"] = Json{{"groups", {{0}, {1}}}, {"gap", 1.5}};
    const auto cfg = write_config("declared.json", j);
    const fs::path out = dir_ / "out";
    EXPECT_EQ(run("run --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 4);
    const Json s = summary(out);
    EXPECT_FALSE(s["invariants"]["passed"].get<bool>());
    EXPECT_EQ(s["status"], "failed");
}

TEST_F(CliTest, VerifyZeroPerturbationBatchPasses) {
    if (configs_.empty()) GTEST_SKIP() << "LEAKAGE_CONFIGS not set";
    const fs::path out = dir_ / "out";
    EXPECT_EQ(run("verify --config \"" + (configs_ / "verify_zero_v.json").string() + "\" --out \"" + out.string() + "\""), 0)
        << slurp(dir_ / "stderr.txt");
    const Json inv = read_json(out / "invariants.json");
    EXPECT_TRUE(inv["passed"].get<bool>());
    EXPECT_EQ(summary(out)["invariants"]["instances"], 11);
}

TEST_F(CliTest, VerifyCorruptedPartitionReportsZeroGap) {
    if (configs_.empty()) GTEST_SKIP() << "LEAKAGE_CONFIGS not set";
    const fs::path out = dir_ / "out";
    EXPECT_EQ(run("verify --config \"" + (configs_ / "corrupted_partition.json").string() + "\" --out \"" + out.string() + "\""), 1);
    EXPECT_EQ(summary(out)["error"]["code"], "ZeroGap");
}

TEST_F(CliTest, BoundsSubcommand) {
    EXPECT_EQ(run("bounds --x 0.0086956521739130436"), 0);
    const Json j = Json::parse(slurp(dir_ / "stdout.txt"));
    EXPECT_NEAR(j["epsilon"].get<double>(), 0.0596, 5e-4);
    EXPECT_EQ(run("bounds --ej-over-ec 90 --transparency 0.001"), 0);
    const Json t = Json::parse(slurp(dir_ / "stdout.txt"));
    EXPECT_NEAR(t["transmon_leakage_bound"].get<double>(), 2.9e-3, 2e-4);
    EXPECT_EQ(run("bounds --v-norm 0.01 --gamma 0 --eta 1.15"), 2);
}

TEST_F(CliTest, ModelSubcommandEmitsMatrices) {
    const auto cfg = write_config("rabi.json", rabi_config());
    const fs::path out = dir_ / "out";
    ASSERT_EQ(run("model --config \"" + cfg.string() + "\" --emit h0,v,partition --out \"" + out.string() + "\""), 0);
    EXPECT_LE(operator_norm(matrix_from_json(read_json(out / "v.json")) - 0.05 * oracle::pauli_x()), 0.0);
    EXPECT_TRUE(fs::exists(out / "h0.json"));
    EXPECT_EQ(read_json(out / "partition.json")["groups"].size(), 2u);
    EXPECT_EQ(run("model --config \"" + cfg.string() + "\" --emit spectrum --out \"" + out.string() + "\""), 2);
}

TEST_F(CliTest, GammaSweepFromCommandLine) {
    const auto cfg = write_config("rabi.json", rabi_config(20001));
    const fs::path out = dir_ / "out";
    ASSERT_EQ(run("sweep --config \"" + cfg.string() + "\" --gamma-list 2,8,32,128 --out \"" + out.string() + "\""), 0)
        << slurp(dir_ / "stderr.txt");
    const Json j = read_json(out / "sweep.json");
    EXPECT_EQ(j["kind"], "gamma");
    EXPECT_NEAR(j["slope"].get<double>(), -1.0, 0.05);
    EXPECT_EQ(run("sweep --config \"" + cfg.string() + "\" --out \"" + out.string() + "\""), 2);
}
