#include <gtest/gtest.h>

#include "leakage/leakage.hpp"
#include "oracles/dense.hpp"
#include "oracles/extended.hpp"

using namespace leakage;

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

ProblemInstance seeded_instance(std::uint64_t seed, int dim, int groups) {
    RandomSuiteOptions opt;
    opt.min_dim = opt.max_dim = dim;
    opt.min_groups = opt.max_groups = groups;
    opt.seed = seed;
    return random_instance(opt, 0);
}

ProblemInstance harmonic_instance(int cutoff, double v0 = 0.05) {
    models::HarmonicChainSpec spec;
    spec.fock_cutoff = cutoff;
    spec.v0 = v0;
    const auto m = models::build_harmonic_chain(spec);
    auto part = partition_by_intervals(herm_eig(m.h0), m.band_intervals);
    return make_instance(OperatorMatrix::hermitian(m.h0), OperatorMatrix::hermitian(m.v), 1.0, std::move(part));
}

} // namespace

TEST(UniformGrid, Endpoints) {
    const auto t = uniform_grid(2.0, 5);
    ASSERT_EQ(t.size(), 5u);
    EXPECT_EQ(t.front(), 0.0);
    EXPECT_EQ(t.back(), 2.0);
    EXPECT_DOUBLE_EQ(t[1], 0.5);
}

TEST(Leakage, ZeroAtTimeZero) {
    const auto inst = seeded_instance(2, 10, 3);
    LeakageEvaluator leak(inst);
    for (double l : leak.leakage(0.0)) EXPECT_LE(l, 1e-13);
}

TEST(Leakage, ZeroWithoutPerturbation) {
    RandomSuiteOptions opt;
    opt.min_dim = opt.max_dim = 10;
    opt.zero_perturbation = true;
    const auto inst = random_instance(opt, 0);
    LeakageEvaluator leak(inst);
    for (double t : {0.0, 1.0, 37.5, 1000.0})
        for (double l : leak.leakage(t)) EXPECT_LE(l, 1e-12);
}

TEST(Leakage, RabiPeakMatchesClosedForm) {
    const auto inst = oracle::rabi_instance(0.05, 1.0);
    const auto grid = uniform_grid(20.0, 2001);
    const double expected = static_cast<double>(oracle::rabi_max_leakage(oracle::Float("0.05"), oracle::Float(1)));
    EXPECT_NEAR(max_leakage(inst, grid), expected, 1e-6);
    EXPECT_NEAR(expected, 0.099504, 1e-6);
    // the leakage of each level equals the transition amplitude at every time
    const double w = std::sqrt(1.0 + 4 * 0.05 * 0.05);
    for (double t : {0.3, 1.7, 5.0}) {
        const double amp = expected * std::abs(std::sin(w * t / 2.0));
        EXPECT_NEAR(leakage_at(inst, 0, t), amp, 1e-12);
        EXPECT_NEAR(leakage_at(inst, 1, t), amp, 1e-12);
    }
}

TEST(Leakage, MatchesPropagatorDefinition) {
    const auto inst = seeded_instance(5, 9, 3);
    const auto& part = inst.partition;
    const auto eig = herm_eig(inst.hamiltonian());
    for (double t : {0.5, 3.0, 40.0}) {
        const Matrix u = unitary_propagator(eig, t);
        for (std::size_t k = 0; k < part.size(); ++k) {
            const double direct = operator_norm(complement(part, k) * u * projection(part, k));
            EXPECT_NEAR(leakage_at(inst, k, t), direct, 1e-12);
        }
    }
}

TEST(Leakage, SeededInstancesRespectBounds) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto inst = seeded_instance(seed, 12, 3);
        const auto grid = uniform_grid(200.0, 401);
        const auto report = run_leakage_experiment(inst, grid);
        EXPECT_TRUE(report.violations.empty()) << "seed " << seed;
        ASSERT_TRUE(report.bounds.epsilon);
        ASSERT_TRUE(report.bounds.d_sw_bound);
        EXPECT_LE(report.max_leakage, *report.bounds.epsilon);
        ASSERT_EQ(report.d_bloch_series.size(), grid.size());
        ASSERT_EQ(report.d_sw_series.size(), grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            EXPECT_LE(report.d_bloch_series[i], *report.bounds.d_sw_bound);
            EXPECT_LE(report.d_sw_series[i], *report.bounds.d_sw_bound);
        }
    }
}

TEST(Distance, MatchesDirectPropagators) {
    const auto inst = seeded_instance(8, 8, 2);
    const auto bloch = solve_bloch_series(inst);
    const auto sw = sw_transform(inst, bloch);
    const auto eig_h = herm_eig(inst.hamiltonian());
    const auto eig_sw = herm_eig(sw.h_sw);
    for (double t : {0.7, 12.0}) {
        const Matrix u = unitary_propagator(eig_h, t);
        const Matrix u_bloch = oracle::expm(Complex(0.0, -t) * bloch.h_bloch);
        EXPECT_NEAR(evolution_distance(inst, bloch_generator(bloch), t), operator_norm(u - u_bloch), 1e-10);
        const Matrix u_sw = unitary_propagator(eig_sw, t);
        EXPECT_NEAR(evolution_distance(inst, sw_generator(sw), t), operator_norm(u - u_sw), 1e-10);
    }
}

TEST(Leakage, ChainSeedZeroInPublishedRange) {
    models::ChainSpec spec;
    const auto m = models::build_chain(spec);
    const auto inst = make_instance(m.h0, m.v, 1.0, 0.5);
    const double leak = max_leakage(inst, uniform_grid(kDefaultTMax, kDefaultTPoints));
    EXPECT_GE(leak, 0.003);
    EXPECT_LE(leak, 0.008);
    EXPECT_LE(leak, bounds::epsilon_of(inst.x()) + kViolationSlack);
}

TEST(Report, BelowBlochThresholdSkipsDistances) {
    const auto inst = oracle::rabi_instance(0.1, 1.0);
    const auto report = run_leakage_experiment(inst, uniform_grid(10.0, 101));
    EXPECT_FALSE(report.bounds.epsilon);
    EXPECT_TRUE(report.d_bloch_series.empty());
    EXPECT_TRUE(report.d_sw_series.empty());
    EXPECT_FALSE(report.bloch_order);
    EXPECT_TRUE(report.violations.empty());
}

TEST(Report, CsvLayout) {
    const auto inst = oracle::rabi_instance(0.05, 1.0);
    const auto report = run_leakage_experiment(inst, uniform_grid(1.0, 3));
    const std::string csv = leakage_report_csv(report);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,k,leakage,d_bloch,d_sw");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    }
    EXPECT_EQ(rows, 3u * 2u);
}

TEST(GammaSweep, RabiSlopeIsMinusOne) {
    const auto inst = oracle::rabi_instance(0.05, 1.0);
    const std::vector<double> gammas{2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
    const auto fit = gamma_scaling_sweep(inst, gammas, uniform_grid(20.0, 40001));
    EXPECT_NEAR(fit.slope, -1.0, 0.02);
    ASSERT_EQ(fit.max_leakage.size(), gammas.size());
    for (std::size_t i = 1; i < gammas.size(); ++i) EXPECT_LT(fit.max_leakage[i], fit.max_leakage[i - 1]);
}

TEST(GammaSweep, Errors) {
    const auto grid = uniform_grid(10.0, 101);
    RandomSuiteOptions opt;
    opt.min_dim = opt.max_dim = 6;
    opt.zero_perturbation = true;
    const auto zero = random_instance(opt, 0);
    const std::vector<double> many{1.0, 2.0, 4.0, 8.0, 16.0};
    EXPECT_EQ(code_of([&] { gamma_scaling_sweep(zero, many, grid); }), ErrorCode::DegenerateSweep);
    const auto rabi = oracle::rabi_instance(0.05, 1.0);
    const std::vector<double> few{1.0, 2.0};
    EXPECT_EQ(code_of([&] { gamma_scaling_sweep(rabi, few, grid); }), ErrorCode::DegenerateSweep);
    const std::vector<double> narrow{10.0, 11.0, 12.0, 13.0};
    EXPECT_EQ(code_of([&] { gamma_scaling_sweep(rabi, narrow, grid); }), ErrorCode::DegenerateSweep);
    const std::vector<double> low{0.1, 1.0, 10.0, 100.0};
    EXPECT_EQ(code_of([&] { gamma_scaling_sweep(rabi, low, grid); }), ErrorCode::GammaBelowThreshold);
}

TEST(PerturbationSweep, HarmonicSlopeAgainstCouplingRatio) {
    const std::vector<double> v0s{0.0005, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05};
    const auto fit = perturbation_scaling_sweep([](double v0) { return harmonic_instance(6, v0); }, v0s,
                                                uniform_grid(50.0, 501));
    EXPECT_NEAR(fit.slope, -1.0, 0.15);
    EXPECT_EQ(fit.parameters, v0s);
}

TEST(Truncation, HarmonicConverges) {
    const std::vector<int> cutoffs{8, 12, 16};
    const auto study = truncation_convergence_study([](int k) { return harmonic_instance(k); }, cutoffs, 50.0, 0);
    ASSERT_EQ(study.leakage.size(), 3u);
    ASSERT_EQ(study.differences.size(), 2u);
    EXPECT_LE(study.differences[1], 1e-6);
    EXPECT_GT(study.leakage[0], 0.0);
    EXPECT_TRUE(study.monotone);
}

TEST(Truncation, Errors) {
    const auto build = [](int k) { return harmonic_instance(k); };
    const std::vector<int> unsorted{8, 4};
    EXPECT_EQ(code_of([&] { truncation_convergence_study(build, unsorted, 1.0, 0); }), ErrorCode::InvalidArgument);
    const std::vector<int> cutoffs{4, 8};
    EXPECT_EQ(code_of([&] { truncation_convergence_study(build, cutoffs, 1.0, 6); }), ErrorCode::GroupNotPreserved);
    // a builder that shifts the band between cutoffs
    const auto shifting = [](int k) {
        models::HarmonicChainSpec spec;
        spec.fock_cutoff = k;
        spec.omega = 10.0 + 0.1 * k;
        const auto m = models::build_harmonic_chain(spec);
        auto part = partition_by_intervals(herm_eig(m.h0), m.band_intervals);
        return make_instance(OperatorMatrix::hermitian(m.h0), OperatorMatrix::hermitian(m.v), 1.0, std::move(part));
    };
    EXPECT_EQ(code_of([&] { truncation_convergence_study(shifting, cutoffs, 1.0, 0); }), ErrorCode::GroupNotPreserved);
}
