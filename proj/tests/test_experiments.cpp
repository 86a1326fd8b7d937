#include "hardrods/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

using namespace hardrods;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg = default_benchmark_config();
    cfg.epsilons = {0.1, 0.05, 0.025};
    cfg.euler_times = {0.3};
    cfg.diffusive_times = {0.3};
    cfg.replicas = 300;
    cfg.master_seed = 4242;
    cfg.resolved = config_to_json(cfg);
    return cfg;
}

std::map<std::string, std::string> read_dir_bytes(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[e.path().filename().string()] = ss.str();
    }
    return out;
}

} // namespace

TEST(OracleSuite, FluxEquivalenceAndFormulas) {
    OracleFluxResult fr = oracle_flux_equivalence(314159, 200, 10);
    EXPECT_EQ(fr.mismatches, 0u);
    OracleFormulaResult fo = oracle_formula_checks(314159, 30);
    EXPECT_TRUE(fo.pass);
}

TEST(LlnExperiment, ReducedScaleRun) {
    ExperimentConfig cfg = small_config();
    cfg.epsilons = {0.1, 0.02, 0.004};
    cfg.replicas = 2000;
    CommandReport rep = cmd_lln(cfg);
    for (const auto& v : rep.verdicts)
        EXPECT_TRUE(v.pass) << v.test_id << " stat " << v.statistic << " z " << v.z_or_chi2;
}

TEST(LlnExperiment, ZeroLengthRodsDegenerateButPassing) {
    ExperimentConfig cfg = small_config();
    cfg.measure = VelocityLengthMeasure({
        MeasureComponent{0.5, DistSpec::atom(1.0), DistSpec::atom(0.0)},
        MeasureComponent{0.5, DistSpec::atom(-1.0), DistSpec::atom(0.0)},
    });
    cfg.replicas = 200;
    cfg.resolved = config_to_json(cfg);
    CommandReport rep = cmd_lln(cfg);
    EXPECT_TRUE(rep.all_pass());
}

TEST(EulerExperiment, DriftAndTransportReduced) {
    ExperimentConfig cfg = default_benchmark_config();
    cfg.threads = 2;
    auto dv = euler_drift_check(cfg, 0.02, 0.5, 2000, 0, 0, nullptr);
    for (const auto& v : dv) EXPECT_TRUE(v.pass) << v.test_id << " z " << v.z_or_chi2;
    Verdict tv = euler_transport_check(cfg, 0.02, 0.3, 1200, 0, 0, 0.9, nullptr);
    EXPECT_TRUE(tv.pass) << "corr " << tv.statistic;
}

TEST(EulerExperiment, FieldSecondMomentsUnderTransport) {
    // the evolved field stays at the stationary variance cov(phi, phi); the
    // static field against the transported function realizes cov(phi_t, phi_t)
    ExperimentConfig cfg = default_benchmark_config();
    cfg.threads = 2;
    TransportOutcome to = euler_transport_outcome(cfg, 0.01, 0.5, 4000, 0, 0, 0.95, nullptr);
    EXPECT_TRUE(to.correlation.pass) << to.correlation.statistic;
    EXPECT_TRUE(to.euler_variance.pass)
        << "var " << to.euler_variance.statistic << " target " << to.euler_variance.target
        << " z " << to.euler_variance.z_or_chi2;
    EXPECT_TRUE(to.transported_variance.pass)
        << "var " << to.transported_variance.statistic << " target "
        << to.transported_variance.target << " z " << to.transported_variance.z_or_chi2;
    // the two targets genuinely differ for a multi-velocity gas: the per-fiber
    // shift changes the quadratic form even though the pathwise transport
    // correlation is high
    EXPECT_GT(to.transported_variance.target, 1.2 * to.euler_variance.target);
}

TEST(EulerExperiment, HydroDerivativeWeakForm) {
    ExperimentConfig cfg = default_benchmark_config();
    cfg.threads = 2;
    Verdict v = euler_hydro_derivative_check(cfg, 0.02, 0.4, 0.01, 1200, 0, nullptr);
    EXPECT_TRUE(v.pass) << "lhs " << v.statistic << " rhs " << v.target << " tol "
                        << v.stderr_or_ci;
}

TEST(DiffusiveExperiment, VarianceAndRigidReduced) {
    ExperimentConfig cfg = default_benchmark_config();
    cfg.threads = 2;
    auto vs = diffusive_variance_check(cfg, 0.05, 0.5, 1500, 0, 0, 1.0, nullptr);
    for (const auto& v : vs) EXPECT_TRUE(v.pass) << v.test_id << " z " << v.z_or_chi2;

    RigidOutcome a = diffusive_rigid_check(cfg, 0.1, 1.0, 800, 0, 0, 1.0);
    RigidOutcome b = diffusive_rigid_check(cfg, 0.02, 1.0, 800, 1, 0, 1.0);
    EXPECT_GT(b.correlation, a.correlation);
    EXPECT_GT(a.correlation, 0.8);
    EXPECT_TRUE(a.variance_verdict.pass) << a.variance_verdict.z_or_chi2;
    EXPECT_TRUE(b.variance_verdict.pass) << b.variance_verdict.z_or_chi2;
}

TEST(DiffusiveExperiment, FieldVarianceAgainstMixtureOracle) {
    ExperimentConfig cfg = default_benchmark_config();
    cfg.threads = 2;
    auto v = diffusive_field_check(cfg, 0.02, 0.25, 1500, 0, 0, 1.0, nullptr);
    ASSERT_TRUE(v.has_value());
    EXPECT_TRUE(v->pass) << "variance " << v->statistic << " oracle " << v->target;
}

TEST(DiffusiveExperiment, ContinuousVelocityLawSkipsFiberCheck) {
    ExperimentConfig cfg = small_config();
    cfg.measure = VelocityLengthMeasure(
        {MeasureComponent{1.0, DistSpec::gaussian(0.0, 1.0), DistSpec::atom(1.0)}});
    cfg.resolved = config_to_json(cfg);
    auto v = diffusive_field_check(cfg, 0.05, 0.25, 200, 0, 0, 0.0, nullptr);
    EXPECT_FALSE(v.has_value());
}

TEST(LlnExperiment, DumpFirstConfigWritesPointTable) {
    namespace fs = std::filesystem;
    ExperimentConfig cfg = small_config();
    cfg.epsilons = {0.1, 0.05, 0.025};
    cfg.replicas = 100;
    cfg.dump_first_config = true;
    cfg.out_dir = (fs::temp_directory_path() / "hardrods_dump_test").string();
    fs::remove_all(cfg.out_dir);
    write_report(cmd_lln(cfg), cfg, "lln");
    std::ifstream in(fs::path(cfg.out_dir) / "lln_first_config.csv");
    ASSERT_TRUE(in.good());
    std::string line;
    std::getline(in, line); // seed comment
    std::getline(in, line); // config comment
    std::getline(in, line);
    EXPECT_EQ(line, "x,v,r");
    std::size_t rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    EXPECT_GT(rows, 10u); // first replica at eps = 0.1 on [0, 5]
    fs::remove_all(cfg.out_dir);
}

// Criterion-9 style check at unit-test scale: artifacts are byte-identical
// across reruns and thread counts, for every command.
TEST(Determinism, ArtifactsAreByteIdenticalAcrossThreadCounts) {
    namespace fs = std::filesystem;
    using Runner = CommandReport (*)(const ExperimentConfig&);
    const std::pair<const char*, Runner> commands[] = {
        {"lln", &cmd_lln},
        {"static-clt", &cmd_static_clt},
        {"euler", &cmd_euler},
        {"diffusive", &cmd_diffusive},
        {"oracle", &cmd_oracle},
    };
    const fs::path base = fs::temp_directory_path() / "hardrods_det_test";
    fs::remove_all(base);
    for (const auto& [name, fn] : commands) {
        ExperimentConfig cfg = small_config();
        cfg.replicas = 120;

        ExperimentConfig a = cfg;
        a.threads = 1;
        a.out_dir = (base / (std::string(name) + "_a")).string();
        write_report(fn(a), a, name);

        ExperimentConfig b = cfg;
        b.threads = 2;
        b.out_dir = (base / (std::string(name) + "_b")).string();
        write_report(fn(b), b, name);

        auto fa = read_dir_bytes(a.out_dir);
        auto fb = read_dir_bytes(b.out_dir);
        ASSERT_FALSE(fa.empty()) << name;
        ASSERT_EQ(fa.size(), fb.size()) << name;
        for (const auto& [file, bytes] : fa) {
            ASSERT_TRUE(fb.count(file)) << name << "/" << file;
            ASSERT_EQ(bytes, fb[file]) << name << "/" << file;
        }
    }
    fs::remove_all(base);
}
