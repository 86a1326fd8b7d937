#include "hardrods/measures.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "hardrods/rng.hpp"

using namespace hardrods;

namespace {

VelocityLengthMeasure benchmark_measure() {
    return VelocityLengthMeasure({
        MeasureComponent{0.5, DistSpec::atom(1.0), DistSpec::atom(1.0)},
        MeasureComponent{0.5, DistSpec::atom(-1.0), DistSpec::atom(1.0)},
    });
}

} // namespace

TEST(Measure, ValidationRejectsBadInputs) {
    EXPECT_THROW(VelocityLengthMeasure({}), std::invalid_argument);
    EXPECT_THROW(VelocityLengthMeasure({MeasureComponent{-0.1, DistSpec::atom(0), DistSpec::atom(1)},
                                        MeasureComponent{1.1, DistSpec::atom(0), DistSpec::atom(1)}}),
                 std::invalid_argument);
    // weights must sum to 1
    EXPECT_THROW(VelocityLengthMeasure({MeasureComponent{0.7, DistSpec::atom(0), DistSpec::atom(1)}}),
                 std::invalid_argument);
    // length laws must live on [0, inf)
    EXPECT_THROW(VelocityLengthMeasure({MeasureComponent{1.0, DistSpec::atom(0),
                                                         DistSpec::gaussian(1.0, 0.2)}}),
                 std::invalid_argument);
    EXPECT_THROW(VelocityLengthMeasure({MeasureComponent{1.0, DistSpec::atom(0),
                                                         DistSpec::uniform(-0.5, 1.0)}}),
                 std::invalid_argument);
    EXPECT_THROW(VelocityLengthMeasure({MeasureComponent{1.0, DistSpec::atom(0),
                                                         DistSpec::atom(-1.0)}}),
                 std::invalid_argument);
    EXPECT_THROW(DistSpec::uniform(1.0, 1.0).validate(), std::invalid_argument);
    EXPECT_THROW(DistSpec::gaussian(0.0, 0.0).validate(), std::invalid_argument);
    EXPECT_THROW(DistSpec::exponential(-2.0).validate(), std::invalid_argument);
}

TEST(Measure, MomentAtomEvaluation) {
    VelocityLengthMeasure mu({MeasureComponent{1.0, DistSpec::atom(0.0), DistSpec::atom(1.0)}});
    EXPECT_DOUBLE_EQ(mu.moment([](double, double r) { return r; }), 1.0);
}

TEST(Measure, MomentRefusesNonFiniteIntegrands) {
    VelocityLengthMeasure mu({MeasureComponent{1.0, DistSpec::atom(0.0), DistSpec::atom(1.0)}});
    EXPECT_THROW(mu.moment([](double, double r) { return 1.0 / (r - 1.0); }), std::runtime_error);
}

TEST(Measure, MomentGaussianSymmetry) {
    VelocityLengthMeasure mu({MeasureComponent{1.0, DistSpec::gaussian(0, 1), DistSpec::atom(1)}});
    EXPECT_NEAR(mu.moment([](double v, double) { return v; }), 0.0, 1e-14);
}

TEST(Measure, MomentAgainstMonteCarloOracle) {
    // iint r v^2 over uniform(-1,1) x atom(2): quadrature vs 1e7-sample MC
    VelocityLengthMeasure mu({MeasureComponent{1.0, DistSpec::uniform(-1, 1), DistSpec::atom(2)}});
    const double quad = mu.moment([](double v, double r) { return r * v * v; });
    EXPECT_NEAR(quad, 2.0 / 3.0, 1e-12);

    Rng rng(555);
    const std::size_t n = 10000000;
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double v, r;
        mu.sample_mark(rng, v, r);
        const double f = r * v * v;
        s += f;
        s2 += f * f;
    }
    const double mc = s / double(n);
    const double se = std::sqrt((s2 / double(n) - mc * mc) / double(n));
    EXPECT_NEAR(quad, mc, 3.0 * se);
}

TEST(MacroParams, UnitMoments) {
    VelocityLengthMeasure mu({MeasureComponent{1.0, DistSpec::gaussian(0, 1), DistSpec::atom(1)}});
    MacroParams p = macro_params(1.0, mu);
    EXPECT_NEAR(p.sigma, 1.0, 1e-12);
    EXPECT_NEAR(p.pi, 0.0, 1e-12);
    EXPECT_NEAR(p.rho_bar, 0.5, 1e-12);
}

TEST(MacroParams, HandEvaluatedCase) {
    VelocityLengthMeasure mu({MeasureComponent{1.0, DistSpec::atom(1.0), DistSpec::atom(0.5)}});
    MacroParams p = macro_params(2.0, mu);
    EXPECT_DOUBLE_EQ(p.sigma, 1.0);
    EXPECT_DOUBLE_EQ(p.pi, 1.0);
    EXPECT_DOUBLE_EQ(p.rho_bar, 1.0);
}

TEST(MacroParams, ZeroLengthRods) {
    VelocityLengthMeasure mu({MeasureComponent{1.0, DistSpec::gaussian(0, 1), DistSpec::atom(0.0)}});
    MacroParams p = macro_params(1.0, mu);
    EXPECT_DOUBLE_EQ(p.sigma, 0.0);
    EXPECT_DOUBLE_EQ(p.pi, 0.0);
    EXPECT_DOUBLE_EQ(p.rho_bar, 1.0);
    EXPECT_THROW(macro_params(0.0, mu), std::invalid_argument);
}

TEST(MacroParams, SampledMomentsMatchQuadrature) {
    VelocityLengthMeasure mu({
        MeasureComponent{0.4, DistSpec::gaussian(0.3, 1.2), DistSpec::exponential(2.0)},
        MeasureComponent{0.6, DistSpec::uniform(-1, 2), DistSpec::uniform(0.0, 1.5)},
    });
    const double rho = 1.3;
    MacroParams p = macro_params(rho, mu);

    Rng rng(808);
    const std::size_t n = 1000000;
    double sr = 0, srv = 0, sr2 = 0, srv2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double v, r;
        mu.sample_mark(rng, v, r);
        sr += r;
        sr2 += r * r;
        srv += r * v;
        srv2 += r * v * r * v;
    }
    const double mr = sr / n, mrv = srv / n;
    const double se_r = std::sqrt((sr2 / n - mr * mr) / n);
    const double se_rv = std::sqrt((srv2 / n - mrv * mrv) / n);
    EXPECT_NEAR(rho * mr, p.sigma, 4.0 * rho * se_r);
    EXPECT_NEAR(rho * mrv, p.pi, 4.0 * rho * se_rv);
}

TEST(EffectiveVelocity, NonInteractingLimit) {
    MacroParams p{1.0, 0.0, 0.0, 1.0};
    for (double v : {-3.0, 0.0, 1.7}) EXPECT_DOUBLE_EQ(effective_velocity(v, p), v);
}

TEST(EffectiveVelocity, SymmetricLaw) {
    MacroParams p{1.0, 1.0, 0.0, 0.5};
    EXPECT_DOUBLE_EQ(effective_velocity(3.0, p), 6.0);
}

TEST(EffectiveVelocity, SingleVelocityGasDriftsAtItsOwnSpeed) {
    VelocityLengthMeasure mu({MeasureComponent{1.0, DistSpec::atom(1.0), DistSpec::atom(0.5)}});
    MacroParams p = macro_params(2.0, mu);
    EXPECT_DOUBLE_EQ(effective_velocity(1.0, p), 1.0);
    EXPECT_DOUBLE_EQ(effective_velocity(2.0, p), 3.0); // 2(1+1) - 1
}

TEST(EffectiveVelocity, ClosedFormMatchesIntegralForm) {
    std::vector<VelocityLengthMeasure> measures;
    measures.push_back(benchmark_measure());
    measures.push_back(VelocityLengthMeasure(
        {MeasureComponent{1.0, DistSpec::gaussian(0.5, 2.0), DistSpec::exponential(1.5)}}));
    measures.push_back(VelocityLengthMeasure(
        {MeasureComponent{0.3, DistSpec::uniform(-2, 1), DistSpec::uniform(0, 2)},
         MeasureComponent{0.7, DistSpec::exponential(1.0), DistSpec::atom(0.25)}}));
    for (const auto& mu : measures) {
        MacroParams p = macro_params(1.7, mu);
        for (double v : {-2.0, -0.3, 0.0, 1.0, 4.0}) {
            const double a = effective_velocity(v, p);
            const double b = effective_velocity_integral(v, 1.7, mu);
            EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST(Diffusivity, BenchmarkAtomSummation) {
    // atom oracle: rho * sum_w w(comp) * r^2 |v - w|
    auto mu = benchmark_measure();
    EXPECT_NEAR(diffusivity(1.0, 1.0, mu), 0.5 * 0.0 + 0.5 * 2.0, 1e-15);
    EXPECT_NEAR(diffusivity(-1.0, 1.0, mu), 1.0, 1e-15);
    EXPECT_NEAR(diffusivity(0.0, 1.0, mu), 1.0, 1e-15);
}

TEST(Diffusivity, ZeroAtOwnAtom) {
    VelocityLengthMeasure mu({MeasureComponent{1.0, DistSpec::atom(2.5), DistSpec::exponential(1.0)}});
    EXPECT_DOUBLE_EQ(diffusivity(2.5, 3.0, mu), 0.0);
}

TEST(Diffusivity, GaussianClosedFormAgainstMonteCarlo) {
    VelocityLengthMeasure mu({MeasureComponent{1.0, DistSpec::gaussian(0, 1), DistSpec::atom(1)}});
    const double got = diffusivity(0.0, 1.0, mu);
    EXPECT_NEAR(got, std::sqrt(2.0 / M_PI), 1e-12);

    Rng rng(31337);
    const std::size_t n = 2000000;
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double v, r;
        mu.sample_mark(rng, v, r);
        const double f = r * r * std::abs(v);
        s += f;
        s2 += f * f;
    }
    const double mc = s / n;
    const double se = std::sqrt((s2 / n - mc * mc) / n);
    EXPECT_NEAR(got, mc, 3.0 * se);
}

TEST(Diffusivity, NonnegativeAndConvexOnGrid) {
    VelocityLengthMeasure mu({
        MeasureComponent{0.5, DistSpec::gaussian(0.2, 1.0), DistSpec::uniform(0, 1)},
        MeasureComponent{0.5, DistSpec::uniform(-2, 0), DistSpec::exponential(2.0)},
    });
    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) grid.push_back(0.25 * i);
    std::vector<double> d;
    for (double v : grid) {
        d.push_back(diffusivity(v, 1.5, mu));
        EXPECT_GE(d.back(), 0.0);
    }
    for (std::size_t i = 1; i + 1 < d.size(); ++i)
        EXPECT_LE(d[i], 0.5 * (d[i - 1] + d[i + 1]) + 1e-12);
}

TEST(Measure, VelocityBoundCoversAtomsExactly) {
    auto mu = benchmark_measure();
    EXPECT_DOUBLE_EQ(mu.velocity_bound(), 1.0);
    VelocityLengthMeasure mug(
        {MeasureComponent{1.0, DistSpec::gaussian(1.0, 2.0), DistSpec::atom(1)}});
    // 1 - 1e-12 two-sided quantile of N(1, 4), just above 1 + 2 * 7.03
    EXPECT_GT(mug.velocity_bound(), 15.0);
    EXPECT_LT(mug.velocity_bound(), 16.0);
}
