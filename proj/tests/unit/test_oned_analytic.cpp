#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "poroflow/errors.hpp"
#include "poroflow/oned_analytic.hpp"
#include "support/oracles.hpp"

using namespace poroflow;
namespace oracle = poroflow::testing;

namespace {

template <typename F>
void expect_error(ErrorKind kind, F&& f) {
    try {
        f();
        ADD_FAILURE() << "expected " << to_string(kind);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind) << e.what();
    }
}

StripProblem unit_strip(double v0) {
    StripProblem s;
    s.fluid = {1.0, 1.0, 1.0};
    s.v0 = v0;
    return s;
}

StripProblem reference_strip(double v0) {
    StripProblem s;
    s.L = 100.0;
    s.k = 1e-12;
    s.v0 = v0;
    return s;
}

}  // namespace

TEST(ExistenceThreshold, UnitValues) { EXPECT_DOUBLE_EQ(existence_threshold(unit_strip(0.0)), 1.0); }

TEST(ExistenceThreshold, ReferenceFluid) {
    EXPECT_NEAR(existence_threshold(reference_strip(0.0)), 101325.0 * 1e-12 / (3.95e-5 * 100.0 * 3e-6), 1e-12);
    EXPECT_NEAR(existence_threshold(reference_strip(0.0)), 8.5506, 1e-4);
}

TEST(ExistenceThreshold, InverseInBeta) {
    StripProblem s = reference_strip(0.0);
    const double v = existence_threshold(s);
    s.fluid.beta *= 2.0;
    EXPECT_NEAR(existence_threshold(s), 0.5 * v, 1e-15 * v);
}

TEST(ExistenceThreshold, ZeroBetaIsDegenerate) {
    StripProblem s = unit_strip(0.5);
    s.fluid.beta = 0.0;
    expect_error(ErrorKind::Degenerate, [&] { (void)existence_threshold(s); });
}

TEST(StripProblem, Validation) {
    StripProblem s = unit_strip(0.1);
    EXPECT_NO_THROW(s.validate());
    s.L = 0.0;
    expect_error(ErrorKind::InvalidArgument, [&] { s.validate(); });
    s = unit_strip(0.1);
    s.k = -1.0;
    expect_error(ErrorKind::InvalidArgument, [&] { s.validate(); });
    s = unit_strip(std::nan(""));
    expect_error(ErrorKind::InvalidArgument, [&] { s.validate(); });
    EXPECT_DOUBLE_EQ(unit_strip(0.0).outlet_pressure(), 1.0);
}

TEST(DirectPressure, OutletIsReferencePressure) {
    EXPECT_EQ(direct_pressure_1d(1.0, unit_strip(0.7)), 1.0);
    EXPECT_EQ(direct_pressure_1d(100.0, reference_strip(4.0)), 101325.0);
}

TEST(DirectPressure, UnitParametersAtInlet) {
    const double p = direct_pressure_1d(0.0, unit_strip(0.5));
    EXPECT_NEAR(p, 1.0 - std::log(0.5), 1e-15);
    EXPECT_NEAR(p, 1.693147, 1e-6);
    EXPECT_NEAR(p, oracle::strip_pressure_ode(0.0, 1.0, 1.0, {1.0, 1.0, 1.0}, 0.5, 1.0), 1e-11);
}

TEST(DirectPressure, NoFlowIsUniform) {
    for (double x : {0.0, 17.0, 100.0}) EXPECT_EQ(direct_pressure_1d(x, reference_strip(0.0)), 101325.0);
}

TEST(DirectPressure, MatchesOdeOracle) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        StripProblem s = reference_strip(0.0);
        s.v0 = 0.98 * u(rng) * existence_threshold(s);
        const double x = s.L * u(rng);
        const double expected = oracle::strip_pressure_ode(x, s.L, s.k, s.fluid, s.v0, s.fluid.p0);
        EXPECT_NEAR(direct_pressure_1d(x, s), expected, 1e-9 * expected) << "v0 = " << s.v0 << ", x = " << x;
    }
}

TEST(DirectPressure, NonReferenceOutlet) {
    StripProblem s = unit_strip(0.3);
    s.p_R = 0.4;
    for (double x : {0.0, 0.25, 0.8})
        EXPECT_NEAR(direct_pressure_1d(x, s), oracle::strip_pressure_ode(x, 1.0, 1.0, s.fluid, 0.3, 0.4), 1e-11);
}

TEST(DirectPressure, ZeroBetaIsLinearDrop) {
    StripProblem s = unit_strip(0.5);
    s.fluid.beta = 0.0;
    EXPECT_NEAR(direct_pressure_1d(0.0, s), 1.5, 1e-15);
    EXPECT_NEAR(direct_pressure_1d(0.5, s), 1.25, 1e-15);
}

TEST(DirectPressure, OutsideStripIsRejected) {
    expect_error(ErrorKind::OutOfDomain, [] { (void)direct_pressure_1d(-0.1, unit_strip(0.5)); });
    expect_error(ErrorKind::OutOfDomain, [] { (void)direct_pressure_1d(1.1, unit_strip(0.5)); });
}

TEST(DirectPressure, AboveThresholdHasNoSolution) {
    // log argument 1 - 2 (1 - x) <= 0 for x <= 1/2.
    expect_error(ErrorKind::NonExistence, [] { (void)direct_pressure_1d(0.25, unit_strip(2.0)); });
    EXPECT_TRUE(std::isfinite(direct_pressure_1d(0.75, unit_strip(2.0))));
}

TEST(DirectPressureProperty, ThresholdIsSharp) {
    for (const StripProblem& base : {unit_strip(0.0), reference_strip(0.0)}) {
        StripProblem below = base;
        StripProblem above = base;
        const double v = existence_threshold(base);
        below.v0 = (1.0 - 1e-6) * v;
        above.v0 = (1.0 + 1e-6) * v;
        EXPECT_TRUE(std::isfinite(direct_pressure_1d(0.0, below)));
        expect_error(ErrorKind::NonExistence, [&] { (void)direct_pressure_1d(0.0, above); });
    }
}

TEST(DirectPressureProperty, NonIncreasingInX) {
    for (double fraction : {0.1, 0.5, 0.9, 0.999}) {
        StripProblem s = reference_strip(0.0);
        s.v0 = fraction * existence_threshold(s);
        double previous = direct_pressure_1d(0.0, s);
        for (int i = 1; i <= 200; ++i) {
            const double p = direct_pressure_1d(s.L * i / 200.0, s);
            EXPECT_LE(p, previous);
            previous = p;
        }
    }
}

TEST(TransformedPressure, ExamplesAndLinearity) {
    EXPECT_DOUBLE_EQ(transformed_pressure_1d(0.0, unit_strip(0.5)), -0.5);
    EXPECT_DOUBLE_EQ(transformed_pressure_1d(1.0, unit_strip(0.5)), -1.0);
    const StripProblem s = reference_strip(3.0);
    EXPECT_NEAR(transformed_pressure_1d(100.0, s), -101325.0 / 3e-6, 1e-6);
    const double slope = (transformed_pressure_1d(0.0, s) - transformed_pressure_1d(100.0, s)) / 100.0;
    EXPECT_NEAR(slope, 3.95e-5 * 3.0 / 1e-12, 1e-9 * slope);
    // Defined above the threshold too.
    EXPECT_DOUBLE_EQ(transformed_pressure_1d(0.0, unit_strip(3.0)), 2.0);
}

TEST(TransformedPressureProperty, MapsBackToDirectPressure) {
    for (double fraction : {0.0, 0.3, 0.9, 0.999}) {
        StripProblem s = reference_strip(0.0);
        s.v0 = fraction * existence_threshold(s);
        for (int i = 0; i <= 1000; ++i) {
            const double x = s.L * i / 1000.0;
            const double P = transformed_pressure_1d(x, s);
            const double direct = direct_pressure_1d(x, s);
            EXPECT_NEAR(hopf_cole_forward(P, s.fluid), direct, 1e-12 * direct);
        }
    }
}

TEST(TransformedPressureProperty, SignMatchesExistence) {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        StripProblem s = reference_strip(0.0);
        const double v = existence_threshold(s);
        s.v0 = u(rng) * v;
        EXPECT_EQ(transformed_pressure_1d(0.0, s) < 0.0, s.v0 < v) << s.v0 / v;
    }
}

TEST(Velocity1d, IsPrescribedInflow) {
    EXPECT_EQ(velocity_1d(unit_strip(0.5)), 0.5);
    EXPECT_EQ(velocity_1d(unit_strip(0.0)), 0.0);
    StripProblem s = unit_strip(0.5);
    s.k = 7.0;
    s.fluid.beta = 4.0;
    s.fluid.mu0 = 0.1;
    EXPECT_EQ(velocity_1d(s), 0.5);
}
