#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "poroflow/darcy_linear.hpp"
#include "poroflow/errors.hpp"
#include "poroflow/oned_analytic.hpp"
#include "poroflow/verification.hpp"
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

MobilityField uniform_mobility(const Mesh& m, Tensor2 t = Tensor2::isotropic(1.0)) {
    return MobilityField(m.triangle_count(), t);
}

// P given on left/right, no flow on top/bottom.
BoundarySpec left_right(double left, double right) {
    BoundarySpec bcs;
    bcs.pressure = {{"left", constant(left)}, {"right", constant(right)}};
    bcs.velocity = {{"top", constant(0.0)}, {"bottom", constant(0.0)}};
    return bcs;
}

BoundarySpec closed_box() {
    BoundarySpec bcs;
    for (const char* side : {"left", "right", "top", "bottom"}) bcs.velocity.push_back({side, constant(0.0)});
    return bcs;
}

double total_flux(const SparseSystem& s, const ScalarField& P) {
    double sum = 0.0;
    for (const auto& label : s.mesh->labels()) sum += boundary_flux(s, P, label);
    return sum;
}

}  // namespace

TEST(Assemble, TwoTriangleSquareReproducesLinearField) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 1, 1);
    const auto sol = solve_darcy(m, uniform_mobility(*m), left_right(0.0, 1.0), {});
    for (std::size_t i = 0; i < m->node_count(); ++i) EXPECT_NEAR(sol.field[i], m->nodes[i].x, 1e-14);
}

TEST(Assemble, StiffnessIsSymmetric) {
    const auto m = make_rectangle_mesh(2.0, 1.0, 6, 4, TriangulationPattern::Crossed);
    MobilityField mob = uniform_mobility(*m, {3.0, 0.4, 1.0});
    const SparseSystem s = assemble(m, mob, left_right(1.0, 0.0));
    const Eigen::MatrixXd full(s.stiffness);
    const Eigen::MatrixXd reduced(s.matrix);
    EXPECT_LE((full - full.transpose()).cwiseAbs().maxCoeff(), 1e-12 * full.cwiseAbs().maxCoeff());
    EXPECT_LE((reduced - reduced.transpose()).cwiseAbs().maxCoeff(), 1e-12 * reduced.cwiseAbs().maxCoeff());
    EXPECT_EQ(s.free_nodes.size() + m->label_nodes("left").size() + m->label_nodes("right").size(),
              m->node_count());
}

TEST(Assemble, RowsOfUnconstrainedStiffnessSumToZero) {
    const auto m = make_rectangle_mesh(1.0, 3.0, 3, 5);
    const SparseSystem s = assemble(m, uniform_mobility(*m, {2.0, -0.3, 0.7}), closed_box());
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m->node_count()));
    EXPECT_LE((s.stiffness * ones).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Assemble, InflowAddsPositiveSource) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 2, 2);
    BoundarySpec bcs = closed_box();
    bcs.velocity[0].normal_velocity = constant(-2.0);  // left
    const SparseSystem s = assemble(m, uniform_mobility(*m), bcs);
    EXPECT_NEAR(s.neumann_load.sum(), 2.0, 1e-14);
    for (std::size_t i : m->label_nodes("left")) EXPECT_GT(s.neumann_load[static_cast<Eigen::Index>(i)], 0.0);
    EXPECT_NEAR(s.net_prescribed_flux, -2.0, 1e-14);
    EXPECT_NEAR(s.abs_prescribed_flux, 2.0, 1e-14);
}

TEST(Assemble, RejectsIndefiniteMobility) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 2, 2);
    MobilityField mob = uniform_mobility(*m);
    mob[3] = {1.0, 2.0, 1.0};
    expect_error(ErrorKind::SingularMobility, [&] { (void)assemble(m, mob, left_right(0.0, 1.0)); });
    mob[3] = {0.0, 0.0, 0.0};
    expect_error(ErrorKind::SingularMobility, [&] { (void)assemble(m, mob, left_right(0.0, 1.0)); });
}

TEST(Assemble, MobilityCountMustMatchMesh) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 2, 2);
    EXPECT_THROW((void)assemble(m, MobilityField(3, Tensor2::isotropic(1.0)), left_right(0.0, 1.0)), Error);
}

TEST(Solve, SingleUnknownConvergesInOneIteration) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 1, 1, TriangulationPattern::Crossed);
    BoundarySpec bcs;
    const auto f = [](Point x) { return x.x + 3.0 * x.x * x.y; };
    for (const char* side : {"left", "right", "top", "bottom"}) bcs.pressure.push_back({side, f});
    const SparseSystem s = assemble(m, uniform_mobility(*m), bcs);
    ASSERT_EQ(s.free_nodes.size(), 1u);
    const auto sol = solve(s, {});
    EXPECT_LE(sol.iterations, 1u);
    // Equal diagonal weights: the centre value is the corner mean.
    EXPECT_NEAR(sol.field[s.free_nodes[0]], (0.0 + 1.0 + 4.0 + 0.0) / 4.0, 1e-15);
}

TEST(Solve, ManufacturedLinearFieldIsExact) {
    for (auto pattern : {TriangulationPattern::Diagonal, TriangulationPattern::Crossed}) {
        const auto m = make_rectangle_mesh(1.0, 1.0, 7, 5, pattern);
        BoundarySpec bcs;
        bcs.pressure = {{"left", constant(0.0)}, {"right", constant(1.0)}, {"top", [](Point x) { return x.x; }}};
        bcs.velocity = {{"bottom", constant(0.0)}};
        const auto sol = solve_darcy(m, uniform_mobility(*m), bcs, {});
        for (std::size_t i = 0; i < m->node_count(); ++i) EXPECT_NEAR(sol.field[i], m->nodes[i].x, 1e-10);
        EXPECT_LE(sol.relative_residual, 1e-12);
    }
}

TEST(Solve, ClosedSystemHasNoFlux) {
    const auto m = make_rectangle_mesh(2.0, 1.0, 4, 3);
    const SparseSystem s = assemble(m, uniform_mobility(*m), closed_box());
    const auto sol = solve(s, {});
    for (const auto& label : m->labels()) EXPECT_NEAR(boundary_flux(s, sol.field, label), 0.0, 1e-12);
    for (double v : sol.field.values()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Solve, PureNeumannWithBalancedFluxes) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 6, 6);
    BoundarySpec bcs = closed_box();
    bcs.velocity[0].normal_velocity = constant(-1.0);
    bcs.velocity[1].normal_velocity = constant(1.0);
    const auto sol = solve_darcy(m, uniform_mobility(*m), bcs, {});
    double mean = 0.0;
    for (double v : sol.field.values()) mean += v;
    EXPECT_NEAR(mean / static_cast<double>(m->node_count()), 0.0, 1e-12);
    // Unique up to a constant: P = 0.5 - x.
    for (std::size_t i = 0; i < m->node_count(); ++i) EXPECT_NEAR(sol.field[i], 0.5 - m->nodes[i].x, 1e-10);
}

TEST(Solve, UnbalancedPureNeumannIsIncompatible) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 3, 3);
    BoundarySpec bcs = closed_box();
    bcs.velocity[0].normal_velocity = constant(-1.0);
    SparseSystem s;
    ASSERT_NO_THROW(s = assemble(m, uniform_mobility(*m), bcs));
    expect_error(ErrorKind::IncompatibleNeumann, [&] { (void)solve(s, {}); });
}

TEST(Solve, IterationCapRaisesNoConvergence) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 12, 12);
    LinearSolveConfig config;
    config.cg_max_iter = 1;
    BoundarySpec bcs = left_right(0.0, 1.0);
    bcs.velocity[0].normal_velocity = [](Point x) { return std::sin(6.0 * x.x); };
    expect_error(ErrorKind::NoConvergence, [&] { (void)solve_darcy(m, uniform_mobility(*m), bcs, config); });
}

TEST(Solve, PreconditionerChoiceDoesNotChangeSolution) {
    const auto m = make_rectangle_mesh(3.0, 1.0, 15, 6);
    MobilityField mob = uniform_mobility(*m);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> k(0.1, 10.0);
    for (auto& t : mob) t = Tensor2::isotropic(k(rng));
    LinearSolveConfig plain;
    plain.preconditioner = Preconditioner::None;
    const auto a = solve_darcy(m, mob, left_right(2.0, -1.0), {});
    const auto b = solve_darcy(m, mob, left_right(2.0, -1.0), plain);
    for (std::size_t i = 0; i < m->node_count(); ++i) EXPECT_NEAR(a.field[i], b.field[i], 1e-10);
}

TEST(Solve, WarmStartFromSolutionIsImmediate) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 8, 8);
    const SparseSystem s = assemble(m, uniform_mobility(*m), left_right(1.0, 0.0));
    const auto first = solve(s, {});
    const auto second = solve(s, {}, &first.field);
    EXPECT_LE(second.iterations, 1u);
}

TEST(LinearSolveConfig, Validation) {
    LinearSolveConfig c;
    EXPECT_NO_THROW(c.validate());
    c.cg_tol = 1.0;
    expect_error(ErrorKind::InvalidArgument, [&] { c.validate(); });
    c.cg_tol = 0.0;
    expect_error(ErrorKind::InvalidArgument, [&] { c.validate(); });
    c.cg_tol = 1e-8;
    c.cg_max_iter = 0;
    expect_error(ErrorKind::InvalidArgument, [&] { c.validate(); });
}

TEST(RecoverVelocity, ConstantGradients) {
    const auto m = make_rectangle_mesh(2.0, 1.0, 3, 2, TriangulationPattern::Crossed);
    const ScalarField px(m, [](Point x) { return x.x; });
    const ScalarField flat(m, [](Point) { return 4.0; });

    const VectorField unit = recover_velocity(px, uniform_mobility(*m));
    const VectorField still = recover_velocity(flat, uniform_mobility(*m));
    const VectorField aniso = recover_velocity(px, uniform_mobility(*m, {2.0, 0.0, 1.0}));
    for (const Vec2& v : unit.values()) {
        EXPECT_NEAR(v.x, -1.0, 1e-14);
        EXPECT_NEAR(v.y, 0.0, 1e-14);
    }
    for (const Vec2& v : still.values()) {
        EXPECT_NEAR(v.x, 0.0, 1e-14);
        EXPECT_NEAR(v.y, 0.0, 1e-14);
    }
    for (const Vec2& v : aniso.values()) {
        EXPECT_NEAR(v.x, -2.0, 1e-14);
        EXPECT_NEAR(v.y, 0.0, 1e-14);
    }
}

TEST(BoundaryFlux, LinearFieldThroughUnitSquare) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 1, 1);
    const auto mob = uniform_mobility(*m);
    const SparseSystem s = assemble(m, mob, left_right(1.0, 0.0));
    const auto sol = solve(s, {});
    EXPECT_NEAR(boundary_flux(s, sol.field, "right"), 1.0, 1e-13);
    EXPECT_NEAR(boundary_flux(s, sol.field, "left"), -1.0, 1e-13);
    EXPECT_NEAR(boundary_flux(s, sol.field, "top"), 0.0, 1e-15);
    EXPECT_NEAR(boundary_flux_direct(sol.field, mob, "right"), 1.0, 1e-13);
    EXPECT_NEAR(boundary_flux(sol.field, mob, left_right(1.0, 0.0), "left"), -1.0, 1e-13);
    EXPECT_NEAR(total_flux(s, sol.field), 0.0, 1e-14);
}

TEST(BoundaryFlux, UnknownLabel) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 1, 1);
    const SparseSystem s = assemble(m, uniform_mobility(*m), left_right(1.0, 0.0));
    const auto sol = solve(s, {});
    expect_error(ErrorKind::UnknownLabel, [&] { (void)boundary_flux(s, sol.field, "well"); });
    expect_error(ErrorKind::UnknownLabel,
                 [&] { (void)boundary_flux_direct(sol.field, uniform_mobility(*m), "well"); });
}

TEST(BoundaryFlux, VelocitySegmentReturnsPrescribedIntegral) {
    const auto m = make_rectangle_mesh(2.0, 1.0, 5, 3);
    BoundarySpec bcs = left_right(0.0, 0.0);
    bcs.velocity[0].normal_velocity = [](Point x) { return x.x * x.x; };  // top, y = 1
    const SparseSystem s = assemble(m, uniform_mobility(*m), bcs);
    const auto sol = solve(s, {});
    // Two-point Gauss is exact for the quadratic: int_0^2 x^2 dx.
    EXPECT_NEAR(boundary_flux(s, sol.field, "top"), 8.0 / 3.0, 1e-13);
}

TEST(BoundaryFlux, MobilityScalingScalesFluxOnly) {
    const auto m = make_reservoir_mesh({10.0, 3.0, 0.6, 20, 6});
    const BoundarySpec bcs = reservoir_bcs(5.0, 1.0);
    const MobilityField one = uniform_mobility(*m, {1.0, 0.2, 0.5});
    const MobilityField ten = uniform_mobility(*m, {10.0, 2.0, 5.0});
    const SparseSystem s1 = assemble(m, one, bcs);
    const SparseSystem s10 = assemble(m, ten, bcs);
    const auto a = solve(s1, {});
    const auto b = solve(s10, {});
    for (std::size_t i = 0; i < m->node_count(); ++i) EXPECT_NEAR(a.field[i], b.field[i], 1e-10);
    const double q1 = boundary_flux(s1, a.field, "well");
    EXPECT_GT(q1, 0.0);
    EXPECT_NEAR(boundary_flux(s10, b.field, "well"), 10.0 * q1, 1e-9 * q1);
}

TEST(BoundaryFlux, ConsistentAndDirectAgreeUnderRefinement) {
    double previous = 1.0;
    for (std::size_t n : {4u, 8u, 16u}) {
        const auto m = make_reservoir_mesh({4.0, 2.0, 0.5, 2 * n, n});
        const auto mob = uniform_mobility(*m);
        const BoundarySpec bcs = reservoir_bcs(1.0, 0.0);
        const SparseSystem s = assemble(m, mob, bcs);
        const auto sol = solve(s, {});
        const double consistent = boundary_flux(s, sol.field, "inlet");
        const double direct = boundary_flux_direct(sol.field, mob, "inlet");
        const double gap = std::abs(consistent - direct) / std::abs(consistent);
        EXPECT_LT(gap, previous);
        previous = gap;
    }
}

// Conservation over random geometry, anisotropy and mixed data.
TEST(BoundaryFluxProperty, SegmentFluxesSumToZero) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double L = 0.5 + 4.0 * u(rng);
        const double H = 0.5 + 2.0 * u(rng);
        const auto m = make_rectangle_mesh(L, H, 2 + trial % 7, 2 + trial % 5,
                                           trial % 2 ? TriangulationPattern::Crossed : TriangulationPattern::Diagonal);
        MobilityField mob(m->triangle_count());
        for (auto& t : mob) {
            const double a = 0.1 + u(rng);
            const double c = 0.1 + u(rng);
            t = {a, 0.5 * std::sqrt(a * c) * (2.0 * u(rng) - 1.0), c};
        }
        const double g = u(rng);
        BoundarySpec bcs;
        bcs.pressure = {{"left", [g](Point x) { return g + x.y * x.y; }}, {"top", constant(-g)}};
        bcs.velocity = {{"right", [g](Point x) { return g * std::cos(x.y); }}, {"bottom", constant(-0.3)}};
        const SparseSystem s = assemble(m, mob, bcs);
        const auto sol = solve(s, {});
        double scale = 0.0;
        for (const auto& label : m->labels()) scale += std::abs(boundary_flux(s, sol.field, label));
        EXPECT_LE(std::abs(total_flux(s, sol.field)), 1e-10 * scale) << "trial " << trial;
    }
}

TEST(SolveProperty, Superposition) {
    const auto m = make_rectangle_mesh(2.0, 1.0, 10, 6);
    MobilityField mob(m->triangle_count());
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> k(0.5, 2.0);
    for (auto& t : mob) t = Tensor2::isotropic(k(rng));
    auto spec = [](SpatialFunction left, SpatialFunction top) {
        BoundarySpec bcs;
        bcs.pressure = {{"left", left}, {"right", constant(0.0)}};
        bcs.velocity = {{"top", top}, {"bottom", constant(0.0)}};
        return bcs;
    };
    const auto f1 = [](Point x) { return 1.0 + x.y; };
    const auto f2 = [](Point x) { return std::sin(3.0 * x.y); };
    const auto g1 = [](Point x) { return -0.5 * x.x; };
    const auto g2 = [](Point x) { return 0.2 * (x.x - 1.0); };
    const auto a = solve_darcy(m, mob, spec(f1, g1), {});
    const auto b = solve_darcy(m, mob, spec(f2, g2), {});
    const auto ab = solve_darcy(m, mob, spec([&](Point x) { return f1(x) + f2(x); }, [&](Point x) { return g1(x) + g2(x); }), {});
    for (std::size_t i = 0; i < m->node_count(); ++i) EXPECT_NEAR(ab.field[i], a.field[i] + b.field[i], 1e-10);
}

// On right-angled meshes with isotropic coefficients the stiffness matrix is
// an M-matrix, so inflow-only Neumann data cannot push the minimum inside.
TEST(SolveProperty, DiscreteMinimumPrinciple) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const auto m = make_reservoir_mesh({3.0, 1.0, 0.2, 12 + static_cast<std::size_t>(trial), 10, std::nullopt,
                                            trial % 2 ? TriangulationPattern::Crossed : TriangulationPattern::Diagonal});
        MobilityField mob(m->triangle_count());
        for (auto& t : mob) t = Tensor2::isotropic(std::exp(4.0 * u(rng) - 2.0));
        const double inflow = u(rng);
        BoundarySpec bcs;
        bcs.pressure = {{"well", constant(-1.0 - u(rng))}};
        bcs.velocity = {{"inlet", [inflow](Point x) { return -inflow * (1.0 + x.y); }}, {"wall", constant(0.0)}};
        const auto sol = solve_darcy(m, mob, bcs, {});
        const double bound = sol.field[m->label_nodes("well").front()];
        const double scale = std::max(std::abs(sol.field.max() - sol.field.min()), 1.0);
        EXPECT_GE(sol.field.min(), bound - 1e-10 * scale) << "trial " << trial;
    }
}

TEST(SolveProperty, ReciprocityWithinTenCgTol) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 12, 12);
    const MobilityField mob = uniform_mobility(*m);
    BoundarySpec b1;
    b1.pressure = {{"left", [](Point x) { return 1.0 + x.y; }}, {"right", constant(0.0)}};
    b1.velocity = {{"top", constant(-0.5)}, {"bottom", constant(0.0)}};
    BoundarySpec b2;
    b2.pressure = {{"left", constant(2.0)}, {"right", [](Point x) { return x.y * x.y; }}};
    b2.velocity = {{"top", constant(0.0)}, {"bottom", [](Point x) { return -x.x; }}};
    const SparseSystem s1 = assemble(m, mob, b1);
    const SparseSystem s2 = assemble(m, mob, b2);
    for (double tol : {1e-6, 1e-8, 1e-10, 1e-12}) {
        LinearSolveConfig config;
        config.cg_tol = tol;
        const auto u1 = solve(s1, config);
        const auto u2 = solve(s2, config);
        EXPECT_LE(reciprocity_residual_darcy({&u1.field, &s1}, {&u2.field, &s2}), 10.0 * tol) << tol;
    }
}

TEST(TransformedMobility, ScalesByReferenceViscosity) {
    const auto m = make_rectangle_mesh(1.0, 2.0, 2, 2);
    const FluidModel fluid{2.0, 0.5, 3.0};
    const auto K = PermeabilityField::uniform(*m, Tensor2{4.0, 1.0, 2.0});
    const auto xi = BodyForcePotential::gravity(1.5);
    const auto mob = transformed_mobility(*m, K, fluid, xi);
    for (std::size_t t = 0; t < m->triangle_count(); ++t) {
        const double y = m->centroid(t).y;
        const double mu = fluid.mu0 * std::exp(-fluid.beta * 1.5 * y / fluid.p0);
        EXPECT_NEAR(mob[t].xx, 4.0 / mu, 1e-13 * 4.0 / mu);
        EXPECT_NEAR(mob[t].xy, 1.0 / mu, 1e-13 / mu);
    }
}

TEST(SolveTransformedBvp, NoDrivingForceGivesReferenceState) {
    const FluidModel fluid;
    const auto m = make_rectangle_mesh(100.0, 1.0, 20, 2);
    const auto K = PermeabilityField::uniform(*m, 1e-12);
    BoundarySpec bcs = left_right(fluid.p0, fluid.p0);
    const SolveReport r = solve_transformed_bvp(m, fluid, {}, K, bcs);
    for (double p : r.p.values()) EXPECT_NEAR(p, fluid.p0, 1e-9 * fluid.p0);
    for (double s : r.v.magnitudes()) EXPECT_LT(s, 1e-20);
    EXPECT_TRUE(r.transform_valid);
}

TEST(SolveTransformedBvp, StripMatchesOdeOracle) {
    const FluidModel fluid{1.0, 1.0, 1.0};
    const auto m = make_rectangle_mesh(1.0, 0.2, 10, 2);
    const auto K = PermeabilityField::uniform(*m, 1.0);
    const SolveReport r = solve_transformed_bvp(m, fluid, {}, K, oracle::strip_bcs(0.5, 1.0));
    for (std::size_t i = 0; i < m->node_count(); ++i) {
        const double expected = oracle::strip_pressure_ode(m->nodes[i].x, 1.0, 1.0, fluid, 0.5, 1.0);
        EXPECT_NEAR(r.p[i], expected, 1e-9) << "x = " << m->nodes[i].x;
    }
    for (const Vec2& v : r.v.values()) {
        EXPECT_NEAR(v.x, 0.5, 1e-10);
        EXPECT_NEAR(v.y, 0.0, 1e-10);
    }
    EXPECT_NEAR(boundary_flux(r.system, r.P, "right"), 0.5 * 0.2, 1e-10);
}

TEST(SolveTransformedBvp, AboveThresholdReportsViolatingNodes) {
    const FluidModel fluid{1.0, 1.0, 1.0};
    const auto m = make_rectangle_mesh(1.0, 0.2, 7, 1);
    const auto K = PermeabilityField::uniform(*m, 1.0);
    // P(x) = -1 + 2 (1 - x) >= 0 exactly for x <= 1/2; no node sits on 1/2.
    try {
        (void)solve_transformed_bvp(m, fluid, {}, K, oracle::strip_bcs(2.0, 1.0));
        ADD_FAILURE() << "expected NonExistence";
    } catch (const NonExistenceError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonExistence);
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < m->node_count(); ++i)
            if (m->nodes[i].x < 0.5) expected.push_back(i);
        auto nodes = e.nodes();
        std::sort(nodes.begin(), nodes.end());
        EXPECT_EQ(nodes, expected);
    }
}

TEST(SolveTransformedBvp, ZeroBetaIsDegenerate) {
    const auto m = make_rectangle_mesh(1.0, 1.0, 2, 2);
    const FluidModel fluid{1.0, 0.0, 1.0};
    expect_error(ErrorKind::Degenerate, [&] {
        (void)solve_transformed_bvp(m, fluid, {}, PermeabilityField::uniform(*m, 1.0), left_right(1.0, 2.0));
    });
}

TEST(SolveTransformedBvp, GravityGivesHydrostaticColumn) {
    const FluidModel fluid;
    const double weight = 8.5e3;  // rho g [Pa/m]
    const auto m = make_rectangle_mesh(2.0, 10.0, 2, 10);
    BoundarySpec bcs = closed_box();
    bcs.velocity.erase(bcs.velocity.begin() + 2);  // top
    bcs.pressure = {{"top", constant(fluid.p0)}};
    const SolveReport r =
        solve_transformed_bvp(m, fluid, BodyForcePotential::gravity(weight), PermeabilityField::uniform(*m, 1e-12), bcs);
    for (std::size_t i = 0; i < m->node_count(); ++i) {
        const double expected = fluid.p0 + weight * (10.0 - m->nodes[i].y);
        EXPECT_NEAR(r.p[i], expected, 1e-9 * expected);
    }
    for (double s : r.v.magnitudes()) EXPECT_LT(s, 1e-18);
}

TEST(SolveTransformedBvp, ReportListsSummaryKeys) {
    const FluidModel fluid;
    const auto m = make_reservoir_mesh({10.0, 3.0, 0.4, 10, 6});
    const SolveReport r =
        solve_transformed_bvp(m, fluid, {}, PermeabilityField::uniform(*m, 1e-12), reservoir_bcs(1e6, fluid.p0));
    std::ostringstream os;
    write_report(os, r);
    const std::string text = os.str();
    for (const char* key : {"cg_iterations:", "cg_relative_residual:", "total_seconds:", "p_min:", "p_max:",
                            "speed_max:", "transform_valid: true"})
        EXPECT_NE(text.find(key), std::string::npos) << key;
    EXPECT_NEAR(r.p.max(), 1e6, 1e-6);
    EXPECT_NEAR(r.p.min(), fluid.p0, 1e-6);
}
