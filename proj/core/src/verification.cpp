#include "poroflow/verification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "poroflow/errors.hpp"

namespace poroflow {

namespace {

enum class Sign { NonPositive, NonNegative };

// Prescribed value per pressure node, first edge wins (as in assembly).
std::map<std::size_t, double> pressure_node_data(const Mesh& mesh, const BoundarySpec& bcs) {
    std::map<std::size_t, double> out;
    for (const auto& e : mesh.boundary_edges) {
        const auto* seg = bcs.find_pressure(e.label);
        if (seg == nullptr) continue;
        out.try_emplace(e.a, seg->pressure(mesh.nodes[e.a]));
        out.try_emplace(e.b, seg->pressure(mesh.nodes[e.b]));
    }
    return out;
}

Point midpoint(const Point& a, const Point& b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

// Calls f(edge, value) for v_n sampled at both ends and the midpoint of every
// velocity edge.
void for_each_velocity_sample(const Mesh& mesh, const BoundarySpec& bcs,
                              const std::function<void(const BoundaryEdge&, double)>& f) {
    for (const auto& e : mesh.boundary_edges) {
        const auto* seg = bcs.find_velocity(e.label);
        if (seg == nullptr) continue;
        const Point& a = mesh.nodes[e.a];
        const Point& b = mesh.nodes[e.b];
        for (const Point& x : {a, midpoint(a, b), b}) f(e, seg->normal_velocity(x));
    }
}

void require_velocity_sign(const Mesh& mesh, const BoundarySpec& bcs, Sign sign, const char* what) {
    for_each_velocity_sample(mesh, bcs, [&](const BoundaryEdge& e, double vn) {
        const bool ok = sign == Sign::NonPositive ? vn <= 0.0 : vn >= 0.0;
        if (!ok) {
            std::ostringstream os;
            os << what << " needs v_n " << (sign == Sign::NonPositive ? "<= 0" : ">= 0") << " on velocity segments; '"
               << e.label << "' has " << vn;
            throw Error(ErrorKind::NotApplicable, os.str());
        }
    });
}

double default_tolerance(const ScalarField& field) { return 1e-10 * (field.max() - field.min()); }

PrincipleReport check_principle(const ScalarField& field, const BoundarySpec& bcs, std::optional<double> tol,
                                bool minimum) {
    const Mesh& mesh = field.mesh();
    bcs.validate(mesh);
    const char* what = minimum ? "minimum principle" : "maximum principle";
    if (bcs.pressure.empty()) {
        throw Error(ErrorKind::NotApplicable, std::string(what) + " needs at least one pressure segment");
    }
    require_velocity_sign(mesh, bcs, minimum ? Sign::NonPositive : Sign::NonNegative, what);

    const auto data = pressure_node_data(mesh, bcs);
    PrincipleReport report;
    report.tolerance_used = tol.value_or(default_tolerance(field));
    if (!(report.tolerance_used >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be non-negative");

    const double sign = minimum ? 1.0 : -1.0;
    report.bound = sign * std::numeric_limits<double>::infinity();
    for (const auto& [node, value] : data) {
        report.bound = minimum ? std::min(report.bound, value) : std::max(report.bound, value);
    }
    report.worst_interior = report.bound;
    bool any_interior = false;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double v = field[i];
        if (!data.contains(i)) {
            report.worst_interior =
                !any_interior ? v : (minimum ? std::min(report.worst_interior, v) : std::max(report.worst_interior, v));
            any_interior = true;
        }
        if (sign * (v - report.bound) < -report.tolerance_used) report.violation_nodes.push_back(i);
    }
    report.satisfied = report.violation_nodes.empty();
    return report;
}

// Gauss-Legendre rules on [0, 1] with 1, 2 and 3 points.
constexpr std::array<std::array<double, 3>, 3> kGaussPoints{{
    {0.5, 0.0, 0.0},
    {0.21132486540518713, 0.78867513459481287, 0.0},
    {0.11270166537925831, 0.5, 0.88729833462074169},
}};
constexpr std::array<std::array<double, 3>, 3> kGaussWeights{{
    {1.0, 0.0, 0.0},
    {0.5, 0.5, 0.0},
    {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0},
}};

void require_same_partition(const Mesh& m1, const Mesh& m2, const BoundarySpec& b1, const BoundarySpec& b2) {
    if (&m1 != &m2 && (m1.node_count() != m2.node_count() || m1.triangle_count() != m2.triangle_count())) {
        throw Error(ErrorKind::PartitionMismatch, "states live on different meshes");
    }
    if (!b1.same_partition(b2)) {
        throw Error(ErrorKind::PartitionMismatch, "boundary partitions differ between the two states");
    }
}

// One side of the reciprocity identity:
//   int_v v_n[b] F[a] - int_p Fp[b] (v[a].n)
// where F[a] is the field of state a on velocity segments (sampled along
// each edge by `field_a`), Fp[b] the prescribed data of b at pressure nodes and the flux
// of a comes from its nodal reactions. `shift` is subtracted from every
// field value before summing: the difference of the two sides is invariant
// under it (each state carries zero net flux) and the shifted sums avoid
// cancellation. `value` adds the shift back for the unshifted side.
using EdgeSampler = std::function<double(const BoundaryEdge&, double, Point)>;

struct Side {
    double shifted = 0.0;
    double value = 0.0;
};

Side reciprocity_side(const Mesh& mesh, const BoundarySpec& bcs_b, const EdgeSampler& field_a,
                      const std::map<std::size_t, double>& prescribed_b, const Eigen::VectorXd& reactions_a,
                      double shift, int qp) {
    const auto& xs = kGaussPoints[static_cast<std::size_t>(qp - 1)];
    const auto& ws = kGaussWeights[static_cast<std::size_t>(qp - 1)];
    double velocity_term = 0.0;
    double velocity_flux = 0.0;
    for (const auto& e : mesh.boundary_edges) {
        const auto* seg = bcs_b.find_velocity(e.label);
        if (seg == nullptr) continue;
        const Point& a = mesh.nodes[e.a];
        const Point& b = mesh.nodes[e.b];
        const double len = mesh.edge_length(e);
        for (int q = 0; q < qp; ++q) {
            const double s = xs[static_cast<std::size_t>(q)];
            const Point x{a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
            const double wv = ws[static_cast<std::size_t>(q)] * len * seg->normal_velocity(x);
            velocity_term += wv * (field_a(e, s, x) - shift);
            velocity_flux += wv;
        }
    }
    double pressure_term = 0.0;
    double pressure_flux = 0.0;
    for (const auto& [node, value] : prescribed_b) {
        const double r = reactions_a[static_cast<Eigen::Index>(node)];
        pressure_term += (value - shift) * r;
        pressure_flux += r;
    }
    const double shifted = velocity_term - pressure_term;
    return {shifted, shifted + shift * (velocity_flux - pressure_flux)};
}

ReciprocityTerms make_terms(const Side& lhs, const Side& rhs) {
    const double denom = std::max(std::abs(lhs.value), std::abs(rhs.value));
    const double gap = std::abs(lhs.shifted - rhs.shifted);
    return {lhs.value, rhs.value, denom == 0.0 ? (gap == 0.0 ? 0.0 : 1.0) : gap / denom};
}

// Nodal reactions restricted to pressure nodes.
Eigen::VectorXd pressure_reactions(const SolvedState& state) {
    Eigen::VectorXd r = nodal_reactions(*state.system, *state.field);
    for (std::size_t i = 0; i < state.system->dirichlet.size(); ++i) {
        if (!state.system->dirichlet[i]) r[static_cast<Eigen::Index>(i)] = 0.0;
    }
    return r;
}

double mean_of(const std::map<std::size_t, double>& a, const std::map<std::size_t, double>& b) {
    double sum = 0.0;
    for (const auto& [n, v] : a) sum += v;
    for (const auto& [n, v] : b) sum += v;
    const auto count = a.size() + b.size();
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace

CompatibilityResult compatibility_check(const Mesh& mesh, const BoundarySpec& bcs) {
    bcs.validate(mesh);
    CompatibilityResult result;
    if (!bcs.pressure.empty()) return result;
    double absolute = 0.0;
    for (const auto& e : mesh.boundary_edges) {
        const auto* seg = bcs.find_velocity(e.label);
        const Point& a = mesh.nodes[e.a];
        const Point& b = mesh.nodes[e.b];
        const double len = mesh.edge_length(e);
        for (int q = 0; q < 2; ++q) {
            const double s = kGaussPoints[1][static_cast<std::size_t>(q)];
            const double vn = seg->normal_velocity({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
            result.net_flux += 0.5 * len * vn;
            absolute += 0.5 * len * std::abs(vn);
        }
    }
    result.compatible = std::abs(result.net_flux) <= 1e-12 * absolute;
    return result;
}

PrincipleReport check_min_principle(const ScalarField& field, const BoundarySpec& bcs, std::optional<double> tol) {
    return check_principle(field, bcs, tol, true);
}

PrincipleReport check_max_principle(const ScalarField& field, const BoundarySpec& bcs, std::optional<double> tol) {
    return check_principle(field, bcs, tol, false);
}

ComparisonReport check_comparison(const ScalarField& sol1, const ScalarField& sol2, const BoundarySpec& bcs1,
                                  const BoundarySpec& bcs2, std::optional<double> tol) {
    const Mesh& mesh = sol1.mesh();
    require_same_partition(mesh, sol2.mesh(), bcs1, bcs2);
    bcs1.validate(mesh);

    for (const auto& e : mesh.boundary_edges) {
        const auto* s1 = bcs1.find_velocity(e.label);
        if (s1 == nullptr) continue;
        const auto* s2 = bcs2.find_velocity(e.label);
        const Point& a = mesh.nodes[e.a];
        const Point& b = mesh.nodes[e.b];
        for (const Point& x : {a, midpoint(a, b), b}) {
            if (s1->normal_velocity(x) < s2->normal_velocity(x)) {
                throw Error(ErrorKind::NotApplicable,
                            "comparison needs v_n of the first state >= v_n of the second on '" + e.label + "'");
            }
        }
    }
    const auto d1 = pressure_node_data(mesh, bcs1);
    const auto d2 = pressure_node_data(mesh, bcs2);
    for (const auto& [node, v1] : d1) {
        if (d2.at(node) < v1) {
            std::ostringstream os;
            os << "comparison needs prescribed pressure of the second state >= the first; node " << node << " has "
               << d2.at(node) << " < " << v1;
            throw Error(ErrorKind::NotApplicable, os.str());
        }
    }

    ComparisonReport report;
    report.tolerance_used = tol.value_or(std::max(default_tolerance(sol1), default_tolerance(sol2)));
    for (std::size_t i = 0; i < sol1.size(); ++i) {
        if (sol2[i] < sol1[i] - report.tolerance_used) report.violation_nodes.push_back(i);
    }
    report.ordered = report.violation_nodes.empty();
    return report;
}

ReciprocityTerms reciprocity_terms_darcy(const SolvedState& sol1, const SolvedState& sol2) {
    const Mesh& mesh = *sol1.system->mesh;
    require_same_partition(mesh, *sol2.system->mesh, sol1.system->bcs, sol2.system->bcs);
    const auto d1 = pressure_node_data(mesh, sol1.system->bcs);
    const auto d2 = pressure_node_data(mesh, sol2.system->bcs);
    const double shift = mean_of(d1, d2);
    const Eigen::VectorXd r1 = pressure_reactions(sol1);
    const Eigen::VectorXd r2 = pressure_reactions(sol2);
    auto sampler = [](const ScalarField& f) -> EdgeSampler {
        return [&f](const BoundaryEdge& e, double s, Point) { return (1.0 - s) * f[e.a] + s * f[e.b]; };
    };
    const Side lhs = reciprocity_side(mesh, sol2.system->bcs, sampler(*sol1.field), d2, r1, shift, 2);
    const Side rhs = reciprocity_side(mesh, sol1.system->bcs, sampler(*sol2.field), d1, r2, shift, 2);
    return make_terms(lhs, rhs);
}

double reciprocity_residual_darcy(const SolvedState& sol1, const SolvedState& sol2) {
    return reciprocity_terms_darcy(sol1, sol2).residual;
}

ReciprocityTerms reciprocity_terms_barus(const ScalarField& p1, const SolvedState& flux1, const ScalarField& p2,
                                         const SolvedState& flux2, const FluidModel& fluid,
                                         const BodyForcePotential& xi, int quadrature_points) {
    fluid.validate();
    if (fluid.beta == 0.0) {
        throw Error(ErrorKind::Degenerate, "Barus reciprocity needs beta > 0; use the Darcy residual");
    }
    if (quadrature_points < 1 || quadrature_points > 3) {
        throw Error(ErrorKind::InvalidArgument, "quadrature_points must be 1, 2 or 3");
    }
    const Mesh& mesh = p1.mesh();
    const SparseSystem& s1 = *flux1.system;
    const SparseSystem& s2 = *flux2.system;
    require_same_partition(mesh, p2.mesh(), s1.bcs, s2.bcs);

    auto E = [&fluid](double ptilde) { return std::exp(-fluid.beta * (ptilde / fluid.p0 - 1.0)); };
    // Prescribed physical pressures come from the caller's fields at pressure
    // nodes; the flux systems may carry transformed data.
    auto prescribed = [&](const ScalarField& p, const SparseSystem& s) {
        std::map<std::size_t, double> out;
        for (std::size_t i = 0; i < s.dirichlet.size(); ++i) {
            if (s.dirichlet[i]) out.emplace(i, E(p[i] + xi(mesh.nodes[i])));
        }
        return out;
    };
    const auto e1 = prescribed(p1, s1);
    const auto e2 = prescribed(p2, s2);
    const double shift = mean_of(e1, e2);
    auto sampler = [&](const ScalarField& p) -> EdgeSampler {
        return [&p, &E, &xi](const BoundaryEdge& e, double s, Point x) {
            return E((1.0 - s) * p[e.a] + s * p[e.b] + xi(x));
        };
    };
    const Eigen::VectorXd r1 = pressure_reactions(flux1);
    const Eigen::VectorXd r2 = pressure_reactions(flux2);
    const Side lhs = reciprocity_side(mesh, s2.bcs, sampler(p1), e2, r1, shift, quadrature_points);
    const Side rhs = reciprocity_side(mesh, s1.bcs, sampler(p2), e1, r2, shift, quadrature_points);
    return make_terms(lhs, rhs);
}

double reciprocity_residual_barus(const ScalarField& p1, const SolvedState& flux1, const ScalarField& p2,
                                  const SolvedState& flux2, const FluidModel& fluid, const BodyForcePotential& xi,
                                  int quadrature_points) {
    return reciprocity_terms_barus(p1, flux1, p2, flux2, fluid, xi, quadrature_points).residual;
}

double CeilingFluxModel::asymptote() const {
    const double a = -fluid.beta * (p_atm / fluid.p0 - 1.0);
    return C * fluid.transform_scale() * std::exp(a);
}

CeilingFluxModel calibrate_ceiling_flux(const MeshPtr& mesh, const FluidModel& fluid, const PermeabilityField& K,
                                        double p_atm, double p_inj, const LinearSolveConfig& config,
                                        const std::string& well_label) {
    if (p_inj == p_atm) {
        throw Error(ErrorKind::InvalidArgument, "calibration needs p_inj != p_atm (the transformed drop is zero)");
    }
    CeilingFluxModel model;
    model.fluid = fluid;
    model.p_atm = p_atm;
    model.calibration_p_inj = p_inj;

    const SolveReport report = solve_transformed_bvp(mesh, fluid, {}, K, reservoir_bcs(p_inj, p_atm), config);
    model.calibration_flux = boundary_flux(report.system, report.P, well_label);
    model.C = 1.0;
    model.C = model.calibration_flux / predict_flux(model, p_inj);
    if (!std::isfinite(model.C)) throw Error(ErrorKind::Overflow, "calibration constant is not finite");
    return model;
}

double predict_flux(const CeilingFluxModel& model, double p_inj) {
    const FluidModel& f = model.fluid;
    const double a = -f.beta * (model.p_atm / f.p0 - 1.0);
    const double b = -f.beta * (p_inj / f.p0 - 1.0);
    // P(p_inj) - P(p_atm) = (p0/beta)(e^a - e^b) = -(p0/beta) e^a expm1(b - a)
    return -model.C * f.transform_scale() * std::exp(a) * std::expm1(b - a) + 0.0;
}

double predict_flux_derivative(const CeilingFluxModel& model, double p_inj) {
    const FluidModel& f = model.fluid;
    return model.C * std::exp(-f.beta * (p_inj / f.p0 - 1.0));
}

}  // namespace poroflow
