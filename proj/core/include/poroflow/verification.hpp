#pragma once

// Checks of the analytical properties on computed fields: compatibility of
// pure-velocity data, nodal min/max and comparison principles, reciprocity
// residuals and the ceiling-flux law.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "poroflow/darcy_linear.hpp"
#include "poroflow/geometry.hpp"
#include "poroflow/transform.hpp"

namespace poroflow {

struct CompatibilityResult {
    bool compatible = true;
    double net_flux = 0.0;
};

/// With no pressure segment, the prescribed normal velocity must integrate to
/// zero (|net| <= 1e-12 int |v_n|). Always compatible otherwise.
CompatibilityResult compatibility_check(const Mesh& mesh, const BoundarySpec& bcs);

struct PrincipleReport {
    bool satisfied = true;
    /// Extremal prescribed value over pressure nodes.
    double bound = 0.0;
    /// Extremal value over nodes not on a pressure segment.
    double worst_interior = 0.0;
    std::vector<std::size_t> violation_nodes;
    double tolerance_used = 0.0;
};

/// Nodal scan: satisfied iff min(field) >= min over pressure nodes of the
/// prescribed data - tol. Requires v_n <= 0 on every velocity segment and at
/// least one pressure segment; throws NotApplicable otherwise.
/// `bcs` must carry data in the same variable as `field`.
/// Default tol is 1e-10 x (max - min of field).
PrincipleReport check_min_principle(const ScalarField& field, const BoundarySpec& bcs,
                                    std::optional<double> tol = std::nullopt);

/// Mirror of check_min_principle; requires v_n >= 0 on velocity segments.
PrincipleReport check_max_principle(const ScalarField& field, const BoundarySpec& bcs,
                                    std::optional<double> tol = std::nullopt);

struct ComparisonReport {
    bool ordered = true;
    std::vector<std::size_t> violation_nodes;
    double tolerance_used = 0.0;
};

/// If v_n1 >= v_n2 on velocity segments and p2 >= p1 on pressure segments then
/// sol2 >= sol1 - tol at every node. Throws NotApplicable when the boundary
/// data are not ordered that way, PartitionMismatch when the partitions differ.
ComparisonReport check_comparison(const ScalarField& sol1, const ScalarField& sol2, const BoundarySpec& bcs1,
                                  const BoundarySpec& bcs2, std::optional<double> tol = std::nullopt);

/// A solved linear state: field and the system whose reactions give v.n.
struct SolvedState {
    const ScalarField* field;
    const SparseSystem* system;
};

struct ReciprocityTerms {
    double lhs = 0.0;
    double rhs = 0.0;
    /// |lhs - rhs| / max(|lhs|, |rhs|), 0 when both vanish.
    double residual = 0.0;
};

/// Both sides of the Darcy reciprocity identity (see below).
ReciprocityTerms reciprocity_terms_darcy(const SolvedState& sol1, const SolvedState& sol2);

/// |LHS - RHS| / max(|LHS|, |RHS|) of
///   int_v v_n2 P1 - int_p P2 v1.n  =  int_v v_n1 P2 - int_p P1 v2.n
/// with consistent nodal fluxes. Throws PartitionMismatch.
double reciprocity_residual_darcy(const SolvedState& sol1, const SolvedState& sol2);

/// Same identity with every P replaced by exp[-beta (p~/p0 - 1)] of the
/// physical pressure p (plus xi). Fluxes come from `flux1`/`flux2`, the
/// linear states that produced the velocities (the transformed system for a
/// Hopf-Cole solve, the last Picard system otherwise). Velocity-segment terms
/// use Gauss quadrature with `quadrature_points` in {1, 2, 3}.
/// Throws PartitionMismatch, Degenerate for beta = 0.
ReciprocityTerms reciprocity_terms_barus(const ScalarField& p1, const SolvedState& flux1, const ScalarField& p2,
                                         const SolvedState& flux2, const FluidModel& fluid,
                                         const BodyForcePotential& xi = {}, int quadrature_points = 2);

double reciprocity_residual_barus(const ScalarField& p1, const SolvedState& flux1, const ScalarField& p2,
                                  const SolvedState& flux2, const FluidModel& fluid,
                                  const BodyForcePotential& xi = {}, int quadrature_points = 2);

struct CeilingFluxModel {
    /// Q / (P_inj - P_atm) [m^3/(s Pa) per unit width].
    double C = 0.0;
    FluidModel fluid;
    double p_atm = 101325.0;
    double calibration_p_inj = 0.0;
    double calibration_flux = 0.0;

    /// Limit of predict_flux as p_inj grows, C p_atm / beta for p_atm = p0.
    [[nodiscard]] double asymptote() const;
};

/// One Hopf-Cole solve of the reservoir problem at `p_inj` (p_atm on the
/// well, no flow elsewhere); C from the consistent outflow on `well_label`.
/// Throws InvalidArgument when p_inj == p_atm.
CeilingFluxModel calibrate_ceiling_flux(const MeshPtr& mesh, const FluidModel& fluid, const PermeabilityField& K,
                                        double p_atm, double p_inj, const LinearSolveConfig& config = {},
                                        const std::string& well_label = "well");

/// Q = C (P(p_inj) - P(p_atm)), evaluated without cancellation so Q(p_atm) = 0.
double predict_flux(const CeilingFluxModel& model, double p_inj);

/// dQ/dp_inj = C exp[-beta (p_inj/p0 - 1)].
double predict_flux_derivative(const CeilingFluxModel& model, double p_inj);

}  // namespace poroflow
