#pragma once

// Direct Picard solve of the nonlinear Barus problem
//
//   v = -(K / mu(p)) grad(p + xi),   div v = 0
//
// Each step freezes mu at the previous iterate (per triangle, at the
// centroid) and reuses the linear Darcy kernel for p~ = p + xi.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "poroflow/darcy_linear.hpp"
#include "poroflow/geometry.hpp"
#include "poroflow/transform.hpp"

namespace poroflow {

struct PicardConfig {
    /// Relative update tolerance ||p(n+1) - p(n)|| / ||p(n+1)||.
    double tol = 1e-10;
    std::size_t max_iter = 200;
    /// Initial under-relaxation factor in (0, 1]; halved on divergence.
    double relaxation = 1.0;
    /// Starting field; p0 everywhere when unset.
    std::optional<ScalarField> initial_pressure;
    LinearSolveConfig linear;

    void validate() const;
};

struct PicardReport {
    ScalarField p;
    VectorField v;
    std::size_t iterations = 0;
    std::vector<double> update_history;
    bool converged = false;
    double wall_time = 0.0;
    /// Total CG iterations over all Picard steps.
    std::size_t linear_iterations = 0;
    /// Relaxation factor in use when the loop stopped.
    double relaxation = 1.0;
    /// Linear system assembled at the returned field; its reactions against
    /// p + xi give the consistent boundary fluxes.
    SparseSystem system;
};

/// Outflow-positive consistent flux of a Picard solution through `label`.
double picard_flux(const PicardReport& report, const BodyForcePotential& xi, const std::string& label);

/// Throws NoConvergence when the update norm grows for 3 consecutive
/// iterations after 4 relaxation halvings; returns converged = false when
/// max_iter is exhausted.
PicardReport picard_solve(const MeshPtr& mesh, const FluidModel& fluid, const BodyForcePotential& xi,
                          const PermeabilityField& K, const BoundarySpec& bcs, const PicardConfig& config = {});

/// Per-triangle K / mu(p) with p taken at the centroid.
MobilityField barus_mobility(const ScalarField& p, const FluidModel& fluid, const PermeabilityField& K);

/// ||b - A(p) p~|| / max(||b||, ||A(p) p~||) over free nodes, with A(p)
/// assembled at the given field.
double nonlinear_residual(const ScalarField& p, const MeshPtr& mesh, const FluidModel& fluid,
                          const BodyForcePotential& xi, const PermeabilityField& K, const BoundarySpec& bcs);

/// `iteration,update` rows with a header.
void write_history_csv(std::ostream& os, const PicardReport& report);

}  // namespace poroflow
