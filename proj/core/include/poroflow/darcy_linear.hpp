#pragma once

// Pressure-primal P1 Galerkin solver for the linear Darcy problem
//
//   -div[ M grad P ] = 0        in the domain
//   P = P_p                     on pressure segments
//   -M grad P . n = v_n         on velocity segments
//
// with a per-triangle mobility tensor M. The same kernel serves the
// Hopf-Cole transformed problem (M = K / mu~0), the constant-viscosity
// problem and each Picard step of the direct Barus solve.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "poroflow/geometry.hpp"
#include "poroflow/transform.hpp"

namespace poroflow {

enum class Preconditioner { None, Diagonal };

struct LinearSolveConfig {
    double cg_tol = 1e-12;
    /// Defaults to 20 x (number of unknowns).
    std::optional<std::size_t> cg_max_iter;
    Preconditioner preconditioner = Preconditioner::Diagonal;

    void validate() const;
};

/// One symmetric positive-definite tensor per triangle [m^2/(Pa s)].
using MobilityField = std::vector<Tensor2>;

/// mobility_t = K_t / mu~0(xi at the centroid of t).
MobilityField transformed_mobility(const Mesh& mesh, const PermeabilityField& K, const FluidModel& fluid,
                                   const BodyForcePotential& xi);

struct SparseSystem {
    MeshPtr mesh;
    /// Unconstrained P1 stiffness matrix over all nodes.
    Eigen::SparseMatrix<double, Eigen::RowMajor> stiffness;
    /// -int_{Gamma_v} phi_i v_n, the Neumann contribution to the right-hand side.
    Eigen::VectorXd neumann_load;
    /// Prescribed value per node, empty for free nodes.
    std::vector<std::optional<double>> dirichlet;
    /// Constant subtracted from the Dirichlet data before elimination; the
    /// reduced system is solved for P - offset.
    double offset = 0.0;
    std::vector<std::size_t> free_nodes;
    /// Reduced system over free nodes after symmetric elimination.
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
    Eigen::VectorXd rhs;
    /// int_{Gamma_v} v_n and int_{Gamma_v} |v_n| (the latter sets the
    /// compatibility scale).
    double net_prescribed_flux = 0.0;
    double abs_prescribed_flux = 0.0;
    /// Copy of the boundary specification used for assembly.
    BoundarySpec bcs;

    [[nodiscard]] bool has_dirichlet() const noexcept { return free_nodes.size() != dirichlet.size(); }
};

/// Assemble the P1 system. Throws SingularMobility when a tensor is not SPD.
SparseSystem assemble(const MeshPtr& mesh, const MobilityField& mobility, const BoundarySpec& bcs);

struct LinearSolution {
    ScalarField field;
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

/// Preconditioned CG on the reduced system. Throws NoConvergence when the
/// iteration limit is reached, IncompatibleNeumann for a pure-Neumann system
/// whose prescribed fluxes do not balance.
LinearSolution solve(const SparseSystem& system, const LinearSolveConfig& config,
                     const ScalarField* initial_guess = nullptr);

/// Assemble + solve.
LinearSolution solve_darcy(const MeshPtr& mesh, const MobilityField& mobility, const BoundarySpec& bcs,
                           const LinearSolveConfig& config);

/// Per-triangle v = -M grad P.
VectorField recover_velocity(const ScalarField& P, const MobilityField& mobility);

/// Consistent nodal reactions r_i = int_{Gamma_p} phi_i v.n, non-zero only on
/// pressure nodes (free-node entries hold the algebraic residual).
Eigen::VectorXd nodal_reactions(const SparseSystem& system, const ScalarField& P);

/// Outflow-positive flux through segment `label`: the summed reactions on a
/// pressure segment, the integral of the prescribed data on a velocity
/// segment. Throws UnknownLabel.
double boundary_flux(const SparseSystem& system, const ScalarField& P, const std::string& label);

/// Convenience overload that assembles first.
double boundary_flux(const ScalarField& P, const MobilityField& mobility, const BoundarySpec& bcs,
                     const std::string& label);

/// Edge-wise integral of the recovered (piecewise constant) velocity, for
/// cross-checking the consistent flux.
double boundary_flux_direct(const ScalarField& P, const MobilityField& mobility, const std::string& label);

struct SolveReport {
    ScalarField p;       // physical pressure
    ScalarField P;       // transformed variable
    VectorField v;       // per-triangle Darcy velocity
    SparseSystem system; // transformed linear system (for fluxes)
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    double assemble_seconds = 0.0;
    double solve_seconds = 0.0;
    double total_seconds = 0.0;
    bool transform_valid = true;
};

/// The three-step Hopf-Cole pipeline: map pressure data to P, solve the
/// linear problem with mobility K / mu~0, map P back to p.
/// Throws Degenerate for beta = 0 and NonExistenceError listing every node
/// with P >= 0.
SolveReport solve_transformed_bvp(const MeshPtr& mesh, const FluidModel& fluid, const BodyForcePotential& xi,
                                  const PermeabilityField& K, const BoundarySpec& bcs,
                                  const LinearSolveConfig& config = {});

/// Plain-text summary: iterations, residual, timings, field ranges, flags.
void write_report(std::ostream& os, const SolveReport& report);

}  // namespace poroflow
