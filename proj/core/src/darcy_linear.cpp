#include "poroflow/darcy_linear.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include <Eigen/IterativeLinearSolvers>

#include "poroflow/errors.hpp"

namespace poroflow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Two-point Gauss rule on [0, 1].
constexpr double kGaussLo = 0.21132486540518713;  // (1 - 1/sqrt(3)) / 2
constexpr double kGaussHi = 0.78867513459481287;  // (1 + 1/sqrt(3)) / 2

Point lerp(const Point& a, const Point& b, double s) { return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)}; }

// Eigen stops on its recurrence residual, which drifts from the true one near
// 1e-12; restart from the current iterate until the true residual meets tol.
template <typename Preconditioner>
Eigen::ComputationInfo run_cg(const SparseSystem& system, Eigen::VectorXd& u, double tol, std::size_t max_iter,
                              std::size_t& iterations) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double, Eigen::RowMajor>, Eigen::Lower | Eigen::Upper,
                             Preconditioner>
        cg;
    cg.compute(system.matrix);
    cg.setTolerance(tol);
    const double bnorm = system.rhs.norm();
    iterations = 0;
    Eigen::ComputationInfo info = Eigen::Success;
    for (int restart = 0; restart < 4 && iterations < max_iter; ++restart) {
        cg.setMaxIterations(static_cast<Eigen::Index>(max_iter - iterations));
        u = cg.solveWithGuess(system.rhs, u);
        iterations += static_cast<std::size_t>(cg.iterations());
        info = cg.info();
        if (info != Eigen::Success) break;
        if ((system.rhs - system.matrix * u).norm() <= tol * bnorm) break;
    }
    return info;
}

}  // namespace

void LinearSolveConfig::validate() const {
    if (!(cg_tol > 0.0 && cg_tol < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "cg_tol must lie in (0, 1)");
    }
    if (cg_max_iter && *cg_max_iter < 1) {
        throw Error(ErrorKind::InvalidArgument, "cg_max_iter must be at least 1");
    }
}

MobilityField transformed_mobility(const Mesh& mesh, const PermeabilityField& K, const FluidModel& fluid,
                                   const BodyForcePotential& xi) {
    if (K.size() != mesh.triangle_count()) {
        throw Error(ErrorKind::InvalidArgument, "permeability field does not match the mesh");
    }
    MobilityField mobility(mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const double mu = reference_viscosity(xi(mesh.centroid(t)), fluid);
        mobility[t] = K[t].scaled(1.0 / mu);
    }
    return mobility;
}

SparseSystem assemble(const MeshPtr& mesh_ptr, const MobilityField& mobility, const BoundarySpec& bcs) {
    if (!mesh_ptr) throw Error(ErrorKind::InvalidArgument, "assemble: null mesh");
    const Mesh& mesh = *mesh_ptr;
    if (mobility.size() != mesh.triangle_count()) {
        throw Error(ErrorKind::InvalidArgument, "assemble: mobility field does not match the mesh");
    }
    bcs.validate(mesh);

    const auto n = static_cast<Eigen::Index>(mesh.node_count());
    SparseSystem sys;
    sys.mesh = mesh_ptr;
    sys.bcs = bcs;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(9 * mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const Tensor2& M = mobility[t];
        if (!M.positive_definite()) {
            std::ostringstream os;
            os << "mobility on triangle " << t << " is not symmetric positive definite";
            throw Error(ErrorKind::SingularMobility, os.str());
        }
        const double area = mesh.signed_area(t);
        const auto grads = mesh.shape_gradients(t);
        const auto& tri = mesh.triangles[t];
        for (std::size_t a = 0; a < 3; ++a) {
            const Vec2 Mg = M.apply(grads[a]);
            for (std::size_t b = 0; b < 3; ++b) {
                const double value = area * (Mg.x * grads[b].x + Mg.y * grads[b].y);
                triplets.emplace_back(static_cast<Eigen::Index>(tri[a]), static_cast<Eigen::Index>(tri[b]), value);
            }
        }
    }
    sys.stiffness.resize(n, n);
    sys.stiffness.setFromTriplets(triplets.begin(), triplets.end());

    sys.neumann_load = Eigen::VectorXd::Zero(n);
    sys.dirichlet.assign(mesh.node_count(), std::nullopt);
    for (const auto& e : mesh.boundary_edges) {
        const Point& a = mesh.nodes[e.a];
        const Point& b = mesh.nodes[e.b];
        if (const auto* seg = bcs.find_pressure(e.label)) {
            if (!sys.dirichlet[e.a]) sys.dirichlet[e.a] = seg->pressure(a);
            if (!sys.dirichlet[e.b]) sys.dirichlet[e.b] = seg->pressure(b);
        } else if (const auto* vseg = bcs.find_velocity(e.label)) {
            const double len = mesh.edge_length(e);
            const double v_lo = vseg->normal_velocity(lerp(a, b, kGaussLo));
            const double v_hi = vseg->normal_velocity(lerp(a, b, kGaussHi));
            sys.neumann_load[static_cast<Eigen::Index>(e.a)] -=
                0.5 * len * (v_lo * (1.0 - kGaussLo) + v_hi * (1.0 - kGaussHi));
            sys.neumann_load[static_cast<Eigen::Index>(e.b)] -= 0.5 * len * (v_lo * kGaussLo + v_hi * kGaussHi);
            sys.net_prescribed_flux += 0.5 * len * (v_lo + v_hi);
            sys.abs_prescribed_flux += 0.5 * len * (std::abs(v_lo) + std::abs(v_hi));
        }
    }

    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& d : sys.dirichlet) {
        if (!d) continue;
        if (!std::isfinite(*d)) throw Error(ErrorKind::InvalidArgument, "non-finite prescribed pressure");
        sum += *d;
        ++count;
    }
    sys.offset = count > 0 ? sum / static_cast<double>(count) : 0.0;

    std::vector<Eigen::Index> free_index(mesh.node_count(), -1);
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (!sys.dirichlet[i]) {
            free_index[i] = static_cast<Eigen::Index>(sys.free_nodes.size());
            sys.free_nodes.push_back(i);
        }
    }
    const auto nf = static_cast<Eigen::Index>(sys.free_nodes.size());
    sys.rhs = Eigen::VectorXd::Zero(nf);
    std::vector<Eigen::Triplet<double>> reduced;
    reduced.reserve(static_cast<std::size_t>(sys.stiffness.nonZeros()));
    for (Eigen::Index fi = 0; fi < nf; ++fi) {
        const auto row = static_cast<Eigen::Index>(sys.free_nodes[static_cast<std::size_t>(fi)]);
        sys.rhs[fi] = sys.neumann_load[row];
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sys.stiffness, row); it; ++it) {
            const auto col = static_cast<std::size_t>(it.col());
            if (free_index[col] >= 0) {
                reduced.emplace_back(fi, free_index[col], it.value());
            } else {
                sys.rhs[fi] -= it.value() * (*sys.dirichlet[col] - sys.offset);
            }
        }
    }
    sys.matrix.resize(nf, nf);
    sys.matrix.setFromTriplets(reduced.begin(), reduced.end());
    return sys;
}

LinearSolution solve(const SparseSystem& system, const LinearSolveConfig& config, const ScalarField* initial_guess) {
    config.validate();
    const Mesh& mesh = *system.mesh;
    const std::size_t n = mesh.node_count();
    const auto nf = static_cast<Eigen::Index>(system.free_nodes.size());

    if (!system.has_dirichlet()) {
        const double scale = system.abs_prescribed_flux > 0.0 ? system.abs_prescribed_flux : 1.0;
        if (std::abs(system.net_prescribed_flux) > 1e-12 * scale) {
            std::ostringstream os;
            os << "pure-Neumann problem with net prescribed flux " << system.net_prescribed_flux
               << " (compatibility requires zero)";
            throw Error(ErrorKind::IncompatibleNeumann, os.str());
        }
    }

    std::vector<double> values(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (system.dirichlet[i]) values[i] = *system.dirichlet[i];
    }
    LinearSolution out{ScalarField(system.mesh, values), 0, 0.0};
    if (nf == 0) return out;

    Eigen::VectorXd guess = Eigen::VectorXd::Zero(nf);
    if (initial_guess != nullptr) {
        if (initial_guess->size() != n) {
            throw Error(ErrorKind::InvalidArgument, "initial guess does not match the mesh");
        }
        for (Eigen::Index fi = 0; fi < nf; ++fi) {
            guess[fi] = (*initial_guess)[system.free_nodes[static_cast<std::size_t>(fi)]] - system.offset;
        }
    }

    const std::size_t max_iter = config.cg_max_iter.value_or(20 * static_cast<std::size_t>(nf));
    Eigen::VectorXd u;
    if (system.rhs.squaredNorm() == 0.0) {
        u = Eigen::VectorXd::Zero(nf);
    } else {
        u = guess;
        const Eigen::ComputationInfo info =
            config.preconditioner == Preconditioner::Diagonal
                ? run_cg<Eigen::DiagonalPreconditioner<double>>(system, u, config.cg_tol, max_iter, out.iterations)
                : run_cg<Eigen::IdentityPreconditioner>(system, u, config.cg_tol, max_iter, out.iterations);
        out.relative_residual = (system.rhs - system.matrix * u).norm() / system.rhs.norm();
        if (info != Eigen::Success || !(out.relative_residual <= config.cg_tol) || !u.allFinite()) {
            std::ostringstream os;
            os << "CG stopped after " << out.iterations << " iterations with relative residual "
               << out.relative_residual << " (tolerance " << config.cg_tol << ")";
            throw Error(ErrorKind::NoConvergence, os.str());
        }
    }

    if (!system.has_dirichlet()) {
        // Fix the additive constant of a pure-Neumann solution: zero mean.
        u.array() -= u.mean();
    }
    for (Eigen::Index fi = 0; fi < nf; ++fi) {
        values[system.free_nodes[static_cast<std::size_t>(fi)]] = u[fi] + system.offset;
    }
    out.field = ScalarField(system.mesh, std::move(values));
    return out;
}

LinearSolution solve_darcy(const MeshPtr& mesh, const MobilityField& mobility, const BoundarySpec& bcs,
                           const LinearSolveConfig& config) {
    return solve(assemble(mesh, mobility, bcs), config);
}

VectorField recover_velocity(const ScalarField& P, const MobilityField& mobility) {
    const Mesh& mesh = P.mesh();
    if (mobility.size() != mesh.triangle_count()) {
        throw Error(ErrorKind::InvalidArgument, "recover_velocity: mobility field does not match the mesh");
    }
    std::vector<Vec2> v(mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto grads = mesh.shape_gradients(t);
        const auto& tri = mesh.triangles[t];
        // Differences against the first vertex: the gradients sum to zero, so
        // this is exact and avoids cancellation for large offsets.
        const double base = P[tri[0]];
        Vec2 g{0.0, 0.0};
        for (std::size_t k = 1; k < 3; ++k) {
            g.x += (P[tri[k]] - base) * grads[k].x;
            g.y += (P[tri[k]] - base) * grads[k].y;
        }
        const Vec2 Mg = mobility[t].apply(g);
        v[t] = {-Mg.x, -Mg.y};
    }
    return {P.mesh_ptr(), std::move(v)};
}

Eigen::VectorXd nodal_reactions(const SparseSystem& system, const ScalarField& P) {
    if (P.size() != system.mesh->node_count()) {
        throw Error(ErrorKind::InvalidArgument, "nodal_reactions: field does not match the system");
    }
    Eigen::VectorXd shifted(static_cast<Eigen::Index>(P.size()));
    for (std::size_t i = 0; i < P.size(); ++i) shifted[static_cast<Eigen::Index>(i)] = P[i] - system.offset;
    return system.neumann_load - system.stiffness * shifted;
}

double boundary_flux(const SparseSystem& system, const ScalarField& P, const std::string& label) {
    const Mesh& mesh = *system.mesh;
    if (!mesh.has_label(label)) {
        throw Error(ErrorKind::UnknownLabel, "no boundary segment labelled '" + label + "'");
    }
    if (const auto* vseg = system.bcs.find_velocity(label)) {
        double q = 0.0;
        for (const auto& e : mesh.boundary_edges) {
            if (e.label != label) continue;
            const Point& a = mesh.nodes[e.a];
            const Point& b = mesh.nodes[e.b];
            q += 0.5 * mesh.edge_length(e) *
                 (vseg->normal_velocity(lerp(a, b, kGaussLo)) + vseg->normal_velocity(lerp(a, b, kGaussHi)));
        }
        return q;
    }

    // Pressure-edge length adjacent to each node, in total and on `label`;
    // a node shared by two pressure segments splits its reaction by length.
    std::map<std::size_t, std::pair<double, double>> adjacent;
    for (const auto& e : mesh.boundary_edges) {
        if (system.bcs.find_pressure(e.label) == nullptr) continue;
        const double half = 0.5 * mesh.edge_length(e);
        const bool mine = e.label == label;
        for (std::size_t node : {e.a, e.b}) {
            auto& [total, own] = adjacent[node];
            total += half;
            if (mine) own += half;
        }
    }
    const Eigen::VectorXd r = nodal_reactions(system, P);
    double q = 0.0;
    for (const auto& [node, lengths] : adjacent) {
        if (lengths.second > 0.0) q += r[static_cast<Eigen::Index>(node)] * lengths.second / lengths.first;
    }
    return q;
}

double boundary_flux(const ScalarField& P, const MobilityField& mobility, const BoundarySpec& bcs,
                     const std::string& label) {
    return boundary_flux(assemble(P.mesh_ptr(), mobility, bcs), P, label);
}

double boundary_flux_direct(const ScalarField& P, const MobilityField& mobility, const std::string& label) {
    const Mesh& mesh = P.mesh();
    if (!mesh.has_label(label)) {
        throw Error(ErrorKind::UnknownLabel, "no boundary segment labelled '" + label + "'");
    }
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> owner;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        for (std::size_t k = 0; k < 3; ++k) {
            const auto a = mesh.triangles[t][k];
            const auto b = mesh.triangles[t][(k + 1) % 3];
            owner[{std::min(a, b), std::max(a, b)}] = t;
        }
    }
    const VectorField v = recover_velocity(P, mobility);
    double q = 0.0;
    for (const auto& e : mesh.boundary_edges) {
        if (e.label != label) continue;
        const auto t = owner.at({std::min(e.a, e.b), std::max(e.a, e.b)});
        const Vec2 n = mesh.outward_normal(e);
        q += (v[t].x * n.x + v[t].y * n.y) * mesh.edge_length(e);
    }
    return q;
}

SolveReport solve_transformed_bvp(const MeshPtr& mesh, const FluidModel& fluid, const BodyForcePotential& xi,
                                  const PermeabilityField& K, const BoundarySpec& bcs,
                                  const LinearSolveConfig& config) {
    const auto start = Clock::now();
    fluid.validate();
    if (fluid.beta == 0.0) {
        throw Error(ErrorKind::Degenerate, "Hopf-Cole solve needs beta > 0; use the constant-viscosity solve");
    }
    bcs.validate(*mesh);

    // Step 1: pressure data -> transformed data; velocity data unchanged.
    BoundarySpec transformed;
    transformed.velocity = bcs.velocity;
    for (const auto& seg : bcs.pressure) {
        transformed.pressure.push_back({seg.label, [f = seg.pressure, fluid, xi](Point x) {
                                            return hopf_cole_inverse(f(x), xi(x), fluid);
                                        }});
    }

    // Step 2: linear solve.
    const MobilityField mobility = transformed_mobility(*mesh, K, fluid, xi);
    SparseSystem system = assemble(mesh, mobility, transformed);
    const double assemble_seconds = seconds_since(start);
    const auto solve_start = Clock::now();
    LinearSolution linear = solve(system, config);
    const double solve_seconds = seconds_since(solve_start);

    // Step 3: back to physical pressure.
    std::vector<std::size_t> violating;
    for (std::size_t i = 0; i < linear.field.size(); ++i) {
        if (!(linear.field[i] < 0.0)) violating.push_back(i);
    }
    if (!violating.empty()) {
        std::ostringstream os;
        os << violating.size() << " node(s) have transformed pressure P >= 0 (max P = " << linear.field.max()
           << "); no real pressure solves this problem";
        throw NonExistenceError(os.str(), std::move(violating));
    }
    std::vector<double> p(linear.field.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Point x = mesh->nodes[i];
        p[i] = hopf_cole_forward(linear.field[i], fluid) - xi(x);
    }
    VectorField v = recover_velocity(linear.field, mobility);

    SolveReport report{ScalarField(mesh, std::move(p)),
                       std::move(linear.field),
                       std::move(v),
                       std::move(system),
                       linear.iterations,
                       linear.relative_residual,
                       assemble_seconds,
                       solve_seconds,
                       0.0,
                       true};
    report.total_seconds = seconds_since(start);
    return report;
}

void write_report(std::ostream& os, const SolveReport& report) {
    const auto speeds = report.v.magnitudes();
    double vmax = 0.0;
    for (double s : speeds) vmax = std::max(vmax, s);
    const auto precision = os.precision(10);
    os << "path: hopf-cole\n"
       << "nodes: " << report.p.size() << "\n"
       << "triangles: " << report.v.size() << "\n"
       << "cg_iterations: " << report.iterations << "\n"
       << "cg_relative_residual: " << report.relative_residual << "\n"
       << "assemble_seconds: " << report.assemble_seconds << "\n"
       << "solve_seconds: " << report.solve_seconds << "\n"
       << "total_seconds: " << report.total_seconds << "\n"
       << "p_min: " << report.p.min() << "\n"
       << "p_max: " << report.p.max() << "\n"
       << "P_min: " << report.P.min() << "\n"
       << "P_max: " << report.P.max() << "\n"
       << "speed_max: " << vmax << "\n"
       << "transform_valid: " << (report.transform_valid ? "true" : "false") << "\n";
    os.precision(precision);
}

}  // namespace poroflow
