#include "poroflow/barus_direct.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>
#include <utility>

#include "poroflow/errors.hpp"

namespace poroflow {

namespace {

BoundarySpec modified_bcs(const BoundarySpec& bcs, const BodyForcePotential& xi) {
    if (xi.is_zero()) return bcs;
    BoundarySpec out;
    out.velocity = bcs.velocity;
    for (const auto& seg : bcs.pressure) {
        out.pressure.push_back({seg.label, [f = seg.pressure, xi](Point x) { return f(x) + xi(x); }});
    }
    return out;
}

std::vector<double> shift_by_xi(const Mesh& mesh, const std::vector<double>& values, const BodyForcePotential& xi,
                                double sign) {
    std::vector<double> out(values);
    if (xi.is_zero()) return out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sign * xi(mesh.nodes[i]);
    return out;
}

double diff_norm(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double norm(const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

bool viscosity_representable(const std::vector<double>& p, const FluidModel& fluid) {
    for (double v : p) {
        const double mu = viscosity(v, fluid);
        if (!(std::isfinite(mu) && mu > 0.0)) return false;
    }
    return true;
}

}  // namespace

void PicardConfig::validate() const {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "picard tol must be positive");
    if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "picard max_iter must be at least 1");
    if (!(relaxation > 0.0 && relaxation <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "picard relaxation must lie in (0, 1]");
    }
    linear.validate();
}

MobilityField barus_mobility(const ScalarField& p, const FluidModel& fluid, const PermeabilityField& K) {
    const Mesh& mesh = p.mesh();
    if (K.size() != mesh.triangle_count()) {
        throw Error(ErrorKind::InvalidArgument, "permeability field does not match the mesh");
    }
    MobilityField mobility(mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double pc = (p[tri[0]] + p[tri[1]] + p[tri[2]]) / 3.0;
        const double mu = viscosity(pc, fluid);
        if (!(std::isfinite(mu) && mu > 0.0)) {
            std::ostringstream os;
            os << "viscosity on triangle " << t << " is not representable (p = " << pc << ")";
            throw Error(ErrorKind::Overflow, os.str());
        }
        mobility[t] = K[t].scaled(1.0 / mu);
    }
    return mobility;
}

PicardReport picard_solve(const MeshPtr& mesh, const FluidModel& fluid, const BodyForcePotential& xi,
                          const PermeabilityField& K, const BoundarySpec& bcs, const PicardConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    fluid.validate();
    config.validate();
    bcs.validate(*mesh);
    const BoundarySpec tilde_bcs = modified_bcs(bcs, xi);

    std::vector<double> p = config.initial_pressure ? config.initial_pressure->values()
                                                    : std::vector<double>(mesh->node_count(), fluid.p0);
    if (p.size() != mesh->node_count()) {
        throw Error(ErrorKind::InvalidArgument, "initial pressure does not match the mesh");
    }

    PicardReport report{ScalarField(mesh, p), VectorField(mesh, std::vector<Vec2>(mesh->triangle_count())), 0, {},
                        false, 0.0, 0, config.relaxation};
    double omega = config.relaxation;
    int growth = 0;
    int halvings = 0;
    double previous = 0.0;
    auto halve = [&](const std::string& reason) {
        if (halvings >= 4) {
            throw Error(ErrorKind::NoConvergence,
                        "Picard iteration diverged after " + std::to_string(halvings) + " relaxation halvings: " + reason);
        }
        omega *= 0.5;
        ++halvings;
        growth = 0;
    };
    ScalarField guess(mesh, shift_by_xi(*mesh, p, xi, +1.0));

    while (report.iterations < config.max_iter) {
        const MobilityField mobility = barus_mobility(ScalarField(mesh, p), fluid, K);
        const SparseSystem system = assemble(mesh, mobility, tilde_bcs);
        LinearSolution linear = solve(system, config.linear, &guess);
        report.linear_iterations += linear.iterations;
        const std::vector<double> solved = shift_by_xi(*mesh, linear.field.values(), xi, -1.0);

        std::vector<double> next(p.size());
        for (;;) {
            for (std::size_t i = 0; i < p.size(); ++i) next[i] = omega * solved[i] + (1.0 - omega) * p[i];
            if (viscosity_representable(next, fluid)) break;
            halve("viscosity overflow");
        }
        const double scale = norm(next);
        double update = scale > 0.0 ? diff_norm(next, p) / scale : diff_norm(next, p);
        if (fluid.beta == 0.0) update = 0.0;  // mobility is pressure independent: one solve is the fixed point
        ++report.iterations;
        report.update_history.push_back(update);
        p = std::move(next);
        guess = ScalarField(mesh, shift_by_xi(*mesh, p, xi, +1.0));

        if (update <= config.tol) {
            report.converged = true;
            break;
        }
        growth = (report.iterations > 1 && update > previous) ? growth + 1 : 0;
        previous = update;
        if (growth >= 3) {
            std::ostringstream os;
            os << "update grew for 3 consecutive iterations (last " << update << ")";
            halve(os.str());
        }
    }

    report.p = ScalarField(mesh, p);
    const MobilityField final_mobility = barus_mobility(report.p, fluid, K);
    report.v = recover_velocity(ScalarField(mesh, shift_by_xi(*mesh, p, xi, +1.0)), final_mobility);
    report.system = assemble(mesh, final_mobility, tilde_bcs);
    report.relaxation = omega;
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

double nonlinear_residual(const ScalarField& p, const MeshPtr& mesh, const FluidModel& fluid,
                          const BodyForcePotential& xi, const PermeabilityField& K, const BoundarySpec& bcs) {
    const SparseSystem system = assemble(mesh, barus_mobility(p, fluid, K), modified_bcs(bcs, xi));
    const std::vector<double> tilde = shift_by_xi(*mesh, p.values(), xi, +1.0);
    Eigen::VectorXd u(static_cast<Eigen::Index>(system.free_nodes.size()));
    for (std::size_t f = 0; f < system.free_nodes.size(); ++f) {
        u[static_cast<Eigen::Index>(f)] = tilde[system.free_nodes[f]] - system.offset;
    }
    const Eigen::VectorXd Au = system.matrix * u;
    const double denom = std::max(system.rhs.norm(), Au.norm());
    if (denom == 0.0) return 0.0;
    return (system.rhs - Au).norm() / denom;
}

double picard_flux(const PicardReport& report, const BodyForcePotential& xi, const std::string& label) {
    const Mesh& mesh = report.p.mesh();
    const ScalarField tilde(report.p.mesh_ptr(), shift_by_xi(mesh, report.p.values(), xi, +1.0));
    return boundary_flux(report.system, tilde, label);
}

void write_history_csv(std::ostream& os, const PicardReport& report) {
    const auto precision = os.precision(17);
    os << "iteration,update\n";
    for (std::size_t i = 0; i < report.update_history.size(); ++i) {
        os << (i + 1) << ',' << report.update_history[i] << '\n';
    }
    os.precision(precision);
}

}  // namespace poroflow
