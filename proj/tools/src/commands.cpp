#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <spdlog/spdlog.h>

#include "poroflow/barus_direct.hpp"
#include "poroflow/darcy_linear.hpp"
#include "poroflow/errors.hpp"
#include "poroflow/field_io.hpp"
#include "poroflow/oned_analytic.hpp"
#include "poroflow/transform.hpp"
#include "poroflow/verification.hpp"

namespace poroflow::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Every file goes through here so each artifact carries the resolved config.
class ArtifactWriter {
public:
    ArtifactWriter(const RunConfig& config, std::string command) : config_(config), command_(std::move(command)) {
        fs::create_directories(config.out_dir);
        std::ofstream resolved(path("config.resolved"));
        for (const auto& line : config.resolved_lines()) resolved << line << "\n";
    }

    [[nodiscard]] std::string path(const std::string& name) const { return (fs::path(config_.out_dir) / name).string(); }

    [[nodiscard]] std::vector<std::string> header() const {
        std::vector<std::string> lines{"poroflow " + command_, "digest " + config_.digest()};
        for (const auto& l : config_.resolved_lines()) lines.push_back(l);
        return lines;
    }

    /// Text artifact opened with a `# ...` header.
    std::ofstream open(const std::string& name) const {
        std::ofstream os(path(name));
        if (!os) throw Error(ErrorKind::InvalidArgument, "cannot write " + path(name));
        for (const auto& l : header()) os << "# " << l << "\n";
        os << std::setprecision(17);
        return os;
    }

    /// Legacy VTK has a single title line; it records the digest, and the
    /// full config sits next to it in config.resolved.
    [[nodiscard]] std::string vtk_title() const {
        return "poroflow " + command_ + " digest " + config_.digest() + " problem " + to_string(config_.problem) +
               " (config.resolved)";
    }

    void write_csv_field(const std::string& name, const ScalarField& field) const {
        std::ofstream os(path(name));
        auto lines = header();
        write_csv(os, field, lines);
    }

private:
    const RunConfig& config_;
    std::string command_;
};

struct Problem {
    MeshPtr mesh;
    BoundarySpec bcs;
    std::optional<PermeabilityField> K;
};

Problem build_problem(const RunConfig& c) {
    Problem p;
    switch (c.problem) {
    case ProblemType::Reservoir: {
        ReservoirGeometry g{c.L, c.H, c.W, c.nx, c.ny, 0.5 * c.H + c.well_offset, c.pattern};
        p.mesh = make_reservoir_mesh(g);
        p.bcs = reservoir_bcs(c.p_inj, c.p_atm);
        break;
    }
    case ProblemType::Strip1d:
        p.mesh = make_rectangle_mesh(c.L, c.H, c.nx, c.ny, c.pattern);
        p.bcs.velocity = {{"left", constant(-c.v0)}, {"top", constant(0.0)}, {"bottom", constant(0.0)}};
        p.bcs.pressure = {{"right", constant(c.outlet_pressure())}};
        break;
    case ProblemType::CustomRectangle:
        p.mesh = make_rectangle_mesh(c.L, c.H, c.nx, c.ny, c.pattern);
        for (const auto& [side, cond] : c.sides) {
            if (cond.pressure) {
                p.bcs.pressure.push_back({side, constant(cond.value)});
            } else {
                p.bcs.velocity.push_back({side, constant(cond.value)});
            }
        }
        break;
    }
    p.K = PermeabilityField::uniform(*p.mesh, c.permeability);
    return p;
}

StripProblem strip_of(const RunConfig& c) {
    StripProblem s;
    s.L = c.L;
    s.k = c.permeability.xx;
    s.fluid = c.fluid;
    s.v0 = c.v0;
    s.p_R = c.outlet_pressure();
    return s;
}

// The strip has a closed-form existence limit; check it before solving so
// every path reports the same thing.
void require_strip_existence(const RunConfig& c, const Mesh& mesh) {
    if (c.problem != ProblemType::Strip1d || c.fluid.beta == 0.0) return;
    const StripProblem s = strip_of(c);
    const double v_star = existence_threshold(s);
    if (s.v0 < v_star) return;
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        if (transformed_pressure_1d(mesh.nodes[i].x, s) >= 0.0) nodes.push_back(i);
    }
    std::ostringstream os;
    os << std::setprecision(10) << "no solution: v0 = " << s.v0 << " m/s is not below the existence threshold v* = "
       << v_star << " m/s";
    throw NonExistenceError(os.str(), std::move(nodes));
}

// P1 L2 norms with the exact element mass matrix.
double l2_norm_sq(const Mesh& mesh, const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double a = u[tri[0]], b = u[tri[1]], c = u[tri[2]];
        s += mesh.signed_area(t) / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a);
    }
    return s;
}

double relative_l2(const ScalarField& a, const ScalarField& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    return std::sqrt(l2_norm_sq(a.mesh(), d) / l2_norm_sq(b.mesh(), b.values()));
}

void write_velocity_csv(std::ofstream& os, const VectorField& v) {
    os << "x,y,vx,vy\n";
    const Mesh& mesh = v.mesh();
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const Point c = mesh.centroid(t);
        os << c.x << "," << c.y << "," << v[t].x << "," << v[t].y << "\n";
    }
}

std::string flux_label(const RunConfig& c) {
    switch (c.problem) {
    case ProblemType::Reservoir:
        return "well";
    case ProblemType::Strip1d:
        return "right";
    case ProblemType::CustomRectangle:
        for (const auto& [side, cond] : c.sides) {
            if (cond.pressure) return side;
        }
        return "right";
    }
    return "right";
}

PicardReport run_picard(const RunConfig& c, const Problem& p) {
    PicardReport r = picard_solve(p.mesh, c.fluid, {}, *p.K, p.bcs, c.picard());
    if (!r.converged) {
        std::ostringstream os;
        os << "Picard iteration did not reach tol " << c.picard_tol << " in " << r.iterations
           << " iterations (last update " << r.update_history.back() << ")";
        throw Error(ErrorKind::NoConvergence, os.str());
    }
    return r;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Runs f(i) for i in [0, n) on up to `jobs` threads; the first exception is
// rethrown after all workers finish.
template <typename F>
void parallel_for(std::size_t n, std::size_t jobs, F&& f) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, n));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

int cmd_solve(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    std::ostream& out = *ctx.out;
    const Problem p = build_problem(c);
    require_strip_existence(c, *p.mesh);
    const ArtifactWriter writer(c, "solve");
    const std::string label = flux_label(c);
    spdlog::info("solve: {} nodes, {} triangles, path {}", p.mesh->node_count(), p.mesh->triangle_count(),
                 to_string(c.path));

    std::optional<SolveReport> hc;
    std::optional<PicardReport> direct;
    if (c.path != SolverPath::Direct) {
        hc = solve_transformed_bvp(p.mesh, c.fluid, {}, *p.K, p.bcs, c.linear);
        spdlog::info("hopf-cole: {} CG iterations, {:.3f} s", hc->iterations, hc->total_seconds);
    }
    if (c.path != SolverPath::HopfCole) {
        direct = run_picard(c, p);
        spdlog::info("direct: {} Picard iterations, {:.3f} s", direct->iterations, direct->wall_time);
    }

    const ScalarField& p_main = hc ? hc->p : direct->p;
    const VectorField& v_main = hc ? hc->v : direct->v;
    std::vector<NamedScalar> scalars{{"pressure", &p_main}};
    if (hc) scalars.push_back({"transformed_pressure", &hc->P});
    if (hc && direct) scalars.push_back({"pressure_direct", &direct->p});
    {
        std::ofstream vtk(writer.path("fields.vtk"));
        write_vtk(vtk, *p.mesh, writer.vtk_title(), scalars, {{"velocity", &v_main}});
    }
    writer.write_csv_field("pressure.csv", p_main);
    {
        auto os = writer.open("velocity.csv");
        write_velocity_csv(os, v_main);
    }

    auto report = writer.open("report.txt");
    if (hc) {
        write_report(report, *hc);
        report << "flux_" << label << ": " << boundary_flux(hc->system, hc->P, label) << "\n";
    }
    if (direct) {
        report << "picard_iterations: " << direct->iterations << "\n"
               << "picard_converged: " << (direct->converged ? "true" : "false") << "\n"
               << "picard_linear_iterations: " << direct->linear_iterations << "\n"
               << "picard_seconds: " << direct->wall_time << "\n"
               << "picard_flux_" << label << ": " << picard_flux(*direct, {}, label) << "\n";
        auto history = writer.open("picard_history.csv");
        write_history_csv(history, *direct);
    }
    out << "problem: " << to_string(c.problem) << ", nodes: " << p.mesh->node_count() << "\n";
    if (hc) out << "hopf-cole: p in [" << hc->p.min() << ", " << hc->p.max() << "] Pa\n";
    if (direct) out << "direct: " << direct->iterations << " Picard iterations\n";
    if (hc && direct) {
        const double diff = relative_l2(direct->p, hc->p);
        report << "relative_l2_difference: " << diff << "\n";
        out << "relative L2 difference (direct vs hopf-cole): " << diff << "\n";
    }
    out << "artifacts written to " << c.out_dir << "\n";
    return kExitOk;
}

int cmd_solve_1d(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    const StripProblem s = strip_of(c);
    s.validate();
    if (c.fluid.beta > 0.0) {
        const double v_star = existence_threshold(s);
        if (s.v0 >= v_star) {
            std::ostringstream os;
            os << std::setprecision(10) << "no solution: v0 = " << s.v0
               << " m/s is not below the existence threshold v* = " << v_star << " m/s";
            throw NonExistenceError(os.str(), {});
        }
    }
    const ArtifactWriter writer(c, "solve-1d");
    auto os = writer.open("strip.csv");
    os << "x,p,P,v\n";
    for (std::size_t i = 0; i < c.samples_1d; ++i) {
        const double x = s.L * static_cast<double>(i) / static_cast<double>(c.samples_1d - 1);
        os << x << "," << direct_pressure_1d(x, s) << ",";
        if (c.fluid.beta > 0.0) os << transformed_pressure_1d(x, s);
        os << "," << velocity_1d(s) << "\n";
    }
    *ctx.out << "strip: " << c.samples_1d << " samples written to " << writer.path("strip.csv") << "\n";
    if (c.fluid.beta > 0.0) *ctx.out << "existence threshold v* = " << existence_threshold(s) << " m/s\n";
    return kExitOk;
}

int cmd_ceiling_flux(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    if (c.problem != ProblemType::Reservoir) {
        throw Error(ErrorKind::InvalidArgument, "ceiling-flux needs problem.type = reservoir");
    }
    const Problem p = build_problem(c);
    const ArtifactWriter writer(c, "ceiling-flux");
    const CeilingFluxModel model =
        calibrate_ceiling_flux(p.mesh, c.fluid, *p.K, c.p_atm, c.calibration_factor * c.p_atm, c.linear);
    spdlog::info("ceiling-flux: C = {:.6e}, asymptote = {:.6e}", model.C, model.asymptote());

    const std::size_t n = c.ceiling_factors.size();
    std::vector<double> predicted(n);
    std::vector<double> measured(n, std::nan(""));
    for (std::size_t i = 0; i < n; ++i) predicted[i] = predict_flux(model, c.ceiling_factors[i] * c.p_atm);
    if (ctx.cross_check) {
        parallel_for(n, ctx.jobs, [&](std::size_t i) {
            Problem local = p;
            local.bcs = reservoir_bcs(c.ceiling_factors[i] * c.p_atm, c.p_atm);
            measured[i] = picard_flux(run_picard(c, local), {}, "well");
            spdlog::debug("cross-check {}: Q = {:.6e}", i, measured[i]);
        });
    }

    auto os = writer.open("ceiling_flux.csv");
    os << "# C = " << model.C << "\n# asymptote = " << model.asymptote() << "\n";
    os << "p_inj,Q_predicted,Q_direct,rel_diff\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        os << c.ceiling_factors[i] * c.p_atm << "," << predicted[i] << ",";
        if (ctx.cross_check) {
            const double scale = std::abs(measured[i]);
            const double diff = std::abs(predicted[i] - measured[i]);
            const double rel = scale > 0.0 ? diff / scale : diff;
            worst = std::max(worst, rel);
            os << measured[i] << "," << rel;
        } else {
            os << ",";
        }
        os << "\n";
    }
    *ctx.out << "calibration constant C = " << model.C << "\nceiling flux C p_atm / beta = " << model.asymptote()
             << "\n";
    if (ctx.cross_check) *ctx.out << "max rel_diff against direct solves: " << worst << "\n";
    *ctx.out << "artifacts written to " << c.out_dir << "\n";
    return kExitOk;
}

int cmd_bench(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    const Problem p = build_problem(c);
    require_strip_existence(c, *p.mesh);
    const ArtifactWriter writer(c, "bench");

    // With beta = 0 the transform degenerates; the linear path is then the
    // plain constant-viscosity solve.
    auto linear_path = [&] {
        if (c.fluid.beta == 0.0) {
            MobilityField mob(p.mesh->triangle_count());
            for (std::size_t t = 0; t < mob.size(); ++t) mob[t] = (*p.K)[t].scaled(1.0 / c.fluid.mu0);
            (void)solve_darcy(p.mesh, mob, p.bcs, c.linear);
        } else {
            (void)solve_transformed_bvp(p.mesh, c.fluid, {}, *p.K, p.bcs, c.linear);
        }
    };

    std::vector<double> t_hc;
    std::vector<double> t_direct;
    std::vector<std::size_t> iterations;
    auto os = writer.open("bench.csv");
    os << "rep,hopf_cole_seconds,direct_seconds,picard_iterations\n";
    for (std::size_t rep = 0; rep < c.bench_repetitions; ++rep) {
        auto t0 = Clock::now();
        linear_path();
        t_hc.push_back(seconds_since(t0));
        t0 = Clock::now();
        const PicardReport r = run_picard(c, p);
        t_direct.push_back(seconds_since(t0));
        iterations.push_back(r.iterations);
        os << rep << "," << t_hc.back() << "," << t_direct.back() << "," << r.iterations << "\n";
    }
    const double m_hc = median(t_hc);
    const double m_direct = median(t_direct);
    auto summary = writer.open("bench_summary.txt");
    for (std::ostream* s : {static_cast<std::ostream*>(&summary), ctx.out}) {
        *s << "median_hopf_cole_seconds: " << m_hc << "\n"
           << "median_direct_seconds: " << m_direct << "\n"
           << "speedup: " << m_direct / m_hc << "\n"
           << "picard_iterations: " << iterations.front() << "\n";
    }
    return kExitOk;
}

int cmd_verify(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    const Problem p = build_problem(c);
    const ArtifactWriter writer(c, "verify");
    const bool beta_positive = c.fluid.beta > 0.0;

    struct Row {
        std::string check;
        std::string status;  // PASS | FAIL | n/a
        std::string detail;
    };
    std::vector<Row> rows;
    auto fmt = [](double v) {
        std::ostringstream os;
        os << std::setprecision(3) << std::scientific << v;
        return os.str();
    };

    const CompatibilityResult compat = compatibility_check(*p.mesh, p.bcs);
    rows.push_back({"compatibility", compat.compatible ? "PASS" : "FAIL", "net flux " + fmt(compat.net_flux)});

    if (compat.compatible) {
        // Second BC variant: every prescribed pressure raised, same velocities.
        BoundarySpec raised = p.bcs;
        const double bump = std::max(c.p_atm, c.fluid.p0);
        for (auto& seg : raised.pressure) seg.pressure = [f = seg.pressure, bump](Point x) { return f(x) + bump; };

        struct State {
            ScalarField p;
            ScalarField flux_field;
            SparseSystem system;
        };
        auto solve_state = [&](const BoundarySpec& bcs) -> State {
            if (beta_positive) {
                SolveReport r = solve_transformed_bvp(p.mesh, c.fluid, {}, *p.K, bcs, c.linear);
                return {r.p, r.P, r.system};
            }
            Problem local = p;
            local.bcs = bcs;
            PicardReport r = run_picard(c, local);
            return {r.p, r.p, r.system};
        };
        const State low = solve_state(p.bcs);
        const State high = solve_state(raised);

        ScalarField checked = low.p;
        if (c.verify_corrupt) {
            // Push the node nearest the centre below every boundary value.
            const Point centre{0.5 * c.L, 0.5 * c.H};
            std::size_t node = 0;
            double best = INFINITY;
            for (std::size_t i = 0; i < p.mesh->node_count(); ++i) {
                const double d = std::hypot(p.mesh->nodes[i].x - centre.x, p.mesh->nodes[i].y - centre.y);
                if (d < best) best = d, node = i;
            }
            std::vector<double> values = low.p.values();
            values[node] = low.p.min() - (low.p.max() - low.p.min()) - 1.0;
            checked = ScalarField(p.mesh, values);
            spdlog::warn("verify: corrupted node {} on request", node);
        }

        auto principle = [&](const char* name, bool minimum) {
            try {
                const PrincipleReport r =
                    minimum ? check_min_principle(checked, p.bcs) : check_max_principle(checked, p.bcs);
                rows.push_back({name, r.satisfied ? "PASS" : "FAIL",
                                std::to_string(r.violation_nodes.size()) + " violating nodes"});
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NotApplicable) throw;
                rows.push_back({name, "n/a", e.what()});
            }
        };
        principle("min principle", true);
        principle("max principle", false);

        try {
            const ComparisonReport r = check_comparison(low.p, high.p, p.bcs, raised);
            rows.push_back({"comparison", r.ordered ? "PASS" : "FAIL",
                            std::to_string(r.violation_nodes.size()) + " violating nodes"});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotApplicable) throw;
            rows.push_back({"comparison", "n/a", e.what()});
        }

        const double darcy =
            reciprocity_residual_darcy({&low.flux_field, &low.system}, {&high.flux_field, &high.system});
        rows.push_back({"reciprocity (linear)", darcy < 1e-8 ? "PASS" : "FAIL", "residual " + fmt(darcy)});
        if (beta_positive) {
            const double barus = reciprocity_residual_barus(low.p, {&low.flux_field, &low.system}, high.p,
                                                            {&high.flux_field, &high.system}, c.fluid);
            rows.push_back({"reciprocity (Barus)", barus < 1e-6 ? "PASS" : "FAIL", "residual " + fmt(barus)});
        } else {
            rows.push_back({"reciprocity (Barus)", "n/a", "beta = 0"});
        }
    } else {
        for (const char* name : {"min principle", "max principle", "comparison", "reciprocity (linear)",
                                 "reciprocity (Barus)"}) {
            rows.push_back({name, "n/a", "skipped: boundary data incompatible"});
        }
    }

    if (beta_positive) {
        std::mt19937_64 rng(ctx.seed);
        std::uniform_real_distribution<double> expo(0.0, 4.0);
        double worst_round = 0.0;
        double worst_kirchhoff = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double pr = c.fluid.p0 * std::pow(10.0, expo(rng));
            const double P = hopf_cole_inverse(pr, 0.0, c.fluid);
            worst_round = std::max(worst_round, std::abs(hopf_cole_forward(P, c.fluid) - pr) / pr);
            const double via_k = kirchhoff_inverse(kirchhoff_forward(pr, c.fluid), c.fluid);
            worst_kirchhoff = std::max(worst_kirchhoff, std::abs(via_k - pr) / pr);
        }
        rows.push_back({"transform round-trip", worst_round < 1e-9 ? "PASS" : "FAIL", "max rel " + fmt(worst_round)});
        rows.push_back(
            {"kirchhoff round-trip", worst_kirchhoff < 1e-9 ? "PASS" : "FAIL", "max rel " + fmt(worst_kirchhoff)});
    } else {
        rows.push_back({"transform round-trip", "n/a", "beta = 0"});
    }

    bool failed = false;
    auto table = writer.open("verify.txt");
    for (std::ostream* s : {static_cast<std::ostream*>(&table), ctx.out}) {
        for (const Row& r : rows) *s << std::left << std::setw(24) << r.check << std::setw(6) << r.status << r.detail << "\n";
    }
    for (const Row& r : rows) failed = failed || r.status == "FAIL";
    return failed ? kExitVerifyFailed : kExitOk;
}

int cmd_mesh_info(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    const Problem p = build_problem(c);
    const Mesh& m = *p.mesh;
    double amin = INFINITY;
    double amax = 0.0;
    double total = 0.0;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const double a = m.signed_area(t);
        amin = std::min(amin, a);
        amax = std::max(amax, a);
        total += a;
    }
    std::ostream& out = *ctx.out;
    out << "problem: " << to_string(c.problem) << "\n"
        << "nodes: " << m.node_count() << "\n"
        << "triangles: " << m.triangle_count() << "\n"
        << "boundary_edges: " << m.boundary_edges.size() << "\n"
        << "area: " << total << "\n"
        << "triangle_area_min: " << amin << "\n"
        << "triangle_area_max: " << amax << "\n";
    for (const auto& label : m.labels()) {
        out << "segment " << label << ": length " << boundary_measure(m, label) << ", "
            << (p.bcs.find_pressure(label) ? "pressure" : "velocity") << "\n";
    }
    if (m.well_length > 0.0) out << "well_length: " << m.well_length << "\n";
    return kExitOk;
}

int run_guarded(const std::string& name, int (*command)(const CommandContext&), const CommandContext& ctx,
                std::ostream& err) {
    try {
        return command(ctx);
    } catch (const NonExistenceError& e) {
        err << name << ": " << e.what();
        if (!e.nodes().empty()) err << " (" << e.nodes().size() << " nodes with P >= 0)";
        err << "\n";
        return kExitNonExistence;
    } catch (const Error& e) {
        err << name << ": " << e.what() << "\n";
        return e.kind() == ErrorKind::NoConvergence ? kExitNoConvergence : kExitConfig;
    } catch (const ConfigError& e) {
        err << name << ": config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << name << ": " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace poroflow::cli
