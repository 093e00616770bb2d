// poroflow command-line front end.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "run_config.hpp"

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("poroflow");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* level = std::getenv("POROFLOW_LOG");
    spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace poroflow::cli;
    setup_logging();

    CLI::App app{"Pressure-dependent-viscosity Darcy flow: Hopf-Cole and direct Picard solvers.\n"
                 "Exit codes: 0 ok, 1 config/input error, 2 no solution exists, 3 no convergence,\n"
                 "4 verification failure. Log level via POROFLOW_LOG (trace..off).\n"
                 "Permeability defaults to 1e-12, read as m^2."};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;
    bool cross_check = false;
    app.add_option("--config", config_path, "key = value config file (defaults when omitted)");
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for sampled checks");
    app.add_flag("--cross-check", cross_check, "ceiling-flux: also run a direct solve per pressure");

    struct Sub {
        const char* name;
        const char* help;
        int (*run)(const CommandContext&);
    };
    const Sub subs[] = {
        {"solve", "solve the configured problem (solver.path = hopf-cole | direct | both)", cmd_solve},
        {"solve-1d", "closed-form strip solution as x,p,P,v CSV", cmd_solve_1d},
        {"ceiling-flux", "calibrate once and predict the well flux over ceiling.factors", cmd_ceiling_flux},
        {"bench", "time both solver paths over bench.repetitions", cmd_bench},
        {"verify", "compatibility, principles, comparison, reciprocity and transform checks", cmd_verify},
        {"mesh-info", "print mesh and boundary segment summary", cmd_mesh_info},
    };
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    CommandContext ctx;
    try {
        ctx.config = config_path.empty() ? RunConfig{} : load_config(config_path);
    } catch (const ConfigError& e) {
        for (const auto& issue : e.issues()) {
            std::cerr << "config error";
            if (issue.line > 0) std::cerr << " (line " << issue.line << ")";
            std::cerr << ": " << issue.message << "\n";
        }
        return kExitConfig;
    }
    if (!out_dir.empty()) ctx.config.out_dir = out_dir;
    ctx.jobs = jobs;
    ctx.seed = seed;
    ctx.cross_check = cross_check;
    ctx.out = &std::cout;

    for (const auto& s : subs) {
        if (app.got_subcommand(s.name)) return run_guarded(s.name, s.run, ctx, std::cerr);
    }
    return kExitConfig;
}
