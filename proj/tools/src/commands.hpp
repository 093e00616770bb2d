#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "run_config.hpp"

namespace poroflow::cli {

/// Stable exit-code contract of the tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitNonExistence = 2,
    kExitNoConvergence = 3,
    kExitVerifyFailed = 4,
};

struct CommandContext {
    RunConfig config;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;
    bool cross_check = false;
    std::ostream* out = nullptr;
};

int cmd_solve(const CommandContext& ctx);
int cmd_solve_1d(const CommandContext& ctx);
int cmd_ceiling_flux(const CommandContext& ctx);
int cmd_bench(const CommandContext& ctx);
int cmd_verify(const CommandContext& ctx);
int cmd_mesh_info(const CommandContext& ctx);

/// Runs `command`, mapping library errors to exit codes and reporting them on
/// `err`.
int run_guarded(const std::string& name, int (*command)(const CommandContext&), const CommandContext& ctx,
                std::ostream& err);

}  // namespace poroflow::cli
