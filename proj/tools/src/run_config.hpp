#pragma once

// Flat `section.key = value` run configuration for the poroflow tool.
// Defaults reproduce the reference reservoir: L = 100 m, H = 30 m,
// W = 0.2 m, p0 = p_atm = 101325 Pa, beta = 3e-6, mu0 = 3.95e-5 Pa s,
// k = 1e-12 m^2.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "poroflow/barus_direct.hpp"
#include "poroflow/darcy_linear.hpp"
#include "poroflow/geometry.hpp"
#include "poroflow/transform.hpp"

namespace poroflow::cli {

enum class ProblemType { Reservoir, Strip1d, CustomRectangle };
enum class SolverPath { HopfCole, Direct, Both };

struct ConfigIssue {
    std::size_t line = 0;  // 0 when the issue is not tied to a line
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    [[nodiscard]] const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

/// Boundary condition of one rectangle side for problem.type = custom-rectangle,
/// written as `bcs.left = pressure 2e5` or `bcs.top = velocity 0`.
struct SideCondition {
    bool pressure = false;
    double value = 0.0;
};

struct RunConfig {
    ProblemType problem = ProblemType::Reservoir;

    double L = 100.0;
    double H = 30.0;
    double W = 0.2;
    std::size_t nx = 100;
    std::size_t ny = 30;
    TriangulationPattern pattern = TriangulationPattern::Diagonal;
    /// Well centre relative to H/2 [m].
    double well_offset = 0.0;

    FluidModel fluid;
    Tensor2 permeability = Tensor2::isotropic(1e-12);

    double p_inj = 10.0 * 101325.0;
    double p_atm = 101325.0;
    /// Strip: inlet velocity and outlet pressure (p0 when unset).
    double v0 = 1.0;
    std::optional<double> p_out;
    std::map<std::string, SideCondition> sides;

    SolverPath path = SolverPath::HopfCole;
    LinearSolveConfig linear;
    double picard_tol = 1e-10;
    std::size_t picard_max_iter = 200;
    double relaxation = 1.0;

    /// Injection pressures of the ceiling-flux sweep, as multiples of p_atm.
    std::vector<double> ceiling_factors{1.0, 10.0, 100.0, 1000.0, 10000.0};
    double calibration_factor = 10.0;
    std::size_t bench_repetitions = 5;
    std::size_t samples_1d = 101;
    /// Debug aid: corrupt one interior node before the principle checks.
    bool verify_corrupt = false;

    std::string out_dir = "out";

    /// Every key with its effective value, one `key = value` line each, sorted.
    [[nodiscard]] std::vector<std::string> resolved_lines() const;
    /// CRC-32 of the resolved lines, as 8 hex digits.
    [[nodiscard]] std::string digest() const;

    [[nodiscard]] PicardConfig picard() const;
    [[nodiscard]] double outlet_pressure() const { return p_out.value_or(fluid.p0); }
};

/// Parses and validates. Throws ConfigError listing every problem found.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

std::string to_string(ProblemType problem);
std::string to_string(SolverPath path);

}  // namespace poroflow::cli
