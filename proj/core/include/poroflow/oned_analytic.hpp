#pragma once

// Closed forms for the velocity-driven strip: inlet velocity v0 at x = 0,
// outlet pressure p_R at x = L, no body force.

#include <cmath>
#include <limits>

#include "poroflow/transform.hpp"

namespace poroflow {

struct StripProblem {
    double L = 1.0;
    double k = 1.0;
    FluidModel fluid;
    double v0 = 0.0;
    /// Outlet pressure; p0 of the fluid when unset (NaN).
    double p_R = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] double outlet_pressure() const { return std::isnan(p_R) ? fluid.p0 : p_R; }
    void validate() const;
};

/// Largest inlet velocity with a real solution, p0 k / (mu0 L beta) when
/// p_R = p0. Throws Degenerate for beta = 0.
double existence_threshold(const StripProblem& problem);

/// Direct pressure. Throws NonExistence when the log argument is <= 0 at x
/// and OutOfDomain for x outside [0, L].
double direct_pressure_1d(double x, const StripProblem& problem);

/// Transformed variable, linear in x and defined for every v0.
double transformed_pressure_1d(double x, const StripProblem& problem);

inline double velocity_1d(const StripProblem& problem) { return problem.v0; }

}  // namespace poroflow
