#include "poroflow/oned_analytic.hpp"

#include <sstream>

#include "poroflow/errors.hpp"

namespace poroflow {

namespace {

void check_position(double x, const StripProblem& problem) {
    if (!(x >= 0.0 && x <= problem.L)) {
        std::ostringstream os;
        os << "x = " << x << " lies outside [0, " << problem.L << "]";
        throw Error(ErrorKind::OutOfDomain, os.str());
    }
}

// exp[-beta (p_R/p0 - 1)], equal to 1 for the default outlet.
double outlet_factor(const StripProblem& problem) {
    const FluidModel& f = problem.fluid;
    return std::exp(-f.beta * (problem.outlet_pressure() / f.p0 - 1.0));
}

}  // namespace

void StripProblem::validate() const {
    fluid.validate();
    if (!(std::isfinite(L) && L > 0.0)) throw Error(ErrorKind::InvalidArgument, "strip: L must be positive");
    if (!(std::isfinite(k) && k > 0.0)) throw Error(ErrorKind::InvalidArgument, "strip: k must be positive");
    if (!std::isfinite(v0)) throw Error(ErrorKind::InvalidArgument, "strip: v0 must be finite");
    if (!std::isfinite(outlet_pressure())) throw Error(ErrorKind::InvalidArgument, "strip: p_R must be finite");
}

double existence_threshold(const StripProblem& problem) {
    problem.validate();
    const FluidModel& f = problem.fluid;
    if (f.beta == 0.0) {
        throw Error(ErrorKind::Degenerate, "beta = 0: the constant-viscosity strip is solvable for every v0");
    }
    return outlet_factor(problem) * f.p0 * problem.k / (f.mu0 * problem.L * f.beta);
}

double direct_pressure_1d(double x, const StripProblem& problem) {
    problem.validate();
    check_position(x, problem);
    const FluidModel& f = problem.fluid;
    const double drop = f.mu0 * problem.v0 / problem.k * (problem.L - x);
    if (f.beta == 0.0) return problem.outlet_pressure() + drop;
    if (x == problem.L) return problem.outlet_pressure();

    // p = p0 (1 - ln(u) / beta), u = u_R - beta drop / p0.
    const double u_R = outlet_factor(problem);
    const double u = u_R - f.beta * drop / f.p0;
    if (!(u > 0.0)) {
        std::ostringstream os;
        os << "no real pressure at x = " << x << ": v0 = " << problem.v0
           << " reaches the existence threshold " << existence_threshold(problem);
        throw NonExistenceError(os.str(), {});
    }
    const double log_u = u_R == 1.0 ? std::log1p(-f.beta * drop / f.p0) : std::log(u);
    return f.p0 * (1.0 - log_u / f.beta);
}

double transformed_pressure_1d(double x, const StripProblem& problem) {
    problem.validate();
    check_position(x, problem);
    const FluidModel& f = problem.fluid;
    const double P_R = hopf_cole_inverse(problem.outlet_pressure(), 0.0, f);
    return P_R + f.mu0 * problem.v0 / problem.k * (problem.L - x);
}

}  // namespace poroflow
