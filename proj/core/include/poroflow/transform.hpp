#pragma once

// Pointwise maps between physical pressure p, modified pressure p~ = p + xi,
// the Hopf-Cole variable P and the Kirchhoff variable P_K for a Barus fluid.
//
// All functions are pure. Results that cannot be represented as finite
// doubles raise ErrorKind::Overflow instead of returning inf or 0.

#include <functional>

#include "poroflow/geometry.hpp"

namespace poroflow {

/// Barus law mu(p) = mu0 exp[beta (p/p0 - 1)].
struct FluidModel {
    double mu0 = 3.95e-5;   // [Pa s]
    double beta = 3.0e-6;   // [-]
    double p0 = 101325.0;   // [Pa]

    /// Throws InvalidArgument unless mu0 > 0, p0 > 0, beta >= 0 (all finite).
    void validate() const;

    /// p0 / beta, the natural scale of the transformed variables.
    [[nodiscard]] double transform_scale() const;

    static FluidModel reference_oil() { return {}; }
};

/// Scalar potential xi with rho b = -grad xi.
class BodyForcePotential {
public:
    BodyForcePotential() = default;
    explicit BodyForcePotential(std::function<double(Point)> xi);

    /// xi(x, y) = weight * y: gravity acting in -y with weight = rho g [Pa/m].
    static BodyForcePotential gravity(double weight);

    [[nodiscard]] double operator()(Point x) const { return is_zero() ? 0.0 : xi_(x); }
    [[nodiscard]] bool is_zero() const noexcept { return !xi_; }

private:
    std::function<double(Point)> xi_;
};

/// Integration constants of the general transform family
///   -(p0/beta) exp[-beta (p~/p0 - 1)] = A P + B.
/// A = 1, B = 0 is the Hopf-Cole map used by the solver; A = 1, B = -p0/beta
/// is the Kirchhoff map.
struct TransformConstants {
    double A = 1.0;
    double B = 0.0;

    static TransformConstants hopf_cole() { return {1.0, 0.0}; }
    static TransformConstants kirchhoff(const FluidModel& fluid);
};

[[nodiscard]] double viscosity(double p, const FluidModel& fluid);

[[nodiscard]] inline double modified_pressure(double p, double xi_value) { return p + xi_value; }

/// mu~0 = mu0 exp[-beta xi / p0].
[[nodiscard]] double reference_viscosity(double xi_value, const FluidModel& fluid);

/// g(p~) = exp[beta (p~/p0 - 1)], so that viscosity(p) = mu~0(xi) g(p + xi).
[[nodiscard]] double pressure_multiplier(double ptilde, const FluidModel& fluid);

/// P -> p~ = p0 (1 - ln[-beta P / p0] / beta). Requires P < 0.
/// Throws Degenerate for beta = 0 and DomainViolation for P >= 0.
[[nodiscard]] double hopf_cole_forward(double P, const FluidModel& fluid);

/// (p, xi) -> P = -(p0/beta) exp[-beta ((p + xi)/p0 - 1)], always < 0.
[[nodiscard]] double hopf_cole_inverse(double p, double xi_value, const FluidModel& fluid);

/// General family member: P -> p~ for arbitrary (A, B), A != 0.
[[nodiscard]] double transform_family_forward(double P, const FluidModel& fluid,
                                              const TransformConstants& constants);
/// General family member: p~ -> P for arbitrary (A, B), A != 0.
[[nodiscard]] double transform_family_inverse(double ptilde, const FluidModel& fluid,
                                              const TransformConstants& constants);

/// p~ -> P_K = (p0/beta)(1 - exp[-beta (p~/p0 - 1)]).
[[nodiscard]] double kirchhoff_forward(double ptilde, const FluidModel& fluid);

/// P_K -> p~ = p0 (1 - ln[1 - beta P_K / p0] / beta). Requires beta P_K / p0 < 1.
[[nodiscard]] double kirchhoff_inverse(double PK, const FluidModel& fluid);

}  // namespace poroflow
