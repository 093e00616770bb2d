#include "poroflow/transform.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "poroflow/errors.hpp"

namespace poroflow {

namespace {

void require_nondegenerate(const FluidModel& fluid, const char* what) {
    if (fluid.beta == 0.0) {
        throw Error(ErrorKind::Degenerate,
                    std::string(what) + " is undefined for beta = 0; use the constant-viscosity solve");
    }
}

double checked_exp(double exponent, const char* what) {
    const double e = std::exp(exponent);
    if (!std::isfinite(e) || e == 0.0) {
        std::ostringstream os;
        os << what << ": exp(" << exponent << ") is not representable";
        throw Error(ErrorKind::Overflow, os.str());
    }
    return e;
}

}  // namespace

void FluidModel::validate() const {
    if (!(std::isfinite(mu0) && mu0 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "fluid: mu0 must be positive");
    }
    if (!(std::isfinite(p0) && p0 > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "fluid: p0 must be positive");
    }
    if (!(std::isfinite(beta) && beta >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "fluid: beta must be non-negative");
    }
}

double FluidModel::transform_scale() const {
    require_nondegenerate(*this, "transform scale p0/beta");
    return p0 / beta;
}

BodyForcePotential::BodyForcePotential(std::function<double(Point)> xi) : xi_(std::move(xi)) {}

BodyForcePotential BodyForcePotential::gravity(double weight) {
    if (weight == 0.0) return {};
    return BodyForcePotential([weight](Point x) { return weight * x.y; });
}

TransformConstants TransformConstants::kirchhoff(const FluidModel& fluid) {
    return {1.0, -fluid.transform_scale()};
}

double viscosity(double p, const FluidModel& fluid) {
    return fluid.mu0 * std::exp(fluid.beta * (p / fluid.p0 - 1.0));
}

double reference_viscosity(double xi_value, const FluidModel& fluid) {
    return fluid.mu0 * std::exp(-fluid.beta * xi_value / fluid.p0);
}

double pressure_multiplier(double ptilde, const FluidModel& fluid) {
    return std::exp(fluid.beta * (ptilde / fluid.p0 - 1.0));
}

double hopf_cole_forward(double P, const FluidModel& fluid) {
    return transform_family_forward(P, fluid, TransformConstants::hopf_cole());
}

double hopf_cole_inverse(double p, double xi_value, const FluidModel& fluid) {
    return transform_family_inverse(p + xi_value, fluid, TransformConstants::hopf_cole());
}

double transform_family_forward(double P, const FluidModel& fluid, const TransformConstants& constants) {
    require_nondegenerate(fluid, "Hopf-Cole forward map");
    if (constants.A == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "transform constant A must be non-zero");
    }
    const double scale = fluid.p0 / fluid.beta;
    // ln argument: -(A P + B) / (p0/beta); must be positive.
    const double arg = -(constants.A * P + constants.B) / scale;
    if (!(arg > 0.0)) {
        std::ostringstream os;
        os << "no real pressure corresponds to transformed value " << P;
        throw Error(ErrorKind::DomainViolation, os.str());
    }
    if (!std::isfinite(arg)) {
        throw Error(ErrorKind::Overflow, "Hopf-Cole forward map: argument is not finite");
    }
    return fluid.p0 * (1.0 - std::log(arg) / fluid.beta);
}

double transform_family_inverse(double ptilde, const FluidModel& fluid, const TransformConstants& constants) {
    require_nondegenerate(fluid, "Hopf-Cole inverse map");
    if (constants.A == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "transform constant A must be non-zero");
    }
    const double scale = fluid.p0 / fluid.beta;
    const double e = checked_exp(-fluid.beta * (ptilde / fluid.p0 - 1.0), "Hopf-Cole inverse map");
    const double P = (-scale * e - constants.B) / constants.A;
    if (!std::isfinite(P)) {
        throw Error(ErrorKind::Overflow, "Hopf-Cole inverse map: result is not finite");
    }
    return P;
}

double kirchhoff_forward(double ptilde, const FluidModel& fluid) {
    require_nondegenerate(fluid, "Kirchhoff map");
    const double scale = fluid.p0 / fluid.beta;
    const double exponent = -fluid.beta * (ptilde / fluid.p0 - 1.0);
    const double em1 = std::expm1(exponent);
    if (!std::isfinite(em1)) {
        throw Error(ErrorKind::Overflow, "Kirchhoff map: exp overflow");
    }
    const double PK = -scale * em1;
    if (!std::isfinite(PK)) {
        throw Error(ErrorKind::Overflow, "Kirchhoff map: result is not finite");
    }
    return PK;
}

double kirchhoff_inverse(double PK, const FluidModel& fluid) {
    require_nondegenerate(fluid, "Kirchhoff inverse map");
    const double scale = fluid.p0 / fluid.beta;
    const double ratio = PK / scale;
    if (!(ratio < 1.0)) {
        std::ostringstream os;
        os << "Kirchhoff value " << PK << " is outside the domain (beta P_K / p0 must be < 1)";
        throw Error(ErrorKind::DomainViolation, os.str());
    }
    return fluid.p0 * (1.0 - std::log1p(-ratio) / fluid.beta);
}

}  // namespace poroflow
