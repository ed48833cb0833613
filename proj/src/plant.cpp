#include "ehss/plant.hpp"

#include <cmath>

namespace ehss {

namespace {

double signum(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

bool all_finite(const SimState& xi) {
    return std::isfinite(xi.position) && std::isfinite(xi.velocity) && std::isfinite(xi.pressure);
}

}  // namespace

void PlantParams::validate() const {
    if (bulk_modulus <= 0 || chamber_volume <= 0 || piston_area <= 0 || total_mass <= 0 ||
        valve_gain <= 0 || supply_pressure <= 0) {
        throw DomainError("plant: B, V_t, S, m_t, k, P_s must all be strictly positive");
    }
    if (pressure_diff <= 0) {
        throw DomainError("plant: P_d = P_s - P_r must be positive");
    }
    if (f_max_true < 0 || d_const < 0) {
        throw DomainError("plant: disturbance/friction bounds must be non-negative");
    }
}

double default_amplitude(ReferenceKind kind) {
    return kind == ReferenceKind::step ? 0.2 : 0.05;
}

Vec3 regressor(const SimState& xi) {
    return {xi.position * xi.position, xi.velocity * xi.velocity, xi.pressure * xi.pressure};
}

double beta_effective(const SimState& xi, const Vec3& theta) {
    const Vec3 phi = regressor(xi);
    return theta[0] * phi[0] + theta[1] * phi[1] + theta[2] * phi[2];
}

double friction_perturbation(const SimState& xi, double /*t*/, const PlantParams& p) {
    return p.f_max_true * std::sin(xi.velocity);
}

StateRate derivatives(const SimState& xi, double u, double d, double t, const PlantParams& p) {
    if (!all_finite(xi) || !std::isfinite(u) || !std::isfinite(d)) {
        throw NonFiniteState("plant: non-finite state or input reached derivatives()");
    }

    StateRate out;
    out.rate.position = xi.velocity + d;

    const double b = p.viscous_coeff + friction_perturbation(xi, t, p);
    const double beta = beta_effective(xi, p.theta_true);
    out.rate.velocity =
        (p.piston_area * xi.pressure - b * xi.velocity - beta * xi.position) / p.total_mass;

    // Clamp |xi3| inside the square-root argument only; the stored state is
    // never altered, the caller just gets the saturation flag.
    double xi3 = xi.pressure;
    const double cap = 0.999 * p.pressure_diff;
    if (std::fabs(xi3) > cap) {
        xi3 = std::copysign(cap, xi3);
        out.saturated = true;
    }
    const double sqrt_arg = p.pressure_diff - signum(u) * xi3;
    const double flow = p.valve_gain * u * std::sqrt(sqrt_arg);
    const double leakage = p.leakage_gain * xi.pressure / (1.0 + p.leakage_shape * std::fabs(u));
    out.rate.pressure = 4.0 * p.bulk_modulus / p.chamber_volume *
                        (flow - leakage - p.piston_area * xi.velocity);
    return out;
}

ReferenceFrame reference(const Reference& ref, double t) {
    ReferenceFrame f;
    switch (ref.kind) {
        case ReferenceKind::step:
            f.r = ref.amplitude;
            break;
        case ReferenceKind::sine:
            f.r = ref.amplitude * std::sin(t);
            f.r_dot = ref.amplitude * std::cos(t);
            f.r_ddot = -ref.amplitude * std::sin(t);
            f.r_dddot = -ref.amplitude * std::cos(t);
            break;
        case ReferenceKind::sum_of_sines:
            for (int n = 1; n <= 3; ++n) {
                f.r += ref.amplitude * std::sin(n * t);
                f.r_dot += ref.amplitude * n * std::cos(n * t);
                f.r_ddot -= ref.amplitude * n * n * std::sin(n * t);
                f.r_dddot -= ref.amplitude * n * n * n * std::cos(n * t);
            }
            break;
    }
    return f;
}

}  // namespace ehss
