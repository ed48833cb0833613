#include "ehss/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ehss {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double signum(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

ControllerConfig ControllerConfig::from_plant(const PlantParams& p) {
    ControllerConfig c;
    c.b0 = p.viscous_coeff;
    c.bulk_modulus = p.bulk_modulus;
    c.chamber_volume = p.chamber_volume;
    c.piston_area = p.piston_area;
    c.total_mass = p.total_mass;
    c.valve_gain = p.valve_gain;
    c.leakage_gain = p.leakage_gain;
    c.leakage_shape = p.leakage_shape;
    c.pressure_diff = p.pressure_diff;
    return c;
}

void ControllerConfig::validate() const {
    if (lambda <= 0 || k_o <= 0 || gamma6 <= 0 || gamma7 <= 0) {
        throw DomainError("controller: lambda, k_o, gamma6, gamma7 must be positive");
    }
    if (d_max < 0 || f_max < 0) {
        throw DomainError("controller: d_max and F_max must be non-negative");
    }
    if (boundary_layer <= 0) {
        throw DomainError("controller: boundary layer width must be positive");
    }
    if (u_max <= 0) {
        throw DomainError("controller: u_max must be positive");
    }
    if (actuator_tau <= 0) {
        throw DomainError("controller: actuator_tau must be positive");
    }
    for (double cap : theta_hat_cap) {
        if (cap <= 0) throw DomainError("controller: theta_hat_cap entries must be positive");
    }
}

Gains gains(double lambda) {
    if (lambda <= 0) {
        throw DomainError("gains: lambda must be positive, got " + std::to_string(lambda));
    }
    Gains g;
    g.alpha4 = 1.5 + lambda;
    g.alpha5 = 1.0 + 1.0 / (lambda * lambda * lambda) + 1.0 / (2.0 * lambda);
    g.alpha6 = 1.0 / (lambda * lambda * lambda * lambda);
    return g;
}

ErrorVector compute_errors(const SimState& xi, const ReferenceFrame& ref,
                           const AdaptiveState& adapt, const ControllerConfig& cfg) {
    ErrorVector e;
    e.e1 = xi.position - ref.r;
    e.e2 = xi.velocity - ref.r_dot;
    // f(xi) = xi2-dot with nominal b0 and the controller's beta estimate.
    const double beta_hat = dot(adapt.theta_hat, regressor(xi));
    const double f = (cfg.piston_area * xi.pressure - cfg.b0 * xi.velocity -
                      beta_hat * xi.position) /
                     cfg.total_mass;
    e.e3 = f - ref.r_ddot;
    return e;
}

StabilizingPair stabilizing_functions(const ErrorVector& e, const SimState& xi, const Gains& g,
                                      const ControllerConfig& cfg) {
    StabilizingPair out;
    out.h = g.alpha4 * e.e1 + g.alpha5 * e.e2 + g.alpha6 * e.e3;
    const double mt = cfg.total_mass;
    out.g = e.e2 + cfg.lambda * e.e1 + g.alpha4 * e.e2 + g.alpha5 * e.e3 +
            g.alpha6 * (cfg.b0 * cfg.b0 / (mt * mt) -
                        4.0 * cfg.bulk_modulus * cfg.piston_area * cfg.piston_area /
                            (mt * cfg.chamber_volume)) *
                xi.velocity -
            cfg.b0 * cfg.piston_area / (mt * mt) * xi.pressure;
    return out;
}

double robust_margin(const ErrorVector& e, const SimState& xi, const AdaptiveState& adapt,
                     const Gains& g, const ControllerConfig& cfg) {
    const StabilizingPair s = stabilizing_functions(e, xi, g, cfg);
    const Vec3 phi = regressor(xi);
    const double mt = cfg.total_mass;
    const double a1 = g.alpha6 * cfg.b0 / (mt * mt);
    const double a2 = g.alpha6 / mt;
    const double beta_hat = dot(adapt.theta_hat, phi);
    const double phi_bound = std::fabs(a1 * beta_hat * xi.position) +
                             std::fabs(a2 * beta_hat * xi.velocity) +
                             g.alpha6 * cfg.f_max * std::fabs(xi.position) * std::fabs(beta_hat);
    const double fmax3 = cfg.f_max * cfg.f_max * cfg.f_max;
    return std::fabs(s.g) +
           std::fabs(g.alpha4 - g.alpha6 * dot(adapt.theta_d_hat, phi)) * cfg.d_max + phi_bound +
           g.alpha6 * std::fabs(xi.pressure) * cfg.f_max +
           g.alpha6 * std::fabs(xi.velocity) * fmax3;
}

double input_gain(const SimState& xi, const Gains& g, const ControllerConfig& cfg) {
    // Mirror the plant's square-root saturation: |xi3| is clamped to
    // 0.999 P_d before the gain is formed, so a transient over-pressure
    // commands a finite (large) current instead of dividing by zero.
    const double cap = 0.999 * cfg.pressure_diff;
    const double xi3 = std::clamp(xi.pressure, -cap, cap);
    const double lo = cfg.pressure_diff - xi3;
    const double hi = cfg.pressure_diff + xi3;
    const double root = std::sqrt(std::max(std::min(lo, hi), 0.0));
    const double denom =
        4.0 * g.alpha6 * cfg.piston_area * cfg.bulk_modulus * cfg.valve_gain * root;
    if (!(denom > 1e-300)) {
        throw SaturationError("control: input-gain denominator underflow, xi3 = " +
                              std::to_string(xi.pressure) + " Pa against P_d = " +
                              std::to_string(cfg.pressure_diff) + " Pa");
    }
    return cfg.total_mass * cfg.chamber_volume / denom;
}

ControlSignal control(const ErrorVector& e, const SimState& xi, const AdaptiveState& adapt,
                      const Gains& g, const ControllerConfig& cfg) {
    const StabilizingPair s = stabilizing_functions(e, xi, g, cfg);
    const double margin = robust_margin(e, xi, adapt, g, cfg);
    ControlSignal out;
    out.v = -std::tanh(s.h / cfg.boundary_layer) * margin - cfg.k_o * s.h;
    out.u = std::clamp(input_gain(xi, g, cfg) * out.v, -cfg.u_max, cfg.u_max);
    return out;
}

std::pair<Vec3, Vec3> adaptation_rates(const ErrorVector& e, const SimState& xi,
                                       const AdaptiveState& /*adapt*/, const Gains& g,
                                       const ControllerConfig& cfg) {
    const Vec3 phi = regressor(xi);
    const StabilizingPair s = stabilizing_functions(e, xi, g, cfg);
    const double mt = cfg.total_mass;
    const double a1 = g.alpha6 * cfg.b0 / (mt * mt);
    const double a2 = g.alpha6 / mt;
    const double c_theta = cfg.gamma6 * (a1 * s.h * xi.position - a2 * s.h * xi.velocity +
                                         g.alpha6 * cfg.f_max * std::fabs(xi.position));
    const double c_theta_d = -cfg.gamma7 * g.alpha6 * cfg.d_max;
    Vec3 d_theta, d_theta_d;
    for (int i = 0; i < 3; ++i) {
        d_theta[i] = c_theta * phi[i];
        d_theta_d[i] = c_theta_d * phi[i];
    }
    return {d_theta, d_theta_d};
}

double smc_control(const ErrorVector& e, const SmcConfig& cfg) {
    const double s = e.e3 + cfg.c2 * e.e2 + cfg.c1 * e.e1;
    return std::clamp(-cfg.gain * signum(s) - cfg.eq_gain * s, -cfg.u_max, cfg.u_max);
}

}  // namespace ehss
