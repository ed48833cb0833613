#pragma once

#include <utility>

#include "ehss/plant.hpp"

namespace ehss {

/// Design parameters of the adaptive backstepping controller plus the plant
/// constants the control law is allowed to know.
struct ControllerConfig {
    double lambda = 13.5585;  ///< Young's-inequality design gain
    double k_o = 1.0;         ///< feedback gain
    double gamma6 = 1e-10;    ///< adaptation rate for theta_hat
    double gamma7 = 1e-10;    ///< adaptation rate for theta_d_hat
    double d_max = 0.1;       ///< assumed disturbance bound
    double f_max = 10.0;      ///< assumed friction-perturbation bound

    /// Width of the smoothed switching layer around h(e) = 0. The robust
    /// magnitude term enters v as -tanh(h/eps) * margin; see control().
    double boundary_layer = 1.0;

    /// Servo-valve current limit [A]; the commanded u is clamped to
    /// [-u_max, u_max]. Keeping this below the level where valve flow at the
    /// pressure rail exceeds leakage makes |xi3| < P_d invariant.
    double u_max = 1e-3;

    /// Servo-valve first-order lag time constant [s]; the applied current
    /// follows the command through 1/(tau s + 1), discretized exactly on the
    /// control grid. Attenuates command content at the lightly damped
    /// hydraulic resonance (~532 rad/s) so the switching term cannot pump it,
    /// while leaving the loop dynamics smooth.
    double actuator_tau = 0.01;

    /// Projection box for the estimates: |theta_hat_i| <= theta_hat_cap[i]
    /// and |theta_d_hat_i| <= theta_hat_cap[i] / m_t. Each cap bounds the
    /// contribution of its regressor component to the stiffness estimate
    /// beta_hat by about three times the physical stiffness k_l + dk_l over
    /// the operating envelope (|xi1|, |xi2| of order one, |xi3| <= P_d).
    Vec3 theta_hat_cap{4.5e4, 4.5e4, 5e-11};

    // Known plant-side constants, mirrored from PlantParams.
    double b0 = 590.0;
    double bulk_modulus = 2.2e9;
    double chamber_volume = 1e-3;
    double piston_area = 1.5e-3;
    double total_mass = 70.0;
    double valve_gain = 5.12e-5;
    double leakage_gain = 4.1816e-12;
    double leakage_shape = 8571.0;
    double pressure_diff = 2.99e7;

    /// Copy the known constants from a plant description.
    static ControllerConfig from_plant(const PlantParams& p);

    void validate() const;
};

/// Closed-form stabilizing coefficients:
/// alpha4 = 3/2 + lambda, alpha5 = 1 + 1/lambda^3 + 1/(2 lambda),
/// alpha6 = 1/lambda^4.
struct Gains {
    double alpha4 = 0.0;
    double alpha5 = 0.0;
    double alpha6 = 0.0;
};

/// Throws DomainError if lambda <= 0.
Gains gains(double lambda);

/// Running parameter estimates, owned by one simulation instance.
struct AdaptiveState {
    Vec3 theta_hat{0.0, 0.0, 0.0};
    Vec3 theta_d_hat{0.0, 0.0, 0.0};
};

/// Tracking errors e1 = xi1 - r, e2 = xi2 - rdot,
/// e3 = f(xi) - rddot with f evaluated using the controller's own estimates.
struct ErrorVector {
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;
};

ErrorVector compute_errors(const SimState& xi, const ReferenceFrame& ref,
                           const AdaptiveState& adapt, const ControllerConfig& cfg);

/// Stabilizing functions h(e) and g(e, xi).
struct StabilizingPair {
    double h = 0.0;
    double g = 0.0;
};

StabilizingPair stabilizing_functions(const ErrorVector& e, const SimState& xi, const Gains& g,
                                      const ControllerConfig& cfg);

/// The robust magnitude bracket that v must dominate:
///   |g(e,xi)| + |alpha4 - alpha6 theta_d_hat^T phi| d_max + Phi(xi, theta_hat)
///   + alpha6 |xi3| F_max + alpha6 |xi2| F_max^3
/// with Phi the magnitude bound of the estimate-dependent terms,
///   Phi = |A1 theta_hat^T phi xi1| + |A2 theta_hat^T phi xi2|
///       + alpha6 F_max |xi1| |theta_hat^T phi|.
double robust_margin(const ErrorVector& e, const SimState& xi, const AdaptiveState& adapt,
                     const Gains& g, const ControllerConfig& cfg);

/// State-dependent input gain m_t V_t / (4 alpha6 S B k min(sqrt(P_d - xi3),
/// sqrt(P_d + xi3))); u = input_gain * v.
/// Throws SaturationError when the denominator underflows (|xi3| -> P_d).
double input_gain(const SimState& xi, const Gains& g, const ControllerConfig& cfg);

struct ControlSignal {
    double u = 0.0;
    double v = 0.0;
};

/// Adaptive feedback v = -tanh(h/eps) * robust_margin - k_o h,
/// u = clamp(gain * v, -u_max, u_max).
/// The switching factor keeps v in opposition to h(e); it is smoothed over
/// the configured boundary layer so that u stays continuous in e.
ControlSignal control(const ErrorVector& e, const SimState& xi, const AdaptiveState& adapt,
                      const Gains& g, const ControllerConfig& cfg);

/// Adaptation laws:
///   dtheta_hat/dt  = gamma6 (A1 h phi xi1 - A2 h phi xi2 + alpha6 F_max |xi1| phi)
///   dtheta_d_hat/dt = -gamma7 alpha6 phi d_max
/// with A1 = alpha6 b0 / m_t^2, A2 = alpha6 / m_t. Both rates are parallel
/// to phi(xi).
std::pair<Vec3, Vec3> adaptation_rates(const ErrorVector& e, const SimState& xi,
                                       const AdaptiveState& adapt, const Gains& g,
                                       const ControllerConfig& cfg);

/// Sliding-mode baseline: u = clamp(-K sign(s) - K_eq s, -u_max, u_max),
/// s = e3 + c2 e2 + c1 e1.
struct SmcConfig {
    double c1 = 25.0;
    double c2 = 10.0;
    double gain = 3e-4;     ///< K, switching amplitude [A]
    double eq_gain = 1e-3;  ///< K_eq, linear pull toward the surface
    double u_max = 1e-3;    ///< valve current limit [A]
};

double smc_control(const ErrorVector& e, const SmcConfig& cfg);

}  // namespace ehss
