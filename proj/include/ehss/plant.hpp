#pragma once

#include <array>

#include "ehss/errors.hpp"

namespace ehss {

using Vec3 = std::array<double, 3>;

/// Physical constants of the electro-hydraulic servo plant plus the "true"
/// realizations of the uncertain quantities (known to the simulator, hidden
/// from the controller).
struct PlantParams {
    double bulk_modulus = 2.2e9;          ///< B [Pa]
    double chamber_volume = 1e-3;         ///< V_t [m^3]
    double piston_area = 1.5e-3;          ///< S [m^2]
    double total_mass = 70.0;             ///< m_t [kg]
    double viscous_coeff = 590.0;         ///< b0 [kg/s]
    double valve_gain = 5.12e-5;          ///< k [m^3 s^-1 A^-1 Pa^1/2]
    double leakage_shape = 8571.0;        ///< gamma [1/s]
    double leakage_gain = 4.1816e-12;     ///< alpha [m^3 s^-1 Pa^-1]
    double supply_pressure = 300e5;       ///< P_s [Pa]
    double return_pressure = 1e5;         ///< P_r [Pa]
    double pressure_diff = 2.99e7;        ///< P_d = P_s - P_r [Pa]
    double spring_stiffness = 12500.0;    ///< k_l [N/m]
    double stiffness_uncertainty = 2500;  ///< dk_l [N/m]

    /// True nonlinear-stiffness coefficients (gamma3, gamma4, gamma5):
    /// beta = theta^T (xi1^2, xi2^2, xi3^2). Default recovers k_l + dk_l at
    /// unit position while staying bounded over the operating envelope.
    Vec3 theta_true{15000.0, 0.0, 0.0};

    double d_const = 0.1;       ///< disturbance amplitude [m/s]
    double f_max_true = 10.0;   ///< bound on the true friction perturbation [kg/s]

    /// Throws DomainError if a positivity or ordering invariant is violated.
    void validate() const;
};

/// Strict-feedback state: xi1 position [m], xi2 velocity [m/s],
/// xi3 differential pressure [Pa].
struct SimState {
    double position = 0.0;
    double velocity = 0.0;
    double pressure = 0.0;
};

/// Reference trajectory value with its first three derivatives.
struct ReferenceFrame {
    double r = 0.0;
    double r_dot = 0.0;
    double r_ddot = 0.0;
    double r_dddot = 0.0;
};

enum class ReferenceKind { step, sine, sum_of_sines };

struct Reference {
    ReferenceKind kind = ReferenceKind::step;
    double amplitude = 0.2;  ///< step height, or sine amplitude (0.05 default)
};

/// Default amplitude for a given reference kind (0.2 step / 0.05 sinusoids).
double default_amplitude(ReferenceKind kind);

/// Regressor phi(xi) = (xi1^2, xi2^2, xi3^2).
Vec3 regressor(const SimState& xi);

/// Effective nonlinear stiffness beta = theta^T phi(xi) [N/m].
double beta_effective(const SimState& xi, const Vec3& theta);

/// Bounded friction perturbation Delta f; default realization
/// f_max_true * sin(xi2), which saturates the bound exactly.
double friction_perturbation(const SimState& xi, double t, const PlantParams& p);

/// State derivative plus a flag noting that the square-root argument had to
/// be clamped (|xi3| >= P_d).
struct StateRate {
    SimState rate;
    bool saturated = false;
};

/// Continuous-time dynamics in strict-feedback coordinates.
/// sign(0) = 0, so the valve flow term vanishes at u = 0.
/// Throws NonFiniteState if any input is NaN or infinite.
StateRate derivatives(const SimState& xi, double u, double d, double t, const PlantParams& p);

/// Evaluate the reference trajectory at time t (t >= 0) with analytically
/// exact derivatives.
ReferenceFrame reference(const Reference& ref, double t);

}  // namespace ehss
