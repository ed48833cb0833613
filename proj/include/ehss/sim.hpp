#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ehss/controller.hpp"
#include "ehss/linalg.hpp"
#include "ehss/plant.hpp"

namespace ehss {

enum class DisturbanceKind { constant, sinusoidal };

struct DisturbanceSpec {
    DisturbanceKind kind = DisturbanceKind::constant;
    double amplitude = 0.1;
    double frequency = 1.0;  ///< rad/s, sinusoidal kind only

    double value(double t) const;
};

struct SimConfig {
    double horizon = 20.0;
    double sample_dt = 0.01;    ///< logging/objective grid
    double control_dt = 1e-4;   ///< control update grid (zero-order hold)
    double internal_dt = 1e-4;  ///< fixed RK4 step
    Reference reference;
    std::uint64_t seed = 0;
    DisturbanceSpec disturbance;

    void validate() const;
    int steps_per_sample() const;   ///< internal steps per logged sample
    int steps_per_control() const;  ///< internal steps per control update
    int sample_count() const;  ///< horizon / sample_dt (records = count + 1)
};

struct Sample {
    double t = 0.0;
    SimState xi;
    double r = 0.0;
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
    double u = 0.0;
    double v = 0.0;
    Vec3 theta_hat{0.0, 0.0, 0.0};
    Vec3 theta_d_hat{0.0, 0.0, 0.0};
    double lyapunov = 0.0;       ///< V
    double lyapunov_rate = 0.0;  ///< central-difference dV/dt
    double rhs_bound = 0.0;      ///< theoretical decrease bound
    bool saturated = false;
};

struct SimLog {
    std::vector<Sample> samples;
    bool diverged = false;
    std::string divergence_reason;
};

/// Closed loop: plant + adaptive backstepping controller + adaptation laws.
/// The applied valve current is refreshed every control_dt (zero-order hold,
/// filtered through the first-order valve lag); (xi, theta_hat,
/// theta_d_hat) are integrated at
/// internal_dt with classical RK4 and the estimates are projected back into
/// the configured box after each step. Divergence (any state beyond 1e12 or
/// non-finite) stops the run and returns the partial log with the flag set.
SimLog simulate(const PlantParams& plant, const ControllerConfig& ctrl, const SimConfig& sim);

/// Same loop with the sliding-mode baseline; no adaptation. The v column of
/// the log records the sliding surface value.
SimLog simulate_smc(const PlantParams& plant, const SmcConfig& smc, const SimConfig& sim);

struct ObjectiveWeights {
    double gamma1_weight = 1.0;
    double gamma2_weight = 1.0;

    void validate() const;
};

/// Obj = sum over samples t = sample_dt ... horizon of G1 e1^2 + G2 u^2
/// (t = 0 excluded). Throws IncompleteLog on a diverged run.
double objective(const SimLog& log, const ObjectiveWeights& w);

enum class PhiVariant {
    proof,    ///< rows (1/sqrt2, lambda, a1; 0, 1, a2; 0, 0, a3)
    scaled,   ///< rows (1, lambda, a1/l^2; 0, 1, a2/l^2; 0, 0, a3/l^2)
};

/// The upper-triangular weighting matrix of the ultimate-bound analysis,
/// with the identification alpha1..3 = alpha4..6.
Mat3 phi_matrix(const Gains& g, double lambda, PhiVariant variant);

struct UltimateBound {
    double bound = 0.0;      ///< ||e||^2 bound from the proof-form matrix
    double sigma_min = 0.0;  ///< smallest eigenvalue of phi phi^T (proof form)
    double bound_scaled = 0.0;
    double sigma_min_scaled = 0.0;
};

/// bound = d_max^2 / (2 (lambda + lambda^5) sigma_min(phi phi^T)), reported
/// for both weighting-matrix forms. Throws DomainError for lambda <= 0.
UltimateBound ultimate_bound(const ControllerConfig& ctrl, const Gains& g);

/// Fill the per-sample Lyapunov columns of a completed (or partial) log:
/// V per the proof's V1..V4 with theta_tilde = theta_true - theta_hat,
/// dV/dt by central differences over sample_dt (each squared term is
/// differenced in factored form (a+b)(a-b) so the result stays accurate when
/// V4 dwarfs the tracking terms), and the theoretical bound
///   -(lambda/2) e1^2 + (1/(2l) + 1/(2l^5)) d_max^2
///   - (e2 + l e1)^2 - (a4 e1 + a5 e2 + a6 e3)^2.
void lyapunov_diagnostics(SimLog& log, const ControllerConfig& ctrl, const Vec3& theta_true);

/// Discretization tolerance for checking dV/dt against the bound:
/// 10 * sample_dt * max|V-ddot|, with V-ddot estimated by differencing the
/// (cancellation-safe) lyapunov_rate column.
double lyapunov_tolerance(const SimLog& log, double sample_dt);

/// CSV with 17-significant-digit floats; columns
/// t, xi1..3, r, e1..3, u, v, theta_hat_1..3, theta_d_hat_1..3,
/// V, Vdot, rhs_bound, saturated.
void write_csv(const SimLog& log, const std::filesystem::path& path);
SimLog read_csv(const std::filesystem::path& path);

}  // namespace ehss
