#include "ehss/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ehss/rk4.hpp"

namespace ehss {

namespace {

constexpr double kDivergenceLimit = 1e12;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Combined continuous state: xi (3), theta_hat (3), theta_d_hat (3).
using Y = std::array<double, 9>;

SimState state_of(const Y& y) { return {y[0], y[1], y[2]}; }

AdaptiveState estimates_of(const Y& y) {
    return {{y[3], y[4], y[5]}, {y[6], y[7], y[8]}};
}

bool out_of_range(const Y& y) {
    for (double v : y) {
        if (!std::isfinite(v) || std::fabs(v) > kDivergenceLimit) return true;
    }
    return false;
}

}  // namespace

double DisturbanceSpec::value(double t) const {
    return kind == DisturbanceKind::constant ? amplitude : amplitude * std::sin(frequency * t);
}

void SimConfig::validate() const {
    if (horizon <= 0 || sample_dt <= 0 || control_dt <= 0 || internal_dt <= 0) {
        throw DomainError("sim: horizon, sample_dt, control_dt, internal_dt must be positive");
    }
    const double steps = sample_dt / internal_dt;
    if (std::fabs(steps - std::round(steps)) > 1e-9 * steps) {
        throw DomainError("sim: internal_dt must divide sample_dt");
    }
    const double csteps = control_dt / internal_dt;
    if (std::fabs(csteps - std::round(csteps)) > 1e-9 * csteps) {
        throw DomainError("sim: internal_dt must divide control_dt");
    }
    const double holds = sample_dt / control_dt;
    if (std::fabs(holds - std::round(holds)) > 1e-9 * holds) {
        throw DomainError("sim: control_dt must divide sample_dt");
    }
    const double samples = horizon / sample_dt;
    if (std::fabs(samples - std::round(samples)) > 1e-9 * samples) {
        throw DomainError("sim: sample_dt must divide horizon");
    }
}

int SimConfig::steps_per_sample() const {
    return static_cast<int>(std::llround(sample_dt / internal_dt));
}

int SimConfig::steps_per_control() const {
    return static_cast<int>(std::llround(control_dt / internal_dt));
}

int SimConfig::sample_count() const {
    return static_cast<int>(std::llround(horizon / sample_dt));
}

SimLog simulate(const PlantParams& plant, const ControllerConfig& ctrl, const SimConfig& sim) {
    plant.validate();
    ctrl.validate();
    sim.validate();

    const Gains g = gains(ctrl.lambda);
    const int n_samples = sim.sample_count();
    const int inner = sim.steps_per_sample();
    const int hold = sim.steps_per_control();

    SimLog log;
    log.samples.reserve(n_samples + 1);

    Y y{};  // xi(0) = 0, theta_hat(0) = theta_d_hat(0) = 0
    bool interval_saturated = false;
    double u_applied = 0.0;
    // Exact zero-order-hold discretization of the valve lag on the control
    // grid, so the filter response is independent of internal_dt.
    const double alpha = 1.0 - std::exp(-sim.control_dt / ctrl.actuator_tau);
    auto track = [alpha](double applied, double command) {
        return applied + alpha * (command - applied);
    };
    // Projection: the estimates live in the configured box, the standard way
    // to keep an adaptation law with a one-sided drive term from escaping.
    // The drive can be enormous relative to the box (phi3 = xi3^2), so the
    // projection must act on the vector field itself: at a face of the box
    // the outward rate component is zeroed, otherwise a single RK4 stage
    // would overshoot the cap by orders of magnitude and the integration
    // would not converge with the step size.
    auto project = [&ctrl](Y& yy) {
        for (int i = 0; i < 3; ++i) {
            const double cap = ctrl.theta_hat_cap[i];
            yy[3 + i] = std::clamp(yy[3 + i], -cap, cap);
            const double cap_d = cap / ctrl.total_mass;
            yy[6 + i] = std::clamp(yy[6 + i], -cap_d, cap_d);
        }
    };
    auto project_rates = [&ctrl](const Y& yy, Vec3& dth, Vec3& dthd) {
        for (int i = 0; i < 3; ++i) {
            const double cap = ctrl.theta_hat_cap[i];
            if ((yy[3 + i] >= cap && dth[i] > 0) || (yy[3 + i] <= -cap && dth[i] < 0)) {
                dth[i] = 0.0;
            }
            const double cap_d = cap / ctrl.total_mass;
            if ((yy[6 + i] >= cap_d && dthd[i] > 0) || (yy[6 + i] <= -cap_d && dthd[i] < 0)) {
                dthd[i] = 0.0;
            }
        }
    };

    for (int k = 0; k <= n_samples; ++k) {
        const double t = k * sim.sample_dt;
        const SimState xi = state_of(y);
        const AdaptiveState adapt = estimates_of(y);
        const ReferenceFrame ref = reference(sim.reference, t);
        const ErrorVector e = compute_errors(xi, ref, adapt, ctrl);

        ControlSignal ctl;
        try {
            ctl = control(e, xi, adapt, g, ctrl);
        } catch (const SaturationError& err) {
            log.diverged = true;
            log.divergence_reason = err.what();
            break;
        }
        u_applied = track(u_applied, ctl.u);

        Sample rec;
        rec.t = t;
        rec.xi = xi;
        rec.r = ref.r;
        rec.e1 = e.e1;
        rec.e2 = e.e2;
        rec.e3 = e.e3;
        rec.u = u_applied;
        rec.v = ctl.v;
        rec.theta_hat = adapt.theta_hat;
        rec.theta_d_hat = adapt.theta_d_hat;
        rec.saturated = interval_saturated;
        log.samples.push_back(rec);

        if (k == n_samples) break;

        interval_saturated = false;
        double u_held = u_applied;
        bool blown = false;
        auto rate = [&](double tau, const Y& yy) -> Y {
            Y yc = yy;
            project(yc);  // intermediate stages see projected estimates
            const SimState s = state_of(yc);
            const AdaptiveState a = estimates_of(yc);
            const StateRate pr = derivatives(s, u_held, sim.disturbance.value(tau), tau, plant);
            if (pr.saturated) interval_saturated = true;
            const ReferenceFrame rf = reference(sim.reference, tau);
            const ErrorVector ee = compute_errors(s, rf, a, ctrl);
            auto [dth, dthd] = adaptation_rates(ee, s, a, g, ctrl);
            project_rates(yc, dth, dthd);
            return {pr.rate.position, pr.rate.velocity, pr.rate.pressure,
                    dth[0],           dth[1],           dth[2],
                    dthd[0],          dthd[1],          dthd[2]};
        };
        for (int i = 0; i < inner; ++i) {
            const double tau = t + i * sim.internal_dt;
            try {
                // Zero-order hold over control_dt: the control is refreshed
                // on its own grid, faster than the logging rate (the pressure
                // subsystem is far faster than 1/sample_dt) but independent of
                // internal_dt so the trajectory converges as the integrator
                // step is refined.
                if (i > 0 && i % hold == 0) {
                    const SimState s = state_of(y);
                    const AdaptiveState a = estimates_of(y);
                    const ReferenceFrame rf = reference(sim.reference, tau);
                    const ErrorVector ee = compute_errors(s, rf, a, ctrl);
                    u_applied = track(u_applied, control(ee, s, a, g, ctrl).u);
                    u_held = u_applied;
                }
                y = rk4_step(rate, tau, y, sim.internal_dt);
                project(y);
            } catch (const SaturationError& err) {
                log.diverged = true;
                log.divergence_reason = err.what();
                blown = true;
                break;
            } catch (const NonFiniteState& err) {
                log.diverged = true;
                log.divergence_reason = err.what();
                blown = true;
                break;
            }
            if (out_of_range(y)) {
                log.diverged = true;
                log.divergence_reason = "state magnitude exceeded 1e12 at t = " +
                                        std::to_string(tau + sim.internal_dt);
                blown = true;
                break;
            }
        }
        if (blown) break;
    }

    lyapunov_diagnostics(log, ctrl, plant.theta_true);
    return log;
}

SimLog simulate_smc(const PlantParams& plant, const SmcConfig& smc, const SimConfig& sim) {
    plant.validate();
    sim.validate();

    // Errors are evaluated with zero estimates (no adaptation in the baseline).
    const ControllerConfig nominal = ControllerConfig::from_plant(plant);
    const AdaptiveState zero{};
    const int n_samples = sim.sample_count();
    const int inner = sim.steps_per_sample();
    const int hold = sim.steps_per_control();

    SimLog log;
    log.samples.reserve(n_samples + 1);
    Y y{};
    bool interval_saturated = false;

    for (int k = 0; k <= n_samples; ++k) {
        const double t = k * sim.sample_dt;
        const SimState xi = state_of(y);
        const ReferenceFrame ref = reference(sim.reference, t);
        const ErrorVector e = compute_errors(xi, ref, zero, nominal);
        const double u = smc_control(e, smc);

        Sample rec;
        rec.t = t;
        rec.xi = xi;
        rec.r = ref.r;
        rec.e1 = e.e1;
        rec.e2 = e.e2;
        rec.e3 = e.e3;
        rec.u = u;
        rec.v = e.e3 + smc.c2 * e.e2 + smc.c1 * e.e1;  // sliding surface
        rec.saturated = interval_saturated;
        log.samples.push_back(rec);

        if (k == n_samples) break;

        interval_saturated = false;
        double u_held = u;
        bool blown = false;
        auto rate = [&](double tau, const Y& yy) -> Y {
            const StateRate pr =
                derivatives(state_of(yy), u_held, sim.disturbance.value(tau), tau, plant);
            if (pr.saturated) interval_saturated = true;
            return {pr.rate.position, pr.rate.velocity, pr.rate.pressure, 0, 0, 0, 0, 0, 0};
        };
        for (int i = 0; i < inner; ++i) {
            const double tau = t + i * sim.internal_dt;
            try {
                if (i > 0 && i % hold == 0) {
                    const ReferenceFrame rf = reference(sim.reference, tau);
                    const ErrorVector ee = compute_errors(state_of(y), rf, zero, nominal);
                    u_held = smc_control(ee, smc);
                }
                y = rk4_step(rate, tau, y, sim.internal_dt);
            } catch (const NonFiniteState& err) {
                log.diverged = true;
                log.divergence_reason = err.what();
                blown = true;
                break;
            }
            if (out_of_range(y)) {
                log.diverged = true;
                log.divergence_reason = "state magnitude exceeded 1e12 at t = " +
                                        std::to_string(tau + sim.internal_dt);
                blown = true;
                break;
            }
        }
        if (blown) break;
    }
    return log;
}

void ObjectiveWeights::validate() const {
    if (gamma1_weight < 0 || gamma2_weight < 0 || (gamma1_weight == 0 && gamma2_weight == 0)) {
        throw DomainError("objective: weights must be non-negative and not both zero");
    }
}

double objective(const SimLog& log, const ObjectiveWeights& w) {
    w.validate();
    if (log.diverged) {
        throw IncompleteLog("objective: run diverged (" + log.divergence_reason + ")");
    }
    double sum = 0.0;
    for (std::size_t k = 1; k < log.samples.size(); ++k) {
        const Sample& s = log.samples[k];
        sum += w.gamma1_weight * s.e1 * s.e1 + w.gamma2_weight * s.u * s.u;
    }
    return sum;
}

Mat3 phi_matrix(const Gains& g, double lambda, PhiVariant variant) {
    if (lambda <= 0) throw DomainError("phi_matrix: lambda must be positive");
    const double a1 = g.alpha4, a2 = g.alpha5, a3 = g.alpha6;
    if (variant == PhiVariant::proof) {
        return {{{1.0 / std::sqrt(2.0), lambda, a1}, {0.0, 1.0, a2}, {0.0, 0.0, a3}}};
    }
    const double l2 = lambda * lambda;
    return {{{1.0, lambda, a1 / l2}, {0.0, 1.0, a2 / l2}, {0.0, 0.0, a3 / l2}}};
}

namespace {

double sigma_min_phi(const Mat3& phi) {
    Mat3 a{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += phi[i][k] * phi[j][k];
            a[i][j] = s;
        }
    }
    return jacobi_eigenvalues_sym3(a)[0];
}

}  // namespace

UltimateBound ultimate_bound(const ControllerConfig& ctrl, const Gains& g) {
    const double l = ctrl.lambda;
    if (l <= 0) throw DomainError("ultimate_bound: lambda must be positive");
    const double denom_scale = 2.0 * (l + l * l * l * l * l);
    UltimateBound out;
    out.sigma_min = sigma_min_phi(phi_matrix(g, l, PhiVariant::proof));
    out.bound = ctrl.d_max * ctrl.d_max / (denom_scale * out.sigma_min);
    out.sigma_min_scaled = sigma_min_phi(phi_matrix(g, l, PhiVariant::scaled));
    out.bound_scaled = ctrl.d_max * ctrl.d_max / (denom_scale * out.sigma_min_scaled);
    return out;
}

void lyapunov_diagnostics(SimLog& log, const ControllerConfig& ctrl, const Vec3& theta_true) {
    const Gains g = gains(ctrl.lambda);
    const double l = ctrl.lambda;
    const double l4 = l * l * l * l;
    const double l5 = l4 * l;
    const Vec3 theta_d_true{theta_true[0] / ctrl.total_mass, theta_true[1] / ctrl.total_mass,
                            theta_true[2] / ctrl.total_mass};

    for (Sample& s : log.samples) {
        const double v1 = 0.5 * s.e1 * s.e1;
        const double z = s.e2 + l * s.e1;
        const double v2 = z * z / (2.0 * l4);
        const double h = g.alpha4 * s.e1 + g.alpha5 * s.e2 + g.alpha6 * s.e3;
        const double v3 = 0.5 * h * h;
        Vec3 th_t{}, thd_t{};
        for (int i = 0; i < 3; ++i) {
            th_t[i] = theta_true[i] - s.theta_hat[i];
            thd_t[i] = theta_d_true[i] - s.theta_d_hat[i];
        }
        const double v4 = dot(th_t, th_t) / (2.0 * ctrl.gamma6) +
                          dot(thd_t, thd_t) / (2.0 * ctrl.gamma7);
        s.lyapunov = v1 + v2 + v3 + v4;

        const double he = g.alpha4 * s.e1 + g.alpha5 * s.e2 + g.alpha6 * s.e3;
        s.rhs_bound = -0.5 * l * s.e1 * s.e1 +
                      (0.5 / l + 0.5 / l5) * ctrl.d_max * ctrl.d_max - z * z - he * he;
    }

    // Central-difference dV/dt. V4 carries a huge constant offset
    // (theta_true^2 / gamma), so differencing the stored V values directly
    // loses every significant digit of the tracking terms. Each squared term
    // c a^2 is therefore differenced in factored form,
    //   c (a+^2 - a-^2) = c (a+ + a-)(a+ - a-),
    // and for the estimate terms the difference is taken on theta_hat itself
    // (the true values cancel exactly).
    const std::size_t n = log.samples.size();
    auto dsq = [](double ap, double am) { return (ap + am) * (ap - am); };
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0 || k + 1 == n) {
            log.samples[k].lyapunov_rate = 0.0;
            continue;
        }
        const Sample& p = log.samples[k + 1];
        const Sample& m = log.samples[k - 1];
        const double dt = p.t - m.t;
        double dv = 0.5 * dsq(p.e1, m.e1) +
                    dsq(p.e2 + l * p.e1, m.e2 + l * m.e1) / (2.0 * l4);
        const double hp = g.alpha4 * p.e1 + g.alpha5 * p.e2 + g.alpha6 * p.e3;
        const double hm = g.alpha4 * m.e1 + g.alpha5 * m.e2 + g.alpha6 * m.e3;
        dv += 0.5 * dsq(hp, hm);
        for (int i = 0; i < 3; ++i) {
            // theta_tilde+ + theta_tilde- = 2 theta_true - (hat+ + hat-),
            // theta_tilde+ - theta_tilde- = hat- - hat+.
            dv += (2.0 * theta_true[i] - p.theta_hat[i] - m.theta_hat[i]) *
                  (m.theta_hat[i] - p.theta_hat[i]) / (2.0 * ctrl.gamma6);
            dv += (2.0 * theta_d_true[i] - p.theta_d_hat[i] - m.theta_d_hat[i]) *
                  (m.theta_d_hat[i] - p.theta_d_hat[i]) / (2.0 * ctrl.gamma7);
        }
        log.samples[k].lyapunov_rate = dv / dt;
    }
}

double lyapunov_tolerance(const SimLog& log, double sample_dt) {
    // max |V-ddot| from first differences of the (cancellation-safe) rate
    // column; interior samples only, since the endpoints carry no rate.
    double max_vddot = 0.0;
    for (std::size_t k = 2; k + 1 < log.samples.size(); ++k) {
        const double vddot =
            (log.samples[k].lyapunov_rate - log.samples[k - 1].lyapunov_rate) / sample_dt;
        max_vddot = std::max(max_vddot, std::fabs(vddot));
    }
    return 10.0 * sample_dt * max_vddot;
}

void write_csv(const SimLog& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    out << "t,xi1,xi2,xi3,r,e1,e2,e3,u,v,theta_hat_1,theta_hat_2,theta_hat_3,"
           "theta_d_hat_1,theta_d_hat_2,theta_d_hat_3,V,Vdot,rhs_bound,saturated\n";
    char buf[32];
    auto put = [&](double x, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << buf << sep;
    };
    for (const Sample& s : log.samples) {
        put(s.t, ',');
        put(s.xi.position, ',');
        put(s.xi.velocity, ',');
        put(s.xi.pressure, ',');
        put(s.r, ',');
        put(s.e1, ',');
        put(s.e2, ',');
        put(s.e3, ',');
        put(s.u, ',');
        put(s.v, ',');
        for (int i = 0; i < 3; ++i) put(s.theta_hat[i], ',');
        for (int i = 0; i < 3; ++i) put(s.theta_d_hat[i], ',');
        put(s.lyapunov, ',');
        put(s.lyapunov_rate, ',');
        put(s.rhs_bound, ',');
        out << (s.saturated ? 1 : 0) << '\n';
    }
}

SimLog read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
    SimLog log;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<double> f;
        while (std::getline(ss, field, ',')) f.push_back(std::stod(field));
        if (f.size() != 20) throw std::runtime_error("read_csv: malformed row in " + path.string());
        Sample s;
        s.t = f[0];
        s.xi = {f[1], f[2], f[3]};
        s.r = f[4];
        s.e1 = f[5];
        s.e2 = f[6];
        s.e3 = f[7];
        s.u = f[8];
        s.v = f[9];
        s.theta_hat = {f[10], f[11], f[12]};
        s.theta_d_hat = {f[13], f[14], f[15]};
        s.lyapunov = f[16];
        s.lyapunov_rate = f[17];
        s.rhs_bound = f[18];
        s.saturated = f[19] != 0.0;
        log.samples.push_back(s);
    }
    return log;
}

}  // namespace ehss
