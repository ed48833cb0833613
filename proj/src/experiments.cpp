#include "ehss/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace ehss {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ReferenceKind parse_reference_kind(const std::string& name) {
    if (name == "step") return ReferenceKind::step;
    if (name == "sine") return ReferenceKind::sine;
    if (name == "sum_of_sines") return ReferenceKind::sum_of_sines;
    throw ConfigError("unknown reference kind '" + name + "'");
}

void load_backstepping(const SpecFile& f, const std::string& section, ControllerConfig& c) {
    c.lambda = f.get_double(section, "lambda", c.lambda);
    const double gamma = f.get_double(section, "gamma", c.gamma6);
    c.gamma6 = f.get_double(section, "gamma6", gamma);
    c.gamma7 = f.get_double(section, "gamma7", gamma);
    c.k_o = f.get_double(section, "k_o", c.k_o);
    c.d_max = f.get_double(section, "d_max", c.d_max);
    c.f_max = f.get_double(section, "f_max", c.f_max);
    c.boundary_layer = f.get_double(section, "boundary_layer", c.boundary_layer);
    c.u_max = f.get_double(section, "u_max", c.u_max);
    c.actuator_tau = f.get_double(section, "actuator_tau", c.actuator_tau);
    for (int i = 0; i < 3; ++i) {
        c.theta_hat_cap[i] = f.get_double(section, "theta_hat_cap_" + std::to_string(i + 1),
                                          c.theta_hat_cap[i]);
    }
}

}  // namespace

std::string to_string(ControllerSelection c) {
    switch (c) {
        case ControllerSelection::backstepping: return "backstepping";
        case ControllerSelection::backstepping_tuned: return "backstepping-tuned";
        case ControllerSelection::smc: return "smc";
    }
    return "?";
}

ControllerSelection parse_controller(const std::string& name) {
    if (name == "backstepping") return ControllerSelection::backstepping;
    if (name == "backstepping-tuned" || name == "backstepping_tuned")
        return ControllerSelection::backstepping_tuned;
    if (name == "smc") return ControllerSelection::smc;
    throw ConfigError("unknown controller '" + name +
                      "' (expected backstepping | backstepping-tuned | smc)");
}

ExperimentSpec ExperimentSpec::defaults() {
    ExperimentSpec s;
    s.untuned = ControllerConfig::from_plant(s.plant);
    s.untuned.lambda = 10.0;
    s.untuned.gamma6 = s.untuned.gamma7 = 1e-8;
    s.tuned = ControllerConfig::from_plant(s.plant);
    s.tuned.lambda = 13.5585;
    s.tuned.gamma6 = s.tuned.gamma7 = 1e-10;
    s.abc.colony_size = 50;
    s.abc.generations = 100;
    s.abc.bounds = {{9.0, 16.0}, {-10.0, -7.0}};
    return s;
}

ExperimentSpec ExperimentSpec::load(const SpecFile& f) {
    ExperimentSpec s = defaults();

    s.name = f.get_string("experiment", "name", s.name);
    s.controller = parse_controller(
        f.get_string("experiment", "controller", to_string(s.controller)));
    const auto listed = f.get_list("experiment", "controllers");
    if (!listed.empty()) {
        s.compare_controllers.clear();
        for (const auto& name : listed) s.compare_controllers.push_back(parse_controller(name));
    }
    s.sim.seed = static_cast<std::uint64_t>(f.get_int("experiment", "seed", 0));

    s.sim.reference.kind = parse_reference_kind(
        f.get_string("reference", "kind", "step"));
    s.sim.reference.amplitude = f.get_double("reference", "amplitude",
                                             default_amplitude(s.sim.reference.kind));

    PlantParams& p = s.plant;
    p.bulk_modulus = f.get_double("plant", "bulk_modulus", p.bulk_modulus);
    p.chamber_volume = f.get_double("plant", "chamber_volume", p.chamber_volume);
    p.piston_area = f.get_double("plant", "piston_area", p.piston_area);
    p.total_mass = f.get_double("plant", "total_mass", p.total_mass);
    p.viscous_coeff = f.get_double("plant", "viscous_coeff", p.viscous_coeff);
    p.valve_gain = f.get_double("plant", "valve_gain", p.valve_gain);
    p.leakage_shape = f.get_double("plant", "leakage_shape", p.leakage_shape);
    p.leakage_gain = f.get_double("plant", "leakage_gain", p.leakage_gain);
    p.supply_pressure = f.get_double("plant", "supply_pressure", p.supply_pressure);
    p.return_pressure = f.get_double("plant", "return_pressure", p.return_pressure);
    p.pressure_diff = f.get_double("plant", "pressure_diff",
                                   p.supply_pressure - p.return_pressure);
    p.spring_stiffness = f.get_double("plant", "spring_stiffness", p.spring_stiffness);
    p.stiffness_uncertainty =
        f.get_double("plant", "stiffness_uncertainty", p.stiffness_uncertainty);
    for (int i = 0; i < 3; ++i) {
        p.theta_true[i] = f.get_double("plant", "theta_true_" + std::to_string(i + 1),
                                       p.theta_true[i]);
    }
    p.d_const = f.get_double("plant", "d_const", p.d_const);
    p.f_max_true = f.get_double("plant", "f_max_true", p.f_max_true);

    // Controller sections inherit the (possibly overridden) plant constants.
    const ControllerConfig mirror = ControllerConfig::from_plant(p);
    auto remap = [&](ControllerConfig& c) {
        const double lambda = c.lambda, g6 = c.gamma6, g7 = c.gamma7, ko = c.k_o;
        const double dmax = c.d_max, fmax = c.f_max, eps = c.boundary_layer, umax = c.u_max;
        const double tau = c.actuator_tau;
        const Vec3 caps = c.theta_hat_cap;
        c = mirror;
        c.lambda = lambda;
        c.gamma6 = g6;
        c.gamma7 = g7;
        c.k_o = ko;
        c.d_max = dmax;
        c.f_max = fmax;
        c.boundary_layer = eps;
        c.u_max = umax;
        c.actuator_tau = tau;
        c.theta_hat_cap = caps;
    };
    remap(s.untuned);
    remap(s.tuned);
    load_backstepping(f, "controller", s.untuned);
    load_backstepping(f, "tuned", s.tuned);

    s.smc.c1 = f.get_double("smc", "c1", s.smc.c1);
    s.smc.c2 = f.get_double("smc", "c2", s.smc.c2);
    s.smc.gain = f.get_double("smc", "gain", s.smc.gain);
    s.smc.eq_gain = f.get_double("smc", "eq_gain", s.smc.eq_gain);
    s.smc.u_max = f.get_double("smc", "u_max", s.smc.u_max);

    s.sim.horizon = f.get_double("sim", "horizon", s.sim.horizon);
    s.sim.sample_dt = f.get_double("sim", "sample_dt", s.sim.sample_dt);
    s.sim.control_dt = f.get_double("sim", "control_dt", s.sim.control_dt);
    s.sim.internal_dt = f.get_double("sim", "internal_dt", s.sim.internal_dt);
    const std::string dk = f.get_string("sim", "disturbance", "constant");
    if (dk == "constant") {
        s.sim.disturbance.kind = DisturbanceKind::constant;
    } else if (dk == "sinusoidal") {
        s.sim.disturbance.kind = DisturbanceKind::sinusoidal;
    } else {
        throw ConfigError("unknown disturbance kind '" + dk + "'");
    }
    s.sim.disturbance.amplitude = f.get_double("sim", "disturbance_amplitude", p.d_const);
    s.sim.disturbance.frequency = f.get_double("sim", "disturbance_frequency", 1.0);

    s.weights.gamma1_weight = f.get_double("objective", "gamma1", 1.0);
    s.weights.gamma2_weight = f.get_double("objective", "gamma2", 1.0);

    s.abc.colony_size = f.get_int("abc", "colony_size", s.abc.colony_size);
    s.abc.generations = f.get_int("abc", "generations", s.abc.generations);
    s.abc.limit = f.get_int("abc", "limit", s.abc.limit);
    s.abc.positive_u = f.get_bool("abc", "positive_u", s.abc.positive_u);
    s.abc.bounds[0][0] = f.get_double("abc", "lambda_min", s.abc.bounds[0][0]);
    s.abc.bounds[0][1] = f.get_double("abc", "lambda_max", s.abc.bounds[0][1]);
    s.abc.bounds[1][0] = f.get_double("abc", "log10_gamma_min", s.abc.bounds[1][0]);
    s.abc.bounds[1][1] = f.get_double("abc", "log10_gamma_max", s.abc.bounds[1][1]);
    s.tune_seeds = f.get_int("abc", "seeds", s.tune_seeds);

    f.check_all_consumed();
    s.plant.validate();
    s.sim.validate();
    s.weights.validate();
    return s;
}

ControllerConfig ExperimentSpec::controller_config(ControllerSelection sel) const {
    switch (sel) {
        case ControllerSelection::backstepping: return untuned;
        case ControllerSelection::backstepping_tuned: return tuned;
        case ControllerSelection::smc:
            throw DomainError("smc has no backstepping controller config");
    }
    throw DomainError("bad controller selection");
}

ControllerConfig apply_tuning(const ControllerConfig& base, const std::vector<double>& position) {
    if (position.size() != 2) throw DomainError("tuning position must be (lambda, log10 gamma1)");
    ControllerConfig c = base;
    c.lambda = position[0];
    c.gamma6 = c.gamma7 = std::pow(10.0, position[1]);
    return c;
}

ObjectiveFn make_tuning_objective(const ExperimentSpec& spec) {
    // Copies keep the returned closure self-contained and reentrant.
    const PlantParams plant = spec.plant;
    const ControllerConfig base = spec.untuned;
    const SimConfig sim = spec.sim;
    const ObjectiveWeights weights = spec.weights;
    return [plant, base, sim, weights](const std::vector<double>& pos) {
        const SimLog log = simulate(plant, apply_tuning(base, pos), sim);
        if (log.diverged) return kDivergedObjective;
        return objective(log, weights);
    };
}

SimLog run_controller(const ExperimentSpec& spec, ControllerSelection sel) {
    if (sel == ControllerSelection::smc) return simulate_smc(spec.plant, spec.smc, spec.sim);
    return simulate(spec.plant, spec.controller_config(sel), spec.sim);
}

double control_total_variation(const SimLog& log) {
    double tv = 0.0;
    for (std::size_t k = 1; k < log.samples.size(); ++k) {
        tv += std::fabs(log.samples[k].u - log.samples[k - 1].u);
    }
    return tv;
}

double max_tail_error(const SimLog& log) {
    if (log.samples.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double t_end = log.samples.back().t;
    const double t_from = 0.75 * t_end;
    double m = 0.0;
    for (const Sample& s : log.samples) {
        if (s.t >= t_from) m = std::max(m, std::fabs(s.e1));
    }
    return m;
}

RunResult run_experiment(const ExperimentSpec& spec, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    RunResult res;
    res.log = run_controller(spec, spec.controller);
    res.diverged = res.log.diverged;
    res.reason = res.log.divergence_reason;
    res.max_tail_error = max_tail_error(res.log);
    res.objective_value = std::numeric_limits<double>::quiet_NaN();
    if (!res.diverged) res.objective_value = objective(res.log, spec.weights);

    const bool backstepping = spec.controller != ControllerSelection::smc;
    if (backstepping) {
        const ControllerConfig c = spec.controller_config(spec.controller);
        res.bound = ultimate_bound(c, gains(c.lambda));
    }

    const fs::path log_csv = out_dir / (spec.name + "_log.csv");
    write_csv(res.log, log_csv);
    res.artifacts.push_back(log_csv);

    const fs::path tracking = out_dir / (spec.name + "_tracking.dat");
    {
        std::ofstream out(tracking);
        out << "# t r xi1\n";
        for (const Sample& s : res.log.samples) {
            out << fmt(s.t) << ' ' << fmt(s.r) << ' ' << fmt(s.xi.position) << '\n';
        }
    }
    res.artifacts.push_back(tracking);

    const fs::path control_dat = out_dir / (spec.name + "_control.dat");
    {
        std::ofstream out(control_dat);
        out << "# t u\n";
        for (const Sample& s : res.log.samples) {
            out << fmt(s.t) << ' ' << fmt(s.u) << '\n';
        }
    }
    res.artifacts.push_back(control_dat);

    const fs::path summary = out_dir / (spec.name + "_summary.txt");
    {
        std::ofstream out(summary);
        out << "experiment: " << spec.name << '\n';
        out << "controller: " << to_string(spec.controller) << '\n';
        out << "diverged: " << (res.diverged ? "yes (" + res.reason + ")" : "no") << '\n';
        out << "objective: " << (res.diverged ? "n/a" : fmt(res.objective_value)) << '\n';
        if (backstepping) {
            out << "ultimate_bound: " << fmt(res.bound.bound) << '\n';
            out << "sigma_min: " << fmt(res.bound.sigma_min) << '\n';
            out << "ultimate_bound_scaled_phi: " << fmt(res.bound.bound_scaled) << '\n';
        }
        out << "max_tail_error: " << fmt(res.max_tail_error) << '\n';
    }
    res.artifacts.push_back(summary);
    return res;
}

TuneResult tune_experiment(const ExperimentSpec& spec, const fs::path& out_dir,
                           std::optional<int> seeds_override) {
    fs::create_directories(out_dir);
    const int n_seeds = seeds_override.value_or(spec.tune_seeds);
    if (n_seeds < 1) throw ConfigError("tune: at least one seed required");
    const ObjectiveFn obj = make_tuning_objective(spec);

    TuneResult res;
    for (int i = 0; i < n_seeds; ++i) {
        AbcConfig cfg = spec.abc;
        cfg.seed = spec.sim.seed * 1000 + static_cast<std::uint64_t>(i);
        const AbcHistory hist = abc_run(obj, cfg);

        const fs::path conv =
            out_dir / (spec.name + "_seed" + std::to_string(i) + "_convergence.csv");
        {
            std::ofstream out(conv);
            out << "generation,best_objective";
            for (int d = 0; d < cfg.dimension(); ++d) out << ",best_param_" << d + 1;
            out << '\n';
            for (std::size_t g = 0; g < hist.best_objective.size(); ++g) {
                out << g + 1 << ',' << fmt(hist.best_objective[g]);
                for (double x : hist.best_position[g]) out << ',' << fmt(x);
                out << '\n';
            }
        }
        res.artifacts.push_back(conv);

        TuneRow row;
        row.seed = cfg.seed;
        row.best_objective = hist.final_objective;
        row.best_lambda = hist.final_position[0];
        row.best_gamma1 = std::pow(10.0, hist.final_position[1]);
        res.rows.push_back(row);
    }

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
    double l_lo = std::numeric_limits<double>::infinity(), l_hi = -l_lo;
    bool any_ok = false;
    for (const TuneRow& r : res.rows) {
        if (r.best_objective < kDivergedObjective) any_ok = true;
        lo = std::min(lo, r.best_objective);
        hi = std::max(hi, r.best_objective);
        sum += r.best_objective;
        l_lo = std::min(l_lo, r.best_lambda);
        l_hi = std::max(l_hi, r.best_lambda);
    }
    res.all_diverged = !any_ok;
    const double mean = sum / res.rows.size();
    res.relative_spread = mean > 0.0 ? (hi - lo) / mean : 0.0;
    res.lambda_window = l_hi - l_lo;

    const fs::path table = out_dir / (spec.name + "_campaign.csv");
    {
        std::ofstream out(table);
        out << "seed,best_objective,best_lambda,best_gamma1\n";
        for (const TuneRow& r : res.rows) {
            out << r.seed << ',' << fmt(r.best_objective) << ',' << fmt(r.best_lambda) << ','
                << fmt(r.best_gamma1) << '\n';
        }
    }
    res.artifacts.push_back(table);
    return res;
}

CompareResult compare_experiment(const ExperimentSpec& spec, const fs::path& out_dir) {
    if (spec.compare_controllers.size() < 2) {
        throw ConfigError("compare: at least two controller selections required");
    }
    fs::create_directories(out_dir);

    CompareResult res;
    std::vector<SimLog> logs;
    for (ControllerSelection sel : spec.compare_controllers) {
        SimLog log = run_controller(spec, sel);
        CompareRow row;
        row.controller = sel;
        row.diverged = log.diverged;
        row.objective_value = log.diverged ? std::numeric_limits<double>::quiet_NaN()
                                           : objective(log, spec.weights);
        row.max_tail_error = max_tail_error(log);
        row.control_total_variation = control_total_variation(log);
        res.rows.push_back(row);
        logs.push_back(std::move(log));
    }

    const fs::path aligned = out_dir / (spec.name + "_compare.csv");
    {
        std::ofstream out(aligned);
        out << "t,r";
        for (ControllerSelection sel : spec.compare_controllers) out << ",xi1_" << to_string(sel);
        for (ControllerSelection sel : spec.compare_controllers) out << ",u_" << to_string(sel);
        out << '\n';
        std::size_t rows = 0;
        for (const SimLog& l : logs) rows = std::max(rows, l.samples.size());
        for (std::size_t k = 0; k < rows; ++k) {
            const SimLog* with_row = nullptr;
            for (const SimLog& l : logs) {
                if (k < l.samples.size()) {
                    with_row = &l;
                    break;
                }
            }
            out << fmt(with_row->samples[k].t) << ',' << fmt(with_row->samples[k].r);
            for (const SimLog& l : logs) {
                out << ',';
                if (k < l.samples.size()) out << fmt(l.samples[k].xi.position);
            }
            for (const SimLog& l : logs) {
                out << ',';
                if (k < l.samples.size()) out << fmt(l.samples[k].u);
            }
            out << '\n';
        }
    }
    res.artifacts.push_back(aligned);

    const fs::path metrics = out_dir / (spec.name + "_metrics.csv");
    {
        std::ofstream out(metrics);
        out << "controller,diverged,objective,max_tail_error,control_total_variation\n";
        for (const CompareRow& r : res.rows) {
            out << to_string(r.controller) << ',' << (r.diverged ? 1 : 0) << ','
                << (r.diverged ? "" : fmt(r.objective_value)) << ',' << fmt(r.max_tail_error)
                << ',' << fmt(r.control_total_variation) << '\n';
        }
    }
    res.artifacts.push_back(metrics);
    return res;
}

}  // namespace ehss
