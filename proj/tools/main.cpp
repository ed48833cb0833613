// Command-line front end: reproduce the tracking experiments, run ABC tuning
// campaigns, and compare controllers. See README.md for spec-file format.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ehss/experiments.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

int verbosity() {
    const char* env = std::getenv("EHSS_LOG");
    if (!env) return 1;
    const std::string v = env;
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

void info(const std::string& msg) {
    if (verbosity() >= 1) std::cout << msg << '\n';
}

ehss::ExperimentSpec load_spec(const std::string& path, std::optional<int> seed) {
    ehss::ExperimentSpec spec = path.empty()
                                    ? ehss::ExperimentSpec::defaults()
                                    : ehss::ExperimentSpec::load(ehss::SpecFile::parse_file(path));
    if (seed) spec.sim.seed = static_cast<std::uint64_t>(*seed);
    return spec;
}

void maybe_plot(bool plot, const fs::path& out_dir, const std::string& name) {
    if (!plot) return;
    if (std::system("command -v gnuplot > /dev/null 2>&1") != 0) {
        std::cerr << "plot: gnuplot not found on PATH, skipping render\n";
        return;
    }
    const fs::path png = out_dir / (name + "_tracking.png");
    const std::string cmd = "gnuplot -e \"set terminal png; set output '" + png.string() +
                            "'; plot '" + (out_dir / (name + "_tracking.dat")).string() +
                            "' using 1:2 with lines title 'r', '' using 1:3 with lines "
                            "title 'xi1'\"";
    if (std::system(cmd.c_str()) == 0) info("wrote " + png.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electro-hydraulic servo tracking experiments, ABC tuning and "
                 "controller comparison"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir = "out";
    std::optional<int> seed;
    bool plot = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--spec", spec_path, "experiment spec file (defaults reproduce the "
                                             "step-0.2 experiment)");
        cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
        cmd->add_option("--seed", seed, "override the experiment seed");
    };

    CLI::App* run = app.add_subcommand("run", "simulate one experiment and write logs");
    add_common(run);
    run->add_flag("--plot", plot, "render a tracking plot if gnuplot is available");

    std::optional<int> seeds_flag;
    CLI::App* tune = app.add_subcommand("tune", "run a seeded ABC tuning campaign");
    add_common(tune);
    tune->add_option("--seeds", seeds_flag, "number of campaign seeds (default from spec, 8)");

    CLI::App* compare = app.add_subcommand("compare", "run several controllers on one reference");
    add_common(compare);

    CLI11_PARSE(app, argc, argv);

    try {
        const ehss::ExperimentSpec spec = load_spec(spec_path, seed);

        if (run->parsed()) {
            const ehss::RunResult res = ehss::run_experiment(spec, out_dir);
            for (const auto& p : res.artifacts) info("wrote " + p.string());
            maybe_plot(plot, out_dir, spec.name);
            if (res.diverged) {
                std::cerr << "simulation diverged: " << res.reason << '\n';
                return kExitDiverged;
            }
            info("objective = " + std::to_string(res.objective_value) +
                 ", max tail |e1| = " + std::to_string(res.max_tail_error) +
                 ", ultimate bound = " + std::to_string(res.bound.bound));
            return kExitOk;
        }

        if (tune->parsed()) {
            const ehss::TuneResult res = ehss::tune_experiment(spec, out_dir, seeds_flag);
            for (const auto& p : res.artifacts) info("wrote " + p.string());
            std::printf("%-8s %-14s %-12s %-12s\n", "seed", "objective", "lambda", "gamma1");
            for (const ehss::TuneRow& r : res.rows) {
                std::printf("%-8llu %-14.6g %-12.6g %-12.6g\n",
                            static_cast<unsigned long long>(r.seed), r.best_objective,
                            r.best_lambda, r.best_gamma1);
            }
            std::printf("relative objective spread: %.3g, lambda window: %.3g\n",
                        res.relative_spread, res.lambda_window);
            if (res.all_diverged) {
                std::cerr << "every evaluation diverged\n";
                return kExitDiverged;
            }
            return kExitOk;
        }

        const ehss::CompareResult res = ehss::compare_experiment(spec, out_dir);
        for (const auto& p : res.artifacts) info("wrote " + p.string());
        std::printf("%-20s %-10s %-14s %-14s %-14s\n", "controller", "diverged", "objective",
                    "max|e1| tail", "TV(u)");
        for (const ehss::CompareRow& r : res.rows) {
            std::printf("%-20s %-10s %-14.6g %-14.6g %-14.6g\n",
                        ehss::to_string(r.controller).c_str(), r.diverged ? "yes" : "no",
                        r.objective_value, r.max_tail_error, r.control_total_variation);
        }
        return kExitOk;
    } catch (const ehss::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ehss::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
