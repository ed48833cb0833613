#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ehss/abc.hpp"
#include "ehss/sim.hpp"
#include "ehss/spec_file.hpp"

namespace ehss {

/// Objective value assigned to a diverged simulation so the optimizer
/// deprioritizes the candidate without aborting the campaign.
constexpr double kDivergedObjective = 1e15;

enum class ControllerSelection { backstepping, backstepping_tuned, smc };

std::string to_string(ControllerSelection c);
ControllerSelection parse_controller(const std::string& name);

/// A fully resolved experiment: every field defaults to the reference
/// plant and controller values, so an empty spec file reproduces the
/// step-0.2 experiment.
struct ExperimentSpec {
    std::string name = "step_0p2";
    ControllerSelection controller = ControllerSelection::backstepping_tuned;
    std::vector<ControllerSelection> compare_controllers{
        ControllerSelection::backstepping_tuned, ControllerSelection::smc};

    PlantParams plant;
    ControllerConfig untuned;  ///< backstepping before tuning
    ControllerConfig tuned;    ///< backstepping with the tuned reference parameters
    SmcConfig smc;
    SimConfig sim;
    ObjectiveWeights weights;

    AbcConfig abc;  ///< bounds: lambda in [9,16], log10(gamma1) in [-10,-7]
    int tune_seeds = 8;

    static ExperimentSpec load(const SpecFile& file);
    static ExperimentSpec defaults();

    ControllerConfig controller_config(ControllerSelection sel) const;
};

/// Decode an optimizer position (lambda, log10 gamma1) into a controller.
ControllerConfig apply_tuning(const ControllerConfig& base, const std::vector<double>& position);

/// Pure evaluation contract for the optimizer; diverged runs map to the
/// kDivergedObjective sentinel.
ObjectiveFn make_tuning_objective(const ExperimentSpec& spec);

SimLog run_controller(const ExperimentSpec& spec, ControllerSelection sel);

struct RunResult {
    SimLog log;
    bool diverged = false;
    std::string reason;
    double objective_value = 0.0;  ///< NaN when diverged
    UltimateBound bound;           ///< backstepping controllers only
    double max_tail_error = 0.0;   ///< max |e1| over the last 25% of the horizon
    std::vector<std::filesystem::path> artifacts;
};

/// Run one experiment and write <name>_log.csv, <name>_summary.txt,
/// <name>_tracking.dat and <name>_control.dat under out_dir.
RunResult run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

struct TuneRow {
    std::uint64_t seed = 0;
    double best_objective = 0.0;
    double best_lambda = 0.0;
    double best_gamma1 = 0.0;
};

struct TuneResult {
    std::vector<TuneRow> rows;
    double relative_spread = 0.0;  ///< (max - min) / mean of best objectives
    double lambda_window = 0.0;    ///< max - min of best lambda values
    bool all_diverged = false;
    std::vector<std::filesystem::path> artifacts;
};

/// Seeded tuning campaign; per-seed convergence CSVs plus a campaign table
/// (seed, best objective, best parameters).
TuneResult tune_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                           std::optional<int> seeds_override = std::nullopt);

struct CompareRow {
    ControllerSelection controller{};
    bool diverged = false;
    double objective_value = 0.0;
    double max_tail_error = 0.0;
    double control_total_variation = 0.0;  ///< chattering index
};

struct CompareResult {
    std::vector<CompareRow> rows;
    std::vector<std::filesystem::path> artifacts;
};

/// Run every selected controller on the same reference and seed; aligned
/// multi-column CSV plus a metrics table. Divergence is recorded per
/// controller, not fatal.
CompareResult compare_experiment(const ExperimentSpec& spec,
                                 const std::filesystem::path& out_dir);

/// Chattering index: total variation of the logged control signal.
double control_total_variation(const SimLog& log);

/// Max |e1| over the last quarter of the logged horizon.
double max_tail_error(const SimLog& log);

}  // namespace ehss
