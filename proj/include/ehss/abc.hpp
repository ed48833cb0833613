#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "ehss/errors.hpp"

namespace ehss {

struct AbcConfig {
    int colony_size = 50;  ///< even; food sources SN = colony_size / 2
    int generations = 100;
    int limit = 0;  ///< trials before abandonment; 0 selects the SN * D default
    std::vector<std::array<double, 2>> bounds;  ///< per-dimension [min, max]
    std::uint64_t seed = 0;
    bool positive_u = false;  ///< draw u in [0, 1] instead of the canonical [-1, 1]

    int food_sources() const { return colony_size / 2; }
    int dimension() const { return static_cast<int>(bounds.size()); }
    int effective_limit() const { return limit > 0 ? limit : food_sources() * dimension(); }
    void validate() const;
};

struct FoodSource {
    std::vector<double> position;
    double objective_value = 0.0;
    double fitness = 0.0;
    int trial_count = 0;
};

struct AbcHistory {
    std::vector<double> best_objective;                 ///< per generation, non-increasing
    std::vector<std::vector<double>> best_position;     ///< per generation
    std::vector<double> final_position;
    double final_objective = 0.0;
    std::size_t evaluations = 0;
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

/// fitness = 1 / (1 + obj) for obj >= 0 (standard minimization transform).
double abc_fitness(double objective_value);

/// SN sources drawn uniformly within bounds from the seeded generator,
/// objectives evaluated, trial counts zero.
std::vector<FoodSource> init_population(const AbcConfig& cfg, const ObjectiveFn& objective);

/// x_new = x_old with dimension j replaced by x_ij + u (x_ij - x_kj),
/// u drawn from rng, result clamped to bounds.
std::vector<double> candidate_update(int i, int k, int j, const std::vector<FoodSource>& sources,
                                     const AbcConfig& cfg, std::mt19937_64& rng);

/// Fitness-proportional selection probabilities; entries >= 0, sum 1.
std::vector<double> onlooker_probabilities(const std::vector<FoodSource>& sources);

/// Full employed / onlooker / scout loop. All random draws come from
/// per-generation, per-source substreams of the master seed, so results do
/// not depend on evaluation order.
AbcHistory abc_run(const ObjectiveFn& objective, const AbcConfig& cfg);

}  // namespace ehss
