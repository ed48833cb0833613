#include "ehss/abc.hpp"

#include <algorithm>
#include <cmath>

namespace ehss {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent substream for (generation, source, phase) under one master seed.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t gen, std::uint64_t source,
                          std::uint64_t phase) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ (gen + 1) * 0xd1342543de82ef95ULL);
    s = splitmix64(s ^ (source + 1) * 0xaf251af3b0f025b5ULL);
    s = splitmix64(s ^ (phase + 1) * 0x9e3779b97f4a7c15ULL);
    return std::mt19937_64(s);
}

std::vector<double> uniform_position(const AbcConfig& cfg, std::mt19937_64& rng) {
    std::vector<double> x(cfg.dimension());
    for (int d = 0; d < cfg.dimension(); ++d) {
        std::uniform_real_distribution<double> dist(cfg.bounds[d][0], cfg.bounds[d][1]);
        x[d] = cfg.bounds[d][0] == cfg.bounds[d][1] ? cfg.bounds[d][0] : dist(rng);
    }
    return x;
}

FoodSource make_source(std::vector<double> pos, const ObjectiveFn& objective) {
    FoodSource s;
    s.position = std::move(pos);
    s.objective_value = objective(s.position);
    s.fitness = abc_fitness(s.objective_value);
    return s;
}

// Greedy replacement; trial counter resets on improvement.
void greedy_commit(FoodSource& current, FoodSource&& candidate) {
    if (candidate.fitness > current.fitness) {
        candidate.trial_count = 0;
        current = std::move(candidate);
    } else {
        ++current.trial_count;
    }
}

}  // namespace

void AbcConfig::validate() const {
    if (colony_size < 4 || colony_size % 2 != 0) {
        throw DomainError("abc: colony size must be even and >= 4");
    }
    if (generations < 1) throw DomainError("abc: generations must be >= 1");
    if (limit < 0) throw DomainError("abc: limit must be >= 1 (or 0 for the default)");
    if (bounds.empty()) throw DomainError("abc: at least one search dimension required");
    for (const auto& b : bounds) {
        if (b[0] > b[1]) throw DomainError("abc: bound min must not exceed max");
    }
}

double abc_fitness(double objective_value) {
    return objective_value >= 0.0 ? 1.0 / (1.0 + objective_value)
                                  : 1.0 + std::fabs(objective_value);
}

std::vector<FoodSource> init_population(const AbcConfig& cfg, const ObjectiveFn& objective) {
    cfg.validate();
    std::vector<FoodSource> sources;
    sources.reserve(cfg.food_sources());
    for (int i = 0; i < cfg.food_sources(); ++i) {
        auto rng = substream(cfg.seed, 0, i, 0);
        sources.push_back(make_source(uniform_position(cfg, rng), objective));
    }
    return sources;
}

std::vector<double> candidate_update(int i, int k, int j, const std::vector<FoodSource>& sources,
                                     const AbcConfig& cfg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(cfg.positive_u ? 0.0 : -1.0, 1.0);
    const double u = dist(rng);
    std::vector<double> x = sources[i].position;
    x[j] += u * (sources[i].position[j] - sources[k].position[j]);
    x[j] = std::clamp(x[j], cfg.bounds[j][0], cfg.bounds[j][1]);
    return x;
}

std::vector<double> onlooker_probabilities(const std::vector<FoodSource>& sources) {
    if (sources.empty()) throw DomainError("abc: probability of an empty population");
    double total = 0.0;
    for (const FoodSource& s : sources) total += s.fitness;
    std::vector<double> p(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        p[i] = total > 0.0 ? sources[i].fitness / total : 1.0 / sources.size();
    }
    return p;
}

AbcHistory abc_run(const ObjectiveFn& objective, const AbcConfig& cfg) {
    cfg.validate();
    const int sn = cfg.food_sources();
    const int dim = cfg.dimension();
    const int limit = cfg.effective_limit();

    AbcHistory hist;
    std::vector<FoodSource> sources = init_population(cfg, objective);
    hist.evaluations = sources.size();

    std::size_t best = 0;
    for (std::size_t i = 1; i < sources.size(); ++i) {
        if (sources[i].objective_value < sources[best].objective_value) best = i;
    }
    std::vector<double> best_pos = sources[best].position;
    double best_obj = sources[best].objective_value;

    auto track = [&](const FoodSource& s) {
        if (s.objective_value < best_obj) {
            best_obj = s.objective_value;
            best_pos = s.position;
        }
    };

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        // Employed phase: one local perturbation per source.
        for (int i = 0; i < sn; ++i) {
            auto rng = substream(cfg.seed, gen, i, 1);
            std::uniform_int_distribution<int> pick_dim(0, dim - 1);
            std::uniform_int_distribution<int> pick_partner(0, sn - 2);
            const int j = pick_dim(rng);
            int k = pick_partner(rng);
            if (k >= i) ++k;
            FoodSource cand = make_source(candidate_update(i, k, j, sources, cfg, rng), objective);
            ++hist.evaluations;
            track(cand);
            greedy_commit(sources[i], std::move(cand));
        }

        // Onlooker phase: roulette reselection, then the same local move.
        const std::vector<double> probs = onlooker_probabilities(sources);
        for (int s = 0; s < sn; ++s) {
            auto rng = substream(cfg.seed, gen, s, 2);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const double roll = unit(rng);
            double acc = 0.0;
            int i = sn - 1;
            for (int c = 0; c < sn; ++c) {
                acc += probs[c];
                if (roll <= acc) {
                    i = c;
                    break;
                }
            }
            std::uniform_int_distribution<int> pick_dim(0, dim - 1);
            std::uniform_int_distribution<int> pick_partner(0, sn - 2);
            const int j = pick_dim(rng);
            int k = pick_partner(rng);
            if (k >= i) ++k;
            FoodSource cand = make_source(candidate_update(i, k, j, sources, cfg, rng), objective);
            ++hist.evaluations;
            track(cand);
            greedy_commit(sources[i], std::move(cand));
        }

        // Scout phase: abandon at most one exhausted source per generation.
        int worst = -1;
        for (int i = 0; i < sn; ++i) {
            if (sources[i].trial_count > limit &&
                (worst < 0 || sources[i].trial_count > sources[worst].trial_count)) {
                worst = i;
            }
        }
        if (worst >= 0) {
            auto rng = substream(cfg.seed, gen, worst, 3);
            sources[worst] = make_source(uniform_position(cfg, rng), objective);
            ++hist.evaluations;
            track(sources[worst]);
        }

        hist.best_objective.push_back(best_obj);
        hist.best_position.push_back(best_pos);
    }

    hist.final_objective = best_obj;
    hist.final_position = best_pos;
    return hist;
}

}  // namespace ehss
