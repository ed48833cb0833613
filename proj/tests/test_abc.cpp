#include <cmath>
#include <random>

#include <doctest.h>

#include "ehss/abc.hpp"

using namespace ehss;

namespace {

double sphere(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

AbcConfig sphere_config(std::uint64_t seed) {
    AbcConfig cfg;
    cfg.colony_size = 50;  // SN = 25
    cfg.generations = 100;
    cfg.bounds = {{-5.0, 5.0}, {-5.0, 5.0}};
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("configuration invariants") {
    AbcConfig cfg = sphere_config(0);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.food_sources() == 25);
    CHECK(cfg.dimension() == 2);
    CHECK(cfg.effective_limit() == 50);  // SN * D default

    cfg.colony_size = 5;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = sphere_config(0);
    cfg.colony_size = 2;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = sphere_config(0);
    cfg.generations = 0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = sphere_config(0);
    cfg.bounds = {{1.0, -1.0}};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("fitness transform") {
    CHECK(abc_fitness(0.0) == 1.0);
    CHECK(abc_fitness(1.0) == 0.5);
    CHECK(abc_fitness(3.0) == 0.25);
}

TEST_CASE("initial population respects bounds and the seed") {
    AbcConfig cfg = sphere_config(42);
    const auto pop = init_population(cfg, sphere);
    REQUIRE(pop.size() == 25);
    for (const FoodSource& s : pop) {
        REQUIRE(s.position.size() == 2);
        for (int d = 0; d < 2; ++d) {
            CHECK(s.position[d] >= cfg.bounds[d][0]);
            CHECK(s.position[d] <= cfg.bounds[d][1]);
        }
        CHECK(s.trial_count == 0);
        CHECK(s.objective_value == sphere(s.position));
        CHECK(s.fitness == abc_fitness(s.objective_value));
    }

    const auto again = init_population(cfg, sphere);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        CHECK(pop[i].position == again[i].position);
    }

    AbcConfig degenerate = cfg;
    degenerate.bounds = {{0.7, 0.7}, {-1.2, -1.2}};
    for (const FoodSource& s : init_population(degenerate, sphere)) {
        CHECK(s.position == std::vector<double>{0.7, -1.2});
    }
}

TEST_CASE("candidate update changes one dimension and clamps") {
    AbcConfig cfg = sphere_config(0);
    std::vector<FoodSource> sources(3);
    sources[0].position = {1.0, 2.0};
    sources[1].position = {4.0, -3.0};
    sources[2].position = {1.0, 0.5};  // same dim 0 as source 0

    std::mt19937_64 rng(5);
    for (int it = 0; it < 100; ++it) {
        const auto x = candidate_update(0, 1, 1, sources, cfg, rng);
        CHECK(x[0] == 1.0);  // untouched dimension
        CHECK(x[1] >= cfg.bounds[1][0]);
        CHECK(x[1] <= cfg.bounds[1][1]);
    }

    // Equal coordinates in the chosen dimension: unchanged for any u.
    for (int it = 0; it < 20; ++it) {
        const auto x = candidate_update(0, 2, 0, sources, cfg, rng);
        CHECK(x[0] == 1.0);
        CHECK(x[1] == 2.0);
    }

    // Hand case from the update rule: 1 + 1*(1 - 0) = 2, clamped to 1.5.
    AbcConfig tight = cfg;
    tight.bounds = {{-1.5, 1.5}, {-5.0, 5.0}};
    sources[1].position = {0.0, 0.0};
    bool clamped = false;
    for (int it = 0; it < 200 && !clamped; ++it) {
        const auto x = candidate_update(0, 1, 0, sources, tight, rng);
        CHECK(x[0] <= 1.5);
        if (x[0] == 1.5) clamped = true;  // any u >= 0.5 lands on the bound
    }
    CHECK(clamped);
}

TEST_CASE("onlooker probabilities normalize and are scale invariant") {
    std::vector<FoodSource> sources(3);
    sources[0].fitness = 1.0;
    sources[1].fitness = 1.0;
    sources[2].fitness = 2.0;
    auto p = onlooker_probabilities(sources);
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.25));
    CHECK(p[2] == doctest::Approx(0.5));

    for (FoodSource& s : sources) s.fitness *= 17.0;
    const auto q = onlooker_probabilities(sources);
    for (int i = 0; i < 3; ++i) CHECK(q[i] == doctest::Approx(p[i]).epsilon(1e-13));

    sources.resize(1);
    CHECK(onlooker_probabilities(sources) == std::vector<double>{1.0});

    std::vector<FoodSource> equal(5);
    for (FoodSource& s : equal) s.fitness = 0.3;
    double total = 0.0;
    for (double v : onlooker_probabilities(equal)) {
        CHECK(v == doctest::Approx(0.2));
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("best objective is monotone and positions stay bounded") {
    AbcConfig cfg = sphere_config(7);
    const AbcHistory hist = abc_run(sphere, cfg);
    REQUIRE(hist.best_objective.size() == 100);
    for (std::size_t g = 1; g < hist.best_objective.size(); ++g) {
        CHECK(hist.best_objective[g] <= hist.best_objective[g - 1]);
    }
    for (const auto& pos : hist.best_position) {
        for (int d = 0; d < 2; ++d) {
            CHECK(pos[d] >= cfg.bounds[d][0]);
            CHECK(pos[d] <= cfg.bounds[d][1]);
        }
    }
    CHECK(hist.final_objective == hist.best_objective.back());
    // Evaluation budget: SN (1 + 2 generations) plus at most one scout/gen.
    CHECK(hist.evaluations <= static_cast<std::size_t>(25 * (1 + 2 * 100) + 100));
}

TEST_CASE("sphere benchmark converges") {
    const AbcHistory hist = abc_run(sphere, sphere_config(1));
    CHECK(hist.final_objective < 1e-6);
}

TEST_CASE("identical seeds are bit deterministic") {
    const AbcHistory a = abc_run(sphere, sphere_config(9));
    const AbcHistory b = abc_run(sphere, sphere_config(9));
    CHECK(a.final_objective == b.final_objective);
    CHECK(a.final_position == b.final_position);
    CHECK(a.best_objective == b.best_objective);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("constant objective never improves past initialization") {
    AbcConfig cfg = sphere_config(3);
    cfg.generations = 60;  // > limit, scouts will fire
    std::size_t evals = 0;
    auto constant = [&evals](const std::vector<double>&) {
        ++evals;
        return 5.0;
    };
    const AbcHistory hist = abc_run(constant, cfg);
    for (double v : hist.best_objective) CHECK(v == 5.0);
    // Scouts fired: more evaluations than employed + onlooker phases alone.
    CHECK(evals > static_cast<std::size_t>(25 * (1 + 2 * 60)));
}

TEST_CASE("degenerate point bounds pin every run to that point") {
    AbcConfig cfg = sphere_config(11);
    cfg.generations = 5;
    cfg.bounds = {{2.0, 2.0}, {-1.0, -1.0}};
    const AbcHistory hist = abc_run(sphere, cfg);
    CHECK(hist.final_position == std::vector<double>{2.0, -1.0});
    CHECK(hist.final_objective == doctest::Approx(5.0));
}
