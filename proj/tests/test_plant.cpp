#include <cmath>
#include <random>

#include <doctest.h>

#include "ehss/plant.hpp"

using namespace ehss;

TEST_CASE("regressor squares the state entries") {
    CHECK(regressor({0, 0, 0}) == Vec3{0, 0, 0});
    CHECK(regressor({1, 2, 3}) == Vec3{1, 4, 9});
    const Vec3 r = regressor({-0.2, 0.5, 1e6});
    CHECK(r[0] == doctest::Approx(0.04));
    CHECK(r[1] == doctest::Approx(0.25));
    CHECK(r[2] == doctest::Approx(1e12));
    for (double v : r) CHECK(v >= 0.0);
}

TEST_CASE("beta_effective is the dot product against the regressor") {
    CHECK(beta_effective({0, 0, 0}, {1, 1, 1}) == 0.0);
    CHECK(beta_effective({3, 9, 9}, {2, 0, 0}) == 18.0);
    // Recovers the nominal spring stiffness at unit position.
    CHECK(beta_effective({1, 0, 0}, {12500, 0, 0}) == 12500.0);
}

TEST_CASE("beta_effective is homogeneous of degree 1 in theta") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int it = 0; it < 100; ++it) {
        const SimState xi{unit(rng), unit(rng), 1e6 * unit(rng)};
        const Vec3 theta{1e4 * unit(rng), unit(rng), 1e-11 * unit(rng)};
        const double c = 3.25;
        const Vec3 scaled{c * theta[0], c * theta[1], c * theta[2]};
        CHECK(beta_effective(xi, scaled) ==
              doctest::Approx(c * beta_effective(xi, theta)).epsilon(1e-14));
    }
}

TEST_CASE("friction perturbation saturates its bound") {
    PlantParams p;
    p.f_max_true = 10.0;
    CHECK(friction_perturbation({0, 0, 0}, 0.0, p) == 0.0);
    CHECK(friction_perturbation({0, M_PI_2, 0}, 0.0, p) == doctest::Approx(10.0));
    p.f_max_true = 0.0;
    CHECK(friction_perturbation({0.3, -2.0, 1e6}, 5.0, p) == 0.0);

    p.f_max_true = 10.0;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-10.0, 10.0);
    for (int it = 0; it < 1000; ++it) {
        const SimState xi{unit(rng), unit(rng), unit(rng)};
        CHECK(std::fabs(friction_perturbation(xi, 0.0, p)) <= p.f_max_true);
    }
}

TEST_CASE("rest is an exact equilibrium") {
    const PlantParams p;
    const StateRate r = derivatives({0, 0, 0}, 0.0, 0.0, 0.0, p);
    CHECK(r.rate.position == 0.0);
    CHECK(r.rate.velocity == 0.0);
    CHECK(r.rate.pressure == 0.0);
    CHECK_FALSE(r.saturated);
}

TEST_CASE("valve flow from rest matches the hand-evaluated pressure rate") {
    const PlantParams p;
    const StateRate r = derivatives({0, 0, 0}, 1e-3, 0.0, 0.0, p);
    CHECK(r.rate.position == 0.0);
    CHECK(r.rate.velocity == 0.0);
    const double expected = 4.0 * p.bulk_modulus / p.chamber_volume * p.valve_gain * 1e-3 *
                            std::sqrt(p.pressure_diff);
    CHECK(r.rate.pressure == doctest::Approx(expected).epsilon(1e-14));
    CHECK(r.rate.pressure == doctest::Approx(2.464e9).epsilon(1e-3));
}

TEST_CASE("disturbance enters the position rate only") {
    const PlantParams p;
    const StateRate r = derivatives({0, 0, 0}, 0.0, 0.1, 0.0, p);
    CHECK(r.rate.position == 0.1);
    CHECK(r.rate.velocity == 0.0);
    CHECK(r.rate.pressure == 0.0);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> pos(-1.0, 1.0);
    std::uniform_real_distribution<double> press(-2e7, 2e7);
    std::uniform_real_distribution<double> current(-1e-3, 1e-3);
    for (int it = 0; it < 10000; ++it) {
        const SimState xi{pos(rng), pos(rng), press(rng)};
        const double u = current(rng);
        const double d = 0.1 * pos(rng);
        const StateRate with = derivatives(xi, u, d, 0.0, p);
        const StateRate without = derivatives(xi, u, 0.0, 0.0, p);
        CHECK(with.rate.position == without.rate.position + d);
        CHECK(with.rate.velocity == without.rate.velocity);
        CHECK(with.rate.pressure == without.rate.pressure);
    }
}

TEST_CASE("leakage is non-increasing in the current magnitude") {
    const PlantParams p;
    const SimState xi{0.0, 0.0, 1e6};  // xi3 > 0 fixed, no piston motion
    // Isolate the leakage term from the pressure rate:
    //   leak(u) = k u sqrt(P_d - sign(u) xi3) - (V_t / 4B) xi3-dot.
    auto leak = [&](double u) {
        const StateRate r = derivatives(xi, u, 0.0, 0.0, p);
        const double sgn = u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0);
        return p.valve_gain * u * std::sqrt(p.pressure_diff - sgn * xi.pressure) -
               p.chamber_volume / (4.0 * p.bulk_modulus) * r.rate.pressure;
    };
    double prev = leak(0.0);
    CHECK(prev == doctest::Approx(p.leakage_gain * xi.pressure).epsilon(1e-14));
    for (double u : {1e-4, 5e-4, 1e-3, 5e-3}) {
        const double cur = leak(u);
        CHECK(cur <= prev + 1e-18);
        CHECK(cur == doctest::Approx(leak(-u)).epsilon(1e-12));  // depends on |u|
        prev = cur;
    }
}

TEST_CASE("square-root argument is saturated, never NaN") {
    const PlantParams p;
    const SimState over{0.0, 0.0, 1.5 * p.pressure_diff};
    const StateRate r = derivatives(over, 1e-3, 0.0, 0.0, p);
    CHECK(r.saturated);
    CHECK(std::isfinite(r.rate.pressure));
    // The stored state is not altered: only the sqrt argument is clamped.
    CHECK(over.pressure == 1.5 * p.pressure_diff);
}

TEST_CASE("sign(0) = 0 removes the valve flow term at u = 0") {
    const PlantParams p;
    const SimState xi{0.0, 0.0, 5e6};
    const StateRate r = derivatives(xi, 0.0, 0.0, 0.0, p);
    const double leak_only = -4.0 * p.bulk_modulus / p.chamber_volume * p.leakage_gain *
                             xi.pressure;
    CHECK(r.rate.pressure == doctest::Approx(leak_only).epsilon(1e-14));
}

TEST_CASE("non-finite inputs are rejected") {
    const PlantParams p;
    CHECK_THROWS_AS(derivatives({std::nan(""), 0, 0}, 0.0, 0.0, 0.0, p), NonFiniteState);
    CHECK_THROWS_AS(derivatives({0, 0, 0}, std::numeric_limits<double>::infinity(), 0.0, 0.0, p),
                    NonFiniteState);
}

TEST_CASE("reference trajectories carry exact derivatives") {
    const ReferenceFrame step = reference({ReferenceKind::step, 0.2}, 5.0);
    CHECK(step.r == 0.2);
    CHECK(step.r_dot == 0.0);
    CHECK(step.r_ddot == 0.0);
    CHECK(step.r_dddot == 0.0);

    const ReferenceFrame sine = reference({ReferenceKind::sine, 0.05}, 0.0);
    CHECK(sine.r == 0.0);
    CHECK(sine.r_dot == doctest::Approx(0.05));
    CHECK(sine.r_ddot == 0.0);
    CHECK(sine.r_dddot == doctest::Approx(-0.05));

    const ReferenceFrame sum = reference({ReferenceKind::sum_of_sines, 0.05}, 0.0);
    CHECK(sum.r == 0.0);
    CHECK(sum.r_dot == doctest::Approx(0.3));
    CHECK(sum.r_ddot == 0.0);
    CHECK(sum.r_dddot == doctest::Approx(-1.8));

    // Finite at arbitrary times, and r_dot is the numerical slope of r.
    for (double t : {0.0, 0.37, 2.0, 19.99}) {
        const ReferenceFrame f = reference({ReferenceKind::sum_of_sines, 0.05}, t);
        CHECK(std::isfinite(f.r));
        CHECK(std::isfinite(f.r_dddot));
        const double h = 1e-6;
        const double slope = (reference({ReferenceKind::sum_of_sines, 0.05}, t + h).r -
                              reference({ReferenceKind::sum_of_sines, 0.05}, t - h).r) /
                             (2.0 * h);
        CHECK(f.r_dot == doctest::Approx(slope).epsilon(1e-6));
    }
}

TEST_CASE("plant invariants are validated") {
    PlantParams p;
    CHECK_NOTHROW(p.validate());
    p.bulk_modulus = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = PlantParams{};
    p.pressure_diff = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
}
