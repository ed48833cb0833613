#include <cmath>

#include <doctest.h>

#include "ehss/experiments.hpp"
#include "ehss/spec_file.hpp"

using namespace ehss;

TEST_CASE("key-value parsing with sections, comments and case folding") {
    const SpecFile f = SpecFile::parse_string(
        "# leading comment\n"
        "[Experiment]\n"
        "Name = demo   # trailing comment\n"
        "seed = 3\n"
        "\n"
        "[sim]\n"
        "horizon = 2.5\n"
        "flag = true\n"
        "list = a, b , c\n");

    CHECK(f.get_string("experiment", "name", "") == "demo");
    CHECK(f.get_int("experiment", "seed", 0) == 3);
    CHECK(f.get_double("sim", "horizon", 0.0) == 2.5);
    CHECK(f.get_bool("sim", "flag", false));
    CHECK(f.get_list("sim", "list") == std::vector<std::string>{"a", "b", "c"});
    CHECK_NOTHROW(f.check_all_consumed());

    CHECK(f.get_double("sim", "missing", 7.0) == 7.0);
    CHECK_FALSE(f.has("sim", "missing"));
}

TEST_CASE("parse errors carry line numbers") {
    try {
        SpecFile::parse_string("[sim]\nkey value without equals\n", "bad.spec");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line_no == 2);
        CHECK(std::string(e.what()).find("bad.spec:2") != std::string::npos);
    }

    CHECK_THROWS_AS(SpecFile::parse_string("[unclosed\n"), ConfigError);
    CHECK_THROWS_AS(SpecFile::parse_string("[s]\na = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(SpecFile::parse_string("[s]\n= 1\n"), ConfigError);
}

TEST_CASE("typed getters reject malformed values with diagnostics") {
    const SpecFile f = SpecFile::parse_string("[s]\nx = fast\nn = 1.5\nb = maybe\n");
    CHECK_THROWS_AS(f.get_double("s", "x", 0.0), ConfigError);
    CHECK_THROWS_AS(f.get_int("s", "n", 0), ConfigError);
    CHECK_THROWS_AS(f.get_bool("s", "b", false), ConfigError);
}

TEST_CASE("missing files are reported with their path") {
    try {
        SpecFile::parse_file("/nonexistent/path/to.spec");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/path/to.spec") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected by strict consumption") {
    const SpecFile f = SpecFile::parse_string("[plant]\ntotal_mass = 70\nbogus_key = 1\n");
    CHECK_THROWS_AS(ExperimentSpec::load(f), ConfigError);
    try {
        ExperimentSpec::load(SpecFile::parse_string("[plant]\nbogus_key = 1\n", "x.spec"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }
}

TEST_CASE("empty spec reproduces the reference experiment defaults") {
    const ExperimentSpec s = ExperimentSpec::load(SpecFile::parse_string(""));
    const ExperimentSpec d = ExperimentSpec::defaults();

    CHECK(s.sim.reference.kind == ReferenceKind::step);
    CHECK(s.sim.reference.amplitude == 0.2);
    CHECK(s.sim.horizon == 20.0);
    CHECK(s.sim.sample_dt == 0.01);
    CHECK(s.plant.bulk_modulus == 2.2e9);
    CHECK(s.plant.total_mass == 70.0);
    CHECK(s.plant.theta_true == Vec3{15000.0, 0.0, 0.0});
    CHECK(s.tuned.lambda == d.tuned.lambda);
    CHECK(s.tuned.gamma6 == 1e-10);
    CHECK(s.untuned.lambda == d.untuned.lambda);
    CHECK(s.abc.bounds[0][0] == 9.0);
    CHECK(s.abc.bounds[0][1] == 16.0);
    CHECK(s.abc.bounds[1][0] == -10.0);
    CHECK(s.abc.bounds[1][1] == -7.0);
    CHECK(s.tune_seeds == 8);
    CHECK(s.weights.gamma1_weight == 1.0);
    CHECK(s.weights.gamma2_weight == 1.0);
}

TEST_CASE("spec overrides reach every module") {
    const ExperimentSpec s = ExperimentSpec::load(SpecFile::parse_string(
        "[experiment]\n"
        "name = custom\n"
        "controller = smc\n"
        "seed = 17\n"
        "[reference]\n"
        "kind = sine\n"
        "amplitude = 0.07\n"
        "[plant]\n"
        "total_mass = 80\n"
        "theta_true_1 = 12000\n"
        "[controller]\n"
        "lambda = 11\n"
        "gamma = 1e-9\n"
        "[tuned]\n"
        "lambda = 14\n"
        "u_max = 2e-3\n"
        "actuator_tau = 2e-2\n"
        "theta_hat_cap_3 = 1e-10\n"
        "[smc]\n"
        "gain = 4e-4\n"
        "[sim]\n"
        "horizon = 4\n"
        "control_dt = 2e-4\n"
        "disturbance = sinusoidal\n"
        "disturbance_frequency = 3\n"
        "[objective]\n"
        "gamma2 = 0.5\n"
        "[abc]\n"
        "colony_size = 24\n"
        "seeds = 3\n"));

    CHECK(s.name == "custom");
    CHECK(s.controller == ControllerSelection::smc);
    CHECK(s.sim.seed == 17);
    CHECK(s.sim.reference.kind == ReferenceKind::sine);
    CHECK(s.sim.reference.amplitude == 0.07);
    CHECK(s.plant.total_mass == 80.0);
    CHECK(s.plant.theta_true[0] == 12000.0);
    CHECK(s.untuned.lambda == 11.0);
    CHECK(s.untuned.gamma6 == 1e-9);
    CHECK(s.untuned.gamma7 == 1e-9);
    CHECK(s.untuned.total_mass == 80.0);  // controller mirrors plant overrides
    CHECK(s.tuned.lambda == 14.0);
    CHECK(s.tuned.u_max == 2e-3);
    CHECK(s.tuned.actuator_tau == 2e-2);
    CHECK(s.tuned.theta_hat_cap[2] == 1e-10);
    CHECK(s.smc.gain == 4e-4);
    CHECK(s.sim.horizon == 4.0);
    CHECK(s.sim.control_dt == 2e-4);
    CHECK(s.sim.disturbance.kind == DisturbanceKind::sinusoidal);
    CHECK(s.sim.disturbance.frequency == 3.0);
    CHECK(s.weights.gamma2_weight == 0.5);
    CHECK(s.abc.colony_size == 24);
    CHECK(s.tune_seeds == 3);
}

TEST_CASE("invalid enum values are configuration errors") {
    CHECK_THROWS_AS(
        ExperimentSpec::load(SpecFile::parse_string("[reference]\nkind = ramp\n")), ConfigError);
    CHECK_THROWS_AS(
        ExperimentSpec::load(SpecFile::parse_string("[experiment]\ncontroller = pid\n")),
        ConfigError);
    CHECK_THROWS_AS(
        ExperimentSpec::load(SpecFile::parse_string("[sim]\ndisturbance = ramp\n")), ConfigError);
}

TEST_CASE("apply_tuning decodes (lambda, log10 gamma) positions") {
    const ControllerConfig base = ExperimentSpec::defaults().untuned;
    const ControllerConfig c = apply_tuning(base, {12.5, -9.0});
    CHECK(c.lambda == 12.5);
    CHECK(c.gamma6 == doctest::Approx(1e-9).epsilon(1e-14));
    CHECK(c.gamma7 == c.gamma6);
    CHECK(c.u_max == base.u_max);
    CHECK_THROWS_AS(apply_tuning(base, {1.0}), DomainError);
}
