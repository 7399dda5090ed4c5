#include "doctest.h"

#include "sjkf/config.hpp"
#include "sjkf/errors.hpp"

using namespace sjkf;

TEST_CASE("empty config yields the documented defaults") {
    const ExperimentConfig cfg = config_from_map({});
    CHECK(cfg.model_name == "duffing");
    CHECK(cfg.dt == 0.01);
    CHECK(cfg.t_end == 10.0);
    CHECK(cfg.p(0) == -1.0);
    CHECK(cfg.p(1) == 3.0);
    CHECK(cfg.p(2) == 0.1);
    CHECK(cfg.x0_true(0) == 1.0);
    CHECK(cfg.x0_est(0) == 2.0);
    CHECK(cfg.x0_est(1) == 1.0);
    CHECK(cfg.theta0 == 1e-3);
    CHECK(cfg.library_terms.size() == 9);
    CHECK(cfg.noise_q_x(0) == 1e-4);
    CHECK(cfg.noise_q_theta == 0.045);
    CHECK(cfg.noise_r == 1e-2);
    CHECK(cfg.sim_q_x(0) == 1e-3);
    CHECK(cfg.sim_r == 1e-3);
    CHECK(cfg.ut_alpha == 1e-3);
    CHECK(cfg.ut_beta == 2.0);
    CHECK(cfg.horseshoe.tau0 == 0.1);
    CHECK(cfg.horseshoe.a == 4.5);
    CHECK(cfg.horseshoe.b == 1.5);
    CHECK(cfg.horseshoe.xi.size() == 9);
    CHECK(cfg.horseshoe_n_samples == 1000000);
    CHECK(cfg.horseshoe_seed == 2024);
    CHECK(cfg.pm_epsilon == 0.01);
    CHECK(cfg.pm_r == 9.0);
    CHECK(cfg.observer == ObserverKind::joint);
    CHECK(cfg.init_s_x(0) == 1.0);
    CHECK(cfg.init_s_theta_scale < 0.0);
    CHECK(cfg.analysis_burn_in == 2.0);
    CHECK(cfg.analysis_threshold == 0.95);
    CHECK(cfg.seed == 1);
    CHECK(cfg.input_at(0.0) == 0.0);
    CHECK(cfg.input_at(1.0) == doctest::Approx(2.0 * std::sin(1.0)).epsilon(1e-15));
}

TEST_CASE("parser: comments, blanks, lists, trimming") {
    const auto kv = parse_config_text(
        "# leading comment\n"
        "\n"
        "noise.r = 0.5   # trailing comment\n"
        "  model.p =  -1 , 3 , 0.1  \n"
        "observer=classical\n");
    REQUIRE(kv.size() == 3);
    CHECK(kv.at("noise.r") == "0.5");
    CHECK(kv.at("observer") == "classical");

    const ExperimentConfig cfg = config_from_map(kv);
    CHECK(cfg.noise_r == 0.5);
    CHECK(cfg.observer == ObserverKind::classical);
    CHECK(cfg.p(1) == 3.0);
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse_config_text("novalue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("= 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("a = 1\na = 2\n"), ConfigError);
}

TEST_CASE("unknown and invalid fields are named in the error") {
    try {
        config_from_map({{"noise.rr", "1"}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("noise.rr") != std::string::npos);
    }
    try {
        config_from_map({{"model.dt", "banana"}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("model.dt") != std::string::npos);
    }
    CHECK_THROWS_AS(config_from_map({{"model.dt", "-0.5"}}), ConfigError);
    CHECK_THROWS_AS(config_from_map({{"analysis.threshold", "1.5"}}), ConfigError);
    CHECK_THROWS_AS(config_from_map({{"library.terms", "x1, x1"}}), ConfigError);
    CHECK_THROWS_AS(config_from_map({{"filter.zero_q_pass2", "maybe"}}), ConfigError);
    CHECK_THROWS_AS(config_from_map({{"observer", "bogus"}}), ConfigError);
}

TEST_CASE("observer names round-trip") {
    for (const auto kind :
         {ObserverKind::classical, ObserverKind::joint, ObserverKind::joint_no_pass2})
        CHECK(observer_from_name(observer_name(kind)) == kind);
}

TEST_CASE("effective config echo re-parses to the same map") {
    ExperimentConfig cfg = config_from_map({{"noise.q_theta", "0.02"},
                                            {"seed", "77"},
                                            {"library.terms", "1, x1, u"}});
    const auto echoed = config_to_map(cfg);
    const ExperimentConfig back = config_from_map(echoed);
    CHECK(config_to_map(back) == echoed);
    CHECK(back.noise_q_theta == 0.02);
    CHECK(back.seed == 77);
    CHECK(back.library_terms.size() == 3);
    CHECK(back.horseshoe.xi.size() == 3);
}

TEST_CASE("scalar xi broadcasts over the library size") {
    const ExperimentConfig cfg = config_from_map({{"horseshoe.xi", "2"}});
    REQUIRE(cfg.horseshoe.xi.size() == 9);
    CHECK(cfg.horseshoe.xi.minCoeff() == 2.0);
    CHECK(cfg.horseshoe.xi.maxCoeff() == 2.0);
}

TEST_CASE("library() and joint_model() reflect the terms") {
    const ExperimentConfig cfg = config_from_map({{"library.terms", "1, x1^3, u"}});
    CHECK(cfg.library().n_theta() == 3);
    const JointModel model = cfg.joint_model();
    CHECK(model.n_x == 2);
    CHECK(model.library.n_theta() == 3);
    CHECK(model.dt == cfg.dt);
}
