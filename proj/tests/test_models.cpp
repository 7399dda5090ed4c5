#include "doctest.h"

#include <cmath>

#include "sjkf/errors.hpp"
#include "sjkf/models.hpp"

using namespace sjkf;

TEST_CASE("benchmark library has the nine documented terms in order") {
    const FunctionLibrary lib = duffing_library();
    REQUIRE(lib.n_theta() == 9);
    const char* names[] = {"1", "x1", "x2", "x2^2", "sin(x2)", "x1^2", "x1*x2", "cos(x1)", "u"};
    for (int i = 0; i < 9; ++i) CHECK(lib.entries[i].name == names[i]);

    Vector x(2);
    x << 0.0, 0.0;
    Vector psi = lib.eval(x, 0.0);
    Vector want(9);
    want << 1, 0, 0, 0, 0, 0, 0, 1, 0;
    CHECK((psi - want).cwiseAbs().maxCoeff() == 0.0);

    x << 1.0, 0.0;
    psi = lib.eval(x, 2.0);
    want << 1, 1, 0, 0, 0, 1, 0, std::cos(1.0), 2.0;
    CHECK((psi - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("joint step on the corrupted model with theta = 0") {
    const Vector p = duffing_true_params();
    const JointModel model = duffing_joint_model(p, duffing_library(), 0.01);
    JointState s;
    s.x = Vector(2);
    s.x << 1.0, 0.0;
    s.theta = Vector::Zero(9);
    const JointState next = joint_step(model, s, 0.0);
    // x2' = -0.1*0 - (-1)*1 + 0 = 1, so Euler gives (1, 0.01); the dropped
    // -3 x1^3 term would have made it (1, -0.02).
    CHECK(next.x(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(next.x(1) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK((next.theta - s.theta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("theta6 = -3 reproduces the missing cubic at x1 = 1") {
    const Vector p = duffing_true_params();
    const JointModel model = duffing_joint_model(p, duffing_library(), 0.01);
    JointState s;
    s.x = Vector(2);
    s.x << 1.0, 0.0;
    s.theta = Vector::Zero(9);
    s.theta(5) = -3.0; // theta6 * x1^2 = -3 x1^3 when x1 = 1
    const JointState corrected = joint_step(model, s, 0.0);

    const Vector truth = euler_step(duffing_true_dynamics(p), s.x, 0.0, 0.01);
    CHECK(corrected.x(0) == doctest::Approx(truth(0)).epsilon(1e-14));
    CHECK(corrected.x(1) == doctest::Approx(truth(1)).epsilon(1e-12));
    CHECK(truth(1) == doctest::Approx(-0.02).epsilon(1e-12));
}

TEST_CASE("noise-free truth follows the Euler recursion exactly") {
    NoiseSpec quiet;
    quiet.q_x = Vector::Zero(2);
    quiet.r = Vector::Zero(1);
    Vector x0(2);
    x0 << 1.0, 0.0;
    const auto u_fn = [](double t) { return 2.0 * std::sin(t); };
    const auto f = duffing_true_dynamics(duffing_true_params());
    const Trajectory traj = simulate_truth(f, x0, u_fn, 0.1, 0.01, quiet, 1);

    REQUIRE(traj.x.rows() == 11);
    CHECK(traj.x(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(traj.x(1, 1) == doctest::Approx(-0.02).epsilon(1e-12));
    Vector x = x0;
    for (int k = 0; k < 10; ++k) {
        CHECK(traj.u(k) == doctest::Approx(2.0 * std::sin(0.01 * k)).epsilon(1e-15));
        CHECK(traj.y(k) == traj.x(k, 0)); // zero measurement noise
        x = euler_step(f, x, traj.u(k), 0.01);
        CHECK((traj.x.row(k + 1).transpose() - x).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("truth simulation is seed-deterministic") {
    NoiseSpec noise;
    noise.q_x = Vector::Constant(2, 1e-3);
    noise.r = Vector::Constant(1, 1e-3);
    Vector x0(2);
    x0 << 1.0, 0.0;
    const auto u_fn = [](double t) { return 2.0 * std::sin(t); };
    const auto f = duffing_true_dynamics(duffing_true_params());
    const Trajectory a = simulate_truth(f, x0, u_fn, 1.0, 0.01, noise, 7);
    const Trajectory b = simulate_truth(f, x0, u_fn, 1.0, 0.01, noise, 7);
    const Trajectory c = simulate_truth(f, x0, u_fn, 1.0, 0.01, noise, 8);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.y - c.y).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("library catalog parses monomials and rejects bad names") {
    const FunctionLibrary lib = make_library({"x1^3", "x1^2*x2", "x2^2", "x1*x2"});
    Vector x(2);
    x << 2.0, 3.0;
    const Vector psi = lib.eval(x, 0.0);
    CHECK(psi(0) == doctest::Approx(8.0));
    CHECK(psi(1) == doctest::Approx(12.0));
    CHECK(psi(2) == doctest::Approx(9.0));
    CHECK(psi(3) == doctest::Approx(6.0));

    CHECK_THROWS_AS(make_library({"x1", "x1"}), ConfigError);      // duplicate
    CHECK_THROWS_AS(make_library({"x3"}), ConfigError);            // unknown
    CHECK_THROWS_AS(make_library({"x1^4"}), ConfigError);          // degree cap
    CHECK_THROWS_AS(make_library({"x1^2*x2^2"}), ConfigError);     // total degree 4
    CHECK_THROWS_AS(make_library({"x1*"}), ConfigError);           // trailing star
    CHECK_THROWS_AS(make_library({"tan(x1)"}), ConfigError);
}

TEST_CASE("joint state stacking round-trips") {
    JointState s;
    s.x = Vector(2);
    s.x << 1.5, -0.5;
    s.theta = Vector(3);
    s.theta << 0.1, -0.2, 0.3;
    const JointState back = JointState::unstack(s.stacked(), 2);
    CHECK((back.x - s.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.theta - s.theta).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.n_total() == 5);
}
