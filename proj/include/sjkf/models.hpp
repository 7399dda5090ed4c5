#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sjkf/linalg.hpp"
#include "sjkf/rng.hpp"

namespace sjkf {

// Ordered set of named basis functions psi_i(x, u). Evaluation order equals
// listed order; theta^T * Psi approximates the missing dynamics g.
struct FunctionLibrary {
    struct Entry {
        std::string name;
        std::function<double(const Vector& x, double u)> fn;
    };
    std::vector<Entry> entries;

    int n_theta() const { return static_cast<int>(entries.size()); }
    Vector eval(const Vector& x, double u) const;
};

// Stacked state x_tilde = (x, theta), x first.
struct JointState {
    Vector x;
    Vector theta;

    int n_x() const { return static_cast<int>(x.size()); }
    int n_theta() const { return static_cast<int>(theta.size()); }
    int n_total() const { return n_x() + n_theta(); }
    Vector stacked() const;
    static JointState unstack(const Vector& z, int n_x);
};

// Known continuous-time dynamics f (without the correction), observation h,
// library, Euler step size, and the state equations receiving theta^T * Psi.
struct JointModel {
    std::function<Vector(const Vector& x, double u)> f;
    std::function<Vector(const Vector& x, double u)> h;
    FunctionLibrary library;
    double dt = 0.01;
    std::vector<int> g_injection;
    int n_x = 0;
    int m = 1;
};

// Per-step standard deviations (process x, process theta, measurement).
struct NoiseSpec {
    Vector q_x;
    Vector q_theta;
    Vector r;
    std::uint64_t seed = 0;
};

// One explicit-Euler step of the joint system; theta is stationary.
JointState joint_step(const JointModel& model, const JointState& s, double u);

// The pure state step used by the truth simulator and the classical observer.
Vector euler_step(const std::function<Vector(const Vector&, double)>& f,
                  const Vector& x, double u, double dt);

struct Trajectory {
    std::vector<double> t;
    Matrix x;  // (N+1) x n_x
    Vector y;  // N+1 measurements of x1
    Vector u;  // N+1 inputs
};

// Euler-integrated truth with additive per-step process noise of standard
// deviation q_x * sqrt(dt) and measurement noise y_k = x1_k + N(0, r^2).
Trajectory simulate_truth(const std::function<Vector(const Vector&, double)>& f_true,
                          const Vector& x0,
                          const std::function<double(double)>& u_fn,
                          double t_end, double dt,
                          const NoiseSpec& noise, std::uint64_t seed);

// Duffing oscillator of the benchmark, p = (p1, p2, p3):
//   x1' = x2
//   x2' = -p3*x2 - p1*x1 - p2*x1^3 + u
Vector duffing_true_params();
std::function<Vector(const Vector&, double)> duffing_true_dynamics(const Vector& p);
// Corrupted model: the -p2*x1^3 term is omitted.
std::function<Vector(const Vector&, double)> duffing_corrupted_dynamics(const Vector& p);

// The benchmark's nine-term library (1, x1, x2, x2^2, sin x2, x1^2, x1*x2, cos x1, u).
FunctionLibrary duffing_library();

// Build a library from catalog names: "1", "x1", "x2", monomials "x1^p" /
// "x2^q" / "x1^p*x2^q" up to total degree 3, "sin(x1)", "sin(x2)", "cos(x1)",
// "cos(x2)", "u". Throws ConfigError on unknown names or duplicates.
FunctionLibrary make_library(const std::vector<std::string>& names);

// Corrupted Duffing + library as the joint model used by the filter.
JointModel duffing_joint_model(const Vector& p, const FunctionLibrary& lib, double dt);

} // namespace sjkf
