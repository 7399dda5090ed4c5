#include "sjkf/models.hpp"

#include <cmath>
#include <set>

#include "sjkf/errors.hpp"

namespace sjkf {

Vector FunctionLibrary::eval(const Vector& x, double u) const {
    Vector out(n_theta());
    for (int i = 0; i < n_theta(); ++i) {
        out(i) = entries[i].fn(x, u);
        if (!std::isfinite(out(i)))
            throw NonFiniteOutput("library entry '" + entries[i].name + "'");
    }
    return out;
}

Vector JointState::stacked() const {
    Vector z(n_total());
    z.head(n_x()) = x;
    z.tail(n_theta()) = theta;
    return z;
}

JointState JointState::unstack(const Vector& z, int n_x) {
    JointState s;
    s.x = z.head(n_x);
    s.theta = z.tail(z.size() - n_x);
    return s;
}

JointState joint_step(const JointModel& model, const JointState& s, double u) {
    Vector xdot = model.f(s.x, u);
    if (s.n_theta() > 0) {
        const double g = s.theta.dot(model.library.eval(s.x, u));
        for (int idx : model.g_injection) xdot(idx) += g;
    }
    JointState out;
    out.x = s.x + model.dt * xdot;
    out.theta = s.theta;
    for (int i = 0; i < out.n_x(); ++i)
        if (!std::isfinite(out.x(i))) throw NonFiniteOutput("joint_step");
    return out;
}

Vector euler_step(const std::function<Vector(const Vector&, double)>& f,
                  const Vector& x, double u, double dt) {
    return x + dt * f(x, u);
}

Trajectory simulate_truth(const std::function<Vector(const Vector&, double)>& f_true,
                          const Vector& x0,
                          const std::function<double(double)>& u_fn,
                          double t_end, double dt,
                          const NoiseSpec& noise, std::uint64_t seed) {
    const int n_steps = static_cast<int>(std::llround(t_end / dt));
    const int n_x = static_cast<int>(x0.size());
    Rng rng(seed);
    Trajectory traj;
    traj.t.resize(n_steps + 1);
    traj.x.resize(n_steps + 1, n_x);
    traj.y.resize(n_steps + 1);
    traj.u.resize(n_steps + 1);

    const double r_std = noise.r.size() > 0 ? noise.r(0) : 0.0;
    Vector x = x0;
    for (int k = 0; k <= n_steps; ++k) {
        traj.t[k] = k * dt;
        traj.u(k) = u_fn(traj.t[k]);
    }
    traj.x.row(0) = x.transpose();
    traj.y(0) = x(0) + r_std * rng.normal();
    for (int k = 0; k < n_steps; ++k) {
        x = euler_step(f_true, x, traj.u(k), dt);
        for (int i = 0; i < n_x; ++i) {
            const double q = i < noise.q_x.size() ? noise.q_x(i) : 0.0;
            x(i) += q * std::sqrt(dt) * rng.normal();
        }
        traj.x.row(k + 1) = x.transpose();
        traj.y(k + 1) = x(0) + r_std * rng.normal();
    }
    return traj;
}

Vector duffing_true_params() {
    Vector p(3);
    p << -1.0, 3.0, 0.1;
    return p;
}

std::function<Vector(const Vector&, double)> duffing_true_dynamics(const Vector& p) {
    return [p](const Vector& x, double u) {
        Vector dx(2);
        dx(0) = x(1);
        dx(1) = -p(2) * x(1) - p(0) * x(0) - p(1) * x(0) * x(0) * x(0) + u;
        return dx;
    };
}

std::function<Vector(const Vector&, double)> duffing_corrupted_dynamics(const Vector& p) {
    return [p](const Vector& x, double u) {
        Vector dx(2);
        dx(0) = x(1);
        dx(1) = -p(2) * x(1) - p(0) * x(0) + u;
        return dx;
    };
}

FunctionLibrary duffing_library() {
    return make_library({"1", "x1", "x2", "x2^2", "sin(x2)", "x1^2", "x1*x2", "cos(x1)", "u"});
}

namespace {

using Fn = std::function<double(const Vector&, double)>;

bool parse_monomial(const std::string& name, int& p1, int& p2) {
    // Accepts x1, x2, x1^p, x2^q, x1*x2, x1^p*x2, x1*x2^q, x1^p*x2^q.
    p1 = 0;
    p2 = 0;
    size_t pos = 0;
    auto read_factor = [&](int which) -> bool {
        int power = 1;
        pos += 2; // consume "x1" / "x2"
        if (pos < name.size() && name[pos] == '^') {
            if (pos + 1 >= name.size() || name[pos + 1] < '1' || name[pos + 1] > '9') return false;
            power = name[pos + 1] - '0';
            pos += 2;
        }
        (which == 1 ? p1 : p2) += power;
        return true;
    };
    while (pos < name.size()) {
        if (name.compare(pos, 2, "x1") == 0) {
            if (!read_factor(1)) return false;
        } else if (name.compare(pos, 2, "x2") == 0) {
            if (!read_factor(2)) return false;
        } else {
            return false;
        }
        if (pos < name.size()) {
            if (name[pos] != '*') return false;
            ++pos;
            if (pos >= name.size()) return false;
        }
    }
    return p1 + p2 > 0;
}

} // namespace

FunctionLibrary make_library(const std::vector<std::string>& names) {
    FunctionLibrary lib;
    std::set<std::string> seen;
    for (const auto& name : names) {
        if (!seen.insert(name).second) throw ConfigError("duplicate library entry '" + name + "'");
        Fn fn;
        int p1 = 0, p2 = 0;
        if (name == "1") {
            fn = [](const Vector&, double) { return 1.0; };
        } else if (name == "u") {
            fn = [](const Vector&, double u) { return u; };
        } else if (name == "sin(x1)") {
            fn = [](const Vector& x, double) { return std::sin(x(0)); };
        } else if (name == "sin(x2)") {
            fn = [](const Vector& x, double) { return std::sin(x(1)); };
        } else if (name == "cos(x1)") {
            fn = [](const Vector& x, double) { return std::cos(x(0)); };
        } else if (name == "cos(x2)") {
            fn = [](const Vector& x, double) { return std::cos(x(1)); };
        } else if (parse_monomial(name, p1, p2)) {
            if (p1 + p2 > 3)
                throw ConfigError("library monomial '" + name + "' exceeds degree 3");
            fn = [p1, p2](const Vector& x, double) {
                return std::pow(x(0), p1) * std::pow(x(1), p2);
            };
        } else {
            throw ConfigError("unknown library entry '" + name + "'");
        }
        lib.entries.push_back({name, std::move(fn)});
    }
    return lib;
}

JointModel duffing_joint_model(const Vector& p, const FunctionLibrary& lib, double dt) {
    JointModel model;
    model.f = duffing_corrupted_dynamics(p);
    model.h = [](const Vector& x, double) {
        Vector y(1);
        y(0) = x(0);
        return y;
    };
    model.library = lib;
    model.dt = dt;
    model.g_injection = {1};
    model.n_x = 2;
    model.m = 1;
    return model;
}

} // namespace sjkf
