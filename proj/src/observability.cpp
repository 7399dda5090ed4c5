#include "sjkf/observability.hpp"

#include <cmath>

#include "sjkf/errors.hpp"

namespace sjkf {

Vector observability_map(const JointModel& model, const PseudoMeasurement& pm,
                         const JointState& s, double u, bool include_pm) {
    const int n_total = s.n_total();
    const int block = model.m + (include_pm ? 1 : 0);
    Vector out(n_total * block);
    JointState cur = s;
    for (int k = 0; k < n_total; ++k) {
        Vector hy = model.h(cur.x, u);
        out.segment(k * block, model.m) = hy;
        if (include_pm) out(k * block + model.m) = h_pm(pm, cur);
        cur = joint_step(model, cur, u);
    }
    if (!out.allFinite()) throw NonFiniteOutput("observability_map");
    return out;
}

ObservabilityReport check_observability(const JointModel& model, const PseudoMeasurement& pm,
                                        const JointState& probe, double u,
                                        const ObservabilityOptions& opts) {
    const int n_total = probe.n_total();
    JointModel probe_model = model;
    probe_model.dt = opts.probe_dt;

    // Validate distance from the h_pm kinks when the pm row is included.
    if (opts.include_pm) {
        double max_step = 0.0;
        Vector z = probe.stacked();
        for (int i = 0; i < n_total; ++i)
            max_step = std::max(max_step, opts.fd_scale * std::max(1.0, std::abs(z(i))));
        for (int i = 0; i < probe.n_theta(); ++i)
            if (std::abs(probe.theta(i)) < 10.0 * max_step)
                throw ConfigError("observability probe theta_" + std::to_string(i + 1) +
                                  " too close to zero for the pseudo-measurement kink");
        if (std::abs(probe.theta.cwiseAbs().sum() - pm.epsilon) < 10.0 * max_step)
            throw ConfigError("observability probe sits on the |theta| = epsilon kink");
    }

    const Vector z0 = probe.stacked();
    const int rows = static_cast<int>(
        observability_map(probe_model, pm, probe, u, opts.include_pm).size());
    Matrix jac(rows, n_total);
    for (int j = 0; j < n_total; ++j) {
        const double step = opts.fd_scale * std::max(1.0, std::abs(z0(j)));
        Vector zp = z0, zm = z0;
        zp(j) += step;
        zm(j) -= step;
        Vector fp = observability_map(probe_model, pm, JointState::unstack(zp, probe.n_x()), u,
                                      opts.include_pm);
        Vector fm = observability_map(probe_model, pm, JointState::unstack(zm, probe.n_x()), u,
                                      opts.include_pm);
        jac.col(j) = (fp - fm) / (2.0 * step);
    }

    Eigen::JacobiSVD<Matrix> svd(jac);
    ObservabilityReport rep;
    rep.required = n_total;
    rep.singular_values = svd.singularValues();
    rep.rank = numerical_rank(jac, opts.tol);
    rep.observable = (rep.rank == n_total);
    rep.probe_point = probe;
    return rep;
}

} // namespace sjkf
