#include "sjkf/srukf.hpp"

#include <cmath>

#include "sjkf/errors.hpp"

namespace sjkf {

namespace {

UTWeights weights_impl(const UTParams& p, bool clamp) {
    const int n = p.n;
    double lambda = p.alpha * p.alpha * (n + p.kappa) - n;
    if (n + lambda < kScaleFloor) {
        if (!clamp) throw ScaleFloorViolation(n + lambda, kScaleFloor);
        lambda = kScaleFloor - n;
    }
    UTWeights w;
    w.wm = Vector::Constant(2 * n + 1, 1.0 / (2.0 * (n + lambda)));
    w.wm(0) = lambda / (n + lambda);
    w.wc = w.wm;
    w.wc(0) += 1.0 - p.alpha * p.alpha + p.beta;
    w.gamma = std::sqrt(n + lambda);
    return w;
}

Vector floored(const Vector& v) {
    return v.cwiseMax(1e-12);
}

SqrtFactor downdate_with_recovery(const SqrtFactor& s, const Vector& v, FilterDiagnostics& diag) {
    try {
        return rank1_update(s, v, -1);
    } catch (const DowndateBreakdown&) {
        ++diag.downdate_recoveries;
        Matrix p = s.cov() - v * v.transpose();
        return clipped_chol(p);
    }
}

} // namespace

UTWeights ut_weights(const UTParams& p) { return weights_impl(p, false); }
UTWeights ut_weights_clamped(const UTParams& p) { return weights_impl(p, true); }

Matrix sigma_points(const Vector& mean, const SqrtFactor& s, double gamma) {
    const int n = static_cast<int>(mean.size());
    Matrix pts(2 * n + 1, n);
    pts.row(0) = mean.transpose();
    for (int i = 0; i < n; ++i) {
        pts.row(1 + i) = (mean + gamma * s.m.col(i)).transpose();
        pts.row(1 + n + i) = (mean - gamma * s.m.col(i)).transpose();
    }
    return pts;
}

FilterState srukf_step(const FilterState& fs,
                       const TransitionMap& dyn,
                       const TransitionMap& obs,
                       const Vector& q_diag, const Vector& r_diag,
                       double u, const Vector& y,
                       const UTParams& p, FilterDiagnostics& diag,
                       bool clamp_scale) {
    const int n = static_cast<int>(fs.mean.size());
    UTParams params = p;
    params.n = n;
    const UTWeights w = clamp_scale ? ut_weights_clamped(params) : ut_weights(params);
    const int n_pts = 2 * n + 1;

    // Predict: propagate sigma points, compress spread rows with the process
    // noise factor, then rank-1 update/downdate for the 0th column.
    Matrix pts = sigma_points(fs.mean, fs.sqrt_cov, w.gamma);
    Matrix xp(n_pts, n);
    for (int i = 0; i < n_pts; ++i) xp.row(i) = dyn(pts.row(i).transpose(), u).transpose();
    Vector xbar = xp.transpose() * w.wm;

    Matrix stack(2 * n + n, n);
    for (int i = 1; i < n_pts; ++i)
        stack.row(i - 1) = std::sqrt(w.wc(i)) * (xp.row(i) - xbar.transpose());
    stack.bottomRows(n) = Matrix(floored(q_diag).asDiagonal()); // rows of Q^T
    SqrtFactor sm = qr_compress(stack);
    Vector v0 = std::sqrt(std::abs(w.wc(0))) * (xp.row(0).transpose() - xbar);
    if (w.wc(0) >= 0.0)
        sm = rank1_update(sm, v0, +1);
    else
        sm = downdate_with_recovery(sm, v0, diag);

    // Update: redraw sigma points from the predicted factor.
    pts = sigma_points(xbar, sm, w.gamma);
    const int m = static_cast<int>(y.size());
    Matrix yp(n_pts, m);
    for (int i = 0; i < n_pts; ++i) yp.row(i) = obs(pts.row(i).transpose(), u).transpose();
    Vector ybar = yp.transpose() * w.wm;

    Matrix ystack(2 * n + m, m);
    for (int i = 1; i < n_pts; ++i)
        ystack.row(i - 1) = std::sqrt(w.wc(i)) * (yp.row(i) - ybar.transpose());
    ystack.bottomRows(m) = Matrix(floored(r_diag).asDiagonal());
    SqrtFactor sy = qr_compress(ystack);
    Vector w0 = std::sqrt(std::abs(w.wc(0))) * (yp.row(0).transpose() - ybar);
    if (w.wc(0) >= 0.0)
        sy = rank1_update(sy, w0, +1);
    else
        sy = downdate_with_recovery(sy, w0, diag);

    Matrix pxy = Matrix::Zero(n, m);
    for (int i = 0; i < n_pts; ++i)
        pxy += w.wc(i) * (pts.row(i).transpose() - xbar) * (yp.row(i) - ybar.transpose());

    // Gain via two triangular solves: K = Pxy (Sy Sy^T)^-1.
    Matrix t1 = sy.m.triangularView<Eigen::Lower>().solve(pxy.transpose());
    Matrix gain = sy.m.transpose().triangularView<Eigen::Upper>().solve(t1).transpose();

    FilterState out;
    out.mean = xbar + gain * (y - ybar);
    if (!out.mean.allFinite()) throw NonFiniteOutput("srukf_step");
    Matrix ks = gain * sy.m;
    SqrtFactor spost = sm;
    for (int j = 0; j < m; ++j) spost = downdate_with_recovery(spost, ks.col(j), diag);
    out.sqrt_cov = spost;
    out.step = fs.step + 1;
    return out;
}

double h_pm(const PseudoMeasurement& pm, const JointState& s) {
    return std::max(s.theta.cwiseAbs().sum() - pm.epsilon, 0.0);
}

FilterState joint_filter_step(const FilterState& fs, const JointModel& model,
                              const PseudoMeasurement& pm,
                              const Vector& q_joint_diag, const Vector& r_diag,
                              double u, const Vector& y,
                              const UTParams& base, double sigma_star2,
                              const JointFilterOptions& opts, FilterDiagnostics& diag) {
    const int n_x = model.n_x;
    const int n_total = static_cast<int>(fs.mean.size());
    const int n_theta = n_total - n_x;

    const TransitionMap dyn = [&model, n_x](const Vector& z, double uu) {
        return joint_step(model, JointState::unstack(z, n_x), uu).stacked();
    };
    const TransitionMap obs = [&model, n_x](const Vector& z, double uu) {
        return model.h(z.head(n_x), uu);
    };

    UTParams p1 = base;
    p1.kappa = 3.0 - n_total;
    FilterState pass1 = srukf_step(fs, dyn, obs, q_joint_diag, r_diag, u, y, p1, diag, true);
    if (!opts.pass2_enabled) return pass1;

    const TransitionMap identity = [](const Vector& z, double) { return z; };
    const TransitionMap obs_pm = [&pm, n_x](const Vector& z, double) {
        Vector out(1);
        out(0) = h_pm(pm, JointState::unstack(z, n_x));
        return out;
    };

    UTParams p2 = base;
    p2.kappa = 3.0 * sigma_star2 - n_total;
    if (opts.unscaled_pass2) {
        p2.alpha = 1.0;
        p2.beta = 0.0;
    }
    Vector q2 = opts.zero_q_pass2 ? Vector::Constant(n_total, 1e-12).eval() : q_joint_diag;
    Vector y_pm = Vector::Zero(1);
    Vector r_pm_diag = Vector::Constant(1, pm.r_pm);
    FilterState pass2 =
        srukf_step(pass1, identity, obs_pm, q2, r_pm_diag, u, y_pm, p2, diag, true);

    // Merge: pass-1 x mean and x/cross covariance, pass-2 theta mean and
    // theta-theta block, then re-factorize.
    FilterState merged;
    merged.step = pass1.step;
    merged.mean = pass1.mean;
    merged.mean.tail(n_theta) = pass2.mean.tail(n_theta);
    Matrix p_full = pass1.sqrt_cov.cov();
    p_full.bottomRightCorner(n_theta, n_theta) =
        pass2.sqrt_cov.cov().bottomRightCorner(n_theta, n_theta);
    p_full = 0.5 * (p_full + p_full.transpose());
    try {
        merged.sqrt_cov = chol(p_full);
    } catch (const NotPositiveDefinite&) {
        ++diag.merge_repairs;
        merged.sqrt_cov = clipped_chol(p_full);
    }
    return merged;
}

} // namespace sjkf
