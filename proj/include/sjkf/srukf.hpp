#pragma once

#include <functional>

#include "sjkf/linalg.hpp"
#include "sjkf/models.hpp"

namespace sjkf {

// Scaled unscented-transform parameters. The effective scale n+lambda with
// lambda = alpha^2 (n+kappa) - n must stay above the floor (default 1e-8).
struct UTParams {
    double alpha = 1e-3;
    double beta = 2.0;
    double kappa = 0.0;
    int n = 0;
};

struct UTWeights {
    Vector wm;    // 2n+1 mean weights, sum to 1
    Vector wc;    // covariance weights
    double gamma; // sqrt(n+lambda) sigma-point spread
};

constexpr double kScaleFloor = 1e-8;

// Throws ScaleFloorViolation when n+lambda < kScaleFloor.
UTWeights ut_weights(const UTParams& p);
// Clamps n+lambda at the floor instead of throwing (filter-internal use).
UTWeights ut_weights_clamped(const UTParams& p);

// Rows 0..2n: mean, mean + gamma*S_col_i, mean - gamma*S_col_i.
Matrix sigma_points(const Vector& mean, const SqrtFactor& s, double gamma);

struct FilterState {
    Vector mean;
    SqrtFactor sqrt_cov;
    long step = 0;
};

struct FilterDiagnostics {
    long downdate_recoveries = 0;
    long merge_repairs = 0;
};

using TransitionMap = std::function<Vector(const Vector&, double)>;

// One square-root UT predict/update. q_diag and r_diag are the diagonals of
// the Q and R square-root factors (per-step standard deviations), floored at
// 1e-12. clamp_scale selects the clamped weight variant.
FilterState srukf_step(const FilterState& fs,
                       const TransitionMap& dyn,
                       const TransitionMap& obs,
                       const Vector& q_diag, const Vector& r_diag,
                       double u, const Vector& y,
                       const UTParams& p, FilterDiagnostics& diag,
                       bool clamp_scale = false);

// Pseudo-measurement of Eq-style sparsity: h_pm = max(sum_i |theta_i| - eps, 0),
// asserted to equal y_pm = 0 with standard deviation r_pm.
struct PseudoMeasurement {
    double epsilon = 0.01;
    double r_pm = 9.0;
};

double h_pm(const PseudoMeasurement& pm, const JointState& s);

struct JointFilterOptions {
    bool pass2_enabled = true;   // ablation switch
    bool unscaled_pass2 = false; // run pass 2 with alpha=1, beta=0
    bool zero_q_pass2 = false;   // drop process noise in the identity pass
};

// Two-pass step: pass 1 is a joint SRUKF with kappa = 3 - n_total on the real
// measurement; pass 2 an identity-dynamics SRUKF with kappa = 3*sigma_star2 -
// n_total on the pseudo-measurement; the merge keeps pass-1 x and cross
// blocks and takes the theta mean and theta-theta covariance block from pass
// 2, re-factorizing with an eigenvalue-clip fallback.
FilterState joint_filter_step(const FilterState& fs, const JointModel& model,
                              const PseudoMeasurement& pm,
                              const Vector& q_joint_diag, const Vector& r_diag,
                              double u, const Vector& y,
                              const UTParams& base, double sigma_star2,
                              const JointFilterOptions& opts, FilterDiagnostics& diag);

} // namespace sjkf
