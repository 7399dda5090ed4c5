#pragma once

#include <optional>
#include <vector>

#include "sjkf/linalg.hpp"
#include "sjkf/models.hpp"

namespace sjkf {

// Time-indexed record of one estimation run. theta is stored column-wise:
// theta.col(k) is the parameter estimate at times[k].
struct EstimateLog {
    std::vector<double> times;
    Matrix x_true; // N x n_x
    Matrix x_est;  // N x n_x
    Matrix theta;  // n_theta x N
    Vector y;      // N measurements
    Vector u;      // N inputs
};

struct DominanceReport {
    Vector shares;             // per-term fraction of total variance, sums to 1
    std::vector<int> ranking;  // term indices by descending share
    std::vector<int> selected; // minimal ranking prefix with cumulative share >= threshold
    double burn_in = 0.0;
    double threshold = 0.95;
};

// Running sum over k of ||x_true(k) - x_est(k)||_2 * dt; nondecreasing.
Vector cumulative_error(const EstimateLog& log);

// Eigen-decomposition of the uncentered second-moment matrix (1/N') Th' Th'^T
// of the burn-in-trimmed theta history. Per-term share is the eigenvalue-
// weighted squared loading, equal to diag/trace of the second-moment matrix.
// No mean subtraction: a constant theta_1 must keep its contribution.
DominanceReport pca_dominance(const EstimateLog& log, double burn_in = 2.0,
                              double threshold = 0.95);

// Windowed variant (not part of the acceptance surface): dominance shares
// over a sliding window of the given length, reported per window start index.
std::vector<DominanceReport> pca_dominance_windowed(const EstimateLog& log,
                                                    double window_seconds,
                                                    double threshold = 0.95);

// Per-step theta_k (restricted to `terms` if given) dotted with
// Psi(x_est(k), u_k): the reconstructed model-inaccuracy estimate.
Vector reconstruct_g(const EstimateLog& log, const FunctionLibrary& lib,
                     const std::optional<std::vector<int>>& terms = std::nullopt);

} // namespace sjkf
