#pragma once

#include "sjkf/models.hpp"
#include "sjkf/srukf.hpp"

namespace sjkf {

struct ObservabilityReport {
    int rank = 0;
    int required = 0;
    Vector singular_values;
    bool observable = false;
    JointState probe_point;
};

struct ObservabilityOptions {
    bool include_pm = true; // stack h_pm alongside h
    double tol = 1e-8;      // numerical-rank threshold
    // Step size of the joint iterates used for the rank probe. The model's
    // own dt (default 0.01) leaves the higher Lie blocks below the
    // finite-difference noise floor, so the probe uses a coarser step.
    double probe_dt = 0.25;
    double fd_scale = 1e-6; // central-difference step = fd_scale * max(1,|z_i|)
};

// Stacked outputs (h, h_pm) along n_total iterates of the discrete joint
// step from s: the discrete analogue of the Lie-derivative stack. Output
// length n_total*(m+1) with pm, n_total*m without.
Vector observability_map(const JointModel& model, const PseudoMeasurement& pm,
                         const JointState& s, double u, bool include_pm = true);

// Central finite-difference Jacobian of observability_map at the probe, rank
// via numerical_rank. Probes too close to the h_pm kinks (theta_i = 0 or
// sum|theta_i| = epsilon) are rejected with ConfigError.
ObservabilityReport check_observability(const JointModel& model, const PseudoMeasurement& pm,
                                        const JointState& probe, double u,
                                        const ObservabilityOptions& opts = {});

} // namespace sjkf
