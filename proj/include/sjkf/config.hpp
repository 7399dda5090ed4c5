#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sjkf/linalg.hpp"
#include "sjkf/models.hpp"
#include "sjkf/prior.hpp"
#include "sjkf/srukf.hpp"

namespace sjkf {

// Flat key-value config file: one `key = value` per line, dotted section
// keys, '#' comments, comma-separated lists. Unknown keys are rejected.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);

enum class ObserverKind { classical, joint, joint_no_pass2 };

std::string observer_name(ObserverKind k);
ObserverKind observer_from_name(const std::string& name);

struct ExperimentConfig {
    // model
    std::string model_name = "duffing";
    Vector p;                       // true parameters (-1, 3, 0.1)
    Vector x0_true;                 // (1, 0)
    Vector x0_est;                  // (2, 1)
    double theta0 = 1e-3;           // initial estimate per parameter
    double dt = 0.01;
    double t_end = 10.0;
    std::vector<std::string> library_terms;

    // sinusoid input u(t) = amplitude * sin(omega*t + phase)
    double input_amplitude = 2.0;
    double input_omega = 1.0;
    double input_phase = 0.0;

    // filter noise model (per-step standard deviations)
    Vector noise_q_x;               // (1e-4, 1e-4)
    double noise_q_theta = 0.045;
    double noise_r = 1e-2;

    // truth-generation noise (process std scaled by sqrt(dt) per step)
    Vector sim_q_x;                 // (1e-3, 1e-3)
    double sim_r = 1e-3;

    // unscented transform
    double ut_alpha = 1e-3;
    double ut_beta = 2.0;

    // regularized horseshoe
    HorseshoeSpec horseshoe;
    long horseshoe_n_samples = 1000000;
    std::uint64_t horseshoe_seed = 2024;

    // pseudo-measurement
    double pm_epsilon = 0.01;
    double pm_r = 9.0;              // std

    ObserverKind observer = ObserverKind::joint;
    bool unscaled_pass2 = false;
    bool zero_q_pass2 = false;
    bool sigma_star_per_step = false;

    // initial sqrt-covariance diagonal; s_theta_scale < 0 means sigma_star*xi
    Vector init_s_x;                // (1, 1)
    double init_s_theta_scale = -1.0;

    double analysis_burn_in = 2.0;
    double analysis_threshold = 0.95;

    std::uint64_t seed = 1;
    std::string output_dir = "out";

    FunctionLibrary library() const;
    JointModel joint_model() const;
    double input_at(double t) const;

    // Keys whose defaults are tuning choices rather than model structure;
    // the run report lists them so results can be reproduced exactly.
    static std::vector<std::string> tuning_keys();
};

// Defaults for every key, overridden by the file entries; validation errors
// carry the offending field name.
ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv);
ExperimentConfig load_config(const std::string& path);

// Effective full configuration, echoable and re-parseable.
std::map<std::string, std::string> config_to_map(const ExperimentConfig& cfg);

} // namespace sjkf
