#pragma once

#include <cstdint>

#include "sjkf/linalg.hpp"
#include "sjkf/rng.hpp"

namespace sjkf {

struct LaplaceParams {
    double mu = 0.0;
    double sigma = 1.0; // scale, > 0
};

// Regularized-horseshoe hierarchy: theta_i ~ N(0, lambda_check_i^2 tau^2),
// lambda_i ~ C+(0,1), tau ~ C+(0,tau0), c^2 ~ Inv-Gamma(a,b),
// lambda_check = c*lambda / sqrt(c^2 + tau^2 lambda^2).
struct HorseshoeSpec {
    double tau0 = 0.1;
    double a = 4.5;
    double b = 1.5;
    Vector xi; // optional per-parameter scales, default all 1
};

double laplace_pdf(const LaplaceParams& p, double t);

// c*lambda / sqrt(c^2 + tau^2 lambda^2); nondecreasing in lambda, <= c/tau.
double regularized_lambda(double c, double lambda, double tau);

// One draw of sigma^2 = lambda_check^2 * tau^2; always in (0, drawn c^2).
double sample_sigma2(const HorseshoeSpec& spec, Rng& rng);

struct SigmaStarResult {
    double estimate = 0.0;   // Monte-Carlo estimate of E[sigma^2]
    double std_error = 0.0;
    long n_samples = 0;
};

// Monte-Carlo estimate of E[sigma^2]. Samples are drawn in fixed-size chunks,
// each from a substream derived deterministically from (seed, chunk index),
// so the result is reproducible and chunks could be evaluated in parallel.
SigmaStarResult sigma_star(const HorseshoeSpec& spec, long n_samples, std::uint64_t seed);

} // namespace sjkf
