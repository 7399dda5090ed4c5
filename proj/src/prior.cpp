#include "sjkf/prior.hpp"

#include <cmath>

namespace sjkf {

double laplace_pdf(const LaplaceParams& p, double t) {
    return std::exp(-std::abs(t - p.mu) / p.sigma) / (2.0 * p.sigma);
}

double regularized_lambda(double c, double lambda, double tau) {
    return c * lambda / std::sqrt(c * c + tau * tau * lambda * lambda);
}

double sample_sigma2(const HorseshoeSpec& spec, Rng& rng) {
    const double lambda = rng.half_cauchy(1.0);
    const double tau = rng.half_cauchy(spec.tau0);
    const double c2 = rng.inv_gamma(spec.a, spec.b);
    const double lc = regularized_lambda(std::sqrt(c2), lambda, tau);
    return lc * lc * tau * tau;
}

namespace {

// SplitMix64 finalizer; decorrelates per-chunk seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t chunk) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (chunk + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr long kChunk = 1L << 20;

} // namespace

SigmaStarResult sigma_star(const HorseshoeSpec& spec, long n_samples, std::uint64_t seed) {
    double sum = 0.0;
    double sum_sq = 0.0;
    long done = 0;
    for (std::uint64_t chunk = 0; done < n_samples; ++chunk) {
        Rng rng(mix_seed(seed, chunk));
        const long count = std::min(kChunk, n_samples - done);
        double local = 0.0, local_sq = 0.0;
        for (long i = 0; i < count; ++i) {
            const double s2 = sample_sigma2(spec, rng);
            local += s2;
            local_sq += s2 * s2;
        }
        sum += local;
        sum_sq += local_sq;
        done += count;
    }
    SigmaStarResult res;
    res.n_samples = n_samples;
    res.estimate = sum / static_cast<double>(n_samples);
    const double var = sum_sq / static_cast<double>(n_samples) - res.estimate * res.estimate;
    res.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(n_samples));
    return res;
}

} // namespace sjkf
