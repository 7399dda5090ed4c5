#pragma once

#include <cstdint>
#include <random>

namespace sjkf {

// Deterministic random source. The mt19937_64 engine is seeded directly; all
// variate transforms are implemented here rather than with std::*_distribution
// so that streams are bit-identical across standard-library implementations,
// which keeps frozen regression constants valid.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on [0,1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform_nonzero() {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return u;
    }

    // Standard normal via Box-Muller; caches the second variate.
    double normal();

    // Gamma(shape, scale=1) by Marsaglia-Tsang squeeze; shape < 1 handled by
    // the usual boost gamma(shape+1) * U^(1/shape).
    double gamma(double shape);

    double half_cauchy(double scale);
    double inv_gamma(double shape, double rate) { return rate / gamma(shape); }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace sjkf
