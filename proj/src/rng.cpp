#include "sjkf/rng.hpp"

#include <cmath>

namespace sjkf {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double Rng::gamma(double shape) {
    if (shape < 1.0) {
        const double boost = std::pow(uniform_nonzero(), 1.0 / shape);
        return gamma(shape + 1.0) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = normal();
        double t = 1.0 + c * z;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = uniform_nonzero();
        if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
    }
}

double Rng::half_cauchy(double scale) {
    return std::abs(scale * std::tan(kPi * (uniform() - 0.5)));
}

} // namespace sjkf
