#pragma once

#include <stdexcept>
#include <string>

namespace sjkf {

// Cholesky pivot fell below the positive-definiteness floor.
class NotPositiveDefinite : public std::runtime_error {
public:
    NotPositiveDefinite(int pivot, double value)
        : std::runtime_error("matrix not positive definite: pivot " + std::to_string(pivot) +
                             " = " + std::to_string(value)),
          pivot_index(pivot), pivot_value(value) {}
    int pivot_index;
    double pivot_value;
};

// Hyperbolic rank-1 downdate would destroy positive definiteness.
class DowndateBreakdown : public std::runtime_error {
public:
    explicit DowndateBreakdown(int index)
        : std::runtime_error("rank-1 downdate breakdown at diagonal " + std::to_string(index)),
          diag_index(index) {}
    int diag_index;
};

// A model or filter evaluation produced NaN/Inf.
class NonFiniteOutput : public std::runtime_error {
public:
    explicit NonFiniteOutput(const std::string& where)
        : std::runtime_error("non-finite output in " + where) {}
};

// Unscented-transform effective scale n+lambda fell below the configured floor.
class ScaleFloorViolation : public std::runtime_error {
public:
    ScaleFloorViolation(double n_plus_lambda, double floor)
        : std::runtime_error("UT scale n+lambda = " + std::to_string(n_plus_lambda) +
                             " below floor " + std::to_string(floor)) {}
};

// Not enough post-burn-in samples for the requested analysis.
class InsufficientSamples : public std::runtime_error {
public:
    InsufficientSamples(long have, long need)
        : std::runtime_error("insufficient samples: have " + std::to_string(have) +
                             ", need at least " + std::to_string(need)) {}
};

// Invalid or inconsistent configuration; message names the offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

} // namespace sjkf
