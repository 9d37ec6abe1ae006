#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvjump {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A market model violates one of its standing assumptions.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Evaluation time outside the model horizon, or a malformed argument.
class DomainError : public Error {
public:
    using Error::Error;
};

/// theta_0 = (mu - rho)^2 / sigma^2 requested where sigma vanishes.
class DegenerateVolatility : public Error {
public:
    using Error::Error;
};

/// The RK4 integrator produced a non-finite value.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, std::size_t step)
        : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

/// The affine fixed-point map for beta has unit slope.
class SingularEmbedding : public Error {
public:
    using Error::Error;
};

/// Computed variance below the -1e-12 clamp window.
class NegativeVariance : public Error {
public:
    using Error::Error;
};

/// Configuration document could not be parsed or failed validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mvjump
