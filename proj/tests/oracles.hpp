// Test-side reference values and helpers. Nothing here calls into the
// library's solvers: frozen numbers were computed at 30 digits with an
// arbitrary-precision quadrature of the variation-of-constants formulas.

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mvjump/config.hpp"
#include "mvjump/market.hpp"
#include "mvjump/odes.hpp"

namespace oracle {

// Canonical fixture.
inline constexpr double kRho = 0.06;
inline constexpr double kMu = 0.12;
inline constexpr double kSigma = 0.15;
inline constexpr double kRate = 2.0;
inline constexpr double kSize = 0.10;
inline constexpr double kT = 1.0;
inline constexpr double kGamma = 0.2;
inline constexpr double kX0 = 1.0;
inline constexpr double kW = 1.0;
inline constexpr double kBeta = 0.5;

inline constexpr double kLambda = 0.0425;
inline constexpr double kTheta = 0.0847058823529411764705882352941;

// At (w, beta) = (1, 0.5).
inline constexpr double kPhi0 = 0.84814312126631699;
inline constexpr double kPsi0 = 0.046822846324754239;
inline constexpr double kR0 = -0.066194975866842052;
inline constexpr double kMeanT = 1.1060605550051968;
inline constexpr double kVarT = 0.022464315229715296;
inline constexpr double kV0 = 0.063234337453824691;

// Self-consistent beta at w = 1.
inline constexpr double kBetaResolved = 1.703832882467216;
inline constexpr double kMeanResolved = 1.203832882467216;

// (1.2 - e^0.06)^2 / (e^0.16 - 1).
inline constexpr double kZhouLiAt12 = 0.11001696759054129;

inline mvjump::MarketModel fixture_market() {
    return mvjump::validate(mvjump::constant_market(kT, kRho, kMu, kSigma, {{kRate, kSize}}));
}

inline mvjump::EmbeddingParams fixture_params() { return {kW, kBeta, kGamma, kX0}; }

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Constant-coefficient phi and psi straight from their integral forms.
struct ConstantOracle {
    double rho, theta, gamma, w, beta, T;

    [[nodiscard]] double phi(double t) const { return std::exp(-(theta - 2 * rho + gamma) * (T - t)); }

    [[nodiscard]] double psi(double t) const {
        const double sw = std::sqrt(w);
        return simpson([&](double s) {
            return std::exp(-(theta - rho + gamma) * (s - t)) * (sw * beta * rho * phi(s) + (theta - rho) / sw);
        }, t, T);
    }
};

inline ConstantOracle fixture_oracle(double gamma = kGamma, double w = kW, double beta = kBeta) {
    return {kRho, kTheta, gamma, w, beta, kT};
}

inline std::string fixture_json(const std::string& embedding_extra = R"("w": 1.0, "beta": 0.5,)",
                                const std::string& sim = R"({"n_paths": 2000, "dt": 0.01, "seed": 42})") {
    return R"({
  "schema_version": 1,
  "market": {"horizon": 1.0, "rho": 0.06, "mu": 0.12, "sigma": 0.15,
             "jumps": [{"rate": 2.0, "size": 0.10}]},
  "embedding": {)" + embedding_extra + R"( "gamma": 0.2, "x0": 1.0,
                "w_grid": {"min": 0.1, "max": 10.0, "count": 32}},
  "solver": {"n_ode": 10000},
  "sim": )" + sim + R"(
})";
}

}  // namespace oracle
