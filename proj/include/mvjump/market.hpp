/**
 * @file market.hpp
 * @brief Market primitives for a bond / jump-diffusion stock economy.
 *
 * The risk-free rate rho, the stock drift mu and the volatility sigma are
 * piecewise-constant functions of time on [0, T]. Jumps are a finite set of
 * marks; mark i arrives with intensity rate_i and moves the stock by the
 * relative amount size_i(t). All derived rates depend on the jump measure
 * only through
 *
 *     Lambda(t) = sigma(t)^2 + sum_i rate_i * size_i(t)^2
 *     theta(t)  = (mu(t) - rho(t))^2 / Lambda(t)
 *     theta0(t) = (mu(t) - rho(t))^2 / sigma(t)^2
 *
 * so a finite mark set is evaluated exactly.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mvjump/errors.hpp"

namespace mvjump {

/// Step function on [0, T]; intervals are left-closed, the last one closed.
class PiecewiseConstantFn {
public:
    PiecewiseConstantFn() = default;

    PiecewiseConstantFn(std::vector<double> breakpoints, std::vector<double> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
        if (breakpoints_.size() < 2) {
            throw DomainError("piecewise-constant function needs at least two breakpoints");
        }
        if (values_.size() != breakpoints_.size() - 1) {
            throw DomainError("piecewise-constant function needs one value per interval");
        }
        if (breakpoints_.front() != 0.0) {
            throw DomainError("first breakpoint must be 0");
        }
        for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
            if (!(breakpoints_[i] > breakpoints_[i - 1])) {
                throw DomainError("breakpoints must be strictly increasing");
            }
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw DomainError("piecewise-constant value is not finite");
        }
    }

    static PiecewiseConstantFn constant(double horizon, double value) {
        return PiecewiseConstantFn({0.0, horizon}, {value});
    }

    [[nodiscard]] double horizon() const noexcept { return breakpoints_.back(); }
    [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::size_t intervals() const noexcept { return values_.size(); }

    [[nodiscard]] double operator()(double t) const {
        if (!(t >= 0.0 && t <= horizon())) {
            std::ostringstream os;
            os << "time " << t << " outside [0, " << horizon() << "]";
            throw DomainError(os.str());
        }
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
        auto idx = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it));
        // idx is in [1, size]; t == T lands past the end and maps to the last interval.
        return values_[std::min(idx, values_.size()) - 1];
    }

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

struct JumpMark {
    double rate = 0.0;         // events per year
    PiecewiseConstantFn size;  // relative jump amplitude
};

/// Coefficients frozen at one instant.
struct MarketPoint {
    double rho = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double lambda = 0.0;  // total variance rate
    double theta = 0.0;
};

struct MarketModel {
    double horizon = 1.0;
    PiecewiseConstantFn riskfree;
    PiecewiseConstantFn drift;
    PiecewiseConstantFn vol;
    std::vector<JumpMark> jumps;

    /// Union of all coefficient breakpoints, sorted and deduplicated.
    [[nodiscard]] std::vector<double> breakpoints() const {
        std::vector<double> out;
        auto append = [&out](const PiecewiseConstantFn& f) {
            out.insert(out.end(), f.breakpoints().begin(), f.breakpoints().end());
        };
        append(riskfree);
        append(drift);
        append(vol);
        for (const auto& j : jumps) append(j.size);
        out.push_back(0.0);
        out.push_back(horizon);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    void check_time(double t) const {
        if (!(t >= 0.0 && t <= horizon)) {
            std::ostringstream os;
            os << "time " << t << " outside [0, " << horizon << "]";
            throw DomainError(os.str());
        }
    }
};

/// Constant-coefficient model with the given marks as (rate, size) pairs.
inline MarketModel constant_market(double horizon, double rho, double mu, double sigma,
                                   const std::vector<std::pair<double, double>>& marks = {}) {
    MarketModel m;
    m.horizon = horizon;
    m.riskfree = PiecewiseConstantFn::constant(horizon, rho);
    m.drift = PiecewiseConstantFn::constant(horizon, mu);
    m.vol = PiecewiseConstantFn::constant(horizon, sigma);
    for (auto [rate, size] : marks) {
        m.jumps.push_back({rate, PiecewiseConstantFn::constant(horizon, size)});
    }
    return m;
}

inline double eval_lambda(const MarketModel& model, double t) {
    model.check_time(t);
    const double s = model.vol(t);
    double total = s * s;
    for (const auto& j : model.jumps) {
        const double eta = j.size(t);
        total += eta * eta * j.rate;
    }
    return total;
}

inline double eval_theta(const MarketModel& model, double t) {
    const double lambda = eval_lambda(model, t);
    const double excess = model.drift(t) - model.riskfree(t);
    return excess * excess / lambda;
}

inline double eval_theta0(const MarketModel& model, double t) {
    model.check_time(t);
    const double s = model.vol(t);
    if (s == 0.0) {
        std::ostringstream os;
        os << "sigma(t) = 0 at t=" << t << ", theta0 undefined";
        throw DegenerateVolatility(os.str());
    }
    const double excess = model.drift(t) - model.riskfree(t);
    return excess * excess / (s * s);
}

inline MarketPoint market_point(const MarketModel& model, double t) {
    MarketPoint p;
    p.rho = model.riskfree(t);
    p.mu = model.drift(t);
    p.sigma = model.vol(t);
    p.lambda = eval_lambda(model, t);
    p.theta = (p.mu - p.rho) * (p.mu - p.rho) / p.lambda;
    return p;
}

/// Exact integral over [a, b] of a function that is constant between model
/// breakpoints; `f` is sampled once per piece at the piece midpoint.
template <class F>
double integrate_piecewise(const MarketModel& model, double a, double b, F&& f) {
    if (a > b) return -integrate_piecewise(model, b, a, f);
    model.check_time(a);
    model.check_time(b);
    const auto bps = model.breakpoints();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const double lo = std::max(a, bps[i]);
        const double hi = std::min(b, bps[i + 1]);
        if (hi > lo) total += f(0.5 * (lo + hi)) * (hi - lo);
    }
    return total;
}

/// Checks every standing assumption on each piece of the coefficient grid.
/// Returns the model unchanged when all of them hold.
inline MarketModel validate(MarketModel model) {
    auto fail = [](const std::string& what, double t) {
        std::ostringstream os;
        os << what << " at t=" << t;
        throw ModelError(os.str());
    };
    if (!(model.horizon > 0.0) || !std::isfinite(model.horizon)) {
        throw ModelError("horizon T must be positive and finite");
    }
    auto same_horizon = [&](const PiecewiseConstantFn& f, const char* name) {
        if (f.intervals() == 0) throw ModelError(std::string(name) + " is missing");
        if (f.horizon() != model.horizon) {
            throw ModelError(std::string(name) + " breakpoints must end at T");
        }
    };
    same_horizon(model.riskfree, "rho");
    same_horizon(model.drift, "mu");
    same_horizon(model.vol, "sigma");
    for (const auto& j : model.jumps) {
        same_horizon(j.size, "jump size");
        if (!(j.rate >= 0.0) || !std::isfinite(j.rate)) {
            throw ModelError("jump rate must be finite and >= 0");
        }
    }

    const auto bps = model.breakpoints();
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const double t = bps[i];
        const double rho = model.riskfree(t);
        const double mu = model.drift(t);
        if (!(rho > 0.0)) fail("rho(t) <= 0", t);
        if (!(mu > rho)) fail("mu(t) <= rho(t)", t);
        if (!(eval_lambda(model, t) > 0.0)) fail("Lambda(t) = 0", t);
    }
    return model;
}

}  // namespace mvjump
