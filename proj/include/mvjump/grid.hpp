#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mvjump/errors.hpp"
#include "mvjump/market.hpp"

namespace mvjump {

/// Uniform grid on [t0, t1] with n steps (n + 1 nodes).
struct GridSpec {
    double t0 = 0.0;
    double t1 = 1.0;
    std::size_t n = 10000;

    [[nodiscard]] double step() const noexcept { return (t1 - t0) / static_cast<double>(n); }
    [[nodiscard]] double node(std::size_t k) const noexcept {
        if (k == n) return t1;
        return t0 + (t1 - t0) * (static_cast<double>(k) / static_cast<double>(n));
    }
    [[nodiscard]] double cell_mid(std::size_t k) const noexcept {
        return 0.5 * (node(k) + node(k + 1));
    }

    void check() const {
        if (!(t0 < t1)) throw DomainError("grid requires t0 < t1");
        if (n < 1) throw DomainError("grid requires n >= 1");
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Sampled scalar function on a GridSpec; linear interpolation off-node.
class SolutionGrid {
public:
    SolutionGrid() = default;
    SolutionGrid(GridSpec spec, std::vector<double> values)
        : spec_(spec), values_(std::move(values)) {
        spec_.check();
        if (values_.size() != spec_.n + 1) throw DomainError("grid needs n + 1 values");
    }

    [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const { return values_[k]; }
    [[nodiscard]] double front() const { return values_.front(); }
    [[nodiscard]] double back() const { return values_.back(); }

    [[nodiscard]] double at(double t) const {
        if (!(t >= spec_.t0 && t <= spec_.t1)) throw DomainError("grid evaluation outside [t0, t1]");
        const double x = (t - spec_.t0) / spec_.step();
        auto k = static_cast<std::size_t>(std::floor(x));
        if (k >= spec_.n) return values_.back();
        const double w = x - static_cast<double>(k);
        if (w == 0.0) return values_[k];
        return (1.0 - w) * values_[k] + w * values_[k + 1];
    }

private:
    GridSpec spec_;
    std::vector<double> values_;
};

/// Grid on [0, T] with at least `n_min` steps, nudged upward so that every
/// coefficient breakpoint falls on a node when such an n exists nearby.
inline GridSpec make_grid_spec(const MarketModel& model, std::size_t n_min = 10000) {
    const double T = model.horizon;
    const auto bps = model.breakpoints();
    auto aligned = [&](std::size_t n) {
        for (double b : bps) {
            const double x = b / T * static_cast<double>(n);
            if (std::abs(x - std::round(x)) > 1e-9 * static_cast<double>(n)) return false;
        }
        return true;
    };
    const std::size_t limit = std::max<std::size_t>(n_min, 1) * 4;
    for (std::size_t n = std::max<std::size_t>(n_min, 1); n <= limit; ++n) {
        if (aligned(n)) return {0.0, T, n};
    }
    return {0.0, T, std::max<std::size_t>(n_min, 1)};
}

}  // namespace mvjump
