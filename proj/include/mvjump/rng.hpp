// Counter-based random streams (Philox4x32-10). Every draw is a pure
// function of (seed, path, step, substream), so paths can be generated in
// any order on any number of threads and still reproduce bit for bit.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace mvjump {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) noexcept {
        std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
        std::uint32_t k0 = key[0], k1 = key[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            c0 = hi1 ^ c1 ^ k0;
            c2 = hi0 ^ c3 ^ k1;
            c1 = static_cast<std::uint32_t>(p1);
            c3 = static_cast<std::uint32_t>(p0);
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return {c0, c1, c2, c3};
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
};

/// Uniform in the open interval (0, 1) from 64 random bits. With 52 bits
/// both u and 1 - u are exact and never reach 0 or 1.
constexpr double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Random stream of one Monte Carlo path. Counter layout is
/// (index, substream, path_lo, path_hi) under the seed as key. Substream 0
/// holds Brownian normals, two steps per block; substream 1 holds jump-mark
/// uniforms, two marks per block.
class PathStream {
public:
    PathStream(std::uint64_t seed, std::uint64_t path) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path)),
          path_hi_(static_cast<std::uint32_t>(path >> 32)) {}

    [[nodiscard]] Philox4x32::Counter block(std::uint32_t index, std::uint32_t substream) const noexcept {
        return Philox4x32::apply({index, substream, path_lo_, path_hi_}, key_);
    }

    /// Standard normals for steps 2j and 2j + 1 (Box-Muller on one block).
    [[nodiscard]] std::array<double, 2> normal_pair(std::uint32_t j) const noexcept {
        const auto b = block(j, 0);
        const double u1 = to_open_unit(b[0], b[1]);
        const double u2 = to_open_unit(b[2], b[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    [[nodiscard]] double normal(std::uint32_t step) const noexcept {
        return normal_pair(step >> 1)[step & 1u];
    }

    /// Uniform on (0, 1) for jump mark `mark` at `step`.
    [[nodiscard]] double uniform(std::uint32_t step, std::uint32_t mark) const noexcept {
        const auto b = block(step, 1 + (mark >> 1));
        return (mark & 1u) ? to_open_unit(b[2], b[3]) : to_open_unit(b[0], b[1]);
    }

private:
    Philox4x32::Key key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
};

/// Poisson(mean) by inversion of the uniform `u`; `p0` must be exp(-mean).
inline std::uint32_t poisson_inverse(double u, double mean, double p0) noexcept {
    std::uint32_t k = 0;
    double p = p0;
    double cdf = p;
    while (u > cdf && k < 10000) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
        if (p == 0.0) break;
    }
    return k;
}

}  // namespace mvjump
