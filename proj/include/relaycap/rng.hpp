// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace relaycap {

/// Counter-based pseudo-random stream (splitmix64 core). A stream is fully
/// determined by (seed, stream_id), so per-trial streams can be evaluated in
/// any order or thread without changing the results.
class StreamRng {
  public:
    explicit StreamRng(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
        : state_(derive_key(seed, stream_id)) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        return finalize(state_);
    }

    /// Uniform on (0, 1].
    double next_unit() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the paired sample is cached.
    double next_gaussian() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    /// Circularly symmetric complex normal CN(0,1): (g1 + i g2)/sqrt(2).
    std::complex<double> next_cgauss() noexcept {
        const double re = next_gaussian();
        const double im = next_gaussian();
        return {re * inv_sqrt2, im * inv_sqrt2};
    }

    /// Key for an independent child stream (e.g. one per Monte Carlo trial).
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) noexcept {
        std::uint64_t x = seed * 0xBF58476D1CE4E5B9ull;
        x ^= (stream_id + 1) * 0x94D049BB133111EBull;
        return finalize(x);
    }

  private:
    static constexpr double inv_sqrt2 = 0.7071067811865475244;

    static std::uint64_t finalize(std::uint64_t z) noexcept {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace relaycap
