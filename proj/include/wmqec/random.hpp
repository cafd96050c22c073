// Copyright 2026 The wmqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Counter-based random streams (Philox4x32-10).
 *
 * A stream is identified by (master seed, trajectory, cycle); draws within it
 * advance a counter. Any value is a pure function of those four integers, so
 * ensemble results do not depend on how trajectories are scheduled.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace wmqec {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4> &ctr, const std::array<std::uint32_t, 2> &key) {
    constexpr std::uint64_t kM0 = 0xD2511F53u;
    constexpr std::uint64_t kM1 = 0xCD9E8D57u;
    const std::uint64_t p0 = kM0 * ctr[0];
    const std::uint64_t p1 = kM1 * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
}

/// Philox4x32 with 10 rounds.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        philox_round(ctr, key);
    }
    return ctr;
}

} // namespace detail

/**
 * Random stream keyed on (seed, trajectory, cycle). Satisfies
 * UniformRandomBitGenerator with 64-bit output.
 */
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng() = default;
    CounterRng(std::uint64_t seed, std::uint64_t trajectory, std::uint32_t cycle = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          trajectory_(trajectory), cycle_(cycle) {}

    /// Fresh stream for another cycle of the same trajectory.
    CounterRng for_cycle(std::uint32_t cycle) const {
        CounterRng r = *this;
        r.cycle_ = cycle;
        r.draw_ = 0;
        r.have_word_ = false;
        return r;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (have_word_) {
            have_word_ = false;
            return spare_;
        }
        const auto out = block();
        spare_ = (std::uint64_t{out[3]} << 32) | out[2];
        have_word_ = true;
        return (std::uint64_t{out[1]} << 32) | out[0];
    }

    /// Uniform double in the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal variate (Box-Muller on one counter block).
    double normal() {
        const auto out = block();
        const double u1 =
            (static_cast<double>(((std::uint64_t{out[1]} << 32) | out[0]) >> 11) + 0.5) * 0x1.0p-53;
        const double u2 =
            (static_cast<double>(((std::uint64_t{out[3]} << 32) | out[2]) >> 11) + 0.5) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t draws() const { return draw_; }

  private:
    std::array<std::uint32_t, 4> block() {
        const std::array<std::uint32_t, 4> ctr{
            static_cast<std::uint32_t>(draw_), cycle_, static_cast<std::uint32_t>(trajectory_),
            static_cast<std::uint32_t>(trajectory_ >> 32)};
        ++draw_;
        return detail::philox4x32(ctr, key_);
    }

    std::array<std::uint32_t, 2> key_{0, 0};
    std::uint64_t trajectory_ = 0;
    std::uint32_t cycle_ = 0;
    std::uint64_t draw_ = 0;
    std::uint64_t spare_ = 0;
    bool have_word_ = false;
};

} // namespace wmqec
