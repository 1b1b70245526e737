/*
   Copyright 2026 The unisde Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cstdint>

#include "unisde/normal.hpp"

namespace unisde {

/**
 * Philox4x32-10 counter-based block generator (Salmon et al., SC'11).
 *
 * A pure function of (counter, key): any block of any stream can be
 * computed directly, so streams never depend on how work is scheduled.
 */
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

namespace detail {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace detail

inline Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += detail::kWeyl0;
            key[1] += detail::kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        detail::mulhilo(detail::kMul0, ctr[0], hi0, lo0);
        detail::mulhilo(detail::kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// Stream namespaces; the same seed gives independent streams in each.
enum class StreamDomain : std::uint32_t {
    Simulation = 0,
    Reference = 1,
    TimeChange = 2,
};

/**
 * Per-path random stream keyed by (seed, path index, domain).
 *
 * Counter layout: (block lo, block hi, path index, domain). Each block yields
 * two 53-bit uniforms.
 */
class PathStream {
public:
    PathStream(std::uint64_t seed, std::uint32_t path, StreamDomain domain = StreamDomain::Simulation) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_(path),
          domain_(static_cast<std::uint32_t>(domain)) {}

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        if (buffered_ == 0) refill();
        std::uint64_t bits = buffer_[2 - buffered_];
        --buffered_;
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by inversion.
    double normal() noexcept { return inverse_normal_cdf(uniform()); }

    std::uint64_t blocks_used() const noexcept { return block_; }

private:
    void refill() noexcept {
        Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), path_,
                                domain_};
        auto out = Philox4x32::block(ctr, key_);
        buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        buffered_ = 2;
        ++block_;
    }

    Philox4x32::Key key_;
    std::uint32_t path_;
    std::uint32_t domain_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
};

} // namespace unisde
