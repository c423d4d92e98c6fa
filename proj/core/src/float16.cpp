// Copyright 2026 The constlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "constlab/float16.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace constlab::fp16 {

namespace {

// Shifts `m` right by `s` with round-to-nearest, ties to even.
std::uint64_t shift_round_even(std::uint64_t m, int s) noexcept {
    if (s <= 0) {
        return m;
    }
    if (s >= 64) {
        return 0;
    }
    const std::uint64_t q = m >> s;
    const std::uint64_t rem = m & ((std::uint64_t{1} << s) - 1);
    const std::uint64_t half = std::uint64_t{1} << (s - 1);
    if (rem > half || (rem == half && (q & 1u))) {
        return q + 1;
    }
    return q;
}

} // namespace

Encoded encode(double value) noexcept {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    const auto sign = static_cast<std::uint16_t>((bits >> 48) & 0x8000u);
    const int exp = static_cast<int>((bits >> 52) & 0x7ffu);
    const std::uint64_t frac = bits & ((std::uint64_t{1} << 52) - 1);

    if (exp == 0x7ff) {
        // Not reachable for validated payloads; keep NaN/inf semantics.
        return {static_cast<std::uint16_t>(sign | (frac ? 0x7e00u : 0x7c00u)), false};
    }
    if (std::abs(value) > kMaxFinite) {
        return {static_cast<std::uint16_t>(sign | kMaxFiniteBits), true};
    }
    if (exp == 0) {
        return {sign, false}; // double subnormals are far below half precision
    }

    const std::uint64_t m = frac | (std::uint64_t{1} << 52);
    const int e = exp - 1023;
    if (e >= -14) {
        // Normal half: keep 10 fraction bits of the 53-bit significand.
        std::uint64_t mant = shift_round_even(m, 42);
        int he = e + 15;
        if (mant == (std::uint64_t{1} << 11)) {
            mant >>= 1;
            ++he;
        }
        // he <= 30 since |value| <= 65504.
        return {static_cast<std::uint16_t>(sign | (he << 10) | (mant & 0x3ffu)), false};
    }
    // Subnormal half: value / 2^-24 rounded to an integer in [0, 1024];
    // 1024 lands exactly on the smallest normal encoding.
    const int shift = 1051 - exp;
    const auto q = shift_round_even(m, shift);
    return {static_cast<std::uint16_t>(sign | q), false};
}

double decode(std::uint16_t h) noexcept {
    const bool negative = (h & 0x8000u) != 0;
    const int e = (h >> 10) & 0x1f;
    const int f = h & 0x3ff;
    double v;
    if (e == 0) {
        v = std::ldexp(static_cast<double>(f), -24);
    } else if (e == 31) {
        v = f ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
    } else {
        v = std::ldexp(static_cast<double>(f | 0x400), e - 25);
    }
    return negative ? -v : v;
}

} // namespace constlab::fp16
