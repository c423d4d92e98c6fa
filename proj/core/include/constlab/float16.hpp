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

#pragma once

#include <cstdint>

namespace constlab::fp16 {

inline constexpr double kMaxFinite = 65504.0;
inline constexpr std::uint16_t kMaxFiniteBits = 0x7bff;

struct Encoded {
    std::uint16_t bits = 0;
    bool saturated = false; ///< input magnitude exceeded kMaxFinite and was clamped
};

/// IEEE 754 binary16 encoding of a finite double with round-to-nearest-even,
/// computed directly from the double's bits (no intermediate float).
/// Magnitudes above 65504 clamp to the largest finite half.
Encoded encode(double value) noexcept;

/// Exact binary16 -> double decode, including subnormals, inf and NaN.
double decode(std::uint16_t bits) noexcept;

/// decode(encode(value).bits).
inline double round_trip(double value) noexcept { return decode(encode(value).bits); }

} // namespace constlab::fp16
