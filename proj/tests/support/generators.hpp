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

// Small seeded generators for property tests. A failing case reports its
// seed and index so it can be replayed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : seed_(seed), eng_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(eng_() >> 11) * 0x1.0p-53);
    }
    std::uint64_t index(std::uint64_t n) { return eng_() % n; }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(index(static_cast<std::uint64_t>(hi - lo + 1)));
    }
    bool coin() { return (eng_() >> 63) != 0; }

    /// Finite doubles spread over many binades, both signs, plus edge values.
    double wide_double() {
        switch (index(8)) {
        case 0: return uniform(-1.0, 1.0);
        case 1: return uniform(-70000.0, 70000.0);
        case 2: return std::ldexp(uniform(1.0, 2.0), static_cast<int>(integer(-30, 17))) * (coin() ? 1 : -1);
        case 3: return std::ldexp(uniform(1.0, 2.0), static_cast<int>(integer(-26, -13))) * (coin() ? 1 : -1);
        case 4: {
            // Exact halfway points between adjacent halves.
            const int e = static_cast<int>(integer(-14, 15));
            const double ulp = std::ldexp(1.0, e - 10);
            return (std::ldexp(1.0, e) + (static_cast<double>(integer(0, 1023)) + 0.5) * ulp) * (coin() ? 1 : -1);
        }
        case 5: return uniform(65000.0, 66000.0) * (coin() ? 1 : -1);
        case 6: return std::ldexp(uniform(1.0, 2.0), static_cast<int>(integer(-60, 60)));
        default: return static_cast<double>(integer(-2048, 2048));
        }
    }

    std::vector<std::vector<std::uint64_t>> confusion(std::size_t k, std::uint64_t max_count) {
        std::vector<std::vector<std::uint64_t>> m(k, std::vector<std::uint64_t>(k));
        for (auto &row : m) {
            for (auto &c : row) {
                c = index(max_count + 1);
            }
        }
        m[0][0] += 1;
        m[k - 1][k - 2] += 1;
        return m;
    }

    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = i;
        }
        for (std::size_t i = n; i > 1; --i) {
            std::swap(p[i - 1], p[index(i)]);
        }
        return p;
    }

    /// Sorted cut points strictly inside (t0, t1).
    std::vector<double> partition(double t0, double t1, std::size_t cuts, bool on_grid) {
        std::vector<double> out;
        for (std::size_t k = 0; k < cuts; ++k) {
            double t = uniform(t0, t1);
            if (on_grid) {
                t = std::floor(t);
            }
            if (t > t0 && t < t1) {
                out.push_back(t);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

inline std::string where(const Gen &g, std::size_t i) {
    return "seed=" + std::to_string(g.seed()) + " case=" + std::to_string(i);
}

} // namespace gen
