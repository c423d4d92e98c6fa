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

// Reference implementations used only by tests. Each one takes a different
// route to the answer than the library (brute force, another integrator,
// exhaustive enumeration) so agreement is evidence rather than tautology.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

/// Kepler's equation by plain bisection on [M - e, M + e].
inline double kepler_bisection(double M, double e) {
    double lo = M - e, hi = M + e;
    for (int k = 0; k < 400; ++k) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (mid - e * std::sin(mid) - M < 0.0 ? lo : hi) = mid;
    }
    const double flo = std::abs(lo - e * std::sin(lo) - M);
    const double fhi = std::abs(hi - e * std::sin(hi) - M);
    return flo <= fhi ? lo : hi;
}

struct State {
    std::array<double, 3> r;
    std::array<double, 3> v;
};

/// Two-body motion by classical RK4 with a fixed step.
inline State rk4_two_body(State s, double mu, double h, double t_end) {
    auto accel = [mu](const std::array<double, 3> &r) {
        const double d = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
        const double k = -mu / (d * d * d);
        return std::array<double, 3>{k * r[0], k * r[1], k * r[2]};
    };
    auto axpy = [](const std::array<double, 3> &x, double a, const std::array<double, 3> &y) {
        return std::array<double, 3>{x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
    };
    const long long steps = std::llround(t_end / h);
    for (long long n = 0; n < steps; ++n) {
        const auto k1r = s.v;
        const auto k1v = accel(s.r);
        const auto k2r = axpy(s.v, 0.5 * h, k1v);
        const auto k2v = accel(axpy(s.r, 0.5 * h, k1r));
        const auto k3r = axpy(s.v, 0.5 * h, k2v);
        const auto k3v = accel(axpy(s.r, 0.5 * h, k2r));
        const auto k4r = axpy(s.v, h, k3v);
        const auto k4v = accel(axpy(s.r, h, k3r));
        for (int i = 0; i < 3; ++i) {
            s.r[i] += h / 6.0 * (k1r[i] + 2.0 * k2r[i] + 2.0 * k3r[i] + k4r[i]);
            s.v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
    }
    return s;
}

/// Value of a binary16 bit pattern, from the textbook definition.
inline double half_value(std::uint16_t bits) {
    const int sign = (bits >> 15) & 1;
    const int exp = (bits >> 10) & 0x1f;
    const int frac = bits & 0x3ff;
    double mag;
    if (exp == 0) {
        mag = std::ldexp(static_cast<double>(frac), -24);
    } else if (exp == 31) {
        mag = frac ? std::nan("") : INFINITY;
    } else {
        mag = std::ldexp(1.0 + frac / 1024.0, exp - 15);
    }
    return sign ? -mag : mag;
}

/// Nearest binary16 by exhaustive search over all finite non-negative
/// halves (ties to the even bit pattern); magnitudes above 65504 clamp.
class HalfTable {
public:
    HalfTable() {
        for (std::uint32_t b = 0; b <= 0x7bff; ++b) {
            values_.push_back(half_value(static_cast<std::uint16_t>(b)));
        }
    }

    std::uint16_t nearest(double x) const {
        const std::uint16_t sign = std::signbit(x) ? 0x8000 : 0;
        const double a = std::abs(x);
        if (a >= values_.back()) {
            return sign | 0x7bff;
        }
        auto it = std::lower_bound(values_.begin(), values_.end(), a);
        const auto hi = static_cast<std::uint16_t>(it - values_.begin());
        if (values_[hi] == a || hi == 0) {
            return sign | hi;
        }
        const auto lo = static_cast<std::uint16_t>(hi - 1);
        const double dlo = a - values_[lo];
        const double dhi = values_[hi] - a;
        std::uint16_t pick;
        if (dlo < dhi) {
            pick = lo;
        } else if (dhi < dlo) {
            pick = hi;
        } else {
            pick = (lo % 2 == 0) ? lo : hi;
        }
        return sign | pick;
    }

private:
    std::vector<double> values_;
};

/// Solves A x = b (n x n, row-major) by Gaussian elimination with partial
/// pivoting.
inline std::vector<double> gauss_solve(std::vector<double> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(A[r * n + c]) > std::abs(A[p * n + c])) {
                p = r;
            }
        }
        if (p != c) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(A[c * n + k], A[p * n + k]);
            }
            std::swap(b[c], b[p]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = A[r * n + c] / A[c * n + c];
            for (std::size_t k = c; k < n; ++k) {
                A[r * n + k] -= f * A[c * n + k];
            }
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            s -= A[i * n + k] * x[k];
        }
        x[i] = s / A[i * n + i];
    }
    return x;
}

/// Ridge solution (X^T X + n l2 I)^-1 X^T y for row-major X (n x d).
inline std::vector<double> normal_equations(const std::vector<double> &X, const std::vector<double> &y,
                                            std::size_t n, std::size_t d, double l2) {
    std::vector<double> A(d * d, 0.0), b(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < d; ++i) {
            b[i] += X[r * d + i] * y[r];
            for (std::size_t j = 0; j < d; ++j) {
                A[i * d + j] += X[r * d + i] * X[r * d + j];
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        A[i * d + i] += static_cast<double>(n) * l2;
    }
    return gauss_solve(std::move(A), std::move(b));
}

/// Kappa straight from the textbook definition in floating point.
inline double kappa_by_hand(const std::vector<std::vector<std::uint64_t>> &m) {
    const std::size_t k = m.size();
    double n = 0.0, diag = 0.0;
    std::vector<double> rows(k, 0.0), cols(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double c = static_cast<double>(m[i][j]);
            n += c;
            rows[i] += c;
            cols[j] += c;
            if (i == j) {
                diag += c;
            }
        }
    }
    double pe = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        pe += rows[i] * cols[i];
    }
    pe /= n * n;
    const double po = diag / n;
    return (po - pe) / (1.0 - pe);
}

struct Interval {
    double open;
    double close;
};

/// Maximal runs of `pred` sampled every `step` over [t0, t1]; each edge is
/// the first/last true sample.
inline std::vector<Interval> dense_scan(const std::function<bool(double)> &pred, double t0, double t1,
                                        double step) {
    std::vector<Interval> out;
    const long long n = static_cast<long long>(std::floor((t1 - t0) / step));
    bool in = false;
    double open = 0.0, last_true = 0.0;
    for (long long k = 0; k <= n; ++k) {
        const double t = t0 + static_cast<double>(k) * step;
        const bool v = pred(t);
        if (v && !in) {
            open = t;
            in = true;
        }
        if (!v && in) {
            out.push_back({open, last_true});
            in = false;
        }
        if (v) {
            last_true = t;
        }
    }
    if (in) {
        out.push_back({open, last_true});
    }
    return out;
}

} // namespace oracle
