#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ctxcent/error.hpp"

namespace ctxcent {

using Vec = std::vector<double>;

namespace vec {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double x : a)
        m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(),
                       [](double x) { return std::isfinite(x); });
}

inline double mean(std::span<const double> a) {
    double s = 0.0;
    for (double x : a)
        s += x;
    return s / static_cast<double>(a.size());
}

// Population convention: divide by n.
inline double population_std(std::span<const double> a) {
    const double m = mean(a);
    double s = 0.0;
    for (double x : a)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(a.size()));
}

inline Vec constant(std::size_t n, double value) {
    return Vec(n, value);
}

inline Vec ones(std::size_t n) {
    return Vec(n, 1.0);
}

// Index of the maximum entry, lowest index on ties.
inline std::size_t argmax(std::span<const double> a) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < a.size(); ++i)
        if (a[i] > a[best])
            best = i;
    return best;
}

// Sum of the geometric series r^0 + ... + r^T by direct accumulation, which
// stays exact at r == 1 where the closed form degenerates.
inline double geometric_series(double r, int num_terms_minus_one) {
    double sum = 0.0;
    double term = 1.0;
    for (int t = 0; t <= num_terms_minus_one; ++t) {
        sum += term;
        term *= r;
    }
    return sum;
}

} // namespace vec
} // namespace ctxcent
