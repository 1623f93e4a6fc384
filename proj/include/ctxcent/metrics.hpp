#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "ctxcent/centrality.hpp"
#include "ctxcent/contribution.hpp"
#include "ctxcent/error.hpp"
#include "ctxcent/graph.hpp"
#include "ctxcent/rng.hpp"
#include "ctxcent/spectral.hpp"
#include "ctxcent/vec.hpp"

namespace ctxcent {

// (a - b) / max(|a|, |b|), the comparison scale of the sweep plots: bounded
// in [-2, 2], and |value| > 1 exactly when a and b have opposite signs.
// relative_change(0, 0) is defined as 0.
inline double relative_change(double a, double b) {
    const double denom = std::max(std::abs(a), std::abs(b));
    if (denom == 0.0)
        return 0.0;
    return (a - b) / denom;
}

// sum_{i,j} A_ij (y_i - y_j)^2 over ordered pairs (each edge twice).
inline double homophily_strength(const Graph& g, const ContributionVector& y) {
    if (y.size() != static_cast<std::size_t>(g.num_nodes()))
        throw ValidationError("homophily_strength: dimension mismatch");
    double total = 0.0;
    for (const auto& [u, v] : g.edges()) {
        const double d = y.values()[static_cast<std::size_t>(u)] -
                         y.values()[static_cast<std::size_t>(v)];
        total += 2.0 * d * d;
    }
    return total;
}

inline double standardized_avg_contribution(const ContributionVector& y) {
    if (!(y.stddev() > 0))
        throw ValidationError(
            "standardized_avg_contribution: degenerate vector (std = 0)");
    return y.mean() / y.stddev();
}

inline double primary_contribution(std::span<const double> u1,
                                   const ContributionVector& y) {
    if (u1.size() != y.size())
        throw ValidationError("primary_contribution: dimension mismatch");
    return vec::dot(u1, y.values());
}

// Norm bound on contextual centrality:
//   max(CC) <= ||CC||_2 <= (sum_{t=0}^{T} (p lambda1)^t) ||y||_2,
// with the additional ||y|| / (1 - p lambda1) cap when p lambda1 < 1.
struct BoundReport {
    double max_cc = 0.0;
    double norm_cc = 0.0;
    double series_bound = 0.0;
    std::optional<double> infinite_bound;
    bool satisfied = false;
};

inline BoundReport check_cc_bound(const Graph& g, const SpectralInfo& spectral,
                                  double p, int T,
                                  const ContributionVector& y) {
    const Vec cc = contextual_centrality(g, p, T, y).scores;
    BoundReport report;
    report.max_cc = *std::max_element(cc.begin(), cc.end());
    report.norm_cc = vec::norm2(cc);
    const double r = p * spectral.lambda1;
    const double norm_y = vec::norm2(y.values());
    report.series_bound = vec::geometric_series(r, T) * norm_y;
    if (r < 1.0)
        report.infinite_bound = norm_y / (1.0 - r);
    report.satisfied = report.max_cc <= report.norm_cc + 1e-9 &&
                       report.norm_cc <= report.series_bound * (1.0 + 1e-9);
    return report;
}

inline BoundReport check_cc_bound(const Graph& g, double p, int T,
                                  const ContributionVector& y) {
    return check_cc_bound(g, leading_eigenpair(g), p, T, y);
}

// ||CC(y + dy) - CC(y)||_2 <= (sum_{t=0}^{T} (p lambda1)^t) ||dy||_2.
inline double perturbation_bound(const SpectralInfo& spectral, double p, int T,
                                 std::span<const double> delta_y) {
    return vec::geometric_series(p * spectral.lambda1, T) *
           vec::norm2(delta_y);
}

inline double perturbation_bound(const Graph& g, double p, int T,
                                 std::span<const double> delta_y) {
    return perturbation_bound(leading_eigenpair(g), p, T, delta_y);
}

// Per-node std of CC under y ~ iid noise with std sigma: sigma * ||B e_i||_2
// where B = sum_{t=0}^{T} (pA)^t, one column per node via the recurrence.
inline Vec cc_noise_std(const Graph& g, double p, int T, double sigma) {
    if (g.num_nodes() > 2000)
        throw ValidationError(
            "cc_noise_std: n > 2000 (B is materialized column by column)");
    if (sigma < 0)
        throw ValidationError("cc_noise_std: sigma must be nonnegative");
    if (T < 0)
        throw ValidationError("cc_noise_std: T must be >= 0");
    const std::size_t n = static_cast<std::size_t>(g.num_nodes());
    Vec out(n);
    Vec walk(n), acc(n), next(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(walk.begin(), walk.end(), 0.0);
        walk[i] = 1.0;
        acc = walk;
        for (int t = 1; t <= T; ++t) {
            g.matvec(walk, std::span<double>(next));
            for (std::size_t j = 0; j < n; ++j) {
                walk[j] = p * next[j];
                acc[j] += walk[j];
            }
        }
        if (!vec::all_finite(acc))
            throw OverflowError("cc_noise_std: series overflow");
        out[i] = sigma * vec::norm2(acc);
    }
    return out;
}

enum class CorrelationKind { pearson, spearman };

namespace detail {

// Average ranks in [1, n]; ties receive the mean of their rank range.
inline Vec average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    Vec ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]])
            ++j;
        const double mean_rank =
            (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const double mx = vec::mean(x);
    const double my = vec::mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw ValidationError(
            "correlation: undefined for a zero-variance vector");
    return sxy / std::sqrt(sxx * syy);
}

} // namespace detail

inline double correlation(std::span<const double> x, std::span<const double> y,
                          CorrelationKind kind) {
    if (x.size() != y.size())
        throw ValidationError("correlation: length mismatch");
    if (x.size() < 3)
        throw ValidationError("correlation: needs at least 3 observations");
    if (kind == CorrelationKind::pearson)
        return detail::pearson(x, y);
    const Vec rx = detail::average_ranks(x);
    const Vec ry = detail::average_ranks(y);
    return detail::pearson(rx, ry);
}

// Row-major dense matrix for the regression interface.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct RegressionResult {
    Vec coefficients;
    Vec std_errors;
    double r_squared = 0.0;
    double r2_ci_low = 0.0;
    double r2_ci_high = 0.0;
};

namespace detail {

// Cholesky factorization of a symmetric positive-definite matrix, in place.
// Failure signals rank deficiency of the regressor matrix.
inline void cholesky(Matrix& a) {
    const std::size_t k = a.rows;
    double scale = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        scale = std::max(scale, std::abs(a.at(i, i)));
    for (std::size_t j = 0; j < k; ++j) {
        double d = a.at(j, j);
        for (std::size_t t = 0; t < j; ++t)
            d -= a.at(j, t) * a.at(j, t);
        if (!(d > scale * 1e-12))
            throw ValidationError("ols_fit: regressor matrix is rank deficient");
        const double l = std::sqrt(d);
        a.at(j, j) = l;
        for (std::size_t i = j + 1; i < k; ++i) {
            double s = a.at(i, j);
            for (std::size_t t = 0; t < j; ++t)
                s -= a.at(i, t) * a.at(j, t);
            a.at(i, j) = s / l;
        }
    }
}

// Solves L L' x = b given the Cholesky factor in the lower triangle.
inline Vec cholesky_solve(const Matrix& l, Vec b) {
    const std::size_t k = l.rows;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t t = 0; t < i; ++t)
            b[i] -= l.at(i, t) * b[t];
        b[i] /= l.at(i, i);
    }
    for (std::size_t ii = k; ii-- > 0;) {
        for (std::size_t t = ii + 1; t < k; ++t)
            b[ii] -= l.at(t, ii) * b[t];
        b[ii] /= l.at(ii, ii);
    }
    return b;
}

struct OlsCore {
    Vec coefficients;
    double ssr = 0.0;
    double sst = 0.0;
    Matrix cholesky_factor;
};

inline OlsCore ols_core(const Matrix& x, std::span<const double> y_dep) {
    if (x.rows != y_dep.size())
        throw ValidationError("ols_fit: row count mismatch");
    if (x.rows <= x.cols)
        throw ValidationError("ols_fit: needs more rows than regressors");
    const std::size_t k = x.cols;
    Matrix gram(k, k);
    Vec xty(k, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r) {
        for (std::size_t i = 0; i < k; ++i) {
            const double xi = x.at(r, i);
            xty[i] += xi * y_dep[r];
            for (std::size_t j = 0; j <= i; ++j)
                gram.at(i, j) += xi * x.at(r, j);
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            gram.at(i, j) = gram.at(j, i);

    OlsCore core;
    core.cholesky_factor = gram;
    cholesky(core.cholesky_factor);
    core.coefficients = cholesky_solve(core.cholesky_factor, xty);

    const double my = vec::mean(y_dep);
    for (std::size_t r = 0; r < x.rows; ++r) {
        double fit = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            fit += x.at(r, i) * core.coefficients[i];
        const double resid = y_dep[r] - fit;
        core.ssr += resid * resid;
        core.sst += (y_dep[r] - my) * (y_dep[r] - my);
    }
    return core;
}

inline double r_squared_of(const OlsCore& core) {
    // Zero explained variance (constant dependent) reports 0 by convention.
    if (core.sst <= 0.0)
        return 0.0;
    return std::clamp(1.0 - core.ssr / core.sst, 0.0, 1.0);
}

inline double percentile(const Vec& sorted, double q) {
    if (sorted.empty())
        return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace detail

// Least squares with classical standard errors and a seeded percentile
// bootstrap CI for R^2 (row resampling). The caller supplies the intercept
// column. Resamples that come out rank deficient are skipped.
inline RegressionResult ols_fit(const Matrix& x, const Vec& y_dep,
                                int bootstrap_runs, std::uint64_t rng_seed) {
    auto core = detail::ols_core(x, y_dep);
    RegressionResult result;
    result.coefficients = core.coefficients;
    result.r_squared = detail::r_squared_of(core);

    const double dof = static_cast<double>(x.rows - x.cols);
    const double s2 = core.ssr / dof;
    result.std_errors.resize(x.cols);
    for (std::size_t i = 0; i < x.cols; ++i) {
        Vec e(x.cols, 0.0);
        e[i] = 1.0;
        const Vec col = detail::cholesky_solve(core.cholesky_factor, e);
        result.std_errors[i] = std::sqrt(std::max(0.0, s2 * col[i]));
    }

    Vec r2_samples;
    r2_samples.reserve(static_cast<std::size_t>(std::max(bootstrap_runs, 0)));
    for (int b = 0; b < bootstrap_runs; ++b) {
        auto gen = rng::engine(rng::derive(rng_seed, {static_cast<std::uint64_t>(b)}));
        Matrix xb(x.rows, x.cols);
        Vec yb(x.rows);
        for (std::size_t r = 0; r < x.rows; ++r) {
            const std::size_t pick =
                static_cast<std::size_t>(rng::below(gen, x.rows));
            for (std::size_t c = 0; c < x.cols; ++c)
                xb.at(r, c) = x.at(pick, c);
            yb[r] = y_dep[pick];
        }
        try {
            r2_samples.push_back(detail::r_squared_of(detail::ols_core(xb, yb)));
        } catch (const ValidationError&) {
            // Degenerate resample; drop it.
        }
    }
    if (r2_samples.empty()) {
        result.r2_ci_low = result.r2_ci_high = result.r_squared;
    } else {
        std::sort(r2_samples.begin(), r2_samples.end());
        result.r2_ci_low = detail::percentile(r2_samples, 0.025);
        result.r2_ci_high = detail::percentile(r2_samples, 0.975);
    }
    return result;
}

} // namespace ctxcent
