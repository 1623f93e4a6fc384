#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "ctxcent/error.hpp"
#include "ctxcent/graph.hpp"
#include "ctxcent/rng.hpp"
#include "ctxcent/vec.hpp"

namespace ctxcent {

// Leading eigenpair of the adjacency matrix. u1 is unit length with
// nonnegative entries (Perron-Frobenius, clamped at roundoff scale).
struct SpectralInfo {
    double lambda1 = 0.0;
    Vec u1;
    int iterations = 0;
    double residual = 0.0;
};

// Power iteration on A + I from the deterministic start 1/sqrt(n). The shift
// keeps bipartite spectra (lambda_min = -lambda1) from oscillating and
// preserves eigenvectors; lambda1 is read off A via the Rayleigh quotient.
// If the residual stalls, the vector is restarted with a deterministic
// perturbation. Edgeless graphs return lambda1 = 0 with the uniform vector.
inline SpectralInfo leading_eigenpair(const Graph& g, double tol = 1e-10,
                                      int max_iter = 10000) {
    const std::size_t n = static_cast<std::size_t>(g.num_nodes());
    if (n < 1)
        throw ValidationError("leading_eigenpair: empty graph (n = 0)");
    if (!(tol > 0))
        throw ValidationError("leading_eigenpair: tol must be positive");

    const double uniform = 1.0 / std::sqrt(static_cast<double>(n));
    if (g.num_edges() == 0)
        return SpectralInfo{0.0, Vec(n, uniform), 0, 0.0};

    Vec x(n, uniform);
    Vec ax(n);
    double lambda = 0.0;
    double residual = 0.0;
    double best_residual = std::numeric_limits<double>::infinity();
    int since_improvement = 0;
    int iter = 0;
    bool converged = false;

    for (iter = 1; iter <= max_iter; ++iter) {
        g.matvec(x, std::span<double>(ax));
        lambda = vec::dot(x, ax);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = ax[i] - lambda * x[i];
            r2 += d * d;
        }
        residual = std::sqrt(r2);
        if (residual <= tol) {
            converged = true;
            break;
        }
        if (residual < 0.75 * best_residual) {
            best_residual = residual;
            since_improvement = 0;
        } else if (++since_improvement >= 1000) {
            // Stalled: nudge with a deterministic perturbation and continue.
            auto gen = rng::engine(rng::mix(static_cast<std::uint64_t>(iter)));
            for (std::size_t i = 0; i < n; ++i)
                x[i] += 1e-6 * (rng::uniform01(gen) - 0.5);
            since_improvement = 0;
        }
        // Shifted step: x <- (A + I) x, normalized.
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ax[i] += x[i];
            norm2 += ax[i] * ax[i];
        }
        const double norm = std::sqrt(norm2);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = ax[i] / norm;
    }
    if (!converged)
        throw ConvergenceError(
            "leading_eigenpair: no convergence in " + std::to_string(max_iter) +
                " iterations (residual " + std::to_string(residual) + ")",
            residual);

    // Sign convention: largest-magnitude entry positive.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(x[i]) > std::abs(x[peak]))
            peak = i;
    if (x[peak] < 0)
        for (double& v : x)
            v = -v;
    // Entries are nonnegative up to roundoff; clamp and renormalize.
    for (double& v : x)
        if (v < 0)
            v = 0.0;
    const double norm = vec::norm2(x);
    for (double& v : x)
        v /= norm;

    g.matvec(x, std::span<double>(ax));
    lambda = vec::dot(x, ax);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = ax[i] - lambda * x[i];
        r2 += d * d;
    }
    return SpectralInfo{lambda, std::move(x), iter, std::sqrt(r2)};
}

inline double spreadability(const SpectralInfo& spectral, double p) {
    if (p < 0 || p > 1)
        throw ValidationError("spreadability: p must lie in [0, 1]");
    return p * spectral.lambda1;
}

inline double spreadability(const Graph& g, double p) {
    return spreadability(leading_eigenpair(g), p);
}

} // namespace ctxcent
