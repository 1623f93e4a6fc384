#pragma once

#include <optional>
#include <string>
#include <utility>

#include "ctxcent/contribution.hpp"
#include "ctxcent/edge_probs.hpp"
#include "ctxcent/error.hpp"
#include "ctxcent/graph.hpp"
#include "ctxcent/spectral.hpp"
#include "ctxcent/vec.hpp"

namespace ctxcent {

enum class CentralityKind {
    degree,
    eigenvector,
    katz,
    diffusion,
    contextual,
    cc_approx,
    adjusted,
    recurrence,
};

inline const char* to_string(CentralityKind kind) {
    switch (kind) {
    case CentralityKind::degree: return "degree";
    case CentralityKind::eigenvector: return "eigenvector";
    case CentralityKind::katz: return "katz";
    case CentralityKind::diffusion: return "diffusion";
    case CentralityKind::contextual: return "contextual";
    case CentralityKind::cc_approx: return "cc_approx";
    case CentralityKind::adjusted: return "adjusted";
    case CentralityKind::recurrence: return "recurrence";
    }
    return "?";
}

// Parameters that produced a score vector, where applicable.
struct CentralityParams {
    std::optional<double> p;
    std::optional<int> T;
    std::optional<double> alpha;
    std::optional<bool> includes_t0;
    std::optional<CentralityKind> base_kind; // for adjusted variants
};

struct CentralityResult {
    CentralityKind kind;
    Vec scores;
    CentralityParams params;
};

namespace detail {

inline void check_finite_series(const Vec& v, const char* what) {
    if (!vec::all_finite(v))
        throw OverflowError(std::string(what) +
                            ": series left the finite double range");
}

} // namespace detail

// d / (n - 1).
inline CentralityResult degree_centrality(const Graph& g) {
    if (g.num_nodes() < 2)
        throw ValidationError(
            "degree_centrality: needs n >= 2 for the 1/(n-1) normalization");
    Vec scores(static_cast<std::size_t>(g.num_nodes()));
    const double denom = static_cast<double>(g.num_nodes() - 1);
    for (std::size_t i = 0; i < scores.size(); ++i)
        scores[i] = static_cast<double>(g.degrees()[i]) / denom;
    return {CentralityKind::degree, std::move(scores), {}};
}

// Leading eigenvector, unit length, nonnegative entries.
inline CentralityResult eigenvector_centrality(const Graph& g,
                                               const SpectralInfo& spectral) {
    if (g.num_edges() == 0)
        throw ValidationError("eigenvector_centrality: graph has no edges");
    return {CentralityKind::eigenvector, spectral.u1, {}};
}

inline CentralityResult eigenvector_centrality(const Graph& g) {
    return eigenvector_centrality(g, leading_eigenpair(g));
}

inline double default_katz_alpha(const SpectralInfo& spectral) {
    if (spectral.lambda1 <= 0)
        throw ValidationError("katz: default alpha undefined for lambda1 <= 0");
    return 0.9 / spectral.lambda1;
}

// sum_{t>=0} (alpha A)^t 1 via the fixed point c <- alpha A c + 1, stopped at
// sup-norm increment 1e-10.
inline CentralityResult katz_centrality(const Graph& g, double alpha,
                                        double lambda1) {
    if (alpha < 0)
        throw ValidationError("katz: alpha must be nonnegative");
    if (alpha * lambda1 >= 1.0)
        throw ValidationError("katz: alpha * lambda1 = " +
                              std::to_string(alpha * lambda1) +
                              " >= 1, series diverges");
    const std::size_t n = static_cast<std::size_t>(g.num_nodes());
    Vec c(n, 1.0);
    Vec next(n);
    // Contraction rate alpha*lambda1 < 1 bounds the iteration count.
    double delta = 0.0;
    bool converged = false;
    for (long iter = 0; iter < 1000000 && !converged; ++iter) {
        g.matvec(c, std::span<double>(next));
        for (std::size_t i = 0; i < n; ++i)
            next[i] = alpha * next[i] + 1.0;
        detail::check_finite_series(next, "katz");
        delta = vec::max_abs_diff(c, next);
        c.swap(next);
        converged = delta <= 1e-10;
    }
    if (!converged)
        throw ConvergenceError("katz: fixed point not reached", delta);
    CentralityParams params;
    params.alpha = alpha;
    return {CentralityKind::katz, std::move(c), params};
}

inline CentralityResult katz_centrality(const Graph& g, double alpha) {
    return katz_centrality(g, alpha, leading_eigenpair(g).lambda1);
}

inline CentralityResult katz_centrality(const Graph& g,
                                        const SpectralInfo& spectral) {
    return katz_centrality(g, default_katz_alpha(spectral), spectral.lambda1);
}

// sum_{t=t0}^{T} (p A)^t 1 with t0 = 0 or 1, by repeated sparse matvec.
inline CentralityResult diffusion_centrality(const Graph& g, double p, int T,
                                             bool includes_t0) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("diffusion_centrality: p must lie in [0, 1]");
    if (T < 1)
        throw ValidationError("diffusion_centrality: T must be >= 1");
    const std::size_t n = static_cast<std::size_t>(g.num_nodes());
    Vec walk(n, 1.0);
    Vec scores(n, includes_t0 ? 1.0 : 0.0);
    Vec next(n);
    for (int t = 1; t <= T; ++t) {
        g.matvec(walk, std::span<double>(next));
        for (std::size_t i = 0; i < n; ++i)
            walk[i] = p * next[i];
        detail::check_finite_series(walk, "diffusion_centrality");
        for (std::size_t i = 0; i < n; ++i)
            scores[i] += walk[i];
    }
    CentralityParams params;
    params.p = p;
    params.T = T;
    params.includes_t0 = includes_t0;
    return {CentralityKind::diffusion, std::move(scores), params};
}

// Contextual centrality: sum_{t=0}^{T} (P o A)^t y.
inline CentralityResult contextual_centrality(const Graph& g,
                                              const EdgeProbabilities& probs,
                                              int T,
                                              const ContributionVector& y) {
    if (T < 0)
        throw ValidationError("contextual_centrality: T must be >= 0");
    if (y.size() != static_cast<std::size_t>(g.num_nodes()))
        throw ValidationError(
            "contextual_centrality: contribution size does not match graph");
    const std::size_t n = y.size();
    Vec walk = y.values();
    Vec scores = y.values();
    Vec next(n);
    for (int t = 1; t <= T; ++t) {
        probs.matvec(g, walk, std::span<double>(next));
        walk.swap(next);
        detail::check_finite_series(walk, "contextual_centrality");
        for (std::size_t i = 0; i < n; ++i)
            scores[i] += walk[i];
    }
    detail::check_finite_series(scores, "contextual_centrality");
    CentralityParams params;
    if (probs.is_homogeneous())
        params.p = probs.p();
    params.T = T;
    return {CentralityKind::contextual, std::move(scores), params};
}

inline CentralityResult contextual_centrality(const Graph& g, double p, int T,
                                              const ContributionVector& y) {
    return contextual_centrality(g, EdgeProbabilities::homogeneous(p), T, y);
}

// CC_approx = (sum_{t=0}^{T} (p lambda1)^t) (u1' y) u1, the rank-one
// approximation that dominates for p lambda1 > 1 and large T.
inline CentralityResult cc_approx(const SpectralInfo& spectral, double p, int T,
                                  const ContributionVector& y) {
    if (T < 0)
        throw ValidationError("cc_approx: T must be >= 0");
    if (spectral.u1.size() != y.size())
        throw ValidationError("cc_approx: contribution size does not match");
    const double series = vec::geometric_series(p * spectral.lambda1, T);
    const double primary = vec::dot(spectral.u1, y.values());
    Vec scores(spectral.u1.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        scores[i] = series * primary * spectral.u1[i];
    detail::check_finite_series(scores, "cc_approx");
    CentralityParams params;
    params.p = p;
    params.T = T;
    return {CentralityKind::cc_approx, std::move(scores), params};
}

inline CentralityResult cc_approx(const Graph& g, double p, int T,
                                  const ContributionVector& y) {
    if (g.num_edges() == 0)
        throw ValidationError("cc_approx: graph has no edges");
    return cc_approx(leading_eigenpair(g), p, T, y);
}

// Mean/std split of CC(y): structural part ybar * DC(t0 = 0) plus contextual
// part sigma(y) * CC(z). The two sum to CC(y).
struct CcDecomposition {
    Vec structural;
    Vec contextual;
};

inline CcDecomposition decompose_cc(const Graph& g, double p, int T,
                                    const ContributionVector& y) {
    const std::size_t n = y.size();
    CcDecomposition parts;
    const Vec dc = diffusion_centrality(g, p, std::max(T, 1), true).scores;
    parts.structural.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        parts.structural[i] = y.mean() * (T == 0 ? 1.0 : dc[i]);
    parts.contextual.assign(n, 0.0);
    if (y.stddev() > 0) {
        const Vec ccz =
            contextual_centrality(g, p, T, ContributionVector(y.zscores()))
                .scores;
        for (std::size_t i = 0; i < n; ++i)
            parts.contextual[i] = y.stddev() * ccz[i];
    }
    return parts;
}

// base scores scaled by the primary contribution u1' y; a negative scalar
// reverses the ranking.
inline CentralityResult adjusted_centrality(const CentralityResult& base,
                                            const SpectralInfo& spectral,
                                            const ContributionVector& y) {
    switch (base.kind) {
    case CentralityKind::degree:
    case CentralityKind::eigenvector:
    case CentralityKind::katz:
    case CentralityKind::diffusion:
        break;
    default:
        throw ValidationError(
            "adjusted_centrality: base must be degree/eigenvector/katz/diffusion");
    }
    if (spectral.u1.size() != y.size() || base.scores.size() != y.size())
        throw ValidationError("adjusted_centrality: dimension mismatch");
    const double primary = vec::dot(spectral.u1, y.values());
    Vec scores(base.scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        scores[i] = base.scores[i] * primary;
    CentralityParams params = base.params;
    params.base_kind = base.kind;
    return {CentralityKind::adjusted, std::move(scores), params};
}

inline CentralityResult adjusted_centrality(const CentralityResult& base,
                                            const Graph& g,
                                            const ContributionVector& y) {
    return adjusted_centrality(base, leading_eigenpair(g), y);
}

// c_t = alpha A c_{t-1} + beta, the unified recurrence behind degree,
// eigenvector, Katz, diffusion, and contextual centrality.
inline Vec recurrence_centrality(const Graph& g, double alpha, const Vec& beta,
                                 const Vec& c0, int t) {
    const std::size_t n = static_cast<std::size_t>(g.num_nodes());
    if (beta.size() != n || c0.size() != n)
        throw ValidationError("recurrence_centrality: dimension mismatch");
    if (t < 0)
        throw ValidationError("recurrence_centrality: t must be >= 0");
    Vec c = c0;
    Vec next(n);
    for (int step = 0; step < t; ++step) {
        g.matvec(c, std::span<double>(next));
        for (std::size_t i = 0; i < n; ++i)
            c[i] = alpha * next[i] + beta[i];
        detail::check_finite_series(c, "recurrence_centrality");
    }
    return c;
}

// Nash equilibrium actions a = (I - beta A)^{-1} y of the linear-quadratic
// network game, via the fixed point a <- beta A a + y.
inline Vec equilibrium_actions(const Graph& g, double beta,
                               const ContributionVector& y, double lambda1) {
    if (beta < 0)
        throw ValidationError("equilibrium_actions: beta must be nonnegative");
    if (beta * lambda1 >= 1.0)
        throw ValidationError("equilibrium_actions: beta * lambda1 = " +
                              std::to_string(beta * lambda1) +
                              " >= 1, system has no contracting fixed point");
    if (y.size() != static_cast<std::size_t>(g.num_nodes()))
        throw ValidationError("equilibrium_actions: dimension mismatch");
    const std::size_t n = y.size();
    Vec a = y.values();
    Vec next(n);
    double delta = 0.0;
    bool converged = false;
    for (long iter = 0; iter < 1000000 && !converged; ++iter) {
        g.matvec(a, std::span<double>(next));
        for (std::size_t i = 0; i < n; ++i)
            next[i] = beta * next[i] + y.values()[i];
        detail::check_finite_series(next, "equilibrium_actions");
        delta = vec::max_abs_diff(a, next);
        a.swap(next);
        converged = delta <= 1e-10;
    }
    if (!converged)
        throw ConvergenceError("equilibrium_actions: fixed point not reached",
                               delta);
    return a;
}

inline Vec equilibrium_actions(const Graph& g, double beta,
                               const ContributionVector& y) {
    return equilibrium_actions(g, beta, y, leading_eigenpair(g).lambda1);
}

} // namespace ctxcent
