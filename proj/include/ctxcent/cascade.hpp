#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ctxcent/centrality.hpp"
#include "ctxcent/contribution.hpp"
#include "ctxcent/edge_probs.hpp"
#include "ctxcent/error.hpp"
#include "ctxcent/graph.hpp"
#include "ctxcent/parallel.hpp"
#include "ctxcent/rng.hpp"

namespace ctxcent {

struct CascadeOutcome {
    NodeId seed = 0;
    std::vector<NodeId> activated; // sorted, always contains seed
    double payoff = 0.0;           // sum of y over activated
    std::uint64_t rng_seed = 0;
};

// One independent-cascade run. Each newly activated node u gets a single
// chance per currently inactive neighbor v, succeeding with probability
// P_uv. Frontier nodes and their neighbors are visited in ascending index
// order so a (graph, seed node, rng_seed) triple reproduces bit-for-bit.
// Without y the payoff is the activated count (y = 1).
inline CascadeOutcome simulate_ic(const Graph& g, NodeId seed,
                                  const EdgeProbabilities& probs,
                                  std::uint64_t rng_seed,
                                  std::span<const double> y = {}) {
    if (seed < 0 || seed >= g.num_nodes())
        throw ValidationError("simulate_ic: seed node out of range");
    if (!y.empty() && y.size() != static_cast<std::size_t>(g.num_nodes()))
        throw ValidationError("simulate_ic: contribution size mismatch");

    rng::SplitMix64 gen(rng_seed);
    std::vector<char> active(static_cast<std::size_t>(g.num_nodes()), 0);
    active[static_cast<std::size_t>(seed)] = 1;
    std::vector<NodeId> frontier{seed};
    std::vector<NodeId> next;
    std::vector<NodeId> activated{seed};
    while (!frontier.empty()) {
        next.clear();
        for (NodeId u : frontier) {
            std::size_t k = g.arc_begin(u);
            for (NodeId v : g.neighbors(u)) {
                const double p_uv = probs.arc(k++);
                if (active[static_cast<std::size_t>(v)])
                    continue;
                if (gen.uniform01() < p_uv) {
                    active[static_cast<std::size_t>(v)] = 1;
                    next.push_back(v);
                }
            }
        }
        std::sort(next.begin(), next.end());
        activated.insert(activated.end(), next.begin(), next.end());
        frontier.swap(next);
    }
    std::sort(activated.begin(), activated.end());

    CascadeOutcome out;
    out.seed = seed;
    out.rng_seed = rng_seed;
    out.activated = std::move(activated);
    if (y.empty()) {
        out.payoff = static_cast<double>(out.activated.size());
    } else {
        for (NodeId v : out.activated)
            out.payoff += y[static_cast<std::size_t>(v)];
    }
    return out;
}

struct PayoffEstimate {
    double mean = 0.0;
    double std_error = 0.0; // sample std / sqrt(runs)
    long long runs = 0;
};

// Monte Carlo cascade payoff. Run r uses the seed derived from
// (master_seed, r), so estimates are independent of the job count.
inline PayoffEstimate estimate_payoff(const Graph& g, NodeId seed,
                                      const EdgeProbabilities& probs,
                                      const ContributionVector& y,
                                      long long runs,
                                      std::uint64_t master_seed,
                                      unsigned jobs = 1) {
    if (runs < 1)
        throw ValidationError("estimate_payoff: runs must be >= 1");
    const std::size_t chunk = 1024;
    const std::size_t count = static_cast<std::size_t>(runs);
    std::vector<RunningStats> partials((count + chunk - 1) / chunk);
    parallel_chunks(count, chunk, jobs,
                    [&](std::size_t c, std::size_t begin, std::size_t end) {
                        RunningStats stats;
                        for (std::size_t r = begin; r < end; ++r) {
                            const std::uint64_t s = rng::derive(
                                master_seed, {static_cast<std::uint64_t>(r)});
                            stats.add(
                                simulate_ic(g, seed, probs, s, y.values())
                                    .payoff);
                        }
                        partials[c] = stats;
                    });
    RunningStats total;
    for (const auto& part : partials)
        total.merge(part);
    return {total.mean, total.std_error(), total.count};
}

// Exact expected cascade payoff by bond-percolation enumeration: IC with
// homogeneous p activates exactly the nodes reachable from the seed when
// each edge is kept independently with probability p. Enumerates all
// 2^|E| edge subsets, so |E| <= 24.
inline double exact_payoff(const Graph& g, NodeId seed, double p,
                           const ContributionVector& y) {
    if (seed < 0 || seed >= g.num_nodes())
        throw ValidationError("exact_payoff: seed node out of range");
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("exact_payoff: p must lie in [0, 1]");
    if (y.size() != static_cast<std::size_t>(g.num_nodes()))
        throw ValidationError("exact_payoff: contribution size mismatch");
    const std::size_t m = g.num_edges();
    if (m > 24)
        throw ValidationError(
            "exact_payoff: graph too large for enumeration (|E| > 24)");

    std::vector<double> pow_p(m + 1, 1.0), pow_q(m + 1, 1.0);
    for (std::size_t k = 1; k <= m; ++k) {
        pow_p[k] = pow_p[k - 1] * p;
        pow_q[k] = pow_q[k - 1] * (1.0 - p);
    }

    // Incident (edge bit, other endpoint) lists so each reachability walk
    // touches only the popped node's own edges.
    const std::size_t n = static_cast<std::size_t>(g.num_nodes());
    std::vector<std::vector<std::pair<std::uint32_t, NodeId>>> incident(n);
    for (std::size_t e = 0; e < m; ++e) {
        const auto& [a, b] = g.edges()[e];
        incident[static_cast<std::size_t>(a)].emplace_back(1u << e, b);
        incident[static_cast<std::size_t>(b)].emplace_back(1u << e, a);
    }

    std::vector<NodeId> stack;
    std::vector<char> reached(n);
    double total = 0.0;
    for (std::uint32_t subset = 0; subset < (1u << m); ++subset) {
        std::fill(reached.begin(), reached.end(), 0);
        reached[static_cast<std::size_t>(seed)] = 1;
        stack.assign(1, seed);
        double payoff = y.values()[static_cast<std::size_t>(seed)];
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (const auto& [bit, other] : incident[static_cast<std::size_t>(u)]) {
                if ((subset & bit) && !reached[static_cast<std::size_t>(other)]) {
                    reached[static_cast<std::size_t>(other)] = 1;
                    payoff += y.values()[static_cast<std::size_t>(other)];
                    stack.push_back(other);
                }
            }
        }
        const std::size_t bits =
            static_cast<std::size_t>(std::popcount(subset));
        total += pow_p[bits] * pow_q[m - bits] * payoff;
    }
    return total;
}

enum class SeedPolicy {
    seed_always,
    seed_nonnegative, // abstain when the best score is negative
};

inline std::optional<NodeId> select_seed(std::span<const double> scores,
                                         SeedPolicy policy) {
    if (scores.empty())
        throw ValidationError("select_seed: empty score vector");
    const std::size_t best = vec::argmax(scores);
    if (policy == SeedPolicy::seed_nonnegative && scores[best] < 0)
        return std::nullopt;
    return static_cast<NodeId>(best);
}

inline std::optional<NodeId> select_seed(const CentralityResult& scores,
                                         SeedPolicy policy) {
    return select_seed(std::span<const double>(scores.scores), policy);
}

} // namespace ctxcent
