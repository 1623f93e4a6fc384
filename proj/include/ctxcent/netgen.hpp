#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "ctxcent/contribution.hpp"
#include "ctxcent/error.hpp"
#include "ctxcent/graph.hpp"
#include "ctxcent/rng.hpp"
#include "ctxcent/vec.hpp"

namespace ctxcent {

struct BarabasiAlbert {
    NodeId n = 0;
    NodeId m = 1; // edges per new node, 1 <= m < n
};

struct ErdosRenyi {
    NodeId n = 0;
    double q = 0.0; // independent edge probability
};

struct WattsStrogatz {
    NodeId n = 0;
    NodeId k = 2; // even ring-lattice degree, 2 <= k < n
    double rewire_p = 0.0;
};

// Two Watts-Strogatz layers (home and work partitions over the same node
// set) superimposed; per-group k = min(k_max, group size - 1) rounded down
// to even. Groups too small to support a ring contribute no edges.
struct OverlayWs {
    std::vector<int> home_group; // per-node group id
    std::vector<int> work_group; // per-node group id; empty = no work layer
    NodeId k_max = 10;
    double rewire_p = 0.0;
};

using GraphModel =
    std::variant<BarabasiAlbert, ErdosRenyi, WattsStrogatz, OverlayWs>;

struct GenSpec {
    GraphModel model;
    std::uint64_t rng_seed = 0;
};

namespace detail {

inline std::uint64_t edge_key(NodeId u, NodeId v, NodeId n) {
    if (u > v)
        std::swap(u, v);
    return static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) +
           static_cast<std::uint64_t>(v);
}

// Ring lattice over `nodes` (k/2 neighbors per side in list order), then
// each lattice edge is rewired with probability rewire_p to a uniformly
// chosen endpoint in the same node list, avoiding self-loops and duplicates.
inline void ws_edges_into(std::unordered_set<std::uint64_t>& edges,
                          std::vector<int>& degree,
                          const std::vector<NodeId>& nodes, NodeId total_n,
                          NodeId k, double rewire_p, std::mt19937_64& gen) {
    const std::size_t s = nodes.size();
    if (k < 2 || s < 3)
        return;
    auto add = [&](NodeId a, NodeId b) {
        if (edges.insert(edge_key(a, b, total_n)).second) {
            ++degree[static_cast<std::size_t>(a)];
            ++degree[static_cast<std::size_t>(b)];
        }
    };
    auto contains = [&](NodeId a, NodeId b) {
        return edges.count(edge_key(a, b, total_n)) != 0;
    };
    auto remove = [&](NodeId a, NodeId b) {
        if (edges.erase(edge_key(a, b, total_n)) > 0) {
            --degree[static_cast<std::size_t>(a)];
            --degree[static_cast<std::size_t>(b)];
        }
    };
    for (NodeId j = 1; j <= k / 2; ++j)
        for (std::size_t i = 0; i < s; ++i)
            add(nodes[i], nodes[(i + static_cast<std::size_t>(j)) % s]);
    if (rewire_p <= 0)
        return;
    for (NodeId j = 1; j <= k / 2; ++j) {
        for (std::size_t i = 0; i < s; ++i) {
            if (rng::uniform01(gen) >= rewire_p)
                continue;
            const NodeId u = nodes[i];
            const NodeId old_v = nodes[(i + static_cast<std::size_t>(j)) % s];
            if (degree[static_cast<std::size_t>(u)] >=
                static_cast<int>(s) - 1)
                continue; // u already adjacent to the whole group
            if (!contains(u, old_v))
                continue; // lattice edge already rewired away
            NodeId w;
            do {
                w = nodes[rng::below(gen, s)];
            } while (w == u || contains(u, w));
            remove(u, old_v);
            add(u, w);
        }
    }
}

inline std::vector<Edge> collect_edges(
    const std::unordered_set<std::uint64_t>& keys, NodeId n) {
    std::vector<Edge> edges;
    edges.reserve(keys.size());
    for (std::uint64_t key : keys)
        edges.emplace_back(static_cast<NodeId>(key / static_cast<std::uint64_t>(n)),
                           static_cast<NodeId>(key % static_cast<std::uint64_t>(n)));
    return edges;
}

inline std::vector<std::vector<NodeId>> group_members(
    const std::vector<int>& assignment) {
    int max_group = -1;
    for (int gid : assignment) {
        if (gid < 0)
            throw ValidationError("overlay: negative group id");
        max_group = std::max(max_group, gid);
    }
    std::vector<std::vector<NodeId>> members(
        static_cast<std::size_t>(max_group) + 1);
    for (std::size_t i = 0; i < assignment.size(); ++i)
        members[static_cast<std::size_t>(assignment[i])].push_back(
            static_cast<NodeId>(i));
    return members;
}

inline NodeId overlay_group_k(std::size_t group_size, NodeId k_max) {
    const NodeId cap = std::min<NodeId>(
        k_max, static_cast<NodeId>(group_size) - 1);
    return cap - (cap % 2 == 0 ? 0 : 1);
}

} // namespace detail

inline void validate(const GenSpec& spec) {
    std::visit(
        [](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, BarabasiAlbert>) {
                if (m.n < 2 || m.m < 1 || m.m >= m.n)
                    throw ValidationError(
                        "barabasi_albert: requires n >= 2 and 1 <= m < n");
            } else if constexpr (std::is_same_v<M, ErdosRenyi>) {
                if (m.n < 2 || !(m.q >= 0.0 && m.q <= 1.0))
                    throw ValidationError(
                        "erdos_renyi: requires n >= 2 and q in [0, 1]");
            } else if constexpr (std::is_same_v<M, WattsStrogatz>) {
                if (m.n < 2 || m.k % 2 != 0 || m.k < 2 || m.k >= m.n ||
                    !(m.rewire_p >= 0.0 && m.rewire_p <= 1.0))
                    throw ValidationError(
                        "watts_strogatz: requires even k, 2 <= k < n, "
                        "rewire_p in [0, 1]");
            } else if constexpr (std::is_same_v<M, OverlayWs>) {
                if (m.home_group.size() < 2)
                    throw ValidationError("overlay_ws: requires n >= 2");
                if (!m.work_group.empty() &&
                    m.work_group.size() != m.home_group.size())
                    throw ValidationError(
                        "overlay_ws: work partition size differs from home");
                if (m.k_max < 0 ||
                    !(m.rewire_p >= 0.0 && m.rewire_p <= 1.0))
                    throw ValidationError(
                        "overlay_ws: requires k_max >= 0, rewire_p in [0, 1]");
            }
        },
        spec.model);
}

inline Graph generate(const GenSpec& spec) {
    validate(spec);
    auto gen = rng::engine(spec.rng_seed);
    return std::visit(
        [&](const auto& m) -> Graph {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, BarabasiAlbert>) {
                std::vector<Edge> edges;
                std::vector<NodeId> endpoint_pool; // degree-proportional urn
                for (NodeId i = 0; i < m.m; ++i)
                    for (NodeId j = i + 1; j < m.m; ++j) {
                        edges.emplace_back(i, j);
                        endpoint_pool.push_back(i);
                        endpoint_pool.push_back(j);
                    }
                std::set<NodeId> targets;
                for (NodeId t = m.m; t < m.n; ++t) {
                    targets.clear();
                    while (static_cast<NodeId>(targets.size()) < m.m) {
                        NodeId candidate;
                        if (endpoint_pool.empty())
                            candidate = static_cast<NodeId>(
                                rng::below(gen, static_cast<std::uint64_t>(t)));
                        else
                            candidate = endpoint_pool[rng::below(
                                gen, endpoint_pool.size())];
                        targets.insert(candidate); // reject repeats
                    }
                    for (NodeId v : targets) {
                        edges.emplace_back(v, t);
                        endpoint_pool.push_back(v);
                        endpoint_pool.push_back(t);
                    }
                }
                return Graph::from_edges(m.n, std::move(edges));
            } else if constexpr (std::is_same_v<M, ErdosRenyi>) {
                std::vector<Edge> edges;
                if (m.q >= 1.0) {
                    for (NodeId i = 0; i < m.n; ++i)
                        for (NodeId j = i + 1; j < m.n; ++j)
                            edges.emplace_back(i, j);
                } else if (m.q > 0.0) {
                    // Geometric skip sampling (Batagelj-Brandes).
                    const double log1q = std::log1p(-m.q);
                    std::int64_t v = 1, w = -1;
                    while (v < m.n) {
                        const double r = 1.0 - rng::uniform01(gen); // (0, 1]
                        w += 1 + static_cast<std::int64_t>(
                                     std::floor(std::log(r) / log1q));
                        while (w >= v && v < m.n) {
                            w -= v;
                            ++v;
                        }
                        if (v < m.n)
                            edges.emplace_back(static_cast<NodeId>(w),
                                               static_cast<NodeId>(v));
                    }
                }
                return Graph::from_edges(m.n, std::move(edges));
            } else if constexpr (std::is_same_v<M, WattsStrogatz>) {
                std::unordered_set<std::uint64_t> keys;
                std::vector<int> degree(static_cast<std::size_t>(m.n), 0);
                std::vector<NodeId> nodes(static_cast<std::size_t>(m.n));
                for (NodeId i = 0; i < m.n; ++i)
                    nodes[static_cast<std::size_t>(i)] = i;
                detail::ws_edges_into(keys, degree, nodes, m.n, m.k,
                                      m.rewire_p, gen);
                return Graph::from_edges(m.n, detail::collect_edges(keys, m.n));
            } else {
                const NodeId n = static_cast<NodeId>(m.home_group.size());
                std::unordered_set<std::uint64_t> keys;
                std::vector<int> degree(static_cast<std::size_t>(n), 0);
                for (const auto& members :
                     detail::group_members(m.home_group))
                    detail::ws_edges_into(
                        keys, degree, members, n,
                        detail::overlay_group_k(members.size(), m.k_max),
                        m.rewire_p, gen);
                if (!m.work_group.empty())
                    for (const auto& members :
                         detail::group_members(m.work_group))
                        detail::ws_edges_into(
                            keys, degree, members, n,
                            detail::overlay_group_k(members.size(), m.k_max),
                            m.rewire_p, gen);
                return Graph::from_edges(n, detail::collect_edges(keys, n));
            }
        },
        spec.model);
}

// +-1 votes with a per-group probability of +1.
struct DiscreteVotes {
    Vec group_probs;
    std::vector<int> node_group; // empty = every node in group 0
};

struct ContributionSpec {
    double mean = 0.0;
    double stddev = 1.0;
    bool adversarial_redistribute = false; // applied by callers, needs u1
    std::optional<DiscreteVotes> votes;
};

inline ContributionVector sample_contributions(NodeId n,
                                               const ContributionSpec& spec,
                                               std::uint64_t rng_seed) {
    if (n < 1)
        throw ValidationError("sample_contributions: n must be >= 1");
    auto gen = rng::engine(rng_seed);
    Vec y(static_cast<std::size_t>(n));
    if (spec.votes) {
        const auto& votes = *spec.votes;
        if (!votes.node_group.empty() &&
            votes.node_group.size() != y.size())
            throw ValidationError(
                "sample_contributions: vote group assignment size mismatch");
        for (double prob : votes.group_probs)
            if (!(prob >= 0.0 && prob <= 1.0))
                throw ValidationError(
                    "sample_contributions: vote probabilities in [0, 1]");
        for (std::size_t i = 0; i < y.size(); ++i) {
            const std::size_t gid =
                votes.node_group.empty()
                    ? 0
                    : static_cast<std::size_t>(votes.node_group[i]);
            if (gid >= votes.group_probs.size())
                throw ValidationError(
                    "sample_contributions: vote group id out of range");
            y[i] = rng::uniform01(gen) < votes.group_probs[gid] ? 1.0 : -1.0;
        }
    } else {
        if (!(spec.stddev > 0))
            throw ValidationError(
                "sample_contributions: normal mode needs std > 0");
        for (double& v : y)
            v = rng::normal(gen, spec.mean, spec.stddev);
    }
    return ContributionVector(std::move(y));
}

// Permutes y's values against structural importance: when ybar < 0 the node
// with the largest u1 entry receives the largest value (and so on down);
// the pairing is reversed when ybar >= 0. Drives sign(ybar * u1'y) <= 0
// whenever the value multiset permits.
inline ContributionVector redistribute_adversarial(const ContributionVector& y,
                                                   std::span<const double> u1) {
    if (u1.size() != y.size())
        throw ValidationError("redistribute_adversarial: dimension mismatch");
    const std::size_t n = y.size();
    std::vector<std::size_t> by_importance(n);
    for (std::size_t i = 0; i < n; ++i)
        by_importance[i] = i;
    std::sort(by_importance.begin(), by_importance.end(),
              [&](std::size_t a, std::size_t b) {
                  if (u1[a] != u1[b])
                      return u1[a] > u1[b];
                  return a < b;
              });
    Vec sorted_values = y.values();
    std::sort(sorted_values.begin(), sorted_values.end(),
              std::greater<double>());
    if (y.mean() >= 0)
        std::reverse(sorted_values.begin(), sorted_values.end());
    Vec out(n);
    for (std::size_t rank = 0; rank < n; ++rank)
        out[by_importance[rank]] = sorted_values[rank];
    return ContributionVector(std::move(out));
}

// Overlay graph plus +-1 votes sampled from the node's home-group rate.
inline std::pair<Graph, ContributionVector> generate_overlay(
    const OverlayWs& model, const Vec& vote_probs, std::uint64_t rng_seed) {
    GenSpec spec{model, rng::derive(rng_seed, {0})};
    Graph g = generate(spec);
    DiscreteVotes votes{vote_probs, model.home_group};
    ContributionSpec cspec;
    cspec.votes = std::move(votes);
    ContributionVector y = sample_contributions(
        g.num_nodes(), cspec, rng::derive(rng_seed, {1}));
    return {std::move(g), std::move(y)};
}

enum class ModelFamily { barabasi_albert, erdos_renyi, watts_strogatz };

inline const char* to_string(ModelFamily family) {
    switch (family) {
    case ModelFamily::barabasi_albert: return "barabasi_albert";
    case ModelFamily::erdos_renyi: return "erdos_renyi";
    case ModelFamily::watts_strogatz: return "watts_strogatz";
    }
    return "?";
}

// Simulation-protocol parameter ranges: n in [30, 300], BA m in [1, n),
// ER q in (0, 1], WS k even in [max(2, even(ln n)), n), rewire in [0, 1].
inline GenSpec sample_gen_spec(ModelFamily family, std::mt19937_64& gen) {
    const NodeId n =
        static_cast<NodeId>(30 + rng::below(gen, 271)); // [30, 300]
    GenSpec spec;
    switch (family) {
    case ModelFamily::barabasi_albert: {
        const NodeId m = static_cast<NodeId>(
            1 + rng::below(gen, static_cast<std::uint64_t>(n - 1)));
        spec.model = BarabasiAlbert{n, m};
        break;
    }
    case ModelFamily::erdos_renyi: {
        spec.model = ErdosRenyi{n, 1.0 - rng::uniform01(gen)}; // (0, 1]
        break;
    }
    case ModelFamily::watts_strogatz: {
        NodeId lo = static_cast<NodeId>(std::log(static_cast<double>(n)));
        lo -= lo % 2;
        lo = std::max<NodeId>(lo, 2);
        const NodeId hi = (n - 1) - ((n - 1) % 2 == 0 ? 0 : 1); // even < n
        const NodeId steps = (hi - lo) / 2 + 1;
        const NodeId k = static_cast<NodeId>(
            lo + 2 * rng::below(gen, static_cast<std::uint64_t>(steps)));
        spec.model = WattsStrogatz{n, k, rng::uniform01(gen)};
        break;
    }
    }
    spec.rng_seed = gen();
    return spec;
}

} // namespace ctxcent
