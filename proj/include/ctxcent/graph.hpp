#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxcent/error.hpp"
#include "ctxcent/vec.hpp"

namespace ctxcent {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected simple graph on nodes 0..n-1, stored as a CSR adjacency view
// plus the sorted unique edge list. Immutable after construction and safe to
// share across threads; every operation is a pure read.
class Graph {
public:
    Graph() = default;

    // Accepts edges in any order/orientation; normalizes to u < v, drops
    // duplicates, rejects self-loops and out-of-range endpoints.
    static Graph from_edges(NodeId n, std::vector<Edge> edges) {
        if (n < 0)
            throw ValidationError("graph: negative node count");
        for (auto& [u, v] : edges) {
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw ValidationError("graph: edge endpoint out of range");
            if (u == v)
                throw ValidationError("graph: self-loop on node " +
                                      std::to_string(u));
            if (u > v)
                std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

        Graph g;
        g.n_ = n;
        g.edges_ = std::move(edges);
        g.degrees_.assign(static_cast<std::size_t>(n), 0);
        for (const auto& [u, v] : g.edges_) {
            ++g.degrees_[static_cast<std::size_t>(u)];
            ++g.degrees_[static_cast<std::size_t>(v)];
        }
        g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (NodeId i = 0; i < n; ++i)
            g.offsets_[static_cast<std::size_t>(i) + 1] =
                g.offsets_[static_cast<std::size_t>(i)] +
                static_cast<std::size_t>(g.degrees_[static_cast<std::size_t>(i)]);
        g.adjacency_.resize(g.offsets_.back());
        std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (const auto& [u, v] : g.edges_) {
            g.adjacency_[cursor[static_cast<std::size_t>(u)]++] = v;
            g.adjacency_[cursor[static_cast<std::size_t>(v)]++] = u;
        }
        // Neighbor lists sorted ascending; cascade attempt order relies on it.
        for (NodeId i = 0; i < n; ++i) {
            auto row = g.mutable_row(i);
            std::sort(row.begin(), row.end());
        }
        return g;
    }

    NodeId num_nodes() const noexcept { return n_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<NodeId>& degrees() const noexcept { return degrees_; }

    std::span<const NodeId> neighbors(NodeId u) const {
        check_node(u);
        const std::size_t b = offsets_[static_cast<std::size_t>(u)];
        const std::size_t e = offsets_[static_cast<std::size_t>(u) + 1];
        return {adjacency_.data() + b, adjacency_.data() + e};
    }

    bool has_edge(NodeId u, NodeId v) const {
        if (u > v)
            std::swap(u, v);
        return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
    }

    // Index into edges() of the undirected pair {u, v}.
    std::size_t edge_index(NodeId u, NodeId v) const {
        if (u > v)
            std::swap(u, v);
        auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{u, v});
        if (it == edges_.end() || *it != Edge{u, v})
            throw ValidationError("graph: no such edge");
        return static_cast<std::size_t>(it - edges_.begin());
    }

    // CSR arc slots: one per (node, neighbor) pair, 2 * num_edges() total.
    std::size_t num_arcs() const noexcept { return adjacency_.size(); }
    std::size_t arc_begin(NodeId u) const {
        return offsets_[static_cast<std::size_t>(u)];
    }

    // out = A * x in O(num_arcs()).
    void matvec(std::span<const double> x, std::span<double> out) const {
        if (x.size() != static_cast<std::size_t>(n_) || out.size() != x.size())
            throw ValidationError("matvec: dimension mismatch");
        for (NodeId u = 0; u < n_; ++u) {
            const std::size_t b = offsets_[static_cast<std::size_t>(u)];
            const std::size_t e = offsets_[static_cast<std::size_t>(u) + 1];
            double s = 0.0;
            for (std::size_t k = b; k < e; ++k)
                s += x[static_cast<std::size_t>(adjacency_[k])];
            out[static_cast<std::size_t>(u)] = s;
        }
    }

    Vec matvec(const Vec& x) const {
        Vec out(x.size());
        matvec(std::span<const double>(x), std::span<double>(out));
        return out;
    }

private:
    void check_node(NodeId u) const {
        if (u < 0 || u >= n_)
            throw ValidationError("graph: node id out of range: " +
                                  std::to_string(u));
    }

    std::span<NodeId> mutable_row(NodeId u) {
        const std::size_t b = offsets_[static_cast<std::size_t>(u)];
        const std::size_t e = offsets_[static_cast<std::size_t>(u) + 1];
        return {adjacency_.data() + b, adjacency_.data() + e};
    }

    NodeId n_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> adjacency_;
    std::vector<NodeId> degrees_;
    std::vector<Edge> edges_;
};

namespace detail {

inline bool parse_node_id(std::string_view token, NodeId& out) {
    if (token.empty())
        return false;
    std::int64_t value = 0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || value < 0 ||
        value > std::numeric_limits<NodeId>::max())
        return false;
    out = static_cast<NodeId>(value);
    return true;
}

} // namespace detail

// Line-oriented "u v" pairs; '#' lines are comments; whitespace-tolerant.
// Nodes are 0..max_id, so ids absent from every edge become isolated nodes.
inline Graph load_edge_list(const std::string& text) {
    std::vector<Edge> edges;
    NodeId max_id = -1;
    std::size_t line_no = 0;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (fields >> tok)
            tokens.push_back(tok);
        if (tokens.empty() || tokens.front().front() == '#')
            continue;
        if (tokens.size() != 2)
            throw ValidationError("edge list line " + std::to_string(line_no) +
                                  ": expected two node ids");
        NodeId u = 0, v = 0;
        if (!detail::parse_node_id(tokens[0], u) ||
            !detail::parse_node_id(tokens[1], v))
            throw ValidationError("edge list line " + std::to_string(line_no) +
                                  ": malformed node id");
        if (u == v)
            throw ValidationError("edge list line " + std::to_string(line_no) +
                                  ": self-loop on node " + std::to_string(u));
        edges.emplace_back(u, v);
        max_id = std::max({max_id, u, v});
    }
    return Graph::from_edges(max_id + 1, std::move(edges));
}

inline Graph load_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open edge list file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_edge_list(buf.str());
}

// Sorted unique pairs u < v, one per line.
inline std::string serialize_edge_list(const Graph& g) {
    std::ostringstream out;
    for (const auto& [u, v] : g.edges())
        out << u << ' ' << v << '\n';
    return out.str();
}

inline void save_edge_list_file(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write edge list file: " + path);
    out << serialize_edge_list(g);
}

} // namespace ctxcent
