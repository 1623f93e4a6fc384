#pragma once

#include <span>
#include <vector>

#include "ctxcent/error.hpp"
#include "ctxcent/graph.hpp"

namespace ctxcent {

// Transmission probabilities P o A: either one homogeneous p for every edge
// or a per-edge value aligned with a graph's edge list (symmetric by
// construction, zero off the adjacency support).
class EdgeProbabilities {
public:
    static EdgeProbabilities homogeneous(double p) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("edge probabilities: p must lie in [0, 1]");
        EdgeProbabilities e;
        e.p_ = p;
        return e;
    }

    // One value per edge of g, in edge-list order.
    static EdgeProbabilities per_edge(const Graph& g,
                                      std::vector<double> by_edge) {
        if (by_edge.size() != g.num_edges())
            throw ValidationError(
                "edge probabilities: value count does not match edge count");
        for (double p : by_edge)
            if (!(p >= 0.0 && p <= 1.0))
                throw ValidationError(
                    "edge probabilities: entries must lie in [0, 1]");
        EdgeProbabilities e;
        e.by_edge_ = std::move(by_edge);
        // Mirror onto CSR arc slots so weighted matvec and cascades can walk
        // the adjacency directly.
        e.by_arc_.resize(g.num_arcs());
        for (NodeId u = 0; u < g.num_nodes(); ++u) {
            auto nbrs = g.neighbors(u);
            std::size_t k = g.arc_begin(u);
            for (NodeId v : nbrs)
                e.by_arc_[k++] = e.by_edge_[g.edge_index(u, v)];
        }
        return e;
    }

    bool is_homogeneous() const noexcept { return by_edge_.empty(); }
    double p() const {
        if (!is_homogeneous())
            throw ValidationError(
                "edge probabilities: heterogeneous mode has no single p");
        return p_;
    }

    // Probability on the k-th CSR arc slot.
    double arc(std::size_t k) const {
        return is_homogeneous() ? p_ : by_arc_[k];
    }

    const std::vector<double>& edge_values() const noexcept { return by_edge_; }

    // out = (P o A) * x.
    void matvec(const Graph& g, std::span<const double> x,
                std::span<double> out) const {
        if (is_homogeneous()) {
            g.matvec(x, out);
            for (double& v : out)
                v *= p_;
            return;
        }
        if (by_arc_.size() != g.num_arcs())
            throw ValidationError(
                "edge probabilities: built for a different graph");
        if (x.size() != static_cast<std::size_t>(g.num_nodes()) ||
            out.size() != x.size())
            throw ValidationError("edge probabilities: dimension mismatch");
        for (NodeId u = 0; u < g.num_nodes(); ++u) {
            auto nbrs = g.neighbors(u);
            std::size_t k = g.arc_begin(u);
            double s = 0.0;
            for (NodeId v : nbrs)
                s += by_arc_[k++] * x[static_cast<std::size_t>(v)];
            out[static_cast<std::size_t>(u)] = s;
        }
    }

private:
    double p_ = 0.0;
    std::vector<double> by_edge_;
    std::vector<double> by_arc_;
};

} // namespace ctxcent
