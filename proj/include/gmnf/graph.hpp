#ifndef GMNF_GRAPH_HPP
#define GMNF_GRAPH_HPP

#include <utility>
#include <vector>

#include "gmnf/errors.hpp"

namespace gmnf {

// Directed multigraph. Edges are identified by index; parallel edges are
// allowed, self-loops are not (they make delta ill-posed at one vertex).
struct DirectedGraph {
    struct Edge {
        int tail = -1;
        int head = -1;
    };

    int n = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<int>> incident;  // per vertex, edge ids in id order

    DirectedGraph() = default;
    DirectedGraph(int vertices, std::vector<std::pair<int, int>> arcs) : n(vertices) {
        if (n < 0) throw UsageError("negative vertex count");
        edges.reserve(arcs.size());
        incident.assign(static_cast<std::size_t>(n), {});
        for (auto [tail, head] : arcs) {
            if (tail < 0 || tail >= n || head < 0 || head >= n)
                throw UsageError("edge endpoint out of range");
            int id = static_cast<int>(edges.size());
            edges.push_back({tail, head});
            incident[static_cast<std::size_t>(tail)].push_back(id);
            if (head != tail) incident[static_cast<std::size_t>(head)].push_back(id);
        }
    }

    int m() const { return static_cast<int>(edges.size()); }

    bool is_incident(int v, int e) const {
        return edges[static_cast<std::size_t>(e)].tail == v ||
               edges[static_cast<std::size_t>(e)].head == v;
    }

    int other_end(int e, int v) const {
        const auto& ed = edges[static_cast<std::size_t>(e)];
        if (ed.tail == v) return ed.head;
        if (ed.head == v) return ed.tail;
        throw UsageError("vertex not incident to edge");
    }
};

}  // namespace gmnf

#endif
