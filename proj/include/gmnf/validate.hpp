#ifndef GMNF_VALIDATE_HPP
#define GMNF_VALIDATE_HPP

#include <optional>
#include <string>
#include <vector>

#include "gmnf/caps.hpp"
#include "gmnf/instance.hpp"

namespace gmnf {

// Non-directed simple cycle: vertices v_1..v_k with edge e_i joining v_i and
// v_{i+1} (e_k closes back to v_1). Orientation of the underlying directed
// edges is ignored.
struct NondirCycle {
    std::vector<int> vertices;
    std::vector<int> edges;
};

template <class Num>
struct GaugeCertificate {
    std::vector<Num> p;  // per vertex, > 0
    std::vector<Num> q;  // per edge, > 0
};

template <class Num>
struct RatioBalanceResult {
    bool balanced = false;
    std::optional<GaugeCertificate<Num>> certificate;
    std::optional<NondirCycle> violation;
};

template <class Num>
struct ValidationReport {
    std::vector<std::string> errors;
    std::optional<RatioBalanceResult<Num>> ratio_balance;  // set when structure is valid

    bool structurally_valid() const { return errors.empty(); }
    bool ok() const { return errors.empty() && ratio_balance && ratio_balance->balanced; }
};

// Product of deltas around a non-directed cycle:
//   delta(v_1, e_k, e_1) * delta(v_2, e_1, e_2) * ... * delta(v_k, e_{k-1}, e_k).
template <class Num>
Num cycle_delta_product(const GmnfInstance<Num>& inst, const NondirCycle& cycle) {
    const auto k = cycle.vertices.size();
    if (k < 2 || cycle.edges.size() != k)
        throw UsageError("cycle must have >= 2 vertices and as many edges");
    Num prod = num::from_int<Num>(1);
    for (std::size_t i = 0; i < k; ++i) {
        int v = cycle.vertices[i];
        int e_prev = cycle.edges[(i + k - 1) % k];
        int e_cur = cycle.edges[i];
        prod *= delta(inst, v, e_prev, e_cur);
    }
    return prod;
}

// Gauge/potential criterion: the graph is ratio-balanced iff there are
// p_v > 0, q_e > 0 with |a_v^e| = q_e * p_v. Grouping the cycle product per
// edge turns the condition into a potential equation checked by one forest
// traversal plus one pass over non-tree edges; disconnected graphs are
// handled per component.
template <class Num>
RatioBalanceResult<Num> is_ratio_balanced_gauge(const GmnfInstance<Num>& inst) {
    const int n = inst.n();
    RatioBalanceResult<Num> result;
    std::vector<Num> p(static_cast<std::size_t>(n), num::from_int<Num>(1));
    std::vector<int> parent_vertex(static_cast<std::size_t>(n), -1);
    std::vector<int> parent_edge(static_cast<std::size_t>(n), -1);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<char> is_tree_edge(static_cast<std::size_t>(inst.m()), 0);

    for (int root = 0; root < n; ++root) {
        if (seen[static_cast<std::size_t>(root)]) continue;
        seen[static_cast<std::size_t>(root)] = 1;
        std::vector<int> stack = {root};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int e : inst.graph.incident[static_cast<std::size_t>(v)]) {
                int w = inst.graph.other_end(e, v);
                if (seen[static_cast<std::size_t>(w)]) continue;
                seen[static_cast<std::size_t>(w)] = 1;
                p[static_cast<std::size_t>(w)] = p[static_cast<std::size_t>(v)] *
                                                 num::abs(inst.coeff(w, e)) /
                                                 num::abs(inst.coeff(v, e));
                parent_vertex[static_cast<std::size_t>(w)] = v;
                parent_edge[static_cast<std::size_t>(w)] = e;
                is_tree_edge[static_cast<std::size_t>(e)] = 1;
                stack.push_back(w);
            }
        }
    }

    for (int e = 0; e < inst.m(); ++e) {
        if (is_tree_edge[static_cast<std::size_t>(e)]) continue;
        int v = inst.graph.edges[static_cast<std::size_t>(e)].tail;
        int w = inst.graph.edges[static_cast<std::size_t>(e)].head;
        Num av = num::abs(inst.coeff(v, e));
        Num aw = num::abs(inst.coeff(w, e));
        if (num::eq(aw * p[static_cast<std::size_t>(v)], av * p[static_cast<std::size_t>(w)]))
            continue;

        // Violating cycle: tree path v..w closed by e.
        auto path_to_root = [&](int u) {
            std::vector<int> path;
            while (u != -1) {
                path.push_back(u);
                u = parent_vertex[static_cast<std::size_t>(u)];
            }
            return path;
        };
        auto pv = path_to_root(v);
        auto pw = path_to_root(w);
        while (pv.size() > 1 && pw.size() > 1 && pv[pv.size() - 2] == pw[pw.size() - 2]) {
            pv.pop_back();
            pw.pop_back();
        }
        NondirCycle cyc;
        for (int u : pv) cyc.vertices.push_back(u);
        for (std::size_t i = pw.size() - 1; i >= 1; --i) cyc.vertices.push_back(pw[i - 1]);
        for (std::size_t i = 0; i + 1 < cyc.vertices.size(); ++i) {
            int a = cyc.vertices[i], b = cyc.vertices[i + 1];
            int te = parent_vertex[static_cast<std::size_t>(a)] == b
                         ? parent_edge[static_cast<std::size_t>(a)]
                         : parent_edge[static_cast<std::size_t>(b)];
            cyc.edges.push_back(te);
        }
        cyc.edges.push_back(e);  // closes v_k = w back to v_1 = v
        result.balanced = false;
        result.violation = std::move(cyc);
        return result;
    }

    GaugeCertificate<Num> cert;
    cert.p = std::move(p);
    cert.q.reserve(static_cast<std::size_t>(inst.m()));
    for (int e = 0; e < inst.m(); ++e) {
        int tail = inst.graph.edges[static_cast<std::size_t>(e)].tail;
        cert.q.push_back(num::abs(inst.a_tail[static_cast<std::size_t>(e)]) /
                         cert.p[static_cast<std::size_t>(tail)]);
    }
    result.balanced = true;
    result.certificate = std::move(cert);
    return result;
}

// Enumerates all simple non-directed cycles by backtracking and checks the
// delta product for each. Cross-validation oracle for the gauge criterion;
// intended for small graphs only.
template <class Num>
RatioBalanceResult<Num> is_ratio_balanced_bruteforce(const GmnfInstance<Num>& inst) {
    if (inst.n() > caps().bruteforce_vertices)
        throw SizeCapError("bruteforce ratio-balance check limited to " +
                           std::to_string(caps().bruteforce_vertices) + " vertices");
    RatioBalanceResult<Num> result;
    result.balanced = true;

    const int n = inst.n();
    std::vector<char> on_path(static_cast<std::size_t>(n), 0);
    std::vector<int> vpath, epath;
    std::int64_t enumerated = 0;

    struct Frame {
        int vertex;
        std::size_t next_edge_idx;
    };

    // Each cycle is anchored at its minimum vertex; the two traversal
    // directions are deduplicated by requiring first edge id < last edge id.
    for (int s = 0; s < n; ++s) {
        std::vector<Frame> stack;
        stack.push_back({s, 0});
        on_path[static_cast<std::size_t>(s)] = 1;
        vpath = {s};
        epath.clear();
        while (!stack.empty()) {
            Frame& fr = stack.back();
            const auto& inc = inst.graph.incident[static_cast<std::size_t>(fr.vertex)];
            if (fr.next_edge_idx >= inc.size()) {
                on_path[static_cast<std::size_t>(fr.vertex)] = 0;
                vpath.pop_back();
                if (!epath.empty()) epath.pop_back();
                stack.pop_back();
                continue;
            }
            int e = inc[fr.next_edge_idx++];
            if (!epath.empty() && e == epath.back()) continue;
            int w = inst.graph.other_end(e, fr.vertex);
            if (w == s) {
                if (epath.empty()) continue;  // a cycle needs >= 2 edges
                if (epath.front() >= e) continue;
                if (++enumerated > caps().enum_objects)
                    throw SizeCapError("cycle enumeration cap exceeded");
                epath.push_back(e);
                NondirCycle cyc{vpath, epath};
                epath.pop_back();
                if (!num::eq(cycle_delta_product(inst, cyc), num::from_int<Num>(1))) {
                    result.balanced = false;
                    result.violation = std::move(cyc);
                    return result;
                }
            } else if (w > s && !on_path[static_cast<std::size_t>(w)]) {
                on_path[static_cast<std::size_t>(w)] = 1;
                vpath.push_back(w);
                epath.push_back(e);
                stack.push_back({w, 0});
            }
        }
        on_path[static_cast<std::size_t>(s)] = 0;
    }
    return result;
}

// Structural validation followed by the ratio-balance check.
template <class Num>
ValidationReport<Num> validate(const GmnfInstance<Num>& inst) {
    ValidationReport<Num> report;
    auto err = [&report](std::string msg) { report.errors.push_back(std::move(msg)); };

    if (inst.balance.size() != static_cast<std::size_t>(inst.n()))
        err("balance vector length != vertex count");
    const auto m = static_cast<std::size_t>(inst.m());
    if (inst.cost.size() != m || inst.capacity.size() != m || inst.a_tail.size() != m ||
        inst.a_head.size() != m)
        err("per-edge arrays have inconsistent lengths");
    if (!report.errors.empty()) return report;

    for (int e = 0; e < inst.m(); ++e) {
        const auto& ed = inst.graph.edges[static_cast<std::size_t>(e)];
        std::string tag = "edge " + std::to_string(e);
        if (ed.tail == ed.head) err(tag + ": self-loop");
        if (num::sign(inst.a_tail[static_cast<std::size_t>(e)]) <= 0)
            err(tag + ": a_tail must be > 0");
        if (num::sign(inst.a_head[static_cast<std::size_t>(e)]) >= 0)
            err(tag + ": a_head must be < 0");
        if (num::lt(inst.capacity[static_cast<std::size_t>(e)], num::from_int<Num>(0)))
            err(tag + ": negative capacity");
    }
    if (!report.errors.empty()) return report;

    report.ratio_balance = is_ratio_balanced_gauge(inst);
    return report;
}

}  // namespace gmnf

#endif
