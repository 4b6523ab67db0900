#ifndef GMNF_RESIDUAL_HPP
#define GMNF_RESIDUAL_HPP

#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "gmnf/caps.hpp"
#include "gmnf/instance.hpp"

namespace gmnf {

// Residual arc of a base edge e = (v, w) under flow x:
//   forward (v, w), present iff x_e < u_e, cost c_e, coefficients kept;
//   reverse (w, v), present iff x_e > 0, cost -c_e, coefficients negated.
template <class Num>
struct ResArc {
    int tail = -1;
    int head = -1;
    Num cost;
    Num a_tail;  // > 0
    Num a_head;  // < 0
    int base_edge = -1;
    bool forward = true;
};

template <class Num>
struct ResidualNetwork {
    int n = 0;
    std::vector<ResArc<Num>> arcs;
    std::vector<std::vector<int>> out;  // arc ids by tail vertex

    const Num& coeff(int v, int arc) const {
        const auto& a = arcs[static_cast<std::size_t>(arc)];
        if (a.tail == v) return a.a_tail;
        if (a.head == v) return a.a_head;
        throw UsageError("residual: vertex not an endpoint of arc");
    }

    Num delta(int v, int arc1, int arc2) const {
        return num::abs(coeff(v, arc1)) / num::abs(coeff(v, arc2));
    }
};

template <class Num>
ResidualNetwork<Num> build_residual(const GmnfInstance<Num>& inst, const std::vector<Num>& x) {
    if (static_cast<int>(x.size()) != inst.m()) throw UsageError("build_residual: flow size mismatch");
    ResidualNetwork<Num> net;
    net.n = inst.n();
    net.out.assign(static_cast<std::size_t>(inst.n()), {});
    const Num zero = num::from_int<Num>(0);
    for (int e = 0; e < inst.m(); ++e) {
        const auto& xe = x[static_cast<std::size_t>(e)];
        const auto& ue = inst.capacity[static_cast<std::size_t>(e)];
        if (num::lt(xe, zero) || num::lt(ue, xe))
            throw UsageError("build_residual: flow violates capacity on edge " + std::to_string(e));
        const auto& ed = inst.graph.edges[static_cast<std::size_t>(e)];
        if (num::lt(xe, ue)) {
            net.out[static_cast<std::size_t>(ed.tail)].push_back(static_cast<int>(net.arcs.size()));
            net.arcs.push_back({ed.tail, ed.head, inst.cost[static_cast<std::size_t>(e)],
                                inst.a_tail[static_cast<std::size_t>(e)],
                                inst.a_head[static_cast<std::size_t>(e)], e, true});
        }
        if (num::lt(zero, xe)) {
            net.out[static_cast<std::size_t>(ed.head)].push_back(static_cast<int>(net.arcs.size()));
            net.arcs.push_back({ed.head, ed.tail, -inst.cost[static_cast<std::size_t>(e)],
                                -inst.a_head[static_cast<std::size_t>(e)],
                                -inst.a_tail[static_cast<std::size_t>(e)], e, false});
        }
    }
    return net;
}

namespace detail {

template <class Num>
void require_consecutive(const ResidualNetwork<Num>& net, const std::vector<int>& arcs,
                         const char* what) {
    if (arcs.empty()) throw UsageError(std::string(what) + ": empty arc sequence");
    for (std::size_t i = 1; i < arcs.size(); ++i)
        if (net.arcs[static_cast<std::size_t>(arcs[i - 1])].head !=
            net.arcs[static_cast<std::size_t>(arcs[i])].tail)
            throw UsageError(std::string(what) + ": arcs not consecutive");
}

}  // namespace detail

// Delta-weighted telescoping cost of any directed arc walk:
//   c_1 + sum_{i>=2} c_i * prod_{j=2..i} delta(v_j, a_{j-1}, a_j).
template <class Num>
Num walk_cost(const ResidualNetwork<Num>& net, const std::vector<int>& arcs) {
    detail::require_consecutive(net, arcs, "walk_cost");
    Num total = net.arcs[static_cast<std::size_t>(arcs[0])].cost;
    Num prod = num::from_int<Num>(1);
    for (std::size_t i = 1; i < arcs.size(); ++i) {
        int v = net.arcs[static_cast<std::size_t>(arcs[i])].tail;
        prod *= net.delta(v, arcs[i - 1], arcs[i]);
        total += net.arcs[static_cast<std::size_t>(arcs[i])].cost * prod;
    }
    return total;
}

// Same value through the nested recursive form
//   c_1 + d_2 (c_2 + d_3 (c_3 + ... + d_k c_k)).
template <class Num>
Num walk_cost_nested(const ResidualNetwork<Num>& net, const std::vector<int>& arcs) {
    detail::require_consecutive(net, arcs, "walk_cost");
    Num acc = net.arcs[static_cast<std::size_t>(arcs.back())].cost;
    for (std::size_t i = arcs.size() - 1; i >= 1; --i) {
        int v = net.arcs[static_cast<std::size_t>(arcs[i])].tail;
        acc = net.arcs[static_cast<std::size_t>(arcs[i - 1])].cost + net.delta(v, arcs[i - 1], arcs[i]) * acc;
    }
    return acc;
}

// Minimum over prefixes of the running delta product (1 for a single arc).
template <class Num>
Num walk_reducer(const ResidualNetwork<Num>& net, const std::vector<int>& arcs) {
    detail::require_consecutive(net, arcs, "walk_reducer");
    Num prod = num::from_int<Num>(1);
    Num best = prod;
    for (std::size_t i = 1; i < arcs.size(); ++i) {
        int v = net.arcs[static_cast<std::size_t>(arcs[i])].tail;
        prod *= net.delta(v, arcs[i - 1], arcs[i]);
        if (num::lt(prod, best)) best = prod;
    }
    return best;
}

template <class Num>
void require_simple_cycle(const ResidualNetwork<Num>& net, const std::vector<int>& arcs) {
    detail::require_consecutive(net, arcs, "cycle");
    if (arcs.size() < 2) throw UsageError("cycle: needs at least 2 arcs");
    if (net.arcs[static_cast<std::size_t>(arcs.back())].head !=
        net.arcs[static_cast<std::size_t>(arcs.front())].tail)
        throw UsageError("cycle: not closed");
    std::vector<int> tails;
    for (int a : arcs) tails.push_back(net.arcs[static_cast<std::size_t>(a)].tail);
    std::sort(tails.begin(), tails.end());
    if (std::adjacent_find(tails.begin(), tails.end()) != tails.end())
        throw UsageError("cycle: repeats a vertex");
}

template <class Num>
void require_simple_path(const ResidualNetwork<Num>& net, const std::vector<int>& arcs) {
    detail::require_consecutive(net, arcs, "path");
    std::vector<int> verts;
    verts.push_back(net.arcs[static_cast<std::size_t>(arcs.front())].tail);
    for (int a : arcs) verts.push_back(net.arcs[static_cast<std::size_t>(a)].head);
    std::sort(verts.begin(), verts.end());
    if (std::adjacent_find(verts.begin(), verts.end()) != verts.end())
        throw UsageError("path: repeats a vertex");
}

// Rotation-dependent cycle cost c(C); evaluates both the closed-form sum
// and the nested recursion and insists they agree.
template <class Num>
Num cycle_cost(const ResidualNetwork<Num>& net, const std::vector<int>& arcs) {
    require_simple_cycle(net, arcs);
    Num closed = walk_cost(net, arcs);
    Num nested = walk_cost_nested(net, arcs);
    if (!num::eq(closed, nested))
        throw UsageError("cycle_cost: closed and nested forms disagree (numeric trouble)");
    return closed;
}

template <class Num>
Num path_cost(const ResidualNetwork<Num>& net, const std::vector<int>& arcs) {
    require_simple_path(net, arcs);
    return walk_cost(net, arcs);
}

template <class Num>
Num path_reducer(const ResidualNetwork<Num>& net, const std::vector<int>& arcs) {
    require_simple_path(net, arcs);
    return walk_reducer(net, arcs);
}

// sigma(x), L, T and enumeration counts for the residual network.
template <class Num>
struct CostProfile {
    std::optional<Num> sigma;           // min cycle cost; nullopt = no cycles (+inf)
    std::vector<int> sigma_cycle;       // attaining rotation (arc sequence)
    Num L = num::from_int<Num>(0);      // max |l(S)| over simple paths
    Num T = num::from_int<Num>(1);      // min reducer over simple paths
    std::int64_t cycle_count = 0;       // simple directed cycles (rotations not counted)
    std::int64_t path_count = 0;        // simple directed paths with >= 1 arc
};

namespace detail {

// Enumerate vertex-simple directed cycles, anchored at their minimum
// vertex. Anti-parallel residual arc pairs of one base edge are skipped:
// pushing flow around such a pair is a no-op on the base flow.
template <class Num, class Visit>
void for_each_simple_cycle(const ResidualNetwork<Num>& net, Visit&& visit) {
    if (net.n > caps().enum_vertices)
        throw SizeCapError("cycle enumeration limited to " +
                           std::to_string(caps().enum_vertices) + " vertices");
    std::int64_t budget = caps().enum_objects;
    std::vector<char> on_path(static_cast<std::size_t>(net.n), 0);
    std::vector<int> apath;
    struct Frame {
        int vertex;
        std::size_t next;
    };
    for (int s = 0; s < net.n; ++s) {
        std::vector<Frame> stack;
        stack.push_back({s, 0});
        on_path[static_cast<std::size_t>(s)] = 1;
        apath.clear();
        while (!stack.empty()) {
            Frame& fr = stack.back();
            const auto& outs = net.out[static_cast<std::size_t>(fr.vertex)];
            if (fr.next >= outs.size()) {
                on_path[static_cast<std::size_t>(fr.vertex)] = 0;
                if (!apath.empty()) apath.pop_back();
                stack.pop_back();
                continue;
            }
            int arc = outs[fr.next++];
            int w = net.arcs[static_cast<std::size_t>(arc)].head;
            if (w == s) {
                if (apath.empty()) continue;
                apath.push_back(arc);
                bool degenerate =
                    apath.size() == 2 &&
                    net.arcs[static_cast<std::size_t>(apath[0])].base_edge ==
                        net.arcs[static_cast<std::size_t>(apath[1])].base_edge;
                if (!degenerate) {
                    if (--budget < 0) throw SizeCapError("cycle enumeration cap exceeded");
                    visit(apath);
                }
                apath.pop_back();
            } else if (w > s && !on_path[static_cast<std::size_t>(w)]) {
                on_path[static_cast<std::size_t>(w)] = 1;
                apath.push_back(arc);
                stack.push_back({w, 0});
            }
        }
        on_path[static_cast<std::size_t>(s)] = 0;
    }
}

// Enumerate vertex-simple directed paths (every DFS prefix is one).
template <class Num, class Visit>
void for_each_simple_path(const ResidualNetwork<Num>& net, Visit&& visit) {
    if (net.n > caps().enum_vertices)
        throw SizeCapError("path enumeration limited to " +
                           std::to_string(caps().enum_vertices) + " vertices");
    std::int64_t budget = caps().enum_objects;
    std::vector<char> on_path(static_cast<std::size_t>(net.n), 0);
    std::vector<int> apath;
    struct Frame {
        int vertex;
        std::size_t next;
    };
    for (int s = 0; s < net.n; ++s) {
        std::vector<Frame> stack;
        stack.push_back({s, 0});
        on_path[static_cast<std::size_t>(s)] = 1;
        apath.clear();
        while (!stack.empty()) {
            Frame& fr = stack.back();
            const auto& outs = net.out[static_cast<std::size_t>(fr.vertex)];
            if (fr.next >= outs.size()) {
                on_path[static_cast<std::size_t>(fr.vertex)] = 0;
                if (!apath.empty()) apath.pop_back();
                stack.pop_back();
                continue;
            }
            int arc = outs[fr.next++];
            int w = net.arcs[static_cast<std::size_t>(arc)].head;
            if (on_path[static_cast<std::size_t>(w)]) continue;
            apath.push_back(arc);
            if (--budget < 0) throw SizeCapError("path enumeration cap exceeded");
            visit(apath);
            on_path[static_cast<std::size_t>(w)] = 1;
            stack.push_back({w, 0});
        }
        on_path[static_cast<std::size_t>(s)] = 0;
    }
}

}  // namespace detail

// sigma = min over all simple directed cycles and all their rotations of
// c(C); nullopt when the network is acyclic. Also returns the attaining
// rotation.
template <class Num>
std::pair<std::optional<Num>, std::vector<int>> sigma_with_cycle(const ResidualNetwork<Num>& net) {
    std::optional<Num> best;
    std::vector<int> best_cycle;
    detail::for_each_simple_cycle(net, [&](const std::vector<int>& arcs) {
        const std::size_t k = arcs.size();
        std::vector<int> rotated(k);
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t i = 0; i < k; ++i) rotated[i] = arcs[(r + i) % k];
            Num c = cycle_cost(net, rotated);
            if (!best || num::lt(c, *best)) {
                best = c;
                best_cycle = rotated;
            }
        }
    });
    return {best, best_cycle};
}

template <class Num>
std::optional<Num> sigma(const ResidualNetwork<Num>& net) {
    return sigma_with_cycle(net).first;
}

// L = max |l(S)|, T = min t(S) over all simple directed paths with >= 1
// arc, by exhaustive enumeration; also fills sigma and the counts.
template <class Num>
CostProfile<Num> cost_profile(const ResidualNetwork<Num>& net) {
    CostProfile<Num> profile;
    auto sg = sigma_with_cycle(net);
    profile.sigma = sg.first;
    profile.sigma_cycle = std::move(sg.second);
    detail::for_each_simple_cycle(net, [&](const std::vector<int>&) { ++profile.cycle_count; });

    // Incremental l/t along the DFS stack would be cheaper, but walk_cost on
    // each prefix is plenty at the sizes the caps allow.
    detail::for_each_simple_path(net, [&](const std::vector<int>& arcs) {
        ++profile.path_count;
        Num l = num::abs(walk_cost(net, arcs));
        if (num::lt(profile.L, l)) profile.L = l;
        Num t = walk_reducer(net, arcs);
        if (num::lt(t, profile.T)) profile.T = t;
    });
    return profile;
}

// N = ceil((L / (2 sigma T) + 1) * n); the fixed iteration count that
// certifies BP equals the unique optimum. sigma <= 0 contradicts
// uniqueness, sigma = +inf (acyclic) gives N = n.
template <class Num>
std::int64_t certification_bound(const CostProfile<Num>& profile, int n) {
    if (!profile.sigma) return n;
    if (num::sign(*profile.sigma) <= 0)
        throw UsageError("certification_bound: sigma <= 0 (optimum not unique)");
    if (num::sign(profile.T) <= 0) throw UsageError("certification_bound: T must be positive");
    Num ratio = profile.L / (num::from_int<Num>(2) * *profile.sigma * profile.T);
    return num::ceil_int((ratio + num::from_int<Num>(1)) * num::from_int<Num>(n));
}

// Largest epsilon for which push_cycle keeps every capacity satisfied.
template <class Num>
Num max_push(const GmnfInstance<Num>& inst, const std::vector<Num>& x,
             const ResidualNetwork<Num>& net, const std::vector<int>& cycle) {
    require_simple_cycle(net, cycle);
    std::optional<Num> best;
    Num prod = num::from_int<Num>(1);
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        const auto& arc = net.arcs[static_cast<std::size_t>(cycle[i])];
        if (i > 0) prod *= net.delta(arc.tail, cycle[i - 1], cycle[i]);
        Num slack = arc.forward
                        ? inst.capacity[static_cast<std::size_t>(arc.base_edge)] -
                              x[static_cast<std::size_t>(arc.base_edge)]
                        : x[static_cast<std::size_t>(arc.base_edge)];
        Num limit = slack / prod;
        if (!best || num::lt(limit, *best)) best = limit;
    }
    return *best;
}

// Pushes eps along cycle arc 1 and eps * prod(delta) along the successors,
// increasing flow through forward arcs and decreasing through reverse ones.
// Balance is preserved exactly (ratio-balance closes the loop) and the
// objective changes by exactly eps * c(C); both are asserted.
template <class Num>
std::vector<Num> push_cycle(const GmnfInstance<Num>& inst, const std::vector<Num>& x,
                            const ResidualNetwork<Num>& net, const std::vector<int>& cycle,
                            const std::type_identity_t<Num>& eps) {
    require_simple_cycle(net, cycle);
    if (num::sign(eps) < 0) throw UsageError("push_cycle: negative epsilon");
    std::vector<Num> y = x;
    Num prod = num::from_int<Num>(1);
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        const auto& arc = net.arcs[static_cast<std::size_t>(cycle[i])];
        if (i > 0) prod *= net.delta(arc.tail, cycle[i - 1], cycle[i]);
        Num amount = eps * prod;
        auto& flow = y[static_cast<std::size_t>(arc.base_edge)];
        if (arc.forward)
            flow += amount;
        else
            flow -= amount;
        if (num::lt(flow, num::from_int<Num>(0)) ||
            num::lt(inst.capacity[static_cast<std::size_t>(arc.base_edge)], flow))
            throw UsageError("push_cycle: epsilon too large, capacity binds on edge " +
                             std::to_string(arc.base_edge));
    }
    // balance must still hold at every vertex
    for (int v = 0; v < inst.n(); ++v) {
        Num sum = num::from_int<Num>(0);
        for (int e : inst.graph.incident[static_cast<std::size_t>(v)])
            sum += inst.coeff(v, e) * y[static_cast<std::size_t>(e)];
        if (!num::eq(sum, inst.balance[static_cast<std::size_t>(v)]))
            throw UsageError("push_cycle: balance broken (graph not ratio-balanced?)");
    }
    Num delta_cost = objective(inst, y) - objective(inst, x);
    if (!num::eq(delta_cost, eps * cycle_cost(net, cycle)))
        throw UsageError("push_cycle: cost change disagrees with eps * c(C)");
    return y;
}

template <class Num>
struct Lemma2Report {
    bool holds = false;
    Num spliced_cost;  // l(R)
    Num path_cost;     // l(S)
    Num cycle_cost;    // c(C)
};

// Splices cycle C (which must start and end at path vertex position p,
// 1-indexed, interior) into S and verifies l(R) >= l(S) + T c(C).
template <class Num>
Lemma2Report<Num> check_lemma2(const ResidualNetwork<Num>& net, const std::vector<int>& path,
                               const std::vector<int>& cycle, std::size_t p,
                               const std::type_identity_t<Num>& T) {
    require_simple_path(net, path);
    require_simple_cycle(net, cycle);
    if (p < 2 || p > path.size())  // interior vertex of S: v_2 .. v_{k-1}
        throw UsageError("check_lemma2: splice position must be interior");
    int vp = net.arcs[static_cast<std::size_t>(path[p - 1])].tail;
    if (net.arcs[static_cast<std::size_t>(cycle.front())].tail != vp)
        throw UsageError("check_lemma2: cycle does not start at the splice vertex");
    std::vector<int> spliced(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(p - 1));
    spliced.insert(spliced.end(), cycle.begin(), cycle.end());
    spliced.insert(spliced.end(), path.begin() + static_cast<std::ptrdiff_t>(p - 1), path.end());

    Lemma2Report<Num> report;
    report.spliced_cost = walk_cost(net, spliced);
    report.path_cost = walk_cost(net, path);
    report.cycle_cost = cycle_cost(net, cycle);
    Num lower_bound = report.path_cost + T * report.cycle_cost;
    report.holds = num::le(lower_bound, report.spliced_cost);
    return report;
}

// Standard decomposition of a directed walk: excise the cycle closed at the
// first repeated vertex, repeat; what remains is a simple path (possibly
// empty). The arc multiset of path + cycles equals the walk's.
template <class Num>
std::pair<std::vector<int>, std::vector<std::vector<int>>> decompose_walk(
    const ResidualNetwork<Num>& net, const std::vector<int>& walk) {
    detail::require_consecutive(net, walk, "decompose_walk");
    std::vector<std::vector<int>> cycles;
    std::vector<int> stack;  // arc ids; vertex sequence implied
    std::vector<int> vstack = {net.arcs[static_cast<std::size_t>(walk.front())].tail};
    for (int arc : walk) {
        int w = net.arcs[static_cast<std::size_t>(arc)].head;
        auto it = std::find(vstack.begin(), vstack.end(), w);
        if (it != vstack.end()) {
            std::size_t pos = static_cast<std::size_t>(it - vstack.begin());
            std::vector<int> cyc(stack.begin() + static_cast<std::ptrdiff_t>(pos), stack.end());
            cyc.push_back(arc);
            cycles.push_back(std::move(cyc));
            stack.resize(pos);
            vstack.resize(pos + 1);
        } else {
            stack.push_back(arc);
            vstack.push_back(w);
        }
    }
    return {stack, cycles};
}

}  // namespace gmnf

#endif
