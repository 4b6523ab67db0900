#ifndef GMNF_TREE_HPP
#define GMNF_TREE_HPP

#include <optional>
#include <utility>
#include <vector>

#include "gmnf/bp.hpp"
#include "gmnf/caps.hpp"
#include "gmnf/instance.hpp"
#include "gmnf/pwl.hpp"

namespace gmnf {

// Unwrapped tree T_e^N: root edge at depth 0, every node below level N a
// local copy of its base vertex (incident tree edges biject with the base
// incidence list), level-N nodes leaves. Gamma maps are stored per node and
// per edge.
struct ComputationTree {
    struct Node {
        int base_vertex = -1;
        int level = 0;
        int parent_edge = -1;  // tree-edge id; -1 for the two root nodes
    };
    struct Edge {
        int tail_node = -1;
        int head_node = -1;      // direction matches the base edge
        int base_edge = -1;
        int child_node = -1;     // endpoint farther from the root edge; -1 for the root edge
    };

    int depth = 0;
    int base_root_edge = -1;
    std::vector<Node> nodes;                   // 0 and 1 are the root endpoints
    std::vector<Edge> edges;                   // 0 is the root edge
    std::vector<std::vector<int>> node_edges;  // incident tree-edge ids per node

    int root_edge() const { return 0; }
};

// Inductive construction; children are attached in base-edge-id order so
// trees are reproducible.
template <class Num>
ComputationTree build_tree(const GmnfInstance<Num>& inst, int base_edge, int depth) {
    if (base_edge < 0 || base_edge >= inst.m()) throw UsageError("build_tree: bad edge id");
    if (depth < 0) throw UsageError("build_tree: negative depth");
    const auto& g = inst.graph;

    ComputationTree tree;
    tree.depth = depth;
    tree.base_root_edge = base_edge;
    const auto& root = g.edges[static_cast<std::size_t>(base_edge)];
    tree.nodes.push_back({root.tail, 0, -1});
    tree.nodes.push_back({root.head, 0, -1});
    tree.edges.push_back({0, 1, base_edge, -1});
    tree.node_edges.assign(2, {0});

    struct Pending {
        int node;
        int via_base_edge;
    };
    std::vector<Pending> frontier = {{0, base_edge}, {1, base_edge}};
    for (int level = 1; level <= depth && !frontier.empty(); ++level) {
        std::vector<Pending> next;
        for (const auto& [u_node, via] : frontier) {
            int u_base = tree.nodes[static_cast<std::size_t>(u_node)].base_vertex;
            for (int e : g.incident[static_cast<std::size_t>(u_base)]) {
                if (e == via) continue;
                if (static_cast<std::int64_t>(tree.nodes.size()) >= caps().tree_nodes)
                    throw SizeCapError("computation tree node cap exceeded");
                const auto& ed = g.edges[static_cast<std::size_t>(e)];
                int w_base = g.other_end(e, u_base);
                int w_node = static_cast<int>(tree.nodes.size());
                int t_edge = static_cast<int>(tree.edges.size());
                tree.nodes.push_back({w_base, level, t_edge});
                tree.node_edges.push_back({t_edge});
                if (ed.tail == u_base)
                    tree.edges.push_back({u_node, w_node, e, w_node});
                else
                    tree.edges.push_back({w_node, u_node, e, w_node});
                tree.node_edges[static_cast<std::size_t>(u_node)].push_back(t_edge);
                next.push_back({w_node, e});
            }
        }
        frontier = std::move(next);
    }
    return tree;
}

// The induced problem: the tree as a GMNF instance, with balance rows only
// at nodes of level < N (`has_balance`).
template <class Num>
struct TreeProblem {
    GmnfInstance<Num> instance;
    std::vector<bool> has_balance;
};

template <class Num>
TreeProblem<Num> induced_problem(const ComputationTree& tree, const GmnfInstance<Num>& base) {
    TreeProblem<Num> prob;
    std::vector<std::pair<int, int>> arcs;
    arcs.reserve(tree.edges.size());
    for (const auto& te : tree.edges) arcs.emplace_back(te.tail_node, te.head_node);
    prob.instance.graph = DirectedGraph(static_cast<int>(tree.nodes.size()), std::move(arcs));
    for (const auto& te : tree.edges) {
        const auto e = static_cast<std::size_t>(te.base_edge);
        prob.instance.cost.push_back(base.cost[e]);
        prob.instance.capacity.push_back(base.capacity[e]);
        prob.instance.a_tail.push_back(base.a_tail[e]);
        prob.instance.a_head.push_back(base.a_head[e]);
    }
    for (const auto& node : tree.nodes) {
        prob.instance.balance.push_back(base.balance[static_cast<std::size_t>(node.base_vertex)]);
        prob.has_balance.push_back(node.level < tree.depth);
    }
    return prob;
}

template <class Num>
struct TreeSolveResult {
    bool infeasible = false;
    Num value;
    std::vector<Num> flow;   // per tree edge
    Num root_lo, root_hi;    // argmin interval of the root-edge value function
};

namespace detail {

// x minimizing A(x) + B(s - x); both operands convex PWL.
template <class Num>
Num split_convolution(const ConvexPwl<Num>& a, const ConvexPwl<Num>& b, const Num& s) {
    auto reflected = affine_precompose(b, num::from_int<Num>(-1), s);
    auto total = add(a, reflected);
    auto mn = min_value(total);
    if (!mn) throw UsageError("split_convolution: infeasible split");
    return mn->arg_lo;
}

}  // namespace detail

// Exact optimum of the induced problem by leaf-to-root dynamic programming
// over the same PWL algebra BP uses, then a root-to-leaf argmin extraction.
// V(edge) is the subtree cost as a function of the edge's flow:
//   V = phi_e                                   at an unconstrained child,
//   V = phi_e + G(f - a z), G = fold of childs' V(s / a)   otherwise.
template <class Num>
TreeSolveResult<Num> solve_tree(const ComputationTree& tree, const TreeProblem<Num>& prob) {
    const auto& inst = prob.instance;
    const int edge_count = static_cast<int>(tree.edges.size());
    std::vector<ConvexPwl<Num>> value(static_cast<std::size_t>(edge_count));
    // children folds kept for the extraction pass: per node, suffix
    // convolutions of the reparametrized child value functions
    std::vector<std::vector<int>> child_edges(tree.nodes.size());
    std::vector<std::vector<ConvexPwl<Num>>> child_g(tree.nodes.size());
    std::vector<std::vector<ConvexPwl<Num>>> suffix(tree.nodes.size());

    auto phi_of = [&](int te) {
        return make_edge_cost(inst.cost[static_cast<std::size_t>(te)],
                              inst.capacity[static_cast<std::size_t>(te)]);
    };

    auto fold_node = [&](int node) {
        // gather child edges (all incident except the parent/root edge)
        auto& ce = child_edges[static_cast<std::size_t>(node)];
        int parent = tree.nodes[static_cast<std::size_t>(node)].parent_edge;
        if (node <= 1) parent = tree.root_edge();
        for (int te : tree.node_edges[static_cast<std::size_t>(node)])
            if (te != parent) ce.push_back(te);
        auto& gs = child_g[static_cast<std::size_t>(node)];
        for (int te : ce) {
            Num a = inst.coeff(node, te);
            gs.push_back(affine_precompose(value[static_cast<std::size_t>(te)], 1 / a,
                                           num::from_int<Num>(0)));
        }
        auto& suf = suffix[static_cast<std::size_t>(node)];
        suf.assign(gs.size() + 1, ConvexPwl<Num>::point(num::from_int<Num>(0), num::from_int<Num>(0)));
        for (std::size_t i = gs.size(); i-- > 0;) suf[i] = inf_convolve(gs[i], suf[i + 1]);
        return suf.front();
    };

    // leaf-to-root: nodes were created level by level, so reverse creation
    // order visits children first
    for (int node = static_cast<int>(tree.nodes.size()) - 1; node >= 2; --node) {
        int te = tree.nodes[static_cast<std::size_t>(node)].parent_edge;
        if (!prob.has_balance[static_cast<std::size_t>(node)]) {
            value[static_cast<std::size_t>(te)] = phi_of(te);
            continue;
        }
        auto folded = fold_node(node);
        auto constrained = affine_precompose(folded, -inst.coeff(node, te),
                                             inst.balance[static_cast<std::size_t>(node)]);
        value[static_cast<std::size_t>(te)] = add(phi_of(te), constrained);
    }

    auto root_fn = phi_of(tree.root_edge());
    for (int side : {0, 1}) {
        if (!prob.has_balance[static_cast<std::size_t>(side)]) continue;  // depth 0
        auto folded = fold_node(side);
        auto constrained = affine_precompose(folded, -inst.coeff(side, tree.root_edge()),
                                             inst.balance[static_cast<std::size_t>(side)]);
        root_fn = add(root_fn, constrained);
    }

    TreeSolveResult<Num> result;
    auto mn = min_value(root_fn);
    if (!mn) {
        result.infeasible = true;
        return result;
    }
    result.value = mn->value;
    result.root_lo = mn->arg_lo;
    result.root_hi = mn->arg_hi;

    // argmin extraction: descend with each node's contribution target,
    // splitting suffix convolutions left to right
    result.flow.assign(static_cast<std::size_t>(edge_count), num::from_int<Num>(0));
    result.flow[0] = mn->arg_lo;
    std::vector<std::pair<int, Num>> agenda;  // (node, flow on its parent-side edge)
    for (int side : {0, 1})
        if (prob.has_balance[static_cast<std::size_t>(side)]) agenda.emplace_back(side, mn->arg_lo);
    while (!agenda.empty()) {
        auto [node, parent_flow] = agenda.back();
        agenda.pop_back();
        int parent = node <= 1 ? tree.root_edge()
                               : tree.nodes[static_cast<std::size_t>(node)].parent_edge;
        Num target = inst.balance[static_cast<std::size_t>(node)] -
                     inst.coeff(node, parent) * parent_flow;
        const auto& ce = child_edges[static_cast<std::size_t>(node)];
        const auto& gs = child_g[static_cast<std::size_t>(node)];
        const auto& suf = suffix[static_cast<std::size_t>(node)];
        for (std::size_t i = 0; i < ce.size(); ++i) {
            Num contribution = i + 1 < ce.size()
                                   ? detail::split_convolution(gs[i], suf[i + 1], target)
                                   : target;
            target -= contribution;
            int te = ce[i];
            Num flow = contribution / inst.coeff(node, te);
            result.flow[static_cast<std::size_t>(te)] = flow;
            int child = tree.edges[static_cast<std::size_t>(te)].child_node;
            if (prob.has_balance[static_cast<std::size_t>(child)] &&
                !child_edges[static_cast<std::size_t>(child)].empty())
                agenda.emplace_back(child, flow);
        }
    }
    return result;
}

template <class Num>
struct Lemma3Report {
    bool holds = false;
    Num bp_estimate;          // decoded x-hat for the root edge
    Num bp_lo, bp_hi;         // BP belief argmin interval
    Num tree_lo, tree_hi;     // tree-problem root argmin interval
};

// Runs BP for N iterations and verifies the decoded root-edge value lies in
// the root argmin interval of the solved induced problem (membership in the
// projected optimal face is exactly the lemma's existential claim).
template <class Num>
Lemma3Report<Num> check_lemma3(const GmnfInstance<Num>& inst, int base_edge, int depth,
                               BeliefConvention convention = BeliefConvention::count_phi_once,
                               TieRule rule = TieRule::midpoint) {
    if (depth < 1) throw UsageError("check_lemma3: depth must be >= 1");
    BpStopping stop;
    stop.mode = BpStopping::Mode::fixed;
    stop.fixed_n = depth;
    auto bp = run(inst, stop, convention, rule);
    if (bp.infeasible) throw UsageError("check_lemma3: BP beliefs infeasible");

    auto tree = build_tree(inst, base_edge, depth);
    auto prob = induced_problem(tree, inst);
    auto solved = solve_tree(tree, prob);
    if (solved.infeasible) throw UsageError("check_lemma3: induced tree problem infeasible");

    Lemma3Report<Num> report;
    report.bp_estimate = bp.flow[static_cast<std::size_t>(base_edge)];
    report.bp_lo = bp.argmin[static_cast<std::size_t>(base_edge)].first;
    report.bp_hi = bp.argmin[static_cast<std::size_t>(base_edge)].second;
    report.tree_lo = solved.root_lo;
    report.tree_hi = solved.root_hi;
    report.holds = num::le(solved.root_lo, report.bp_estimate) &&
                   num::le(report.bp_estimate, solved.root_hi);
    return report;
}

}  // namespace gmnf

#endif
