#ifndef GMNF_GENERATOR_HPP
#define GMNF_GENERATOR_HPP

#include <utility>
#include <vector>

#include "gmnf/instance.hpp"
#include "gmnf/oracle.hpp"
#include "gmnf/rng.hpp"
#include "gmnf/validate.hpp"

namespace gmnf {

struct GeneratorOptions {
    int n = 5;
    int m = 8;
    Rat capacity_lo = 1;
    Rat capacity_hi = 4;
    Rat cost_lo = -3;
    Rat cost_hi = 5;
    std::uint64_t seed = 0;
    bool require_unique = false;
    int max_retries = 12;
    bool unit_coefficients = false;  // all |a_v^e| = 1 (standard flow regression)
    bool tree_only = false;          // acyclic graph (m forced to n-1)
};

// Ratio-balanced, feasible-by-construction instance:
//   (i)   random connected directed graph (spanning tree + extra edges),
//   (ii)  |a_v^e| = q_e * p_v from sampled gauge values (ratio-balance by
//         the gauge criterion), signs by the out/in convention,
//   (iii) balances from a sampled interior flow (feasibility),
//   (iv)  costs from the range, with a deterministic perturbation pass when
//         a unique optimum is requested.
inline GmnfInstance<Rat> generate_instance(const GeneratorOptions& opt) {
    if (opt.n < 2) throw UsageError("generator: need at least 2 vertices");
    int m = opt.tree_only ? opt.n - 1 : opt.m;
    if (m < opt.n - 1) throw UsageError("generator: m < n-1 cannot be connected");
    if (opt.capacity_lo <= 0 || opt.capacity_hi < opt.capacity_lo)
        throw UsageError("generator: capacity range must be positive and nonempty");
    if (opt.cost_hi < opt.cost_lo) throw UsageError("generator: empty cost range");

    Rng rng(opt.seed);

    std::vector<std::pair<int, int>> arcs;
    arcs.reserve(static_cast<std::size_t>(m));
    for (int v = 1; v < opt.n; ++v) {
        int u = rng.below(v);
        if (rng.coin())
            arcs.emplace_back(u, v);
        else
            arcs.emplace_back(v, u);
    }
    while (static_cast<int>(arcs.size()) < m) {
        int u = rng.below(opt.n);
        int v = rng.below(opt.n);
        if (u == v) continue;
        arcs.emplace_back(u, v);
    }

    GmnfInstance<Rat> inst;
    inst.graph = DirectedGraph(opt.n, std::move(arcs));

    // Gauge values. q is biased toward 1 to keep delta ratios tame, which
    // keeps the certification iteration bounds small.
    static const long q_num[] = {1, 1, 1, 1, 2, 1};
    static const long q_den[] = {1, 1, 1, 1, 1, 2};
    static const long p_num[] = {1, 1, 2, 1, 3};
    static const long p_den[] = {1, 1, 1, 2, 1};
    std::vector<Rat> p(static_cast<std::size_t>(opt.n)), q(static_cast<std::size_t>(m));
    for (auto& x : p) {
        int i = rng.below(5);
        x = opt.unit_coefficients ? Rat(1) : make_rat(p_num[i], p_den[i]);
    }
    for (auto& x : q) {
        int i = rng.below(6);
        x = opt.unit_coefficients ? Rat(1) : make_rat(q_num[i], q_den[i]);
    }

    inst.a_tail.resize(static_cast<std::size_t>(m));
    inst.a_head.resize(static_cast<std::size_t>(m));
    inst.cost.resize(static_cast<std::size_t>(m));
    inst.capacity.resize(static_cast<std::size_t>(m));
    for (int e = 0; e < m; ++e) {
        const auto& ed = inst.graph.edges[static_cast<std::size_t>(e)];
        inst.a_tail[static_cast<std::size_t>(e)] =
            q[static_cast<std::size_t>(e)] * p[static_cast<std::size_t>(ed.tail)];
        inst.a_head[static_cast<std::size_t>(e)] =
            -q[static_cast<std::size_t>(e)] * p[static_cast<std::size_t>(ed.head)];
    }

    for (int e = 0; e < m; ++e)
        inst.capacity[static_cast<std::size_t>(e)] = rng.grid(opt.capacity_lo, opt.capacity_hi, 4);

    // Interior flow -> balances.
    std::vector<Rat> interior(static_cast<std::size_t>(m));
    for (int e = 0; e < m; ++e)
        interior[static_cast<std::size_t>(e)] =
            inst.capacity[static_cast<std::size_t>(e)] * make_rat(1 + rng.below(3), 4);
    inst.balance.assign(static_cast<std::size_t>(opt.n), Rat(0));
    for (int v = 0; v < opt.n; ++v)
        for (int e : inst.graph.incident[static_cast<std::size_t>(v)])
            inst.balance[static_cast<std::size_t>(v)] +=
                inst.coeff(v, e) * interior[static_cast<std::size_t>(e)];

    std::vector<Rat> base_cost(static_cast<std::size_t>(m));
    for (auto& c : base_cost) c = rng.grid(opt.cost_lo, opt.cost_hi, 8);
    inst.cost = base_cost;

    if (opt.require_unique) {
        bool unique = is_unique(inst);
        for (int attempt = 0; !unique && attempt < opt.max_retries; ++attempt) {
            for (int e = 0; e < m; ++e) {
                long jitter = rng.range(1, 15) * (rng.coin() ? 1 : -1);
                inst.cost[static_cast<std::size_t>(e)] =
                    base_cost[static_cast<std::size_t>(e)] + make_rat(jitter, 32);
            }
            unique = is_unique(inst);
        }
        if (!unique)
            throw GenerationError("generator: no unique optimum after perturbation retries");
    }
    return inst;
}

}  // namespace gmnf

#endif
