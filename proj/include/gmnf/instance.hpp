#ifndef GMNF_INSTANCE_HPP
#define GMNF_INSTANCE_HPP

#include <string>
#include <vector>

#include "gmnf/graph.hpp"
#include "gmnf/scalar.hpp"

namespace gmnf {

// A generalized min-cost flow instance:
//   minimize   sum_e cost_e * x_e
//   subject to sum_{e in E_v} a_v^e * x_e = balance_v   for all v
//              0 <= x_e <= capacity_e                   for all e
// Coefficients follow the sign convention a_tail > 0, a_head < 0.
template <class Num>
struct GmnfInstance {
    DirectedGraph graph;
    std::vector<Num> cost;
    std::vector<Num> capacity;
    std::vector<Num> a_tail;
    std::vector<Num> a_head;
    std::vector<Num> balance;

    int n() const { return graph.n; }
    int m() const { return graph.m(); }

    const Num& coeff(int v, int e) const {
        const auto& ed = graph.edges[static_cast<std::size_t>(e)];
        if (ed.tail == v) return a_tail[static_cast<std::size_t>(e)];
        if (ed.head == v) return a_head[static_cast<std::size_t>(e)];
        throw UsageError("coeff: edge " + std::to_string(e) + " not incident to vertex " +
                         std::to_string(v));
    }
};

// delta(v, e1, e2) = |a_v^{e1} / a_v^{e2}|, the flow gearing through v.
template <class Num>
Num delta(const GmnfInstance<Num>& inst, int v, int e1, int e2) {
    return num::abs(inst.coeff(v, e1)) / num::abs(inst.coeff(v, e2));
}

template <class Num>
Num objective(const GmnfInstance<Num>& inst, const std::vector<Num>& x) {
    Num total = num::from_int<Num>(0);
    for (int e = 0; e < inst.m(); ++e) total += inst.cost[static_cast<std::size_t>(e)] * x[static_cast<std::size_t>(e)];
    return total;
}

template <class To, class From>
GmnfInstance<To> instance_cast(const GmnfInstance<From>& src) {
    GmnfInstance<To> out;
    out.graph = src.graph;
    auto convert = [](const std::vector<From>& v) {
        std::vector<To> r;
        r.reserve(v.size());
        for (const auto& x : v) r.push_back(num::parse<To>(num::str(x)));
        return r;
    };
    out.cost = convert(src.cost);
    out.capacity = convert(src.capacity);
    out.a_tail = convert(src.a_tail);
    out.a_head = convert(src.a_head);
    out.balance = convert(src.balance);
    return out;
}

}  // namespace gmnf

#endif
