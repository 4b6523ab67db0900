#ifndef GMNF_BP_HPP
#define GMNF_BP_HPP

#include <optional>
#include <utility>
#include <vector>

#include "gmnf/instance.hpp"
#include "gmnf/pwl.hpp"

namespace gmnf {

enum class BeliefConvention {
    count_phi_once,  // b_e = m_{e->v} + m_{e->w} - phi_e (default)
    paper,           // b_e = phi_e + m_{e->v} + m_{e->w}
};

enum class TieRule { midpoint, lower, upper };

// Double-buffered synchronous message state: two directed messages per
// edge, each a convex PWL function with domain inside [0, u_e].
template <class Num>
struct MessageState {
    int t = 0;
    std::vector<ConvexPwl<Num>> to_tail;  // m_{e->tail(e)}
    std::vector<ConvexPwl<Num>> to_head;  // m_{e->head(e)}

    const ConvexPwl<Num>& incoming(const DirectedGraph& g, int e, int at_vertex) const {
        return g.edges[static_cast<std::size_t>(e)].tail == at_vertex
                   ? to_tail[static_cast<std::size_t>(e)]
                   : to_head[static_cast<std::size_t>(e)];
    }
};

// Iteration-0 messages are the edge cost functions phi_e. This pins the
// N-iteration output to the depth-N computation-tree problem with frontier
// edge costs and capacities included (see tree.hpp).
template <class Num>
MessageState<Num> initial_state(const GmnfInstance<Num>& inst, bool do_normalize = true) {
    MessageState<Num> state;
    state.to_tail.reserve(static_cast<std::size_t>(inst.m()));
    for (int e = 0; e < inst.m(); ++e) {
        auto phi = make_edge_cost(inst.cost[static_cast<std::size_t>(e)],
                                  inst.capacity[static_cast<std::size_t>(e)]);
        state.to_tail.push_back(do_normalize ? normalize(phi) : phi);
    }
    state.to_head = state.to_tail;
    return state;
}

// One min-sum update: the message along e toward `toward`, derived from the
// balance constraint at the opposite endpoint w:
//   (i)   reparametrize each incoming m_{e~->w} to its signed contribution
//         s = a_w^{e~} * z via affine precomposition,
//   (ii)  fold with infimal convolution: G(s) = min sum of messages subject
//         to sum of contributions = s,
//   (iii) substitute s = f_w - a_w^e * z (the balance constraint),
//   (iv)  add phi_e, which also clips to [0, u_e],
//   (v)   normalize.
// With no other incident edge, step (ii) is the point mass at 0 and the
// result is phi_e pinned to z = f_w / a_w^e (Infeasible if out of range).
template <class Num>
ConvexPwl<Num> update_message(const GmnfInstance<Num>& inst, const MessageState<Num>& prev,
                              int e, int toward, bool do_normalize = true) {
    const auto& ed = inst.graph.edges[static_cast<std::size_t>(e)];
    if (ed.tail != toward && ed.head != toward)
        throw UsageError("update_message: vertex not an endpoint of edge");
    const int w = ed.tail == toward ? ed.head : ed.tail;

    auto folded = ConvexPwl<Num>::point(num::from_int<Num>(0), num::from_int<Num>(0));
    for (int other : inst.graph.incident[static_cast<std::size_t>(w)]) {
        if (other == e) continue;
        const auto& msg = prev.incoming(inst.graph, other, w);
        Num a = inst.coeff(w, other);
        folded = inf_convolve(folded, affine_precompose(msg, 1 / a, num::from_int<Num>(0)));
    }
    auto constrained = affine_precompose(folded, -inst.coeff(w, e),
                                         inst.balance[static_cast<std::size_t>(w)]);
    auto phi = make_edge_cost(inst.cost[static_cast<std::size_t>(e)],
                              inst.capacity[static_cast<std::size_t>(e)]);
    auto result = add(phi, constrained);
    return do_normalize ? normalize(result) : result;
}

// Fully synchronous iteration: all 2m messages recomputed from the t-1
// buffer only, so the update order is immaterial.
template <class Num>
MessageState<Num> iterate(const GmnfInstance<Num>& inst, const MessageState<Num>& prev,
                          bool do_normalize = true) {
    MessageState<Num> next;
    next.t = prev.t + 1;
    next.to_tail.resize(static_cast<std::size_t>(inst.m()));
    next.to_head.resize(static_cast<std::size_t>(inst.m()));
    for (int e = 0; e < inst.m(); ++e) {
        const auto& ed = inst.graph.edges[static_cast<std::size_t>(e)];
        next.to_tail[static_cast<std::size_t>(e)] =
            update_message(inst, prev, e, ed.tail, do_normalize);
        next.to_head[static_cast<std::size_t>(e)] =
            update_message(inst, prev, e, ed.head, do_normalize);
    }
    return next;
}

template <class Num>
std::vector<ConvexPwl<Num>> beliefs(const GmnfInstance<Num>& inst, const MessageState<Num>& state,
                                    BeliefConvention convention = BeliefConvention::count_phi_once) {
    if (state.t < 1) throw UsageError("beliefs: requires at least one iteration");
    std::vector<ConvexPwl<Num>> out;
    out.reserve(static_cast<std::size_t>(inst.m()));
    for (int e = 0; e < inst.m(); ++e) {
        auto sum = add(state.to_tail[static_cast<std::size_t>(e)],
                       state.to_head[static_cast<std::size_t>(e)]);
        if (convention == BeliefConvention::count_phi_once) {
            // each message already contains one phi_e summand
            out.push_back(add_linear(sum, -inst.cost[static_cast<std::size_t>(e)]));
        } else {
            auto phi = make_edge_cost(inst.cost[static_cast<std::size_t>(e)],
                                      inst.capacity[static_cast<std::size_t>(e)]);
            out.push_back(add(sum, phi));
        }
    }
    return out;
}

template <class Num>
struct Decoded {
    bool infeasible = false;
    std::vector<Num> flow;                    // empty when infeasible
    std::vector<bool> tie;                    // argmin interval wider than a point
    std::vector<std::pair<Num, Num>> argmin;  // per-edge closed argmin interval
};

template <class Num>
Decoded<Num> decode(const std::vector<ConvexPwl<Num>>& bels, TieRule rule = TieRule::midpoint) {
    Decoded<Num> out;
    out.tie.assign(bels.size(), false);
    for (std::size_t e = 0; e < bels.size(); ++e) {
        auto mn = min_value(bels[e]);
        if (!mn) {
            out.infeasible = true;
            out.flow.clear();
            out.argmin.clear();
            return out;
        }
        out.argmin.emplace_back(mn->arg_lo, mn->arg_hi);
        out.tie[e] = !num::eq(mn->arg_lo, mn->arg_hi);
        switch (rule) {
            case TieRule::lower: out.flow.push_back(mn->arg_lo); break;
            case TieRule::upper: out.flow.push_back(mn->arg_hi); break;
            case TieRule::midpoint:
                out.flow.push_back((mn->arg_lo + mn->arg_hi) / num::from_int<Num>(2));
                break;
        }
    }
    return out;
}

struct BpStopping {
    enum class Mode { fixed, stable };
    Mode mode = Mode::stable;
    int fixed_n = 0;
    int stable_window = 0;  // 0 -> defaults to n
    int max_iterations = 1000;
};

template <class Num>
struct BpResult {
    bool infeasible = false;
    bool converged = false;
    int iterations = 0;
    std::vector<Num> flow;
    std::vector<bool> tie;
    std::vector<std::pair<Num, Num>> argmin;
    MessageState<Num> state;
};

template <class Num>
BpResult<Num> run(const GmnfInstance<Num>& inst, const BpStopping& stopping,
                  BeliefConvention convention = BeliefConvention::count_phi_once,
                  TieRule rule = TieRule::midpoint, bool do_normalize = true) {
    BpResult<Num> result;
    auto state = initial_state(inst, do_normalize);

    if (stopping.mode == BpStopping::Mode::fixed) {
        if (stopping.fixed_n < 1) throw UsageError("run: fixed iteration count must be >= 1");
        for (int t = 0; t < stopping.fixed_n; ++t) state = iterate(inst, state, do_normalize);
        auto dec = decode(beliefs(inst, state, convention), rule);
        result.infeasible = dec.infeasible;
        result.converged = !dec.infeasible;
        result.iterations = state.t;
        result.flow = std::move(dec.flow);
        result.tie = std::move(dec.tie);
        result.argmin = std::move(dec.argmin);
        result.state = std::move(state);
        return result;
    }

    const int window = stopping.stable_window > 0 ? stopping.stable_window : inst.n();
    int streak = 0;
    std::optional<Decoded<Num>> last;
    while (state.t < stopping.max_iterations) {
        state = iterate(inst, state, do_normalize);
        auto dec = decode(beliefs(inst, state, convention), rule);
        bool same = false;
        if (last) {
            if (dec.infeasible || last->infeasible) {
                same = dec.infeasible == last->infeasible;
            } else {
                same = true;
                for (std::size_t e = 0; e < dec.flow.size() && same; ++e)
                    same = num::eq(dec.flow[e], last->flow[e]);
            }
        }
        streak = same ? streak + 1 : 0;
        last = std::move(dec);
        if (streak >= window) {
            result.converged = true;
            break;
        }
    }
    result.iterations = state.t;
    result.infeasible = last && last->infeasible;
    if (last && !last->infeasible) {
        result.flow = std::move(last->flow);
        result.tie = std::move(last->tie);
        result.argmin = std::move(last->argmin);
    }
    result.state = std::move(state);
    return result;
}

}  // namespace gmnf

#endif
