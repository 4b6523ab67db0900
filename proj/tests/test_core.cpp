#include <doctest.h>

#include "gmnf/generator.hpp"
#include "gmnf/oracle.hpp"
#include "gmnf/rng.hpp"
#include "gmnf/validate.hpp"

using namespace gmnf;

namespace {

// Triangle v0 -> v1 -> v2 -> v0 with per-edge magnitudes given as
// {|a_tail|, |a_head|} pairs; unit costs/capacities, zero balance.
GmnfInstance<Rat> triangle(std::vector<std::pair<long, long>> coeffs) {
    GmnfInstance<Rat> inst;
    inst.graph = DirectedGraph(3, {{0, 1}, {1, 2}, {2, 0}});
    for (auto [t, h] : coeffs) {
        inst.a_tail.push_back(Rat(t));
        inst.a_head.push_back(Rat(-h));
        inst.cost.push_back(Rat(1));
        inst.capacity.push_back(Rat(1));
    }
    inst.balance.assign(3, Rat(0));
    return inst;
}

GmnfInstance<Rat> random_instance(Rng& rng, int n, int m, bool gauge) {
    GeneratorOptions opt;
    opt.n = n;
    opt.m = m;
    opt.seed = rng.next();
    auto inst = generate_instance(opt);
    if (!gauge) {
        // scribble over the gauge structure: random magnitudes
        for (int e = 0; e < inst.m(); ++e) {
            inst.a_tail[static_cast<std::size_t>(e)] = make_rat(rng.range(1, 5), rng.range(1, 2));
            inst.a_head[static_cast<std::size_t>(e)] = -make_rat(rng.range(1, 5), rng.range(1, 2));
        }
    }
    return inst;
}

}  // namespace

TEST_CASE("delta is the magnitude ratio") {
    auto inst = triangle({{1, 1}, {1, 1}, {1, 1}});
    // a_{v1}^{e0} = -6 (head side), a_{v1}^{e1} = 3 (tail side)
    inst.a_head[0] = Rat(-6);
    inst.a_tail[1] = Rat(3);
    CHECK(delta(inst, 1, 1, 0) == make_rat(1, 2));
    CHECK(delta(inst, 1, 0, 0) == 1);

    inst.a_head[0] = Rat(-4);
    inst.a_tail[1] = Rat(1);
    CHECK(delta(inst, 1, 0, 1) == 4);

    CHECK_THROWS_AS(delta(inst, 0, 1, 1), UsageError);  // e1 not incident to v0
}

TEST_CASE("gauge check: unit triangle is balanced with a sound certificate") {
    auto inst = triangle({{1, 1}, {1, 1}, {1, 1}});
    auto res = is_ratio_balanced_gauge(inst);
    CHECK(res.balanced);
    REQUIRE(res.certificate);
    for (int e = 0; e < inst.m(); ++e) {
        const auto& ed = inst.graph.edges[static_cast<std::size_t>(e)];
        CHECK(num::abs(inst.a_tail[static_cast<std::size_t>(e)]) ==
              res.certificate->q[static_cast<std::size_t>(e)] *
                  res.certificate->p[static_cast<std::size_t>(ed.tail)]);
        CHECK(num::abs(inst.a_head[static_cast<std::size_t>(e)]) ==
              res.certificate->q[static_cast<std::size_t>(e)] *
                  res.certificate->p[static_cast<std::size_t>(ed.head)]);
    }
}

TEST_CASE("gauge check: perturbed triangle violates with product 2") {
    auto inst = triangle({{1, 1}, {1, 1}, {1, 1}});
    inst.a_head[0] = Rat(-2);  // a_{v1}^{e0} = -2, all other magnitudes 1
    auto res = is_ratio_balanced_gauge(inst);
    CHECK(!res.balanced);
    REQUIRE(res.violation);
    auto prod = cycle_delta_product(inst, *res.violation);
    CHECK((prod == 2 || prod == make_rat(1, 2)));  // orientation flips the product
    CHECK(prod != 1);
}

TEST_CASE("gauge check: trees and forests are vacuously balanced") {
    GmnfInstance<Rat> inst;
    inst.graph = DirectedGraph(5, {{0, 1}, {1, 2}, {1, 3}});  // vertex 4 isolated
    inst.a_tail = {Rat(3), make_rat(7, 2), Rat(1)};
    inst.a_head = {Rat(-5), make_rat(-1, 3), Rat(-9)};
    inst.cost.assign(3, Rat(1));
    inst.capacity.assign(3, Rat(1));
    inst.balance.assign(5, Rat(0));
    CHECK(is_ratio_balanced_gauge(inst).balanced);
    CHECK(is_ratio_balanced_bruteforce(inst).balanced);
}

TEST_CASE("bruteforce agrees on the triangle examples") {
    auto good = triangle({{1, 1}, {1, 1}, {1, 1}});
    CHECK(is_ratio_balanced_bruteforce(good).balanced);

    auto bad = triangle({{1, 1}, {1, 1}, {1, 1}});
    bad.a_head[0] = Rat(-2);
    auto res = is_ratio_balanced_bruteforce(bad);
    CHECK(!res.balanced);
    REQUIRE(res.violation);
    CHECK(cycle_delta_product(bad, *res.violation) != 1);
}

TEST_CASE("bruteforce: telescoping 4-cycle is balanced") {
    // delta contributions around the cycle: 2 * 1/2 * 3 * 1/3 = 1
    GmnfInstance<Rat> inst;
    inst.graph = DirectedGraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    // gauge q = (1, 2, 1, 3) against p = 1 realizes those ratios
    std::vector<long> q = {1, 2, 1, 3};
    for (int e = 0; e < 4; ++e) {
        inst.a_tail.push_back(Rat(q[static_cast<std::size_t>(e)]));
        inst.a_head.push_back(Rat(-q[static_cast<std::size_t>(e)]));
        inst.cost.push_back(Rat(0));
        inst.capacity.push_back(Rat(1));
    }
    inst.balance.assign(4, Rat(0));
    auto cyc = NondirCycle{{0, 1, 2, 3}, {0, 1, 2, 3}};
    CHECK(cycle_delta_product(inst, cyc) == 1);
    CHECK(is_ratio_balanced_bruteforce(inst).balanced);
    CHECK(is_ratio_balanced_gauge(inst).balanced);
}

TEST_CASE("gauge and bruteforce agree on random graphs") {
    Rng rng(101);
    int balanced_seen = 0, unbalanced_seen = 0;
    for (int trial = 0; trial < 120; ++trial) {
        int n = 3 + rng.below(4);  // up to 6
        int m = n - 1 + rng.below(4);
        bool gauge = rng.coin();
        auto inst = random_instance(rng, n, m, gauge);
        auto fast = is_ratio_balanced_gauge(inst);
        auto slow = is_ratio_balanced_bruteforce(inst);
        CHECK(fast.balanced == slow.balanced);
        if (fast.balanced) {
            ++balanced_seen;
        } else {
            ++unbalanced_seen;
            // violation soundness: reported cycles break the product rule
            CHECK(cycle_delta_product(inst, *fast.violation) != 1);
            CHECK(cycle_delta_product(inst, *slow.violation) != 1);
        }
    }
    CHECK(balanced_seen > 10);
    CHECK(unbalanced_seen > 10);
}

TEST_CASE("validate flags structural problems") {
    GmnfInstance<Rat> inst;
    inst.graph = DirectedGraph(2, {{0, 1}, {1, 0}});
    inst.a_tail = {Rat(1), Rat(-1)};   // second violates the sign convention
    inst.a_head = {Rat(-1), Rat(-1)};
    inst.cost = {Rat(1), Rat(1)};
    inst.capacity = {Rat(1), Rat(-2)};  // negative capacity
    inst.balance = {Rat(0), Rat(0)};
    auto report = validate(inst);
    CHECK(!report.structurally_valid());
    CHECK(report.errors.size() == 2);
    CHECK(!report.ratio_balance);

    auto ok = triangle({{1, 1}, {1, 1}, {1, 1}});
    auto good = validate(ok);
    CHECK(good.structurally_valid());
    CHECK(good.ok());
}

TEST_CASE("validate rejects self-loops and zero coefficients") {
    GmnfInstance<Rat> inst;
    inst.graph = DirectedGraph(2, {{0, 0}, {0, 1}});
    inst.a_tail = {Rat(1), Rat(0)};
    inst.a_head = {Rat(-1), Rat(-1)};
    inst.cost = {Rat(1), Rat(1)};
    inst.capacity = {Rat(1), Rat(1)};
    inst.balance = {Rat(0), Rat(0)};
    auto report = validate(inst);
    CHECK(report.errors.size() == 2);
}

TEST_CASE("generator: gauge construction is ratio-balanced and feasible") {
    Rng seeds(7);
    for (int trial = 0; trial < 25; ++trial) {
        GeneratorOptions opt;
        opt.n = 3 + seeds.below(4);
        opt.m = opt.n - 1 + seeds.below(5);
        opt.seed = seeds.next();
        auto inst = generate_instance(opt);
        auto report = validate(inst);
        CHECK(report.ok());
        if (inst.m() <= caps().oracle_edges) {
            auto oracle = solve_exact(inst);
            CHECK(oracle.status == OracleResult::Status::optimal);
        }
    }
}

TEST_CASE("generator: deterministic in the seed") {
    GeneratorOptions opt;
    opt.n = 4;
    opt.m = 6;
    opt.seed = 42;
    auto a = generate_instance(opt);
    auto b = generate_instance(opt);
    REQUIRE(a.m() == b.m());
    for (int e = 0; e < a.m(); ++e) {
        CHECK(a.graph.edges[static_cast<std::size_t>(e)].tail ==
              b.graph.edges[static_cast<std::size_t>(e)].tail);
        CHECK(a.graph.edges[static_cast<std::size_t>(e)].head ==
              b.graph.edges[static_cast<std::size_t>(e)].head);
        CHECK(a.cost[static_cast<std::size_t>(e)] == b.cost[static_cast<std::size_t>(e)]);
        CHECK(a.capacity[static_cast<std::size_t>(e)] == b.capacity[static_cast<std::size_t>(e)]);
        CHECK(a.a_tail[static_cast<std::size_t>(e)] == b.a_tail[static_cast<std::size_t>(e)]);
    }
    CHECK(a.balance == b.balance);
}

TEST_CASE("generator: unique-optimum retries certify through the oracle") {
    Rng seeds(19);
    for (int trial = 0; trial < 8; ++trial) {
        GeneratorOptions opt;
        opt.n = 3 + seeds.below(3);
        opt.m = opt.n + seeds.below(3);
        opt.seed = seeds.next();
        opt.require_unique = true;
        auto inst = generate_instance(opt);
        CHECK(is_unique(inst));
    }
}

TEST_CASE("generator rejects impossible parameters") {
    GeneratorOptions opt;
    opt.n = 5;
    opt.m = 2;
    CHECK_THROWS_AS(generate_instance(opt), UsageError);
    opt.m = 6;
    opt.capacity_lo = Rat(0);
    CHECK_THROWS_AS(generate_instance(opt), UsageError);
}

TEST_CASE("bruteforce size cap") {
    GeneratorOptions opt;
    opt.n = caps().bruteforce_vertices + 1;
    opt.m = opt.n + 2;
    opt.seed = 5;
    auto inst = generate_instance(opt);
    CHECK_THROWS_AS(is_ratio_balanced_bruteforce(inst), SizeCapError);
}
