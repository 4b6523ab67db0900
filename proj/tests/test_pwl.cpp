#include <doctest.h>

#include <cmath>
#include <vector>

#include "gmnf/pwl.hpp"
#include "gmnf/rng.hpp"

using namespace gmnf;

namespace {

using RP = ConvexPwl<Rat>;
using DP = ConvexPwl<double>;

RP rp(std::vector<std::pair<long, long>> pts) {
    std::vector<RP::Point> out;
    for (auto [z, v] : pts) out.push_back({Rat(z), Rat(v)});
    return RP::from_points(std::move(out));
}

// Random convex PWL on doubles: sorted breakpoints, nondecreasing slopes.
DP random_convex(Rng& rng, int max_segments) {
    int segs = 1 + rng.below(max_segments);
    double z = static_cast<double>(rng.range(-4, 4));
    double v = static_cast<double>(rng.range(-5, 5));
    double slope = static_cast<double>(rng.range(-6, 0));
    std::vector<DP::Point> pts{{z, v}};
    for (int i = 0; i < segs; ++i) {
        double dz = static_cast<double>(rng.range(1, 3)) / 2.0;
        slope += static_cast<double>(rng.range(0, 4)) / 2.0;
        z += dz;
        v += slope * dz;
        pts.push_back({z, v});
    }
    return DP::from_points(std::move(pts));
}

RP random_convex_rat(Rng& rng, int max_segments) {
    int segs = 1 + rng.below(max_segments);
    Rat z = make_rat(rng.range(-4, 4));
    Rat v = make_rat(rng.range(-5, 5));
    Rat slope = make_rat(rng.range(-6, 0), 2);
    std::vector<RP::Point> pts{{z, v}};
    for (int i = 0; i < segs; ++i) {
        Rat dz = make_rat(rng.range(1, 3), 2);
        slope += make_rat(rng.range(0, 4), 2);
        z += dz;
        v += slope * dz;
        pts.push_back({z, v});
    }
    return RP::from_points(std::move(pts));
}

double eval_or_inf(const DP& f, double z) {
    auto v = f.eval(z);
    return v ? *v : std::numeric_limits<double>::infinity();
}

// Independent check of h(s) = min{f(x) + g(s - x)}: exhaustive over a grid
// of x that includes every breakpoint of f and every s - breakpoint of g,
// so the true argmin (always at such a point for convex PWL) is hit
// exactly.
double grid_convolution_min(const DP& f, const DP& g, double s) {
    std::vector<double> xs;
    const int uniform = 10000;
    double lo = f.lo(), hi = f.hi();
    for (int i = 0; i <= uniform; ++i) xs.push_back(lo + (hi - lo) * i / uniform);
    for (const auto& pt : f.points()) xs.push_back(pt.z);
    for (const auto& pt : g.points()) xs.push_back(s - pt.z);
    double best = std::numeric_limits<double>::infinity();
    for (double x : xs) {
        if (x < lo || x > hi) continue;
        best = std::min(best, eval_or_inf(f, x) + eval_or_inf(g, s - x));
    }
    return best;
}

bool is_convex_shape(const DP& f) {
    const auto& pts = f.points();
    for (std::size_t i = 2; i < pts.size(); ++i) {
        double s1 = (pts[i - 1].v - pts[i - 2].v) / (pts[i - 1].z - pts[i - 2].z);
        double s2 = (pts[i].v - pts[i - 1].v) / (pts[i].z - pts[i - 1].z);
        if (s2 < s1 - 1e-9) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("make_edge_cost basics") {
    auto f = make_edge_cost(Rat(5), Rat(2));
    CHECK(f == rp({{0, 0}, {2, 10}}));

    auto g = make_edge_cost(Rat(0), Rat(1));
    CHECK(g == rp({{0, 0}, {1, 0}}));

    auto h = make_edge_cost(Rat(-3), Rat(0));
    CHECK(h.is_point());
    CHECK(h.points()[0].z == 0);
    CHECK(h.points()[0].v == 0);

    CHECK_THROWS_AS(make_edge_cost(Rat(1), Rat(-1)), UsageError);
}

TEST_CASE("affine_precompose examples") {
    auto f = make_edge_cost(Rat(3), Rat(2));
    CHECK(affine_precompose(f, Rat(1), Rat(0)) == f);

    // f(z) = z on [0,1], p=-1, q=1 -> 1-z on [0,1]
    auto lin = rp({{0, 0}, {1, 1}});
    auto reflected = affine_precompose(lin, Rat(-1), Rat(1));
    CHECK(reflected == rp({{0, 1}, {1, 0}}));

    // f(z) = z on [0,2], p=2 -> 2z on [0,1]
    auto stretched = affine_precompose(rp({{0, 0}, {2, 2}}), Rat(2), Rat(0));
    CHECK(stretched == rp({{0, 0}, {1, 2}}));

    CHECK_THROWS_AS(affine_precompose(lin, Rat(0), Rat(1)), UsageError);
}

TEST_CASE("affine_precompose round trip") {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        auto f = random_convex_rat(rng, 6);
        Rat p = make_rat(rng.range(1, 5) * (rng.coin() ? 1 : -1), rng.range(1, 3));
        Rat q = make_rat(rng.range(-4, 4), rng.range(1, 2));
        auto back = affine_precompose(affine_precompose(f, p, q), 1 / p, -q / p);
        CHECK(back == f);
    }
}

TEST_CASE("add examples") {
    auto id = rp({{0, 0}, {1, 1}});
    auto zero = RP::zero(Rat(0), Rat(1));
    CHECK(add(zero, id) == id);

    auto sum = add(id, rp({{0, 0}, {1, 2}}));
    CHECK(sum == rp({{0, 0}, {1, 3}}));

    // disjoint domains -> Infeasible
    auto far = rp({{2, 0}, {3, 1}});
    CHECK(add(id, far).is_infeasible());

    // touching domains -> point mass
    auto touch = rp({{1, 4}, {3, 5}});
    auto pt = add(id, touch);
    CHECK(pt.is_point());
    CHECK(pt.points()[0].v == 5);
}

TEST_CASE("inf_convolve slope merge") {
    auto h = inf_convolve(rp({{0, 0}, {1, 1}}), rp({{0, 0}, {1, 2}}));
    CHECK(h == rp({{0, 0}, {1, 1}, {2, 3}}));

    // point mass translates
    auto mass = RP::point(Rat(3), Rat(7));
    auto g = rp({{0, 0}, {2, 4}});
    auto shifted = inf_convolve(mass, g);
    CHECK(shifted == rp({{3, 7}, {5, 11}}));

    CHECK(inf_convolve(RP::infeasible(), g).is_infeasible());
}

TEST_CASE("inf_convolve matches grid oracle") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        auto f = random_convex(rng, 8);
        auto g = random_convex(rng, 8);
        auto h = inf_convolve(f, g);
        REQUIRE(!h.is_infeasible());
        for (int k = 0; k <= 20; ++k) {
            double s = h.lo() + (h.hi() - h.lo()) * k / 20.0;
            double expect = grid_convolution_min(f, g, s);
            double got = eval_or_inf(h, s);
            CHECK(std::fabs(expect - got) < 1e-6);
        }
    }
}

TEST_CASE("inf_convolve commutative and associative (exact)") {
    Rng rng(13);
    for (int i = 0; i < 60; ++i) {
        auto a = random_convex_rat(rng, 5);
        auto b = random_convex_rat(rng, 5);
        auto c = random_convex_rat(rng, 5);
        CHECK(inf_convolve(a, b) == inf_convolve(b, a));
        CHECK(inf_convolve(inf_convolve(a, b), c) == inf_convolve(a, inf_convolve(b, c)));
    }
}

TEST_CASE("min_value examples") {
    auto inc = make_edge_cost(Rat(5), Rat(2));
    auto mn = min_value(inc);
    REQUIRE(mn);
    CHECK(mn->value == 0);
    CHECK(mn->arg_lo == 0);
    CHECK(mn->arg_hi == 0);

    auto vee = rp({{0, 1}, {1, 0}, {2, 1}});
    mn = min_value(vee);
    CHECK(mn->value == 0);
    CHECK(mn->arg_lo == 1);
    CHECK(mn->arg_hi == 1);

    auto flat = rp({{0, 3}, {1, 3}});
    mn = min_value(flat);
    CHECK(mn->value == 3);
    CHECK(mn->arg_lo == 0);
    CHECK(mn->arg_hi == 1);

    CHECK(!min_value(RP::infeasible()));
}

TEST_CASE("normalize examples") {
    auto f = rp({{0, 7}, {1, 12}});  // 5z + 7
    CHECK(normalize(f) == rp({{0, 0}, {1, 5}}));
    CHECK(normalize(normalize(f)) == normalize(f));

    auto vee = rp({{0, 5}, {1, 4}, {2, 5}});  // |z-1| + 4
    auto norm = normalize(vee);
    CHECK(norm == rp({{0, 1}, {1, 0}, {2, 1}}));
    auto before = min_value(vee);
    auto after = min_value(norm);
    CHECK(before->arg_lo == after->arg_lo);
    CHECK(before->arg_hi == after->arg_hi);
}

TEST_CASE("operations preserve convexity and canonical form") {
    Rng rng(17);
    for (int i = 0; i < 120; ++i) {
        auto f = random_convex(rng, 6);
        auto g = random_convex(rng, 6);
        CHECK(is_convex_shape(add(f, g)));
        CHECK(is_convex_shape(inf_convolve(f, g)));
        CHECK(is_convex_shape(affine_precompose(f, rng.coin() ? 0.5 : -2.0, 1.0)));
        CHECK(is_convex_shape(normalize(f)));
    }
    // collinear interior points are removed
    auto collinear = rp({{0, 0}, {1, 1}, {2, 2}});
    CHECK(collinear.size() == 2);
}

TEST_CASE("breakpoint cap is enforced") {
    auto& limit = caps().pwl_breakpoints;
    auto saved = limit;
    limit = 8;
    Rng rng(23);
    CHECK_THROWS_AS(
        [&] {
            auto acc = random_convex_rat(rng, 4);
            for (int i = 0; i < 64; ++i) acc = inf_convolve(acc, random_convex_rat(rng, 4));
            return acc;
        }(),
        SizeCapError);
    limit = saved;
}
