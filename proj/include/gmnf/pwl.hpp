#ifndef GMNF_PWL_HPP
#define GMNF_PWL_HPP

#include <algorithm>
#include <optional>
#include <type_traits>
#include <vector>

#include "gmnf/caps.hpp"
#include "gmnf/errors.hpp"
#include "gmnf/scalar.hpp"

namespace gmnf {

// Convex piecewise-linear function on a closed interval [lo, hi], +infinity
// outside. The empty breakpoint list is the distinguished Infeasible value
// (+infinity everywhere); a single breakpoint is a point mass. Breakpoint
// abscissas are strictly increasing, slopes nondecreasing, and no interior
// breakpoint is collinear with its neighbors.
template <class Num>
class ConvexPwl {
  public:
    struct Point {
        Num z;
        Num v;
        bool operator==(const Point& o) const { return z == o.z && v == o.v; }
    };

    ConvexPwl() = default;  // Infeasible

    static ConvexPwl infeasible() { return ConvexPwl(); }

    static ConvexPwl point(Num z, Num v) {
        ConvexPwl f;
        f.pts_.push_back({std::move(z), std::move(v)});
        return f;
    }

    static ConvexPwl zero(const Num& lo, const Num& hi) {
        return linear(num::from_int<Num>(0), lo, hi);
    }

    static ConvexPwl linear(const Num& slope, const Num& lo, const Num& hi) {
        if (num::lt(hi, lo)) throw UsageError("pwl: empty domain");
        if (num::eq(lo, hi)) return point(lo, slope * lo);
        ConvexPwl f;
        f.pts_.push_back({lo, slope * lo});
        f.pts_.push_back({hi, slope * hi});
        return f;
    }

    // Assumes points sorted by strictly increasing z; removes collinear
    // interior points and checks convexity.
    static ConvexPwl from_points(std::vector<Point> pts) {
        ConvexPwl f;
        f.pts_ = std::move(pts);
        f.canonicalize();
        return f;
    }

    bool is_infeasible() const { return pts_.empty(); }
    bool is_point() const { return pts_.size() == 1; }
    const Num& lo() const { return pts_.front().z; }
    const Num& hi() const { return pts_.back().z; }
    const std::vector<Point>& points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }

    bool operator==(const ConvexPwl& o) const { return pts_ == o.pts_; }

    // Value at z, or nullopt outside the domain (or if Infeasible).
    std::optional<Num> eval(const Num& z) const {
        if (pts_.empty() || num::lt(z, lo()) || num::lt(hi(), z)) return std::nullopt;
        if (pts_.size() == 1) return pts_.front().v;
        // last breakpoint with z_i <= z
        std::size_t idx = 0;
        for (std::size_t i = 1; i < pts_.size(); ++i) {
            if (num::le(pts_[i].z, z)) idx = i;
            else break;
        }
        if (idx + 1 == pts_.size()) return pts_.back().v;
        const auto& a = pts_[idx];
        const auto& b = pts_[idx + 1];
        Num slope = (b.v - a.v) / (b.z - a.z);
        return a.v + slope * (z - a.z);
    }

  private:
    std::vector<Point> pts_;

    void canonicalize() {
        if (pts_.empty()) return;
        if (static_cast<std::int64_t>(pts_.size()) > caps().pwl_breakpoints)
            throw SizeCapError("pwl breakpoint cap exceeded");
        for (std::size_t i = 1; i < pts_.size(); ++i)
            if (!num::lt(pts_[i - 1].z, pts_[i].z))
                throw UsageError("pwl: breakpoints not strictly increasing");
        if (pts_.size() <= 2) return;
        std::vector<Point> out;
        out.reserve(pts_.size());
        out.push_back(pts_.front());
        for (std::size_t i = 1; i + 1 < pts_.size(); ++i) {
            const auto& a = out.back();
            const auto& b = pts_[i];
            const auto& c = pts_[i + 1];
            // keep b unless (a,b,c) are collinear: (b.v-a.v)*(c.z-b.z) == (c.v-b.v)*(b.z-a.z)
            Num lhs = (b.v - a.v) * (c.z - b.z);
            Num rhs = (c.v - b.v) * (b.z - a.z);
            if (!num::eq(lhs, rhs)) out.push_back(b);
        }
        out.push_back(pts_.back());
        pts_ = std::move(out);
        // convexity: slopes nondecreasing
        for (std::size_t i = 2; i < pts_.size(); ++i) {
            Num s1 = (pts_[i - 1].v - pts_[i - 2].v) / (pts_[i - 1].z - pts_[i - 2].z);
            Num s2 = (pts_[i].v - pts_[i - 1].v) / (pts_[i].z - pts_[i - 1].z);
            if (num::lt(s2, s1)) throw UsageError("pwl: convexity violated");
        }
    }
};

// phi_e: z -> cost*z on [0, capacity].
template <class Num>
ConvexPwl<Num> make_edge_cost(const Num& cost, const std::type_identity_t<Num>& capacity) {
    if (num::lt(capacity, num::from_int<Num>(0))) throw UsageError("negative capacity");
    return ConvexPwl<Num>::linear(cost, num::from_int<Num>(0), capacity);
}

// h(z) = f(p*z + q), p != 0. Domain maps to [(lo-q)/p, (hi-q)/p], reversed
// when p < 0; convexity is preserved (slopes scale by p, order flips with
// the sign so the merged sequence stays nondecreasing).
template <class Num>
ConvexPwl<Num> affine_precompose(const ConvexPwl<Num>& f, const std::type_identity_t<Num>& p,
                                 const std::type_identity_t<Num>& q) {
    if (num::sign(p) == 0) throw UsageError("affine_precompose: p must be nonzero");
    if (f.is_infeasible()) return f;
    std::vector<typename ConvexPwl<Num>::Point> pts;
    pts.reserve(f.size());
    for (const auto& pt : f.points()) pts.push_back({(pt.z - q) / p, pt.v});
    if (num::sign(p) < 0) std::reverse(pts.begin(), pts.end());
    return ConvexPwl<Num>::from_points(std::move(pts));
}

// Pointwise sum on the domain intersection; Infeasible when disjoint.
template <class Num>
ConvexPwl<Num> add(const ConvexPwl<Num>& f, const ConvexPwl<Num>& g) {
    if (f.is_infeasible() || g.is_infeasible()) return ConvexPwl<Num>::infeasible();
    Num lo = num::lt(f.lo(), g.lo()) ? g.lo() : f.lo();
    Num hi = num::lt(g.hi(), f.hi()) ? g.hi() : f.hi();
    if (num::lt(hi, lo)) return ConvexPwl<Num>::infeasible();
    if (num::eq(lo, hi)) {
        auto fv = f.eval(lo), gv = g.eval(lo);
        return ConvexPwl<Num>::point(lo, *fv + *gv);
    }
    std::vector<Num> zs;
    zs.push_back(lo);
    for (const auto& pt : f.points())
        if (num::lt(lo, pt.z) && num::lt(pt.z, hi)) zs.push_back(pt.z);
    for (const auto& pt : g.points())
        if (num::lt(lo, pt.z) && num::lt(pt.z, hi)) zs.push_back(pt.z);
    zs.push_back(hi);
    std::sort(zs.begin(), zs.end());  // exact order; tolerance only guards dedup below
    std::vector<typename ConvexPwl<Num>::Point> pts;
    pts.reserve(zs.size());
    for (const auto& z : zs) {
        if (!pts.empty() && !num::lt(pts.back().z, z)) continue;  // drop duplicates
        pts.push_back({z, *f.eval(z) + *g.eval(z)});
    }
    return ConvexPwl<Num>::from_points(std::move(pts));
}

// h(z) = f(z) + slope*z on the same domain.
template <class Num>
ConvexPwl<Num> add_linear(const ConvexPwl<Num>& f, const std::type_identity_t<Num>& slope) {
    if (f.is_infeasible()) return f;
    std::vector<typename ConvexPwl<Num>::Point> pts;
    pts.reserve(f.size());
    for (const auto& pt : f.points()) pts.push_back({pt.z, pt.v + slope * pt.z});
    return ConvexPwl<Num>::from_points(std::move(pts));
}

// Infimal convolution h(s) = min{ f(x) + g(y) : x + y = s }. Exact for
// convex operands: concatenate both segment lists in nondecreasing slope
// order starting from (lo_f + lo_g, f(lo_f) + g(lo_g)).
template <class Num>
ConvexPwl<Num> inf_convolve(const ConvexPwl<Num>& f, const ConvexPwl<Num>& g) {
    if (f.is_infeasible() || g.is_infeasible()) return ConvexPwl<Num>::infeasible();
    struct Seg {
        Num slope, dz;
    };
    std::vector<Seg> segs;
    segs.reserve(f.size() + g.size());
    auto collect = [&segs](const ConvexPwl<Num>& h) {
        const auto& pts = h.points();
        for (std::size_t i = 1; i < pts.size(); ++i) {
            Num dz = pts[i].z - pts[i - 1].z;
            segs.push_back({(pts[i].v - pts[i - 1].v) / dz, dz});
        }
    };
    collect(f);
    collect(g);
    std::stable_sort(segs.begin(), segs.end(),
                     [](const Seg& a, const Seg& b) { return a.slope < b.slope; });
    std::vector<typename ConvexPwl<Num>::Point> pts;
    pts.reserve(segs.size() + 1);
    Num z = f.lo() + g.lo();
    Num v = f.points().front().v + g.points().front().v;
    pts.push_back({z, v});
    for (const auto& s : segs) {
        z = z + s.dz;
        v = v + s.slope * s.dz;
        pts.push_back({z, v});
    }
    return ConvexPwl<Num>::from_points(std::move(pts));
}

template <class Num>
struct PwlMin {
    Num value;
    Num arg_lo;  // argmin is a closed interval by convexity
    Num arg_hi;
};

// Exact minimum and the full argmin interval; nullopt iff Infeasible.
template <class Num>
std::optional<PwlMin<Num>> min_value(const ConvexPwl<Num>& f) {
    if (f.is_infeasible()) return std::nullopt;
    const auto& pts = f.points();
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (num::lt(pts[i].v, pts[best].v)) best = i;
    std::size_t first = best, last = best;
    while (first > 0 && num::eq(pts[first - 1].v, pts[best].v)) --first;
    while (last + 1 < pts.size() && num::eq(pts[last + 1].v, pts[best].v)) ++last;
    return PwlMin<Num>{pts[best].v, pts[first].z, pts[last].z};
}

// f minus its minimum; argmin set unchanged. Infeasible passes through.
template <class Num>
ConvexPwl<Num> normalize(const ConvexPwl<Num>& f) {
    auto mn = min_value(f);
    if (!mn) return f;
    if (num::sign(mn->value) == 0) return f;
    std::vector<typename ConvexPwl<Num>::Point> pts;
    pts.reserve(f.size());
    for (const auto& pt : f.points()) pts.push_back({pt.z, pt.v - mn->value});
    return ConvexPwl<Num>::from_points(std::move(pts));
}

}  // namespace gmnf

#endif
