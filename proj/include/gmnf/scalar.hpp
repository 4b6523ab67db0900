#ifndef GMNF_SCALAR_HPP
#define GMNF_SCALAR_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "gmnf/errors.hpp"

namespace gmnf {

// Exact rational scalar. The library is templated on the scalar type; the
// two supported instantiations are Rat (exact) and double (tolerance-based).
using Rat = mpq_class;

inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw UsageError("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

namespace num {

// Absolute tolerance used by all double-mode comparisons.
inline double& float_tolerance() {
    static double tol = 1e-9;
    return tol;
}

inline bool eq(const Rat& a, const Rat& b) { return a == b; }
inline bool eq(double a, double b) { return std::fabs(a - b) <= float_tolerance(); }

inline bool lt(const Rat& a, const Rat& b) { return a < b; }
inline bool lt(double a, double b) { return a < b && !eq(a, b); }

template <class N> bool le(const N& a, const N& b) { return !lt(b, a); }
template <class N> bool gt(const N& a, const N& b) { return lt(b, a); }
template <class N> bool ge(const N& a, const N& b) { return le(b, a); }

inline int sign(const Rat& a) { return sgn(a); }
inline int sign(double a) { return eq(a, 0.0) ? 0 : (a < 0 ? -1 : 1); }

inline Rat abs(const Rat& a) { return ::abs(a); }
inline double abs(double a) { return std::fabs(a); }

template <class N> N from_int(long v) { return N(v); }
template <> inline Rat from_int<Rat>(long v) { return Rat(v); }

inline double to_double(double v) { return v; }
inline double to_double(const Rat& v) { return v.get_d(); }

// Smallest integer >= a, exact for rationals.
inline std::int64_t ceil_int(const Rat& a) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_num().get_mpz_t(), a.get_den().get_mpz_t());
    if (!q.fits_slong_p()) throw UsageError("ceil overflows machine integer");
    return q.get_si();
}
inline std::int64_t ceil_int(double a) {
    return static_cast<std::int64_t>(std::ceil(a - float_tolerance()));
}

inline std::string str(const Rat& a) {
    if (a.get_den() == 1) return a.get_num().get_str();
    return a.get_num().get_str() + "/" + a.get_den().get_str();
}
inline std::string str(double a) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), a);
    return std::string(buf, res.ptr);
}

// Parses "p/q", integers, and decimal strings ("-1.25", "3e2") exactly.
Rat parse_rat(const std::string& text);

template <class N> N parse(const std::string& text);
template <> inline Rat parse<Rat>(const std::string& text) { return parse_rat(text); }
template <> inline double parse<double>(const std::string& text) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        double p = std::stod(text.substr(0, slash));
        double q = std::stod(text.substr(slash + 1));
        if (q == 0) throw UsageError("rational with zero denominator: " + text);
        return p / q;
    }
    try {
        std::size_t pos = 0;
        double v = std::stod(text, &pos);
        if (pos != text.size()) throw UsageError("trailing characters in number: " + text);
        return v;
    } catch (const std::invalid_argument&) {
        throw UsageError("unparsable number: " + text);
    }
}

}  // namespace num
}  // namespace gmnf

#endif
