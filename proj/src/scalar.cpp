#include "gmnf/scalar.hpp"

#include <cctype>

namespace gmnf::num {

Rat parse_rat(const std::string& text) {
    if (text.empty()) throw UsageError("empty number");
    auto bad = [&] { throw UsageError("unparsable rational: " + text); };

    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Rat r;
        if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0) bad();
        if (r.get_den() == 0) throw UsageError("rational with zero denominator: " + text);
        r.canonicalize();
        return r;
    }

    // Decimal form: [sign] digits [. digits] [e [sign] digits]
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') neg = text[i++] == '-';
    std::string digits;
    long frac_digits = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_dot) ++frac_digits;
            seen_digit = true;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if ((c == 'e' || c == 'E') && seen_digit) {
            break;
        } else {
            bad();
        }
    }
    long exp10 = 0;
    if (i < text.size()) {  // exponent part
        ++i;
        bool eneg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) eneg = text[i++] == '-';
        if (i >= text.size()) bad();
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) bad();
            exp10 = exp10 * 10 + (text[i] - '0');
            if (exp10 > 100000) bad();
        }
        if (eneg) exp10 = -exp10;
    }
    if (!seen_digit) bad();

    mpz_class mantissa(digits.empty() ? "0" : digits, 10);
    Rat r(mantissa);
    long shift = exp10 - frac_digits;
    if (shift != 0) {
        mpz_class pow10;
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
        if (shift > 0)
            r *= Rat(pow10);
        else
            r /= Rat(pow10);
    }
    if (neg) r = -r;
    r.canonicalize();
    return r;
}

}  // namespace gmnf::num
