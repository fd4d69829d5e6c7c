#pragma once

// Exact rational scalars. All verdicts that gate a construction are decided
// in this arithmetic; floating point only ever appears in numeric enclosures
// and rendering. Backed by boost::multiprecision (arbitrary precision, always
// canonical: reduced, denominator > 0).

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace repsys {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses "p/q" or "p" (optional sign, q > 0 after reduction).
inline Rational parse_rational(std::string_view text) {
    const auto bad = [&] { return Error("invalid rational: '" + std::string(text) + "'"); };
    if (text.empty()) throw bad();
    const auto slash = text.find('/');
    const auto is_int = [](std::string_view s) {
        if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
        if (s.empty()) return false;
        for (char c : s)
            if (c < '0' || c > '9') return false;
        return true;
    };
    try {
        if (slash == std::string_view::npos) {
            if (!is_int(text)) throw bad();
            return Rational(BigInt{std::string(text)});
        }
        const auto num = text.substr(0, slash);
        const auto den = text.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) throw bad();
        BigInt p{std::string(num)};
        BigInt q{std::string(den)};
        if (q == 0) throw bad();
        return Rational(p, q);
    } catch (const std::exception&) {
        throw bad();
    }
}

/// Renders canonically: "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact dyadic rational of a finite double.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw Error("rational_from_double: non-finite value");
    return Rational(x);
}

}  // namespace repsys
