#pragma once

// Exact integer and rational arithmetic used throughout the kernel.
// All error bounds in this library are exact claims, so no floating
// point appears anywhere below this line.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

#include "errors.hpp"

namespace cohsp {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int int_pow2(unsigned n) {
    Int one = 1;
    return one << n;
}

// 2^-n as an exact rational.
inline Rat rat_pow2_neg(unsigned n) {
    return Rat(1, int_pow2(n));
}

inline Rat rat_of_dyadic(const Int& m, unsigned level) {
    return Rat(m, int_pow2(level));
}

inline Int rat_floor(const Rat& r) {
    Int n = numerator(r), d = denominator(r);
    Int q = n / d;
    if (n < 0 && q * d != n) --q;
    return q;
}

inline Int rat_ceil(const Rat& r) { return -rat_floor(-r); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// Nearest integer to r, ties resolved toward the even integer.
inline Int round_nearest_even(const Rat& r) {
    Int lo = rat_floor(r);
    Rat frac = r - Rat(lo);
    if (frac < Rat(1, 2)) return lo;
    if (frac > Rat(1, 2)) return lo + 1;
    return (lo % 2 == 0) ? lo : lo + 1;
}

// Numerator m of the level-n dyadic m/2^n nearest to r (ties toward even m).
inline Int nearest_dyadic_num(const Rat& r, unsigned level) {
    return round_nearest_even(r * Rat(int_pow2(level)));
}

// Floor of the integer square root; argument must be >= 0.
inline Int int_isqrt(const Int& n) {
    if (n < 0) throw domain_error("isqrt of negative integer");
    if (n == 0) return 0;
    Int x = Int(1) << (static_cast<unsigned>(boost::multiprecision::msb(n)) / 2 + 1);
    for (;;) {
        Int y = (x + n / x) / 2;
        if (y >= x) break;
        x = y;
    }
    while (x * x > n) --x;
    return x;
}

// Parses "p/q", an integer, or a decimal literal like "-0.125" (exact).
inline std::optional<Rat> rat_try_parse(const std::string& raw) {
    std::string text = raw;
    if (!text.empty() && text[0] == '+') text = text.substr(1);
    if (text.empty()) return std::nullopt;
    auto is_int = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string num = text.substr(0, slash), den = text.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) return std::nullopt;
        Int d(den);
        if (d == 0) return std::nullopt;
        return Rat(Int(num), d);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string head = text.substr(0, dot), tail = text.substr(dot + 1);
        bool neg = !head.empty() && head[0] == '-';
        if (neg) head = head.substr(1);
        if (head.empty()) head = "0";
        if (tail.empty() || !is_int(head) || !is_int(tail)) return std::nullopt;
        Int scale = 1;
        for (std::size_t i = 0; i < tail.size(); ++i) scale *= 10;
        Rat v = Rat(Int(head)) + Rat(Int(tail), scale);
        return neg ? Rat(-v) : v;
    }
    if (!is_int(text)) return std::nullopt;
    return Rat(Int(text));
}

inline Rat rat_parse(const std::string& text) {
    auto r = rat_try_parse(text);
    if (!r) throw parse_error("not a rational literal: '" + text + "'");
    return *r;
}

inline std::string rat_str(const Rat& r) {
    Int n = numerator(r), d = denominator(r);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

}  // namespace cohsp
