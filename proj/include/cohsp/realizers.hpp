#pragma once

// Compiling real functions into traces over R. A uniform modulus μ
// (|x−y| ≤ 2^−μ(k) ⟹ |f(x)−f(y)| ≤ 2^−k) yields a linear trace: output
// level n sources the single level-μ(n+1) token; nearest-dyadic rounding
// costs 2^−(n+1) and the modulus supplies the other 2^−(n+1), so
// f([x]) ⊆ [h_n(x)] exactly. Non-uniform functions compile stably: a coarse
// level-0 token selects a local modulus, a fine token supplies the value.

#include <set>

#include "maps.hpp"
#include "reals.hpp"

namespace cohsp {

struct FunctionSpec {
    std::string name;
    int arity = 1;

    // exact evaluator on rationals; absent when the value is irrational
    // (sqrt), in which case round_at below is authoritative
    std::function<Rat(const std::vector<Rat>&)> eval;

    // nearest level-n output token to f(args), ties toward even numerator;
    // filled from eval by the registry when not provided
    std::function<Dyadic(const std::vector<Rat>&, unsigned)> round_at;

    // uniform modulus of continuity (componentwise for arity 2); absent for
    // non-uniform functions
    std::function<unsigned(unsigned)> modulus;

    // local modulus selected by a coarse level-0 token, valid on any interval
    // of radius <= 1 meeting that token's interval
    std::function<unsigned(const Dyadic&, unsigned)> local_modulus;

    // exact containment f(I) ⊆ O for closed rational intervals (box for
    // arity 2); every registry entry provides one
    std::function<bool(const Rat&, const Rat&, const Rat&, const Rat&)> image_within;
    std::function<bool(const Rat&, const Rat&, const Rat&, const Rat&, const Rat&, const Rat&)>
        image_within2;

    // exact membership f(args) ∈ [olo,ohi]; filled from eval when absent
    std::function<bool(const std::vector<Rat>&, const Rat&, const Rat&)> value_within;

    bool uniform() const { return static_cast<bool>(modulus); }
    bool stable_only() const { return !modulus && static_cast<bool>(local_modulus); }
};

namespace detail {

inline void finish_spec(FunctionSpec& s) {
    if (!s.round_at && s.eval) {
        auto ev = s.eval;
        s.round_at = [ev](const std::vector<Rat>& args, unsigned n) {
            return Dyadic{nearest_dyadic_num(ev(args), n), n};
        };
    }
    if (!s.value_within && s.eval) {
        auto ev = s.eval;
        s.value_within = [ev](const std::vector<Rat>& args, const Rat& olo, const Rat& ohi) {
            Rat v = ev(args);
            return olo <= v && v <= ohi;
        };
    }
}

}  // namespace detail

namespace detail {

inline unsigned ceil_log2_rat(const Rat& r) {
    // least b >= 0 with r <= 2^b
    unsigned b = 0;
    Rat p(1);
    while (p < r) { p *= 2; ++b; }
    return b;
}

inline std::function<bool(const Rat&, const Rat&, const Rat&, const Rat&)>
monotone_image(std::function<Rat(const Rat&)> f) {
    return [f](const Rat& ilo, const Rat& ihi, const Rat& olo, const Rat& ohi) {
        Rat a = f(ilo), b = f(ihi);
        return olo <= rat_min(a, b) && rat_max(a, b) <= ohi;
    };
}

}  // namespace detail

// The built-in registry: identity, negation, x/2, |x|, min/max with a
// constant, clamp, shift and scale by a constant, √(max(x,0)) and binary
// addition are uniform; x² and x·y are the stable-only demos. No division.
inline FunctionSpec fn_identity() {
    FunctionSpec s;
    s.name = "id";
    s.eval = [](const std::vector<Rat>& a) { return a[0]; };
    s.modulus = [](unsigned k) { return k; };
    s.image_within = detail::monotone_image([](const Rat& x) { return x; });
    detail::finish_spec(s);
    return s;
}

inline FunctionSpec fn_neg() {
    FunctionSpec s;
    s.name = "neg";
    s.eval = [](const std::vector<Rat>& a) { return Rat(-a[0]); };
    s.modulus = [](unsigned k) { return k; };
    s.image_within = detail::monotone_image([](const Rat& x) { return Rat(-x); });
    detail::finish_spec(s);
    return s;
}

inline FunctionSpec fn_half() {
    FunctionSpec s;
    s.name = "half";
    s.eval = [](const std::vector<Rat>& a) { return Rat(a[0] / 2); };
    s.modulus = [](unsigned k) { return k >= 1 ? k - 1 : 0; };
    s.image_within = detail::monotone_image([](const Rat& x) { return Rat(x / 2); });
    detail::finish_spec(s);
    return s;
}

inline FunctionSpec fn_abs() {
    FunctionSpec s;
    s.name = "abs";
    s.eval = [](const std::vector<Rat>& a) { return rat_abs(a[0]); };
    s.modulus = [](unsigned k) { return k; };
    s.image_within = [](const Rat& ilo, const Rat& ihi, const Rat& olo, const Rat& ohi) {
        Rat lo = (ilo <= 0 && 0 <= ihi) ? Rat(0) : rat_min(rat_abs(ilo), rat_abs(ihi));
        Rat hi = rat_max(rat_abs(ilo), rat_abs(ihi));
        return olo <= lo && hi <= ohi;
    };
    detail::finish_spec(s);
    return s;
}

inline FunctionSpec fn_shift(const Rat& c) {
    FunctionSpec s;
    s.name = "shift[" + rat_str(c) + "]";
    s.eval = [c](const std::vector<Rat>& a) { return Rat(a[0] + c); };
    s.modulus = [](unsigned k) { return k; };
    s.image_within = detail::monotone_image([c](const Rat& x) { return Rat(x + c); });
    detail::finish_spec(s);
    return s;
}

inline FunctionSpec fn_scale(const Rat& c) {
    FunctionSpec s;
    s.name = "scale[" + rat_str(c) + "]";
    s.eval = [c](const std::vector<Rat>& a) { return Rat(a[0] * c); };
    unsigned bits = c == 0 ? 0 : detail::ceil_log2_rat(rat_abs(c));
    s.modulus = [bits, c](unsigned k) { return c == 0 ? 0u : k + bits; };
    s.image_within = detail::monotone_image([c](const Rat& x) { return Rat(x * c); });
    detail::finish_spec(s);
    return s;
}

inline FunctionSpec fn_minc(const Rat& c) {
    FunctionSpec s;
    s.name = "min[" + rat_str(c) + "]";
    s.eval = [c](const std::vector<Rat>& a) { return rat_min(a[0], c); };
    s.modulus = [](unsigned k) { return k; };
    s.image_within = detail::monotone_image([c](const Rat& x) { return rat_min(x, c); });
    detail::finish_spec(s);
    return s;
}

inline FunctionSpec fn_maxc(const Rat& c) {
    FunctionSpec s;
    s.name = "max[" + rat_str(c) + "]";
    s.eval = [c](const std::vector<Rat>& a) { return rat_max(a[0], c); };
    s.modulus = [](unsigned k) { return k; };
    s.image_within = detail::monotone_image([c](const Rat& x) { return rat_max(x, c); });
    detail::finish_spec(s);
    return s;
}

inline FunctionSpec fn_clamp(const Rat& lo, const Rat& hi) {
    if (hi < lo) throw domain_error("clamp bounds out of order");
    FunctionSpec s;
    s.name = "clamp[" + rat_str(lo) + "," + rat_str(hi) + "]";
    s.eval = [lo, hi](const std::vector<Rat>& a) { return rat_min(rat_max(a[0], lo), hi); };
    s.modulus = [](unsigned k) { return k; };
    s.image_within = detail::monotone_image([lo, hi](const Rat& x) { return rat_min(rat_max(x, lo), hi); });
    detail::finish_spec(s);
    return s;
}

// √(max(x,0)); |√x − √y| ≤ √|x−y| gives μ(k) = 2k+2 with slack. The value
// is irrational in general, so rounding goes through the integer square
// root: g = floor(2^n√v) and the tie against g+1/2 is decided by squaring.
inline FunctionSpec fn_sqrt() {
    FunctionSpec s;
    s.name = "sqrt";
    s.round_at = [](const std::vector<Rat>& args, unsigned n) {
        Rat v = rat_max(args[0], Rat(0));
        Rat scaled = v * Rat(int_pow2(2 * n));         // (2^n√v)² exactly
        Int g = int_isqrt(rat_floor(scaled));          // floor(2^n√v)
        Rat mid = Rat(g) + Rat(1, 2);
        Rat mid_sq = mid * mid;
        Int m;
        if (scaled > mid_sq) m = g + 1;
        else if (scaled < mid_sq) m = g;
        else m = (g % 2 == 0) ? g : g + 1;             // tie toward even
        return Dyadic{m, n};
    };
    s.value_within = [](const std::vector<Rat>& args, const Rat& olo, const Rat& ohi) {
        Rat v = rat_max(args[0], Rat(0));
        bool lo_ok = olo <= 0 || olo * olo <= v;
        bool hi_ok = ohi >= 0 && v <= ohi * ohi;
        return lo_ok && hi_ok;
    };
    s.modulus = [](unsigned k) { return 2 * k + 2; };
    s.image_within = [](const Rat& ilo, const Rat& ihi, const Rat& olo, const Rat& ohi) {
        Rat a = rat_max(ilo, Rat(0)), b = rat_max(ihi, Rat(0));
        bool lo_ok = olo <= 0 || olo * olo <= a;
        bool hi_ok = ohi >= 0 && b <= ohi * ohi;
        return lo_ok && hi_ok;
    };
    detail::finish_spec(s);
    return s;
}

inline FunctionSpec fn_add() {
    FunctionSpec s;
    s.name = "add";
    s.arity = 2;
    s.eval = [](const std::vector<Rat>& a) { return Rat(a[0] + a[1]); };
    s.modulus = [](unsigned k) { return k + 1; };
    s.image_within2 = [](const Rat& alo, const Rat& ahi, const Rat& blo, const Rat& bhi,
                         const Rat& olo, const Rat& ohi) {
        return olo <= alo + blo && ahi + bhi <= ohi;
    };
    detail::finish_spec(s);
    return s;
}

// x², non-uniform: the coarse token bounds |2x| locally.
inline FunctionSpec fn_square() {
    FunctionSpec s;
    s.name = "sq";
    s.eval = [](const std::vector<Rat>& a) { return Rat(a[0] * a[0]); };
    s.local_modulus = [](const Dyadic& coarse, unsigned k) {
        Rat bound = 2 * (rat_abs(dy_value(coarse)) + 3);
        return k + detail::ceil_log2_rat(bound);
    };
    s.image_within = [](const Rat& ilo, const Rat& ihi, const Rat& olo, const Rat& ohi) {
        Rat lo = (ilo <= 0 && 0 <= ihi) ? Rat(0) : rat_min(ilo * ilo, ihi * ihi);
        Rat hi = rat_max(ilo * ilo, ihi * ihi);
        return olo <= lo && hi <= ohi;
    };
    detail::finish_spec(s);
    return s;
}

// x·y, non-uniform: coarse tokens of both components bound the slopes.
inline FunctionSpec fn_mul() {
    FunctionSpec s;
    s.name = "mul";
    s.arity = 2;
    s.eval = [](const std::vector<Rat>& a) { return Rat(a[0] * a[1]); };
    s.local_modulus = [](const Dyadic& coarse, unsigned k) {
        Rat bound = 2 * (rat_abs(dy_value(coarse)) + 3) + 2;
        return k + detail::ceil_log2_rat(bound);
    };
    s.image_within2 = [](const Rat& alo, const Rat& ahi, const Rat& blo, const Rat& bhi,
                         const Rat& olo, const Rat& ohi) {
        Rat c1 = alo * blo, c2 = alo * bhi, c3 = ahi * blo, c4 = ahi * bhi;
        Rat lo = rat_min(rat_min(c1, c2), rat_min(c3, c4));
        Rat hi = rat_max(rat_max(c1, c2), rat_max(c3, c4));
        return olo <= lo && hi <= ohi;
    };
    detail::finish_spec(s);
    return s;
}

// --- linear realizers ----------------------------------------------------------

// Materializes the window of a linear realizer: for n ≤ depth, source level
// s(n) := μ(n+1), pairs (x, h_n(x)) for level-s(n) tokens meeting the window.
// f([x]) ⊆ [h_n(x)] is re-verified exactly per pair.
inline Trace linear_realizer(const FunctionSpec& f, unsigned depth, const Rat& lo, const Rat& hi) {
    if (f.arity != 1) throw domain_error("linear_realizer expects a unary function");
    if (!f.uniform())
        throw domain_error("'" + f.name + "' has no uniform modulus: not uniformly continuous, "
                           "compile it stably");
    std::vector<TracePair> pairs;
    for (unsigned n = 0; n <= depth; ++n) {
        unsigned s = f.modulus(n + 1);
        for (const Dyadic& x : level_anticover(s, lo, hi)) {
            Dyadic h = f.round_at({dy_value(x)}, n);
            auto [ilo, ihi] = dy_interval(x);
            auto [olo, ohi] = dy_interval(h);
            if (!f.image_within(ilo, ihi, olo, ohi))
                throw domain_error("modulus violation for '" + f.name + "': f([" + dy_label(x) +
                                   "]) is not inside [" + dy_label(h) + "]");
            pairs.push_back({{dy_pack(x)}, dy_pack(h)});
        }
    }
    Trace t(TraceKind::Linear, r_space(), r_space(), std::move(pairs));
    return t;
}

// Binary linear realizer over a windowed tensor: one tensor token
// (x,y), both components at level μ(n+1), per output level-n token.
struct BinaryRealizer {
    Trace trace;
    WindowedR wx, wy;
    SpacePtr source;  // tensor(wx, wy)
};

inline BinaryRealizer binary_linear_realizer(const FunctionSpec& f, unsigned depth, const Rat& lo,
                                             const Rat& hi) {
    if (f.arity != 2) throw domain_error("binary_linear_realizer expects a binary function");
    if (!f.uniform()) throw domain_error("'" + f.name + "' has no joint modulus");
    unsigned max_level = f.modulus(depth + 1);
    WindowedR wx = windowed_r(lo, hi, max_level);
    WindowedR wy = windowed_r(lo, hi, max_level);
    SpacePtr src = CoherenceSpace::tensor(wx.space, wy.space);
    std::vector<TracePair> pairs;
    for (unsigned n = 0; n <= depth; ++n) {
        unsigned s = f.modulus(n + 1);
        for (const Dyadic& x : level_anticover(s, lo, hi)) {
            for (const Dyadic& y : level_anticover(s, lo, hi)) {
                Dyadic h = f.round_at({dy_value(x), dy_value(y)}, n);
                auto [alo, ahi] = dy_interval(x);
                auto [blo, bhi] = dy_interval(y);
                auto [olo, ohi] = dy_interval(h);
                if (!f.image_within2(alo, ahi, blo, bhi, olo, ohi))
                    throw domain_error("modulus violation for '" + f.name + "' at (" + dy_label(x) +
                                       "," + dy_label(y) + ")");
                pairs.push_back({{src->pair_index(wx.index_of(x), wy.index_of(y))}, dy_pack(h)});
            }
        }
    }
    Trace t(TraceKind::Linear, src, r_space(), std::move(pairs));
    return {std::move(t), std::move(wx), std::move(wy), src};
}

// Stable realizer: pairs ({coarse, fine}, h). The coarse level-0 token
// selects the local modulus, the fine token supplies the value; minimal
// supports have size ≤ 2. Uniform functions degenerate to singleton pairs.
inline Trace stable_realizer(const FunctionSpec& f, unsigned depth, const Rat& lo, const Rat& hi) {
    if (f.arity != 1) throw domain_error("stable_realizer expects a unary function");
    std::vector<TracePair> pairs;
    if (f.uniform()) {
        Trace lin = linear_realizer(f, depth, lo, hi);
        for (const auto& p : lin.pairs()) pairs.push_back(p);
        return Trace(TraceKind::Stable, r_space(), r_space(), std::move(pairs));
    }
    if (!f.local_modulus) throw domain_error("'" + f.name + "' has no local modulus");
    for (const Dyadic& coarse : level_anticover(0, lo, hi)) {
        auto [clo, chi] = dy_interval(coarse);
        for (unsigned n = 0; n <= depth; ++n) {
            unsigned s = f.local_modulus(coarse, n + 1);
            for (const Dyadic& x : level_anticover(s, rat_max(clo, lo - 1), rat_min(chi, hi + 1))) {
                auto [xlo, xhi] = dy_interval(x);
                Rat ilo = rat_max(xlo, clo), ihi = rat_min(xhi, chi);
                if (ihi < ilo) continue;
                Dyadic h = f.round_at({dy_value(x)}, n);
                auto [olo, ohi] = dy_interval(h);
                if (!f.image_within(ilo, ihi, olo, ohi))
                    throw domain_error("local modulus violation for '" + f.name + "' at " + dy_label(x));
                Cliq input = normalized({dy_pack(coarse), dy_pack(x)});
                pairs.push_back({std::move(input), dy_pack(h)});
            }
        }
    }
    return Trace(TraceKind::Stable, r_space(), r_space(), std::move(pairs));
}

// --- checks and profiling --------------------------------------------------------

struct RealizationReport {
    bool ok = true;
    std::string witness;
};

inline unsigned trace_max_source_level(const Trace& t) {
    unsigned m = 0;
    for (const auto& p : t.pairs())
        for (TokenIndex tok : p.input) m = std::max(m, dy_unpack(tok).level);
    return m;
}

// The realizability diagram at concrete inputs: the output clique must hold a
// level-n token whose interval contains f(q), exactly.
inline RealizationReport realization_check(const Trace& t, const FunctionSpec& f,
                                           const std::vector<Rat>& inputs, unsigned n) {
    RealizationReport rep;
    unsigned depth = trace_max_source_level(t);
    for (const Rat& q : inputs) {
        RealOracle oracle = RealOracle::constant(q);
        Cliq in;
        for (const Dyadic& d : approx_clique(oracle, depth)) in.push_back(dy_pack(d));
        Cliq out = apply_trace(t, normalized(in));
        bool found = false;
        for (TokenIndex tok : out) {
            Dyadic h = dy_unpack(tok);
            if (h.level != n) continue;
            auto [olo, ohi] = dy_interval(h);
            if (f.value_within({q}, olo, ohi)) { found = true; break; }
        }
        if (!found) {
            rep.ok = false;
            rep.witness = "input " + rat_str(q) + ": no level-" + std::to_string(n) +
                          " output token containing f(input)";
            return rep;
        }
    }
    return rep;
}

struct QueryProfile {
    std::size_t outputs = 0;
    std::size_t max_sources = 0;
    std::map<std::size_t, std::size_t> histogram;  // support size -> count
};

// Linear traces report exactly one source token per output; stable traces
// report minimal-pair sizes.
inline QueryProfile query_profile(const Trace& t, const Cliq& input) {
    QueryProfile prof;
    std::map<TokenIndex, std::size_t> best;
    for (const auto& p : t.pairs()) {
        if (!is_subset(p.input, input)) continue;
        auto it = best.find(p.output);
        if (it == best.end() || p.input.size() < it->second) best[p.output] = p.input.size();
    }
    for (auto& [tok, n] : best) {
        ++prof.histogram[n];
        prof.max_sources = std::max(prof.max_sources, n);
    }
    prof.outputs = best.size();
    return prof;
}

// Structure-aware validation for traces over the dyadic space: only pairs
// whose input intervals meet can conflict, so a per-level interval sweep
// replaces the quadratic scan. Cross-checked against validate_trace on
// small instances in the test suite.
namespace detail {

struct Dy64 {
    long long m = 0;
    unsigned level = 0;
    friend bool operator==(const Dy64& a, const Dy64& b) { return a.m == b.m && a.level == b.level; }
};

inline Dy64 to_dy64(const Dyadic& d) {
    if (d.m > Int(std::numeric_limits<long long>::max() / 4) ||
        d.m < Int(std::numeric_limits<long long>::min() / 4))
        throw resource_error("dyadic numerator exceeds the fast validation range");
    return {d.m.convert_to<long long>(), d.level};
}

// closed intervals [ (m-1)/2^l, (m+1)/2^l ] meet; exact in 128-bit
inline bool dy64_intervals_meet(const Dy64& a, const Dy64& b) {
    unsigned l = std::max(a.level, b.level);
    __int128 alo = (__int128)(a.m - 1) << (l - a.level);
    __int128 ahi = (__int128)(a.m + 1) << (l - a.level);
    __int128 blo = (__int128)(b.m - 1) << (l - b.level);
    __int128 bhi = (__int128)(b.m + 1) << (l - b.level);
    return alo <= bhi && blo <= ahi;
}

inline bool dy64_strictly_coherent(const Dy64& a, const Dy64& b) {
    return a.level != b.level && dy64_intervals_meet(a, b);
}

}  // namespace detail

inline ValidationResult validate_dyadic_trace(const Trace& t) {
    using detail::Dy64;
    ValidationResult res;
    struct Entry {
        Dy64 fine, out;
        std::size_t pair_index;
    };
    // bucket by coarse token; pairs under distinct coarse tokens have
    // incompatible inputs (two distinct level-0 tokens are incoherent)
    std::map<std::pair<long long, unsigned>, std::vector<Entry>> buckets;
    bool has_singletons = false, has_doubles = false;
    const auto& pairs = t.pairs();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        Entry e;
        e.out = detail::to_dy64(dy_unpack(p.output));
        e.pair_index = i;
        if (p.input.size() == 1) {
            has_singletons = true;
            e.fine = detail::to_dy64(dy_unpack(p.input[0]));
            buckets[{0, 0xffffffffu}].push_back(std::move(e));
        } else if (p.input.size() == 2) {
            has_doubles = true;
            Dy64 a = detail::to_dy64(dy_unpack(p.input[0]));
            Dy64 b = detail::to_dy64(dy_unpack(p.input[1]));
            if (b.level < a.level) std::swap(a, b);
            e.fine = b;
            buckets[{a.m, a.level}].push_back(std::move(e));
        } else {
            throw unsupported_error("dyadic validation handles supports of size 1 and 2");
        }
    }
    if (has_singletons && has_doubles)
        throw unsupported_error("dyadic validation does not mix singleton and coarse+fine supports");
    auto strictly_coherent_out = [](const Dy64& a, const Dy64& b) {
        return detail::dy64_strictly_coherent(a, b);
    };
    for (auto& [key, entries] : buckets) {
        std::map<unsigned, std::vector<const Entry*>> by_level;
        for (const auto& e : entries) by_level[e.fine.level].push_back(&e);
        for (auto& [lvl, v] : by_level)
            std::sort(v.begin(), v.end(),
                      [](const Entry* a, const Entry* b) { return a->fine.m < b->fine.m; });
        auto report = [&](const Entry& a, const Entry& b) {
            res.ok = false;
            res.violation = TraceViolation{
                a.pair_index, b.pair_index,
                "coherent inputs map to outputs that are not strictly coherent"};
        };
        for (auto& [lvl, v] : by_level) {
            for (std::size_t i = 0; i + 1 < v.size(); ++i)
                for (std::size_t j = i + 1; j < v.size() && v[j]->fine.m == v[i]->fine.m; ++j)
                    if (!strictly_coherent_out(v[i]->out, v[j]->out)) { report(*v[i], *v[j]); return res; }
            for (const auto& [lvl2, w] : by_level) {
                if (lvl2 <= lvl) continue;
                unsigned shift = lvl2 - lvl;
                for (const Entry* fe : w) {
                    long long lo = (fe->fine.m - 1) / (1ll << std::min(shift, 62u)) - 2;
                    long long hi = (fe->fine.m + 1) / (1ll << std::min(shift, 62u)) + 2;
                    auto it = std::lower_bound(v.begin(), v.end(), lo,
                                               [](const Entry* e, long long m) { return e->fine.m < m; });
                    for (; it != v.end() && (*it)->fine.m <= hi; ++it) {
                        if (!detail::dy64_intervals_meet((*it)->fine, fe->fine)) continue;
                        if (!strictly_coherent_out((*it)->out, fe->out)) { report(**it, *fe); return res; }
                    }
                }
            }
        }
    }
    t.prime_validation(res);
    return res;
}

// The same sweep for binary realizers over a windowed tensor source: pairs
// conflict only when both components' intervals meet.
inline ValidationResult validate_binary_dyadic_trace(const BinaryRealizer& br) {
    using detail::Dy64;
    ValidationResult res;
    struct Entry {
        Dy64 x, y, out;
        std::size_t pair_index;
    };
    std::map<unsigned, std::vector<Entry>> by_level;  // component level (equal for x and y)
    const auto& pairs = br.trace.pairs();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto [xi, yi] = br.source->pair_of(pairs[i].input[0]);
        Entry e;
        e.x = detail::to_dy64(br.wx.dyadic_of(xi));
        e.y = detail::to_dy64(br.wy.dyadic_of(yi));
        e.out = detail::to_dy64(dy_unpack(pairs[i].output));
        e.pair_index = i;
        if (e.x.level != e.y.level) throw unsupported_error("expected equal component levels");
        by_level[e.x.level].push_back(std::move(e));
    }
    for (auto& [lvl, v] : by_level)
        std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) {
            return a.x.m != b.x.m ? a.x.m < b.x.m : a.y.m < b.y.m;
        });
    auto report = [&](const Entry& a, const Entry& b) {
        res.ok = false;
        res.violation = TraceViolation{a.pair_index, b.pair_index,
                                       "coherent tensor inputs map to incoherent outputs"};
    };
    for (auto& [lvl, v] : by_level) {
        // same tensor token, several outputs
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            for (std::size_t j = i + 1;
                 j < v.size() && v[j].x.m == v[i].x.m && v[j].y.m == v[i].y.m; ++j)
                if (!detail::dy64_strictly_coherent(v[i].out, v[j].out)) { report(v[i], v[j]); return res; }
        for (auto& [lvl2, w] : by_level) {
            if (lvl2 <= lvl) continue;
            unsigned shift = std::min(lvl2 - lvl, 62u);
            for (const Entry& fe : w) {
                long long xlo = (fe.x.m - 1) / (1ll << shift) - 2, xhi = (fe.x.m + 1) / (1ll << shift) + 2;
                auto it = std::lower_bound(v.begin(), v.end(), xlo, [](const Entry& e, long long m) {
                    return e.x.m < m;
                });
                for (; it != v.end() && it->x.m <= xhi; ++it) {
                    if (!detail::dy64_intervals_meet(it->x, fe.x)) continue;
                    if (!detail::dy64_intervals_meet(it->y, fe.y)) continue;
                    if (!detail::dy64_strictly_coherent(it->out, fe.out)) { report(*it, fe); return res; }
                }
            }
        }
    }
    br.trace.prime_validation(res);
    return res;
}

// Pointwise application of the (conceptually infinite) realizer to an
// approximation clique: the level-n output token sourced at level μ(n+1).
// Identical to applying the materialized trace, without materializing it.
inline Dyadic pointwise_output(const FunctionSpec& f, const std::vector<Dyadic>& approx, unsigned n) {
    if (f.arity != 1 || !f.uniform()) throw domain_error("pointwise_output expects a unary uniform function");
    unsigned s = f.modulus(n + 1);
    for (const Dyadic& d : approx)
        if (d.level == s) return f.round_at({dy_value(d)}, n);
    throw precondition_error("approximation clique has no level-" + std::to_string(s) + " token");
}

// --- expressions ------------------------------------------------------------------

// Expression tree over the registry: exact rational constants, registered
// oracle constants, and function applications. Evaluation applies the
// realizer constructions pointwise, so the emitted tokens are exactly the
// ones the materialized traces would produce.
struct Expression {
    enum class Kind { Constant, OracleConstant, Apply };
    Kind kind = Kind::Constant;
    Rat constant;
    std::string oracle_name;
    std::function<Rat(unsigned)> oracle;  // |oracle(n) − value| ≤ 2^-(n+2)
    FunctionSpec spec;                    // parameters already bound
    std::vector<Expression> args;
};

inline bool expression_has_stable(const Expression& e) {
    if (e.kind == Expression::Kind::Apply) {
        if (e.spec.stable_only()) return true;
        for (const auto& a : e.args)
            if (expression_has_stable(a)) return true;
    }
    return false;
}

namespace detail {

struct ExprParser {
    const std::string& text;
    std::size_t pos = 0;

    explicit ExprParser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) { ++pos; return true; }
        return false;
    }

    std::string ident_or_literal() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size()) {
            char c = text[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '/' ||
                c == '-' || c == '+')
                ++pos;
            else
                break;
        }
        if (start == pos) throw parse_error("expected a name or literal at position " + std::to_string(pos));
        return text.substr(start, pos - start);
    }

    Expression parse() {
        Expression e = parse_expr();
        skip_ws();
        if (pos != text.size()) throw parse_error("trailing input after expression");
        return e;
    }

    Expression parse_expr() {
        std::string word = ident_or_literal();
        skip_ws();
        if (pos < text.size() && text[pos] == '(') return parse_apply(word);
        if (auto r = rat_try_parse(word)) {
            Expression e;
            e.kind = Expression::Kind::Constant;
            e.constant = *r;
            return e;
        }
        if (word == "sqrt2") {
            Expression e;
            e.kind = Expression::Kind::OracleConstant;
            e.oracle_name = word;
            e.oracle = [](unsigned n) {
                Int g = int_isqrt(Int(2) * int_pow2(2 * (n + 2)));
                return Rat(g, int_pow2(n + 2));  // g/2^(n+2) ≤ √2 < (g+1)/2^(n+2)
            };
            return e;
        }
        throw parse_error("unknown constant '" + word + "'");
    }

    Expression parse_apply(const std::string& name) {
        if (!eat('(')) throw parse_error("expected '(' after '" + name + "'");
        std::vector<Expression> args;
        if (!eat(')')) {
            do {
                args.push_back(parse_expr());
            } while (eat(','));
            if (!eat(')')) throw parse_error("expected ')' closing '" + name + "'");
        }
        auto literal = [&](std::size_t i) {
            if (i >= args.size() || args[i].kind != Expression::Kind::Constant)
                throw parse_error("'" + name + "' needs a literal constant in position " +
                                  std::to_string(i + 1));
            return args[i].constant;
        };
        auto need = [&](std::size_t n) {
            if (args.size() != n)
                throw parse_error("'" + name + "' takes " + std::to_string(n) + " argument(s)");
        };
        Expression e;
        e.kind = Expression::Kind::Apply;
        if (name == "id") { need(1); e.spec = fn_identity(); e.args = {args[0]}; }
        else if (name == "neg") { need(1); e.spec = fn_neg(); e.args = {args[0]}; }
        else if (name == "half") { need(1); e.spec = fn_half(); e.args = {args[0]}; }
        else if (name == "abs") { need(1); e.spec = fn_abs(); e.args = {args[0]}; }
        else if (name == "sqrt") { need(1); e.spec = fn_sqrt(); e.args = {args[0]}; }
        else if (name == "sq") { need(1); e.spec = fn_square(); e.args = {args[0]}; }
        else if (name == "add") { need(2); e.spec = fn_add(); e.args = {args[0], args[1]}; }
        else if (name == "mul") { need(2); e.spec = fn_mul(); e.args = {args[0], args[1]}; }
        else if (name == "shift") { need(2); e.spec = fn_shift(literal(0)); e.args = {args[1]}; }
        else if (name == "scale") { need(2); e.spec = fn_scale(literal(0)); e.args = {args[1]}; }
        else if (name == "min") { need(2); e.spec = fn_minc(literal(0)); e.args = {args[1]}; }
        else if (name == "max") { need(2); e.spec = fn_maxc(literal(0)); e.args = {args[1]}; }
        else if (name == "clamp") { need(3); e.spec = fn_clamp(literal(0), literal(1)); e.args = {args[2]}; }
        else throw parse_error("unknown function '" + name + "'");
        return e;
    }
};

}  // namespace detail

inline Expression parse_expression(const std::string& text) {
    detail::ExprParser p(text);
    return p.parse();
}

// The level-n output token of an expression node; containment of the true
// value in the token's interval is the recursive invariant, re-checked
// exactly at every application.
inline Dyadic expression_token(const Expression& e, unsigned n) {
    switch (e.kind) {
        case Expression::Kind::Constant:
            return Dyadic{nearest_dyadic_num(e.constant, n), n};
        case Expression::Kind::OracleConstant:
            return Dyadic{nearest_dyadic_num(e.oracle(n), n), n};
        case Expression::Kind::Apply: break;
    }
    const FunctionSpec& f = e.spec;
    if (f.uniform()) {
        unsigned s = f.modulus(n + 1);
        if (f.arity == 1) {
            Dyadic x = expression_token(e.args[0], s);
            Dyadic h = f.round_at({dy_value(x)}, n);
            auto [ilo, ihi] = dy_interval(x);
            auto [olo, ohi] = dy_interval(h);
            if (!f.image_within(ilo, ihi, olo, ohi))
                throw error("internal: containment failed for '" + f.name + "' at " + dy_label(x));
            return h;
        }
        Dyadic x = expression_token(e.args[0], s);
        Dyadic y = expression_token(e.args[1], s);
        Dyadic h = f.round_at({dy_value(x), dy_value(y)}, n);
        auto [alo, ahi] = dy_interval(x);
        auto [blo, bhi] = dy_interval(y);
        auto [olo, ohi] = dy_interval(h);
        if (!f.image_within2(alo, ahi, blo, bhi, olo, ohi))
            throw error("internal: containment failed for '" + f.name + "'");
        return h;
    }
    if (!f.local_modulus) throw domain_error("'" + f.name + "' has no modulus at all");
    if (f.arity == 1) {
        Dyadic coarse = expression_token(e.args[0], 0);
        unsigned s = f.local_modulus(coarse, n + 1);
        Dyadic x = expression_token(e.args[0], s);
        Dyadic h = f.round_at({dy_value(x)}, n);
        auto [clo, chi] = dy_interval(coarse);
        auto [xlo, xhi] = dy_interval(x);
        auto [olo, ohi] = dy_interval(h);
        if (!f.image_within(rat_max(clo, xlo), rat_min(chi, xhi), olo, ohi))
            throw error("internal: local containment failed for '" + f.name + "' at " + dy_label(x));
        return h;
    }
    // binary stable: both coarse tokens feed the joint local level
    Dyadic c1 = expression_token(e.args[0], 0);
    Dyadic c2 = expression_token(e.args[1], 0);
    unsigned s = std::max(f.local_modulus(c1, n + 1), f.local_modulus(c2, n + 1)) + 1;
    Dyadic x = expression_token(e.args[0], s);
    Dyadic y = expression_token(e.args[1], s);
    Dyadic h = f.round_at({dy_value(x), dy_value(y)}, n);
    auto [c1lo, c1hi] = dy_interval(c1);
    auto [c2lo, c2hi] = dy_interval(c2);
    auto [xlo, xhi] = dy_interval(x);
    auto [ylo, yhi] = dy_interval(y);
    auto [olo, ohi] = dy_interval(h);
    if (!f.image_within2(rat_max(c1lo, xlo), rat_min(c1hi, xhi), rat_max(c2lo, ylo),
                         rat_min(c2hi, yhi), olo, ohi))
        throw error("internal: local containment failed for '" + f.name + "'");
    return h;
}

// Evaluates an expression to within 2^-precision, exactly. Stable-only
// functions require the caller to opt in.
inline Rat eval_expression(const Expression& e, unsigned precision, bool allow_stable = false) {
    if (!allow_stable && expression_has_stable(e))
        throw domain_error("expression contains a non-uniform function; rerun with the stable mode flag");
    return dy_value(expression_token(e, precision));
}

// Per-node query counts for the profile report: linear applications touch
// one input token per output token, stable ones two.
inline void expression_profile(const Expression& e, std::vector<std::string>& lines,
                               const std::string& indent = "") {
    switch (e.kind) {
        case Expression::Kind::Constant:
            lines.push_back(indent + "const " + rat_str(e.constant));
            return;
        case Expression::Kind::OracleConstant:
            lines.push_back(indent + "oracle " + e.oracle_name);
            return;
        case Expression::Kind::Apply: {
            std::size_t q = e.spec.stable_only() ? 2 : 1;
            lines.push_back(indent + e.spec.name + ": " + std::to_string(q) +
                            " source token(s) per output token (" +
                            (e.spec.stable_only() ? "stable" : "linear") + ")");
            for (const auto& a : e.args) expression_profile(a, lines, indent + "  ");
            return;
        }
    }
}

}  // namespace cohsp
