#pragma once

// The dyadic coherence space R. Tokens are (m,n) read as m/2^n with interval
// [x] = [(m-1)/2^n, (m+1)/2^n]; distinct tokens are coherent iff their levels
// differ and their closed intervals meet. Maximal cliques are rapidly
// converging Cauchy sequences; ρ_R reads off their limit.

#include <random>

#include "core.hpp"
#include "rational.hpp"

namespace cohsp {

struct Dyadic {
    Int m;
    unsigned level = 0;

    friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.level == b.level && a.m == b.m; }
    friend bool operator<(const Dyadic& a, const Dyadic& b) {
        if (a.level != b.level) return a.level < b.level;
        return a.m < b.m;
    }
};

inline Rat dy_value(const Dyadic& d) { return rat_of_dyadic(d.m, d.level); }

// [x] = closed interval of radius 2^-n centered at m/2^n.
inline std::pair<Rat, Rat> dy_interval(const Dyadic& d) {
    return {rat_of_dyadic(d.m - 1, d.level), rat_of_dyadic(d.m + 1, d.level)};
}

// Strict coherence: Den(x) ≠ Den(y) and [x] ∩ [y] ≠ ∅ (closed intervals,
// boundary touching counts). Reflexive closure for equal tokens.
inline bool r_coherent(const Dyadic& x, const Dyadic& y) {
    if (x == y) return true;
    if (x.level == y.level) return false;
    auto [alo, ahi] = dy_interval(x);
    auto [blo, bhi] = dy_interval(y);
    return alo <= bhi && blo <= ahi;
}

// --- token packing for the lazy space ---------------------------------------

inline TokenIndex dy_pack(const Dyadic& d) {
    Int zig = d.m >= 0 ? Int(2 * d.m) : Int(-2 * d.m - 1);
    if (zig >= Int(1) << 62 || d.level >= (1u << 30))
        throw resource_error("dyadic token out of packing range");
    return ((TokenIndex)d.level << 64) | (TokenIndex)static_cast<std::uint64_t>(zig);
}

inline Dyadic dy_unpack(TokenIndex t) {
    std::uint64_t zig = static_cast<std::uint64_t>(t & ~(std::uint64_t)0);
    std::uint64_t lvl = static_cast<std::uint64_t>(t >> 64);
    Dyadic d;
    d.level = static_cast<unsigned>(lvl);
    d.m = (zig % 2 == 0) ? Int(zig / 2) : -Int((zig + 1) / 2);
    return d;
}

inline std::string dy_label(const Dyadic& d) { return d.m.str() + "/2^" + std::to_string(d.level); }

inline std::optional<Dyadic> dy_parse(const std::string& s) {
    auto pos = s.find("/2^");
    if (pos == std::string::npos) return std::nullopt;
    std::string ms = s.substr(0, pos), ns = s.substr(pos + 3);
    try {
        Dyadic d;
        d.m = Int(ms);
        d.level = static_cast<unsigned>(std::stoul(ns));
        return d;
    } catch (...) {
        return std::nullopt;
    }
}

// The coherence space R as a lazy space. Enumeration runs through diagonals
// of (level, zigzag(m)); indices are sparse but totally ordered.
inline SpacePtr r_space() {
    static SpacePtr instance = [] {
        LazyAtomOps ops;
        ops.strict_coherent = [](TokenIndex a, TokenIndex b) {
            Dyadic x = dy_unpack(a), y = dy_unpack(b);
            return !(x == y) && r_coherent(x, y);
        };
        ops.valid = [](TokenIndex t) { return (t >> 94) == 0; };
        ops.at_position = [](std::uint64_t pos) {
            // diagonal d = level + zig, ordered by (d, level)
            std::uint64_t d = 0;
            while ((d + 1) * (d + 2) / 2 <= pos) ++d;
            std::uint64_t level = pos - d * (d + 1) / 2;
            std::uint64_t zig = d - level;
            return ((TokenIndex)level << 64) | (TokenIndex)zig;
        };
        ops.position_of = [](TokenIndex t) {
            std::uint64_t zig = static_cast<std::uint64_t>(t & ~(std::uint64_t)0);
            std::uint64_t level = static_cast<std::uint64_t>(t >> 64);
            std::uint64_t d = level + zig;
            if (d >= (1u << 30)) throw resource_error("token too deep to enumerate");
            return d * (d + 1) / 2 + level;
        };
        ops.label = [](TokenIndex t) { return dy_label(dy_unpack(t)); };
        ops.parse = [](const std::string& s) -> std::optional<TokenIndex> {
            auto d = dy_parse(s);
            if (!d) return std::nullopt;
            return dy_pack(*d);
        };
        return CoherenceSpace::atomic_lazy("R", std::move(ops));
    }();
    return instance;
}

// --- oracles and approximation ------------------------------------------------

// query(n) returns an exact rational within 2^-(n+2) of the represented real.
// Cached answers are cross-checked for consistency on every new query.
class RealOracle {
public:
    explicit RealOracle(std::function<Rat(unsigned)> query) : query_(std::move(query)) {}

    static RealOracle constant(const Rat& value) {
        return RealOracle([value](unsigned) { return value; });
    }

    Rat operator()(unsigned n) const {
        auto it = cache_.find(n);
        if (it != cache_.end()) return it->second;
        Rat q = query_(n);
        for (const auto& [m, qm] : cache_) {
            Rat bound = rat_pow2_neg(n + 2) + rat_pow2_neg(m + 2);
            if (rat_abs(q - qm) > bound)
                throw data_error("oracle inconsistency: answers at levels " + std::to_string(n) +
                                 " and " + std::to_string(m) + " are " + rat_str(rat_abs(q - qm)) +
                                 " apart, allowed " + rat_str(bound));
        }
        cache_.emplace(n, q);
        return q;
    }

private:
    std::function<Rat(unsigned)> query_;
    mutable std::map<unsigned, Rat> cache_;
};

// One token per level 0..depth, x_n the nearest level-n dyadic to query(n)
// (ties toward even numerator). The oracle slack 2^-(n+2) plus rounding
// 2^-(n+1) keeps the represented real inside every [x_n].
inline std::vector<Dyadic> approx_clique(const RealOracle& oracle, unsigned depth) {
    std::vector<Dyadic> out;
    for (unsigned n = 0; n <= depth; ++n) {
        Dyadic d;
        d.level = n;
        d.m = nearest_dyadic_num(oracle(n), n);
        out.push_back(std::move(d));
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = i + 1; j < out.size(); ++j)
            if (!r_coherent(out[i], out[j]))
                throw data_error("oracle inconsistency: approximants " + dy_label(out[i]) + " and " +
                                 dy_label(out[j]) + " are incoherent");
    return out;
}

// ρ_R approximant: the value of the level-n token; within 2^-n of the limit
// of any maximal extension.
inline Rat rho_approx(const std::vector<Dyadic>& a, unsigned n) {
    for (const auto& d : a)
        if (d.level == n) return dy_value(d);
    throw precondition_error("clique has no level-" + std::to_string(n) + " token");
}

// All level-n tokens whose closed intervals meet the window; within the
// window this is the uni-cover D_n. Pairwise incoherent by equal level.
inline std::vector<Dyadic> level_anticover(unsigned n, const Rat& lo, const Rat& hi) {
    if (hi < lo) throw domain_error("empty window");
    Int mlo = rat_ceil(lo * Rat(int_pow2(n)) - 1);
    Int mhi = rat_floor(hi * Rat(int_pow2(n)) + 1);
    std::vector<Dyadic> out;
    for (Int m = mlo; m <= mhi; ++m) out.push_back({m, n});
    return out;
}

// A finite tabulated restriction of R: all tokens of level <= max_level whose
// intervals meet the window, in (level, numerator) order.
struct WindowedR {
    SpacePtr space;
    std::vector<Dyadic> tokens;  // position i <-> space token index i

    TokenIndex index_of(const Dyadic& d) const {
        auto it = std::lower_bound(tokens.begin(), tokens.end(), d);
        if (it == tokens.end() || !(*it == d)) throw domain_error("dyadic token outside the window");
        return static_cast<TokenIndex>(it - tokens.begin());
    }
    const Dyadic& dyadic_of(TokenIndex t) const {
        if (t >= tokens.size()) throw domain_error("foreign token");
        return tokens[static_cast<std::size_t>(t)];
    }
};

inline WindowedR windowed_r(const Rat& lo, const Rat& hi, unsigned max_level) {
    WindowedR w;
    for (unsigned n = 0; n <= max_level; ++n)
        for (auto& d : level_anticover(n, lo, hi)) w.tokens.push_back(std::move(d));
    std::sort(w.tokens.begin(), w.tokens.end());
    std::vector<std::string> names;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& d : w.tokens) names.push_back(dy_label(d));
    for (std::size_t i = 0; i < w.tokens.size(); ++i)
        for (std::size_t j = i + 1; j < w.tokens.size(); ++j)
            if (r_coherent(w.tokens[i], w.tokens[j])) pairs.push_back({i, j});
    w.space = CoherenceSpace::atomic_finite("R[" + rat_str(lo) + "," + rat_str(hi) + "]^" +
                                            std::to_string(max_level), std::move(names), pairs);
    return w;
}

// Symbolic totality view of R on a window: T = maximal cliques (= T°), and
// T⊥ is the level family {D_n}. Finite cliques are tested as prefixes.
struct RealWindowView {
    Rat lo, hi;
    unsigned max_level = 0;

    std::vector<Dyadic> co_total_level(unsigned n) const { return level_anticover(n, lo, hi); }

    // A depth-d prefix: exactly one token per level 0..d, pairwise coherent.
    bool prefix_total(const std::vector<Dyadic>& a, unsigned depth) const {
        if (a.size() != depth + 1) return false;
        std::vector<Dyadic> sorted = a;
        std::sort(sorted.begin(), sorted.end());
        for (unsigned n = 0; n < sorted.size(); ++n)
            if (sorted[n].level != n) return false;
        for (std::size_t i = 0; i < sorted.size(); ++i)
            for (std::size_t j = i + 1; j < sorted.size(); ++j)
                if (!r_coherent(sorted[i], sorted[j])) return false;
        return true;
    }
};

// Deterministic random rationals for sampling sweeps.
class RationalSampler {
public:
    RationalSampler(std::uint64_t seed, Rat lo, Rat hi)
        : rng_(seed), lo_(std::move(lo)), hi_(std::move(hi)) {}

    Rat next() {
        std::uniform_int_distribution<std::uint64_t> num(0, 1u << 30);
        std::uniform_int_distribution<std::uint64_t> den(1, 1u << 15);
        Rat t(Int(num(rng_)), Int((std::uint64_t(1) << 30) + 1));  // t in [0,1)
        Rat jitter(Int(num(rng_)) % Int(den(rng_) * 7 + 1) + 1, Int(den(rng_) * 97 + 3));
        Rat v = lo_ + (hi_ - lo_) * t + jitter / Rat(Int(1) << 31);
        if (v > hi_) v = hi_;
        if (v < lo_) v = lo_;
        return v;
    }

private:
    std::mt19937_64 rng_;
    Rat lo_, hi_;
};

}  // namespace cohsp
