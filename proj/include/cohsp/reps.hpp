#pragma once

// Standard representations B_X of countably-based uniform spaces: tokens are
// (n,U) for U ∈ 𝒰_n, strictly coherent iff n≠m and U∩V≠∅, decoded by block
// intersection. Includes the linearish property, the extension lemma's
// ψ-construction, chain-connectedness, and the uniform-quotient refutation
// checker built from the proof's witness pair.

#include "funcspace.hpp"
#include "realizers.hpp"

namespace cohsp {

// A block of a basis cover: a point set (finite mode) or a closed rational
// interval (symbolic interval mode).
struct BasisBlock {
    std::vector<std::size_t> members;  // finite mode, sorted
    Rat lo, hi;                        // interval mode
    std::string label;
};

struct UniformSpaceDescriptor {
    bool interval_mode = false;
    std::vector<std::string> point_names;          // finite mode
    Rat lo, hi;                                    // interval mode window
    std::vector<std::vector<BasisBlock>> covers;   // covers[k] = 𝒰_{k+1}

    std::size_t point_count() const { return point_names.size(); }

    bool block_contains_point(const BasisBlock& b, std::size_t p) const {
        return std::binary_search(b.members.begin(), b.members.end(), p);
    }
    static bool blocks_overlap_finite(const BasisBlock& a, const BasisBlock& b) {
        std::vector<std::size_t> meet;
        std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                              std::back_inserter(meet));
        return !meet.empty();
    }
    static bool blocks_overlap_interval(const BasisBlock& a, const BasisBlock& b) {
        return a.lo <= b.hi && b.lo <= a.hi;
    }
    bool blocks_overlap(const BasisBlock& a, const BasisBlock& b) const {
        return interval_mode ? blocks_overlap_interval(a, b) : blocks_overlap_finite(a, b);
    }

    // Every materialized cover must cover the points; the materialized prefix
    // must be ⪯-directed (checked as a decreasing chain).
    void validate() const {
        for (std::size_t k = 0; k < covers.size(); ++k) {
            if (covers[k].empty()) throw domain_error("cover " + std::to_string(k + 1) + " is empty");
            if (!interval_mode) {
                std::vector<bool> hit(point_count(), false);
                for (const auto& b : covers[k])
                    for (std::size_t p : b.members) hit[p] = true;
                for (std::size_t p = 0; p < hit.size(); ++p)
                    if (!hit[p])
                        throw domain_error("cover " + std::to_string(k + 1) + " misses point '" +
                                           point_names[p] + "'");
            } else {
                // interval covers are kept endpoint-monotone (canonical form)
                const auto& blocks = covers[k];
                for (std::size_t i = 0; i + 1 < blocks.size(); ++i)
                    if (blocks[i + 1].lo < blocks[i].lo || blocks[i + 1].hi < blocks[i].hi)
                        throw domain_error("interval cover " + std::to_string(k + 1) +
                                           " is not sorted by endpoints");
                if (blocks.front().lo > lo) throw domain_error("cover misses the window's left end");
                Rat reach = blocks.front().hi;
                for (std::size_t i = 1; i < blocks.size() && reach < hi; ++i) {
                    if (blocks[i].lo > reach)
                        throw domain_error("cover " + std::to_string(k + 1) + " has a gap at " +
                                           rat_str(reach));
                    reach = rat_max(reach, blocks[i].hi);
                }
                if (reach < hi) throw domain_error("cover misses the window's right end");
            }
        }
        for (std::size_t k = 0; k + 1 < covers.size(); ++k) {
            // 𝒰_{k+2} ⪯ 𝒰_{k+1}
            for (const auto& fine : covers[k + 1]) {
                bool inside = false;
                for (const auto& coarse : covers[k]) {
                    bool sub = interval_mode
                                   ? (coarse.lo <= fine.lo && fine.hi <= coarse.hi)
                                   : std::includes(coarse.members.begin(), coarse.members.end(),
                                                   fine.members.begin(), fine.members.end());
                    if (sub) { inside = true; break; }
                }
                if (!inside)
                    throw domain_error("basis is not ⪯-directed: cover " + std::to_string(k + 2) +
                                       " does not refine cover " + std::to_string(k + 1));
            }
        }
    }
};

// Descriptor file format (UTF-8, line oriented, '#' comments):
//   points <id> <id> ...        or:   points interval <lo> <hi>
//   cover <n>: {<ids>} {<ids>} ...        (finite mode)
//   cover <n>: {<lo> <hi>} {<lo> <hi>} ...  (interval mode)
// Cover indices are 1-based and must appear in order.
inline UniformSpaceDescriptor parse_descriptor_file(const std::string& text) {
    UniformSpaceDescriptor d;
    bool have_points = false;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::istringstream ls(raw);
        std::string head;
        if (!(ls >> head)) continue;
        if (head == "points") {
            if (have_points) throw parse_error(lineno, "duplicate points line");
            have_points = true;
            std::string w;
            std::vector<std::string> words;
            while (ls >> w) words.push_back(w);
            if (!words.empty() && words[0] == "interval") {
                if (words.size() != 3) throw parse_error(lineno, "expected: points interval <lo> <hi>");
                d.interval_mode = true;
                d.lo = rat_parse(words[1]);
                d.hi = rat_parse(words[2]);
                if (d.hi < d.lo) throw parse_error(lineno, "empty interval");
            } else {
                if (words.empty()) throw parse_error(lineno, "expected point names");
                std::set<std::string> seen;
                for (const auto& n : words) {
                    if (!seen.insert(n).second) throw parse_error(lineno, "duplicate point '" + n + "'");
                    d.point_names.push_back(n);
                }
            }
        } else if (head == "cover") {
            if (!have_points) throw parse_error(lineno, "cover before points");
            std::string idx_text;
            if (!(ls >> idx_text)) throw parse_error(lineno, "expected: cover <n>: ...");
            if (!idx_text.empty() && idx_text.back() == ':') idx_text.pop_back();
            unsigned idx = 0;
            try { idx = static_cast<unsigned>(std::stoul(idx_text)); } catch (...) {
                throw parse_error(lineno, "bad cover index '" + idx_text + "'");
            }
            if (idx != d.covers.size() + 1)
                throw parse_error(lineno, "cover indices must be 1-based and sequential");
            std::string rest;
            std::getline(ls, rest);
            std::vector<BasisBlock> cover;
            std::size_t i = 0;
            while (i < rest.size()) {
                while (i < rest.size() && rest[i] != '{') ++i;
                if (i >= rest.size()) break;
                auto close = rest.find('}', i);
                if (close == std::string::npos) throw parse_error(lineno, "unbalanced '{'");
                std::istringstream bs(rest.substr(i + 1, close - i - 1));
                BasisBlock b;
                std::string w;
                std::vector<std::string> words;
                while (bs >> w) words.push_back(w);
                if (d.interval_mode) {
                    if (words.size() != 2) throw parse_error(lineno, "interval block needs two rationals");
                    b.lo = rat_parse(words[0]);
                    b.hi = rat_parse(words[1]);
                    if (b.hi < b.lo) throw parse_error(lineno, "empty block");
                    b.label = words[0] + ".." + words[1];
                } else {
                    for (const auto& n : words) {
                        auto it = std::find(d.point_names.begin(), d.point_names.end(), n);
                        if (it == d.point_names.end())
                            throw parse_error(lineno, "undeclared point '" + n + "'");
                        b.members.push_back(static_cast<std::size_t>(it - d.point_names.begin()));
                        b.label += (b.label.empty() ? "" : "+") + n;
                    }
                    std::sort(b.members.begin(), b.members.end());
                    b.members.erase(std::unique(b.members.begin(), b.members.end()), b.members.end());
                }
                cover.push_back(std::move(b));
                i = close + 1;
            }
            if (cover.empty()) throw parse_error(lineno, "cover has no blocks");
            if (d.interval_mode)
                std::sort(cover.begin(), cover.end(), [](const BasisBlock& a, const BasisBlock& b) {
                    return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
                });
            d.covers.push_back(std::move(cover));
        } else {
            throw parse_error(lineno, "unknown directive '" + head + "'");
        }
    }
    if (!have_points) throw parse_error("missing points line");
    if (d.covers.empty()) throw parse_error("descriptor has no covers");
    d.validate();
    return d;
}

// The standard dyadic-interval descriptor of a bounded window of R:
// 𝒰_n = level-n intervals [(m−1)/2^n,(m+1)/2^n] meeting the window.
inline UniformSpaceDescriptor dyadic_interval_descriptor(const Rat& lo, const Rat& hi, unsigned depth) {
    UniformSpaceDescriptor d;
    d.interval_mode = true;
    d.lo = lo;
    d.hi = hi;
    for (unsigned n = 1; n <= depth; ++n) {
        std::vector<BasisBlock> cover;
        for (const Dyadic& t : level_anticover(n, lo, hi)) {
            BasisBlock b;
            auto [blo, bhi] = dy_interval(t);
            b.lo = blo;
            b.hi = bhi;
            b.label = dy_label(t);
            cover.push_back(std::move(b));
        }
        d.covers.push_back(std::move(cover));
    }
    d.validate();
    return d;
}

// --- the standard representation B_X ----------------------------------------------

struct Representation {
    std::shared_ptr<const UniformSpaceDescriptor> desc;
    unsigned depth = 0;
    SpacePtr space;  // B_X up to the depth; tokens pack (level << 32) | block
    std::vector<std::size_t> level_offsets;  // enumeration prefix sums

    static TokenIndex pack(unsigned level, std::size_t block) {
        return ((TokenIndex)level << 32) | (TokenIndex)block;
    }
    static std::pair<unsigned, std::size_t> unpack(TokenIndex t) {
        return {static_cast<unsigned>(t >> 32), static_cast<std::size_t>(t & 0xffffffffu)};
    }

    const BasisBlock& block_of(TokenIndex t) const {
        auto [lvl, idx] = unpack(t);
        if (lvl == 0 || lvl > depth || idx >= desc->covers[lvl - 1].size())
            throw domain_error("foreign representation token");
        return desc->covers[lvl - 1][idx];
    }
    unsigned level_of(TokenIndex t) const { return unpack(t).first; }

    // all tokens of one level, in block order: the level uni-cover
    Cliq level_family(unsigned level) const {
        if (level == 0 || level > depth) throw domain_error("no cover at that level");
        Cliq out;
        for (std::size_t i = 0; i < desc->covers[level - 1].size(); ++i) out.push_back(pack(level, i));
        return out;
    }

    std::size_t token_count() const { return level_offsets.empty() ? 0 : level_offsets.back(); }
};

// Tokens ⨿_{n≤depth} 𝒰_n with (n,U) ⌢ (m,V) iff n≠m and U∩V≠∅, built as a
// lazy space so deep interval bases stay cheap; extra strict pairs can be
// injected to build deliberately broken test representations.
inline Representation build_standard_rep(const UniformSpaceDescriptor& d, unsigned depth,
                                         const std::vector<std::pair<TokenIndex, TokenIndex>>&
                                             spurious_pairs = {}) {
    d.validate();
    if (depth > d.covers.size()) throw domain_error("descriptor has no cover at the requested depth");
    Representation rep;
    rep.desc = std::make_shared<UniformSpaceDescriptor>(d);
    rep.depth = depth;
    rep.level_offsets.push_back(0);
    for (unsigned n = 1; n <= depth; ++n)
        rep.level_offsets.push_back(rep.level_offsets.back() + d.covers[n - 1].size());

    auto desc = rep.desc;
    auto offsets = rep.level_offsets;
    std::set<std::pair<TokenIndex, TokenIndex>> spurious;
    for (auto [a, b] : spurious_pairs) {
        spurious.insert({std::min(a, b), std::max(a, b)});
    }
    LazyAtomOps ops;
    ops.valid = [desc, depth](TokenIndex t) {
        auto [lvl, idx] = Representation::unpack(t);
        return lvl >= 1 && lvl <= depth && idx < desc->covers[lvl - 1].size() &&
               (t >> 64) == 0;
    };
    ops.strict_coherent = [desc, spurious](TokenIndex a, TokenIndex b) {
        if (a == b) return false;
        if (spurious.count({std::min(a, b), std::max(a, b)})) return true;
        auto [n, i] = Representation::unpack(a);
        auto [m, j] = Representation::unpack(b);
        if (n == m) return false;
        return desc->blocks_overlap(desc->covers[n - 1][i], desc->covers[m - 1][j]);
    };
    ops.at_position = [desc, offsets](std::uint64_t pos) {
        for (std::size_t n = 1; n < offsets.size(); ++n)
            if (pos < offsets[n]) return Representation::pack(static_cast<unsigned>(n), pos - offsets[n - 1]);
        throw domain_error("position out of range");
    };
    ops.position_of = [offsets](TokenIndex t) {
        auto [lvl, idx] = Representation::unpack(t);
        return offsets[lvl - 1] + idx;
    };
    ops.label = [desc](TokenIndex t) {
        auto [lvl, idx] = Representation::unpack(t);
        const std::string& bl = desc->covers[lvl - 1][idx].label;
        return "u" + std::to_string(lvl) + "_" + (bl.empty() ? std::to_string(idx) : bl);
    };
    ops.parse = [desc, depth](const std::string& s) -> std::optional<TokenIndex> {
        if (s.size() < 2 || s[0] != 'u') return std::nullopt;
        auto us = s.find('_');
        if (us == std::string::npos) return std::nullopt;
        unsigned lvl = 0;
        try { lvl = static_cast<unsigned>(std::stoul(s.substr(1, us - 1))); } catch (...) { return std::nullopt; }
        if (lvl < 1 || lvl > depth) return std::nullopt;
        std::string bl = s.substr(us + 1);
        const auto& cover = desc->covers[lvl - 1];
        for (std::size_t i = 0; i < cover.size(); ++i) {
            const std::string& lab = cover[i].label.empty() ? std::to_string(i) : cover[i].label;
            if (lab == bl) return Representation::pack(lvl, i);
        }
        return std::nullopt;
    };
    rep.space = CoherenceSpace::atomic_lazy("B" + std::to_string(depth), std::move(ops));
    return rep;
}

struct DecodeResult {
    enum class Status { Point, Interval, Ambiguous, Undefined } status = Status::Undefined;
    std::size_t point = 0;  // finite mode
    Rat lo, hi;             // interval mode: the residual interval
};

// δ_X: the unique point in the intersection of the named blocks (finite
// mode), or the residual interval (interval mode). Empty or ambiguous
// intersections are undefined.
inline DecodeResult delta_decode(const Representation& rep, const Cliq& a, unsigned depth_limit) {
    DecodeResult r;
    if (!is_clique(rep.space, a)) throw domain_error("delta_decode input is not a clique");
    if (!rep.desc->interval_mode) {
        std::vector<std::size_t> inter;
        bool first = true;
        for (TokenIndex t : a) {
            if (rep.level_of(t) > depth_limit) continue;
            const auto& members = rep.block_of(t).members;
            if (first) { inter = members; first = false; }
            else {
                std::vector<std::size_t> next;
                std::set_intersection(inter.begin(), inter.end(), members.begin(), members.end(),
                                      std::back_inserter(next));
                inter = std::move(next);
            }
        }
        if (first || inter.empty()) return r;  // empty clique or empty meet
        if (inter.size() > 1) {                 // a name indicating several points
            r.status = DecodeResult::Status::Ambiguous;
            return r;
        }
        r.status = DecodeResult::Status::Point;
        r.point = inter[0];
        return r;
    }
    bool first = true;
    Rat lo, hi;
    for (TokenIndex t : a) {
        if (rep.level_of(t) > depth_limit) continue;
        const BasisBlock& b = rep.block_of(t);
        if (first) { lo = b.lo; hi = b.hi; first = false; }
        else { lo = rat_max(lo, b.lo); hi = rat_min(hi, b.hi); }
    }
    if (first || hi < lo) return r;
    r.status = DecodeResult::Status::Interval;
    r.lo = lo;
    r.hi = hi;
    return r;
}

// The canonical name of a point: one block per level (the first containing
// it). These are the sampled elements of Dom(δ).
inline Cliq canonical_name_finite(const Representation& rep, std::size_t point) {
    Cliq a;
    for (unsigned n = 1; n <= rep.depth; ++n) {
        bool found = false;
        for (TokenIndex t : rep.level_family(n)) {
            if (rep.desc->block_contains_point(rep.block_of(t), point)) { a.push_back(t); found = true; break; }
        }
        if (!found) throw error("internal: level cover misses a point");
    }
    return normalized(a);
}

inline Cliq canonical_name_interval(const Representation& rep, const Rat& q) {
    Cliq a;
    for (unsigned n = 1; n <= rep.depth; ++n) {
        const auto& cover = rep.desc->covers[n - 1];
        // dyadic bases are endpoint-monotone, so the first block containing q
        // sits right after the blocks ending before it
        auto it = std::partition_point(cover.begin(), cover.end(),
                                       [&](const BasisBlock& b) { return b.hi < q; });
        std::size_t first = static_cast<std::size_t>(it - cover.begin());
        bool found = false;
        for (std::size_t i = first; i < cover.size(); ++i) {
            if (cover[i].lo > q) break;
            if (q <= cover[i].hi) {
                a.push_back(Representation::pack(n, i));
                found = true;
                break;
            }
        }
        if (!found) throw domain_error("point " + rat_str(q) + " lies outside the window");
    }
    return normalized(a);
}

// --- linearish ------------------------------------------------------------------

struct LinearishReport {
    bool cond_coherence = true;   // (i) coherent tokens have overlapping images
    bool cond_pullback = true;    // (ii) every basis cover pulls back to a level uni-cover
    std::string witness;
};

// Standard representations are linearish: γ[↑(n,U)] = U makes (i) the
// coherence condition itself, and level families witness (ii).
inline LinearishReport linearish_check(const Representation& rep, unsigned depth) {
    LinearishReport r;
    std::vector<TokenIndex> toks;
    for (unsigned n = 1; n <= rep.depth; ++n)
        for (TokenIndex t : rep.level_family(n)) toks.push_back(t);
    for (std::size_t i = 0; i < toks.size() && r.cond_coherence; ++i)
        for (std::size_t j = i + 1; j < toks.size(); ++j) {
            if (!rep.space->strictly_coherent(toks[i], toks[j])) continue;
            if (!rep.desc->blocks_overlap(rep.block_of(toks[i]), rep.block_of(toks[j]))) {
                r.cond_coherence = false;
                r.witness = "tokens " + rep.space->token_label(toks[i]) + " and " +
                            rep.space->token_label(toks[j]) +
                            " are coherent but their blocks are disjoint";
                break;
            }
        }
    for (unsigned n = 1; n <= depth && r.cond_pullback; ++n) {
        Cliq fam = rep.level_family(n);
        if (fam.empty()) { r.cond_pullback = false; r.witness = "no level-" + std::to_string(n) + " tokens"; break; }
        if (!is_anticlique(rep.space, fam)) {
            r.cond_pullback = false;
            r.witness = "level-" + std::to_string(n) + " family is not an anti-clique";
        }
        // sharing (n,U) forces both decodings into U: containment is
        // structural, so the exhibit is the family itself
    }
    return r;
}

// --- the extension lemma -----------------------------------------------------------

// The image γ[↑x] of a token, in the target descriptor's terms.
struct TokenImage {
    bool interval_mode = false;
    std::vector<std::size_t> points;
    Rat lo, hi;
};

namespace detail {

// Interval covers sorted with nondecreasing endpoints (dyadic level covers
// are) admit binary-searched candidate windows around a probe point.
inline bool monotone_interval_cover(const std::vector<BasisBlock>& cover) {
    for (std::size_t i = 0; i + 1 < cover.size(); ++i)
        if (cover[i + 1].lo < cover[i].lo || cover[i + 1].hi < cover[i].hi) return false;
    return true;
}

// Indices of blocks whose closed interval meets [plo, phi].
inline std::pair<std::size_t, std::size_t> candidate_block_range(const std::vector<BasisBlock>& cover,
                                                                 const Rat& plo, const Rat& phi) {
    auto lo_it = std::partition_point(cover.begin(), cover.end(),
                                      [&](const BasisBlock& b) { return b.hi < plo; });
    auto hi_it = std::partition_point(cover.begin(), cover.end(),
                                      [&](const BasisBlock& b) { return !(b.lo > phi); });
    return {static_cast<std::size_t>(lo_it - cover.begin()),
            static_cast<std::size_t>(hi_it - cover.begin())};
}

}  // namespace detail

inline bool image_inside_block(const TokenImage& img, const BasisBlock& b, bool interval_mode) {
    if (interval_mode) return b.lo <= img.lo && img.hi <= b.hi;
    return std::includes(b.members.begin(), b.members.end(), img.points.begin(), img.points.end());
}

// A linearish representation of (a subspace of) the target descriptor's
// space: domain coherence space, per-target-level uni-covers, per-token
// images. Standard reps and f∘δ compositions both fit this shape.
struct LinearishRep {
    SpacePtr space;
    std::vector<Cliq> unicovers;  // unicovers[n-1] = 𝔠_n
    std::function<TokenImage(TokenIndex)> image;
};

// Linearish data of a standard representation toward a possibly different
// basis of the same space: per target level, the first domain level all of
// whose blocks fit inside some target block.
inline LinearishRep linearish_into(const Representation& rep, const UniformSpaceDescriptor& target,
                                   unsigned target_depth) {
    if (target_depth > target.covers.size()) throw domain_error("target basis too shallow");
    LinearishRep g;
    g.space = rep.space;
    for (unsigned n = 1; n <= target_depth; ++n) {
        bool found = false;
        for (unsigned s = 1; s <= rep.depth && !found; ++s) {
            Cliq fam = rep.level_family(s);
            bool all_fit = true;
            for (TokenIndex t : fam) {
                const BasisBlock& b = rep.block_of(t);
                bool fit = false;
                for (const auto& tb : target.covers[n - 1]) {
                    bool sub = target.interval_mode
                                   ? (tb.lo <= b.lo && b.hi <= tb.hi)
                                   : std::includes(tb.members.begin(), tb.members.end(),
                                                   b.members.begin(), b.members.end());
                    if (sub) { fit = true; break; }
                }
                if (!fit) { all_fit = false; break; }
            }
            if (all_fit) { g.unicovers.push_back(fam); found = true; }
        }
        if (!found)
            throw domain_error("linearish violation: no domain level refines target cover " +
                               std::to_string(n));
    }
    bool iv = rep.desc->interval_mode;
    g.image = [rep, iv](TokenIndex t) {
        TokenImage img;
        img.interval_mode = iv;
        const BasisBlock& b = rep.block_of(t);
        if (iv) { img.lo = b.lo; img.hi = b.hi; }
        else img.points = b.members;
        return img;
    };
    return g;
}

inline LinearishRep as_linearish(const Representation& rep) {
    LinearishRep g;
    g.space = rep.space;
    for (unsigned n = 1; n <= rep.depth; ++n) g.unicovers.push_back(rep.level_family(n));
    bool iv = rep.desc->interval_mode;
    g.image = [rep, iv](TokenIndex t) {
        TokenImage img;
        img.interval_mode = iv;
        const BasisBlock& b = rep.block_of(t);
        if (iv) { img.lo = b.lo; img.hi = b.hi; }
        else img.points = b.members;
        return img;
    };
    return g;
}

// γ = f∘δ for an interval-mode rep and a uniformly continuous registry
// function: images are exact interval images; uni-covers are discovered as
// the coarsest level families whose images fit level-n target blocks.
inline LinearishRep compose_linearish(const Representation& rep, const FunctionSpec& f,
                                      const UniformSpaceDescriptor& target) {
    if (!rep.desc->interval_mode || !target.interval_mode)
        throw unsupported_error("compose_linearish works on interval-mode descriptors");
    if (f.arity != 1 || !f.uniform()) throw domain_error("compose_linearish needs a unary uniform function");
    LinearishRep g;
    g.space = rep.space;
    auto fits_some = [&](TokenIndex t, const std::vector<BasisBlock>& cover, unsigned n) {
        const BasisBlock& b = rep.block_of(t);
        // any admissible target block contains a probe point of f's image
        Dyadic probe = f.round_at({(b.lo + b.hi) / 2}, n + 8);
        Rat plo = dy_value(probe) - rat_pow2_neg(n + 8);
        Rat phi = dy_value(probe) + rat_pow2_neg(n + 8);
        auto [first, last] = detail::candidate_block_range(cover, plo, phi);
        for (std::size_t i = first; i < last; ++i)
            if (f.image_within(b.lo, b.hi, cover[i].lo, cover[i].hi)) return true;
        return false;
    };
    for (unsigned n = 1; n <= target.covers.size(); ++n) {
        bool found = false;
        for (unsigned s = 1; s <= rep.depth && !found; ++s) {
            Cliq fam = rep.level_family(s);
            bool all_fit = true;
            for (TokenIndex t : fam)
                if (!fits_some(t, target.covers[n - 1], n)) { all_fit = false; break; }
            if (all_fit) { g.unicovers.push_back(fam); found = true; }
        }
        if (!found)
            throw domain_error("linearish violation: no domain level fits inside target cover " +
                               std::to_string(n));
    }
    // containment tests against target blocks go through f via image_within;
    // the stored image is the source block itself
    g.image = [rep](TokenIndex t) {
        TokenImage img;
        img.interval_mode = true;
        const BasisBlock& b = rep.block_of(t);
        img.lo = b.lo;
        img.hi = b.hi;
        return img;
    };
    return g;
}

// F(a) = {ψ(x,n) : n ≤ depth, x ∈ a∩𝔠_n} with ψ(x,n) the first target block
// containing γ[↑x]. Validates as a linear trace and commutes with decoders.
inline Trace extension_trace(const LinearishRep& gamma, const Representation& delta,
                             const FunctionSpec* through = nullptr) {
    unsigned depth = static_cast<unsigned>(gamma.unicovers.size());
    if (depth > delta.depth) throw domain_error("target representation is too shallow");
    std::vector<TracePair> pairs;
    for (unsigned n = 1; n <= depth; ++n) {
        const auto& cover = delta.desc->covers[n - 1];
        bool fast = delta.desc->interval_mode && detail::monotone_interval_cover(cover);
        for (TokenIndex x : gamma.unicovers[n - 1]) {
            TokenImage img = gamma.image(x);
            std::optional<TokenIndex> psi;
            auto admissible = [&](const BasisBlock& b) {
                return through ? through->image_within(img.lo, img.hi, b.lo, b.hi)
                               : image_inside_block(img, b, delta.desc->interval_mode);
            };
            if (fast) {
                // any admissible block contains a probe point of the image
                Rat plo = img.lo, phi = img.hi;
                if (through) {
                    Dyadic probe = through->round_at({(img.lo + img.hi) / 2}, n + 8);
                    plo = dy_value(probe) - rat_pow2_neg(n + 8);
                    phi = dy_value(probe) + rat_pow2_neg(n + 8);
                }
                auto [first, last] = detail::candidate_block_range(cover, plo, phi);
                for (std::size_t i = first; i < last; ++i)
                    if (admissible(cover[i])) { psi = Representation::pack(n, i); break; }
            } else {
                for (TokenIndex u : delta.level_family(n))
                    if (admissible(delta.block_of(u))) { psi = u; break; }
            }
            if (!psi)
                throw domain_error("linearish violation: no admissible block for token " +
                                   gamma.space->token_label(x) + " at level " + std::to_string(n));
            pairs.push_back({{x}, *psi});
        }
    }
    Trace t(TraceKind::Linear, gamma.space, delta.space, std::move(pairs));
    return t;
}

// --- chain-connectedness and the quotient refutation --------------------------------

inline bool chain_connected(const UniformSpaceDescriptor& d, unsigned level) {
    if (level == 0 || level > d.covers.size()) throw domain_error("no cover at that level");
    const auto& blocks = d.covers[level - 1];
    std::vector<std::size_t> comp(blocks.size());
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (comp[i] != i) { comp[i] = comp[comp[i]]; i = comp[i]; }
        return i;
    };
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = i + 1; j < blocks.size(); ++j)
            if (d.blocks_overlap(blocks[i], blocks[j])) comp[find(i)] = find(j);
    std::size_t root = find(0);
    for (std::size_t i = 1; i < blocks.size(); ++i)
        if (find(i) != root) return false;
    return true;
}

struct RefutationVerdict {
    enum class Kind { ConsistentLevelForm, Refuted, NotAnticlique } kind = Kind::ConsistentLevelForm;
    Cliq witness_a, witness_b;
    std::string detail;
};

// If a candidate anti-clique contains (n,U) but omits an overlapping (n,U′),
// the proof's witness pair a, a′ ∈ Dom(δ) (identical except at level n)
// refutes it: a⊥𝔠 and a′⊥𝔠 cannot both hold. Level-form candidates are
// consistent.
inline RefutationVerdict unicover_shape_refutation(const Representation& rep, const Cliq& candidate,
                                                   unsigned depth) {
    RefutationVerdict v;
    for (unsigned n = 1; n <= depth; ++n)
        if (!chain_connected(*rep.desc, n))
            throw precondition_error("descriptor is not chain-connected at level " + std::to_string(n));
    if (candidate.empty()) { v.kind = RefutationVerdict::Kind::Refuted; v.detail = "empty candidate covers nothing"; return v; }
    for (std::size_t i = 0; i < candidate.size(); ++i)
        for (std::size_t j = i + 1; j < candidate.size(); ++j)
            if (rep.space->strictly_coherent(candidate[i], candidate[j])) {
                v.kind = RefutationVerdict::Kind::NotAnticlique;
                v.detail = "tokens " + rep.space->token_label(candidate[i]) + " and " +
                           rep.space->token_label(candidate[j]) + " are coherent";
                return v;
            }
    for (unsigned n = 1; n <= depth; ++n) {
        if (normalized(candidate) == normalized(rep.level_family(n))) {
            v.kind = RefutationVerdict::Kind::ConsistentLevelForm;
            v.detail = "candidate is the full level-" + std::to_string(n) + " family";
            return v;
        }
    }
    // find (n,U) present and (n,U') missing with U∩U'≠∅
    for (TokenIndex t : candidate) {
        unsigned n = rep.level_of(t);
        for (TokenIndex t2 : rep.level_family(n)) {
            if (contains_token(candidate, t2)) continue;
            if (!rep.desc->blocks_overlap(rep.block_of(t), rep.block_of(t2))) continue;
            // p ∈ U∩U'; name p through both tokens
            Cliq shared;
            for (unsigned m = 1; m <= depth; ++m) {
                if (m == n) continue;
                for (TokenIndex u : rep.level_family(m)) {
                    bool contains_p;
                    if (rep.desc->interval_mode) {
                        Rat plo = rat_max(rep.block_of(t).lo, rep.block_of(t2).lo);
                        Rat phi = rat_min(rep.block_of(t).hi, rep.block_of(t2).hi);
                        Rat p = (plo + phi) / 2;
                        contains_p = rep.block_of(u).lo <= p && p <= rep.block_of(u).hi;
                    } else {
                        std::vector<std::size_t> meet;
                        const auto& ma = rep.block_of(t).members;
                        const auto& mb = rep.block_of(t2).members;
                        std::set_intersection(ma.begin(), ma.end(), mb.begin(), mb.end(),
                                              std::back_inserter(meet));
                        contains_p = rep.desc->block_contains_point(rep.block_of(u), meet.front());
                    }
                    if (contains_p) { shared.push_back(u); break; }
                }
            }
            Cliq a = normalized(cliq_union(shared, {t}));
            Cliq b = normalized(cliq_union(shared, {t2}));
            std::size_t ka = intersection_size(a, normalized(candidate));
            std::size_t kb = intersection_size(b, normalized(candidate));
            v.kind = RefutationVerdict::Kind::Refuted;
            v.witness_a = a;
            v.witness_b = b;
            v.detail = "witness names through " + rep.space->token_label(t) + " and " +
                       rep.space->token_label(t2) + " meet the candidate in " + std::to_string(ka) +
                       " and " + std::to_string(kb) + " tokens; a uni-cover of Dom(δ) must meet both exactly once";
            return v;
        }
    }
    v.kind = RefutationVerdict::Kind::Refuted;
    v.detail = "candidate is not of level form yet no same-level overlapping omission exists; "
               "it cannot cover Dom(δ)";
    return v;
}

// --- finite representation constructions (tensor, bang, lollipop) ------------------

struct FiniteRep {
    SpacePtr space;
    std::vector<std::string> point_names;
    std::vector<std::pair<Cliq, std::size_t>> graph;  // (domain clique, decoded point)

    CliqSet domain() const {
        CliqSet d;
        for (const auto& [c, p] : graph) d.push_back(c);
        return canonical_set(std::move(d));
    }
};

inline FiniteRep rep_construct_tensor(const FiniteRep& a, const FiniteRep& b) {
    FiniteRep r;
    r.space = CoherenceSpace::tensor(a.space, b.space);
    for (const auto& pn : a.point_names)
        for (const auto& qn : b.point_names) r.point_names.push_back("(" + pn + "," + qn + ")");
    for (const auto& [ca, pa] : a.graph)
        for (const auto& [cb, pb] : b.graph)
            r.graph.push_back({tensor_clique(r.space, ca, cb), pa * b.point_names.size() + pb});
    return r;
}

inline FiniteRep rep_construct_bang(const FiniteRep& a, std::uint64_t cap = (1u << 20)) {
    FiniteRep r;
    r.space = CoherenceSpace::bang(a.space, cap);
    r.point_names = a.point_names;
    for (const auto& [c, p] : a.graph) r.graph.push_back({bang_clique(r.space, c), p});
    return r;
}

// [ρ_X⊸ρ_Y](κ) = f iff κ̂ tracks f: every representative of every point maps
// to a representative of f(point), consistently.
inline FiniteRep rep_construct_lollipop(const FiniteRep& a, const FiniteRep& b,
                                        std::uint64_t clique_cap = (1u << 22)) {
    FiniteRep r;
    r.space = CoherenceSpace::lollipop(a.space, b.space);
    std::map<std::vector<std::size_t>, std::size_t> fn_ids;
    for (const auto& kappa : all_cliques(r.space, clique_cap)) {
        std::vector<std::size_t> fmap(a.point_names.size(), SIZE_MAX);
        bool ok = true;
        for (const auto& [c, p] : a.graph) {
            Cliq img = hat_apply(r.space, kappa, c);
            std::optional<std::size_t> decoded;
            for (const auto& [cb, q] : b.graph)
                if (cb == img) { decoded = q; break; }
            if (!decoded) { ok = false; break; }
            if (fmap[p] != SIZE_MAX && fmap[p] != *decoded) { ok = false; break; }
            fmap[p] = *decoded;
        }
        if (!ok) continue;
        for (std::size_t p = 0; p < fmap.size(); ++p)
            if (fmap[p] == SIZE_MAX) { ok = false; break; }
        if (!ok) continue;
        auto [it, inserted] = fn_ids.emplace(fmap, fn_ids.size());
        if (inserted) {
            std::string name = "f[";
            for (std::size_t p = 0; p < fmap.size(); ++p)
                name += (p ? " " : "") + a.point_names[p] + "↦" + b.point_names[fmap[p]];
            r.point_names.push_back(name + "]");
        }
        r.graph.push_back({kappa, it->second});
    }
    return r;
}

// The classicality test Dom(ρ) = Dom(ρ)⊥⊥°, with a witness on failure.
struct ClassicalReport {
    bool ok = false;
    std::string witness;
};

inline ClassicalReport classical_check(const FiniteRep& rep, std::size_t token_cap = 16,
                                       std::uint64_t clique_cap = (1u << 22)) {
    ClassicalReport rpt;
    CliqSet dom = rep.domain();
    TotalityView view = TotalityView::exhaustive(rep.space, dom, token_cap, clique_cap);
    if (view.strict() == dom) { rpt.ok = true; return rpt; }
    for (const auto& c : view.strict())
        if (!set_contains(dom, c)) {
            rpt.witness = "strict closure element outside the domain: " + clique_label(rep.space, c);
            return rpt;
        }
    for (const auto& c : dom)
        if (!set_contains(view.strict(), c)) {
            rpt.witness = "domain clique not strict in the closure: " + clique_label(rep.space, c);
            return rpt;
        }
    return rpt;
}

}  // namespace cohsp
