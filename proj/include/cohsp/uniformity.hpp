#pragma once

// Cover algebra and the uniform structures induced by co-totality. Points of
// a view-backed uniform space are the strict total cliques T°; a uni-cover is
// a strict total anti-clique 𝔠 (blocks ↑x° for x∈𝔠), an unbounded cover a
// strict total anti-clique of !X (blocks ↑a°). Abstract finite covers are
// also supported so the cover algebra is testable on bare point sets.

#include "totality.hpp"

namespace cohsp {

// A cover of an abstract finite point set {0..point_count-1}.
struct Cover {
    std::size_t point_count = 0;
    std::vector<std::vector<std::size_t>> blocks;  // each sorted
    std::vector<std::string> keys;                 // parallel to blocks (may be empty)

    bool covers_all() const {
        std::vector<bool> hit(point_count, false);
        for (const auto& b : blocks)
            for (std::size_t p : b) hit[p] = true;
        for (bool h : hit)
            if (!h) return false;
        return true;
    }
};

inline std::vector<std::vector<std::size_t>> block_set(const Cover& u) {
    auto b = u.blocks;
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

inline bool same_blocks(const Cover& u, const Cover& v) { return block_set(u) == block_set(v); }

// 𝒰 ⪯ 𝒱 : every block of U is contained in some block of V.
inline bool cover_refines(const Cover& u, const Cover& v) {
    if (u.point_count != v.point_count) throw domain_error("covers are over different point sets");
    for (const auto& bu : u.blocks) {
        bool inside = false;
        for (const auto& bv : v.blocks)
            if (std::includes(bv.begin(), bv.end(), bu.begin(), bu.end())) { inside = true; break; }
        if (!inside) return false;
    }
    return true;
}

// Pairwise intersections, empty ones dropped; the meet under refinement.
inline Cover cover_meet(const Cover& u, const Cover& v) {
    if (u.point_count != v.point_count) throw domain_error("covers are over different point sets");
    Cover m;
    m.point_count = u.point_count;
    for (std::size_t i = 0; i < u.blocks.size(); ++i) {
        for (std::size_t j = 0; j < v.blocks.size(); ++j) {
            std::vector<std::size_t> w;
            std::set_intersection(u.blocks[i].begin(), u.blocks[i].end(), v.blocks[j].begin(),
                                  v.blocks[j].end(), std::back_inserter(w));
            if (w.empty()) continue;
            std::string key;
            if (i < u.keys.size() && j < v.keys.size()) key = u.keys[i] + "∧" + v.keys[j];
            m.blocks.push_back(std::move(w));
            m.keys.push_back(std::move(key));
        }
    }
    return m;
}

// st(A;𝒰) = ⋃{U∈𝒰 : A∩U ≠ ∅}
inline std::vector<std::size_t> star(const std::vector<std::size_t>& a, const Cover& u) {
    std::vector<std::size_t> out;
    for (const auto& b : u.blocks) {
        std::vector<std::size_t> meet;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(meet));
        if (!meet.empty()) out.insert(out.end(), b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline Cover star_closure(const Cover& u) {
    Cover s;
    s.point_count = u.point_count;
    for (std::size_t i = 0; i < u.blocks.size(); ++i) {
        s.blocks.push_back(star(u.blocks[i], u));
        s.keys.push_back(i < u.keys.size() ? "st(" + u.keys[i] + ")" : "");
    }
    return s;
}

inline bool star_refines(const Cover& u, const Cover& v) { return cover_refines(star_closure(u), v); }

// |x−y| < 𝒰 : some block contains both.
inline bool within(std::size_t x, std::size_t y, const Cover& u) {
    for (const auto& b : u.blocks)
        if (std::binary_search(b.begin(), b.end(), x) && std::binary_search(b.begin(), b.end(), y))
            return true;
    return false;
}

// --- view-backed covers ------------------------------------------------------

// Points are positions into view.strict(). ↑x° and ↑a° blocks.
inline std::vector<std::size_t> upper_block(const TotalityView& v, const Cliq& key) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.strict().size(); ++i)
        if (is_subset(key, v.strict()[i])) out.push_back(i);
    return out;
}

inline Cover materialize_unicover(const TotalityView& v, const Cliq& c) {
    Cover u;
    u.point_count = v.strict().size();
    for (TokenIndex x : c) {
        u.blocks.push_back(upper_block(v, {x}));
        u.keys.push_back(v.space()->token_label(x));
    }
    return u;
}

// An unbounded cover is identified by its set of finite-clique keys.
using UnboundedKeys = CliqSet;

inline Cover materialize_unbounded(const TotalityView& v, const UnboundedKeys& keys) {
    Cover u;
    u.point_count = v.strict().size();
    for (const auto& a : keys) {
        u.blocks.push_back(upper_block(v, a));
        u.keys.push_back(clique_label(v.space(), a));
    }
    return u;
}

inline UnboundedKeys singleton_embedding(const Cliq& c) {
    UnboundedKeys out;
    for (TokenIndex x : c) out.push_back({x});
    return out;
}

// 𝔄 ∈ T_{!X}⊥ without materializing the bang view: !a ∩ 𝔄 = {b∈𝔄 : b⊆a}
// must be a singleton for every total a.
inline bool is_total_unbounded(const TotalityView& v, const UnboundedKeys& keys) {
    for (const auto& a : v.total()) {
        std::size_t hits = 0;
        for (const auto& b : keys)
            if (is_subset(b, a)) ++hits;
        if (hits != 1) return false;
    }
    return true;
}

inline bool is_strict_unbounded(const TotalityView& v, const UnboundedKeys& keys) {
    if (!is_total_unbounded(v, keys)) return false;
    for (const auto& b : keys)
        if (upper_block(v, b).empty()) return false;
    return true;
}

// Strictification drops keys with empty blocks, which is what restricting
// 𝔠 to 𝔠° amounts to for covers.
inline UnboundedKeys strictify_unbounded(const TotalityView& v, UnboundedKeys keys) {
    UnboundedKeys out;
    for (auto& b : keys)
        if (!upper_block(v, b).empty()) out.push_back(std::move(b));
    return canonical_set(std::move(out));
}

// All uni-covers σ^b = (T⊥)° of an exhaustive view.
inline const CliqSet& enumerate_unicovers(const TotalityView& v) { return v.co_strict(); }

// All unbounded covers β^ub = (T⊥_{!X})°, by backtracking over anti-cliques
// of !X (keys pairwise incompatible) filtered by totality and strictness.
inline std::vector<UnboundedKeys> enumerate_unbounded_covers(const TotalityView& v,
                                                             std::uint64_t clique_cap = (1u << 22)) {
    std::vector<Cliq> tokens = all_cliques(v.space(), clique_cap);  // tokens of !X
    std::sort(tokens.begin(), tokens.end(), clique_less);
    const SpacePtr& x = v.space();
    auto compatible = [&](const Cliq& a, const Cliq& b) { return is_clique(x, cliq_union(a, b)); };
    std::vector<UnboundedKeys> out;
    UnboundedKeys cur;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (is_strict_unbounded(v, cur)) out.push_back(canonical_set(cur));
        for (std::size_t i = start; i < tokens.size(); ++i) {
            bool anti = true;
            for (const auto& b : cur)
                if (compatible(b, tokens[i])) { anti = false; break; }
            if (!anti) continue;
            cur.push_back(tokens[i]);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// 𝔄∧𝔅 := {a∪b : a∈𝔄, b∈𝔅, a≍b}°, the meet in the refinement order.
inline UnboundedKeys wedge_unbounded(const TotalityView& v, const UnboundedKeys& A, const UnboundedKeys& B) {
    UnboundedKeys raw;
    for (const auto& a : A)
        for (const auto& b : B) {
            Cliq u = cliq_union(a, b);
            if (is_clique(v.space(), u)) raw.push_back(std::move(u));
        }
    UnboundedKeys out = strictify_unbounded(v, canonical_set(std::move(raw)));
    if (!is_total_unbounded(v, out))
        throw error("internal: wedge of unbounded covers is not total");
    return out;
}

// Upper extension: finitely many uni-covers 𝔠₁..𝔠_m with a ∈ 𝔠₁∧…∧𝔠_m,
// one per token of a. Requires ↑a° nonempty.
inline std::vector<Cliq> upper_extension(const Cliq& a, const TotalityView& v) {
    if (a.empty()) return {};
    if (upper_block(v, a).empty())
        throw precondition_error("upper_extension: ↑a° is empty for " + clique_label(v.space(), a));
    std::vector<Cliq> out;
    for (TokenIndex x : a) {
        bool found = false;
        for (const auto& c : v.co_strict())
            if (contains_token(c, x)) { out.push_back(c); found = true; break; }
        if (!found)
            throw error("internal: token " + v.space()->token_label(x) +
                        " of an extendable clique lies in no strict co-total anti-clique");
    }
    return out;
}

// The unbounded cover 𝔠₁∧…∧𝔠_m containing a (empty wedge = trivial cover {∅}).
inline UnboundedKeys upper_extension_cover(const Cliq& a, const TotalityView& v) {
    std::vector<Cliq> cs = upper_extension(a, v);
    UnboundedKeys acc = strictify_unbounded(v, {Cliq{}});
    for (const auto& c : cs) acc = wedge_unbounded(v, acc, singleton_embedding(c));
    return acc;
}

// Cut down and divide: 𝔅 with Σ_{b∈𝔅}↑b° = ↑a_n° \ ⋃_{i<n}↑a_i°.
inline UnboundedKeys finite_divide(const std::vector<Cliq>& as, const TotalityView& v) {
    if (as.empty()) throw domain_error("finite_divide needs at least one clique");
    const Cliq& last = as.back();
    if (upper_block(v, last).empty()) return {};
    UnboundedKeys acc = {last};
    for (std::size_t i = 0; i + 1 < as.size(); ++i) {
        if (upper_block(v, as[i]).empty()) continue;  // removes nothing
        UnboundedKeys cover_i = upper_extension_cover(as[i], v);
        UnboundedKeys minus;
        for (const auto& b : cover_i)
            if (b != as[i]) minus.push_back(b);
        UnboundedKeys next;
        for (const auto& b : minus)
            for (const auto& c : acc) {
                Cliq u = cliq_union(b, c);
                if (is_clique(v.space(), u)) next.push_back(std::move(u));
            }
        acc = canonical_set(std::move(next));
    }
    acc = strictify_unbounded(v, std::move(acc));
    // verify the stated block decomposition by point enumeration
    std::vector<bool> want(v.strict().size(), false);
    for (std::size_t p : upper_block(v, last)) want[p] = true;
    for (std::size_t i = 0; i + 1 < as.size(); ++i)
        for (std::size_t p : upper_block(v, as[i])) want[p] = false;
    std::vector<std::size_t> got_count(v.strict().size(), 0);
    for (const auto& b : acc)
        for (std::size_t p : upper_block(v, b)) ++got_count[p];
    for (std::size_t p = 0; p < want.size(); ++p) {
        if (want[p] != (got_count[p] == 1) || got_count[p] > 1)
            throw error("internal: finite_divide decomposition is wrong at point " +
                        clique_label(v.space(), v.strict()[p]));
    }
    return acc;
}

// Fine-uniformity witness: an unbounded cover refining the open cover
// {↑a_n°}. Precondition: the upper sets cover T°.
inline UnboundedKeys refine_open_cover(const std::vector<Cliq>& generators, const TotalityView& v) {
    std::vector<bool> covered(v.strict().size(), false);
    for (const auto& a : generators)
        for (std::size_t p : upper_block(v, a)) covered[p] = true;
    for (std::size_t p = 0; p < covered.size(); ++p)
        if (!covered[p])
            throw precondition_error("open cover does not cover T°: point " +
                                     clique_label(v.space(), v.strict()[p]) + " is missed");
    UnboundedKeys out;
    for (std::size_t n = 0; n < generators.size(); ++n) {
        std::vector<Cliq> prefix(generators.begin(), generators.begin() + static_cast<std::ptrdiff_t>(n + 1));
        for (auto& b : finite_divide(prefix, v)) out.push_back(std::move(b));
    }
    out = strictify_unbounded(v, canonical_set(std::move(out)));
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = i + 1; j < out.size(); ++j)
            if (is_clique(v.space(), cliq_union(out[i], out[j])))
                throw error("internal: refinement keys are not pairwise incompatible");
    if (!is_strict_unbounded(v, out)) throw error("internal: refinement is not a strict total anti-clique of !X");
    // every block fits under some generator: ∃k with a_k ⊆ b
    for (const auto& b : out) {
        bool fits = false;
        for (const auto& a : generators)
            if (is_subset(a, b)) { fits = true; break; }
        if (!fits) throw error("internal: refinement block " + clique_label(v.space(), b) +
                               " fits under no generator");
    }
    return out;
}

// --- uniformity axioms -------------------------------------------------------

struct AxiomReport {
    bool u1 = true, u2 = true, u3 = true, u4 = true;
    std::string u1_witness, u2_note, u3_witness, u4_witness;
    bool ok(const std::string& which) const {
        bool r = true;
        if (which.find("U1") != std::string::npos) r = r && u1;
        if (which.find("U2") != std::string::npos) r = r && u2;
        if (which.find("U3") != std::string::npos) r = r && u3;
        if (which.find("U4") != std::string::npos) r = r && u4;
        return r;
    }
};

// Axioms for a family of covers of a view's T°, given by unbounded-style key
// sets (uni-covers enter via their singleton embedding). U1 is structural:
// the wedge of two members must again be a member, key set for key set.
inline AxiomReport verify_uniformity_axioms(const TotalityView& v,
                                            const std::vector<UnboundedKeys>& family,
                                            const std::string& which = "U1 U3 U4") {
    AxiomReport rep;
    auto member = [&](const UnboundedKeys& k) {
        for (const auto& m : family)
            if (m == k) return true;
        return false;
    };
    if (which.find("U1") != std::string::npos) {
        for (std::size_t i = 0; i < family.size() && rep.u1; ++i)
            for (std::size_t j = i; j < family.size() && rep.u1; ++j) {
                UnboundedKeys w = wedge_unbounded(v, family[i], family[j]);
                if (!member(w)) {
                    rep.u1 = false;
                    rep.u1_witness = "meet of member " + std::to_string(i) + " and member " +
                                     std::to_string(j) + " leaves the family";
                }
            }
    }
    if (which.find("U2") != std::string::npos)
        rep.u2_note = "holds by generator representation: the family is read as a (sub-)basis, "
                      "upward closure is by construction";
    if (which.find("U3") != std::string::npos) {
        for (std::size_t i = 0; i < family.size() && rep.u3; ++i) {
            Cover ui = materialize_unbounded(v, family[i]);
            bool found = false;
            for (const auto& m : family)
                if (star_refines(materialize_unbounded(v, m), ui)) { found = true; break; }
            if (!found) {
                rep.u3 = false;
                rep.u3_witness = "no member star-refines member " + std::to_string(i);
            }
        }
    }
    if (which.find("U4") != std::string::npos) {
        const std::size_t n = v.strict().size();
        for (std::size_t x = 0; x < n && rep.u4; ++x)
            for (std::size_t y = x + 1; y < n && rep.u4; ++y) {
                bool separated = false;
                for (const auto& m : family)
                    if (!within(x, y, materialize_unbounded(v, m))) { separated = true; break; }
                if (!separated) {
                    rep.u4 = false;
                    rep.u4_witness = "points " + clique_label(v.space(), v.strict()[x]) + " and " +
                                     clique_label(v.space(), v.strict()[y]) + " are never separated";
                }
            }
    }
    return rep;
}

// Same axioms over abstract covers (U1 up to block-set equality).
inline AxiomReport verify_uniformity_axioms_abstract(const std::vector<Cover>& family,
                                                     std::size_t point_count,
                                                     const std::string& which = "U1 U3 U4") {
    AxiomReport rep;
    if (which.find("U1") != std::string::npos) {
        for (std::size_t i = 0; i < family.size() && rep.u1; ++i)
            for (std::size_t j = i; j < family.size() && rep.u1; ++j) {
                Cover m = cover_meet(family[i], family[j]);
                bool found = false;
                for (const auto& u : family)
                    if (same_blocks(u, m)) { found = true; break; }
                if (!found) {
                    rep.u1 = false;
                    rep.u1_witness = "meet of covers " + std::to_string(i) + "," + std::to_string(j);
                }
            }
    }
    if (which.find("U2") != std::string::npos)
        rep.u2_note = "holds by generator representation";
    if (which.find("U3") != std::string::npos) {
        for (std::size_t i = 0; i < family.size() && rep.u3; ++i) {
            bool found = false;
            for (const auto& u : family)
                if (star_refines(u, family[i])) { found = true; break; }
            if (!found) { rep.u3 = false; rep.u3_witness = "cover " + std::to_string(i); }
        }
    }
    if (which.find("U4") != std::string::npos) {
        for (std::size_t x = 0; x < point_count && rep.u4; ++x)
            for (std::size_t y = x + 1; y < point_count && rep.u4; ++y) {
                bool separated = false;
                for (const auto& u : family)
                    if (!within(x, y, u)) { separated = true; break; }
                if (!separated) {
                    rep.u4 = false;
                    rep.u4_witness = "points " + std::to_string(x) + "," + std::to_string(y);
                }
            }
    }
    return rep;
}

// --- strong uniform continuity ------------------------------------------------

// 𝔞 := (F⊥(𝔟))°, the continuity modulus read off the transpose.
// Verifies |a−b|<𝔞 ⇒ |F(a)−F(b)|<𝔟 exhaustively over T°_X when verify is set.
inline Cliq modulus_for(const Trace& f, const TotalityView& vx, const TotalityView& vy, const Cliq& b,
                        bool check_totality = true, bool verify = true) {
    if (f.kind() != TraceKind::Linear) throw domain_error("modulus_for expects a linear trace");
    if (!vy.is_total_anticlique(b)) throw domain_error("𝔟 is not a total anti-clique of the target view");
    if (check_totality && !is_total_trace(f, vx, vy, false))
        throw precondition_error("modulus_for: trace is not total w.r.t. the views");
    Trace ft = transpose(f);
    Cliq image = apply_trace(ft, b);
    if (!vx.is_total_anticlique(image))
        throw error("internal: transpose image of a co-total anti-clique is not co-total");
    Cliq a = vx.co_strict_part(image);
    if (verify) {
        std::vector<Cliq> images;
        images.reserve(vx.strict().size());
        for (const auto& p : vx.strict()) images.push_back(apply_trace(f, p));
        for (std::size_t i = 0; i < vx.strict().size(); ++i)
            for (std::size_t j = i; j < vx.strict().size(); ++j) {
                if (intersection_size(cliq_intersect(vx.strict()[i], vx.strict()[j]), a) == 0) continue;
                Cliq meet = cliq_intersect(cliq_intersect(images[i], images[j]), b);
                if (meet.empty())
                    throw error("internal: strong uniform continuity fails at points " +
                                clique_label(vx.space(), vx.strict()[i]) + ", " +
                                clique_label(vx.space(), vx.strict()[j]));
            }
    }
    return a;
}

// a ↦ !a, the bijection T°_X ≃ T°_{!X} behind the uniform homeomorphism.
inline Cliq bang_transport(const Cliq& a, const TotalityView& v, const SpacePtr& bang_space) {
    if (!v.is_total_clique(a) || v.strict_part(a) != a)
        throw domain_error("bang_transport expects a strict total clique");
    return bang_clique(bang_space, a);
}

}  // namespace cohsp
