#pragma once

// Totality via bi-orthogonality. A totality T on a space X is a set of
// cliques with T = T⊥⊥, where a ⊥ 𝔠 means a clique and an anti-clique meet
// in exactly one token. Exhaustive views enumerate everything on small
// finite spaces; the dyadic real space gets its own symbolic view elsewhere.

#include <set>

#include "maps.hpp"

namespace cohsp {

// a ⊥ 𝔠 : the intersection is a singleton.
inline bool orthogonal(const Cliq& a, const Cliq& c) { return intersection_size(a, c) == 1; }

using CliqSet = std::vector<Cliq>;  // kept sorted by clique_less, duplicate-free

inline CliqSet canonical_set(CliqSet s) {
    for (auto& c : s) c = normalized(c);
    std::sort(s.begin(), s.end(), clique_less);
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

inline bool set_contains(const CliqSet& s, const Cliq& c) {
    return std::binary_search(s.begin(), s.end(), c, clique_less);
}

// All anti-cliques of a finite space (= cliques of its dual).
inline CliqSet all_anticliques(const SpacePtr& s, std::uint64_t cap = (1u << 22)) {
    return all_cliques(CoherenceSpace::dual(s), cap);
}

// A⊥ = {𝔠 anti-clique : ∀a∈A. a⊥𝔠}, by exhaustive enumeration.
inline CliqSet perp_set(const CliqSet& A, const SpacePtr& x, std::uint64_t cap = (1u << 22)) {
    if (!x->finite()) throw unsupported_error("perp_set requires a finite space (use a symbolic view)");
    CliqSet out;
    for (auto& c : all_anticliques(x, cap)) {
        bool ok = true;
        for (const auto& a : A)
            if (!orthogonal(a, c)) { ok = false; break; }
        if (ok) out.push_back(std::move(c));
    }
    return canonical_set(std::move(out));
}

// The other direction: all cliques orthogonal to every member of C.
inline CliqSet perp_of_anticliques(const CliqSet& C, const SpacePtr& x, std::uint64_t cap = (1u << 22)) {
    if (!x->finite()) throw unsupported_error("perp requires a finite space");
    CliqSet out;
    for (auto& a : all_cliques(x, cap)) {
        bool ok = true;
        for (const auto& c : C)
            if (!orthogonal(a, c)) { ok = false; break; }
        if (ok) out.push_back(std::move(a));
    }
    return canonical_set(std::move(out));
}

inline CliqSet biorthogonal(const CliqSet& A, const SpacePtr& x, std::uint64_t cap = (1u << 22)) {
    return perp_of_anticliques(perp_set(A, x, cap), x, cap);
}

// An exhaustively computed totality: T, T⊥ and their strict parts.
class TotalityView {
public:
    static constexpr std::size_t default_token_cap = 14;

    // T := generators⊥⊥ (so T⊥ = generators⊥). Token count is hard-capped:
    // bi-orthogonality quantifies over all (anti-)cliques.
    static TotalityView exhaustive(SpacePtr space, const CliqSet& generators,
                                   std::size_t token_cap = default_token_cap,
                                   std::uint64_t clique_cap = (1u << 22)) {
        if (!space->finite()) throw unsupported_error("exhaustive view requires a finite space");
        if (space->token_count() > token_cap)
            throw resource_error("space exceeds the exhaustive-mode token cap (" +
                                 std::to_string(token_cap) + ")");
        for (const auto& g : generators)
            if (!is_clique(space, g)) throw domain_error("totality generator is not a clique");
        TotalityView v;
        v.space_ = std::move(space);
        v.co_total_ = perp_set(canonical_set(generators), v.space_, clique_cap);
        v.total_ = perp_of_anticliques(v.co_total_, v.space_, clique_cap);
        v.finish();
        return v;
    }

    // Builds a view from an explicitly known totality; verifies T = T⊥⊥.
    static TotalityView from_total_set(SpacePtr space, CliqSet total,
                                       std::uint64_t clique_cap = (1u << 22)) {
        TotalityView v;
        v.space_ = std::move(space);
        v.total_ = canonical_set(std::move(total));
        v.co_total_ = perp_set(v.total_, v.space_, clique_cap);
        CliqSet closure = perp_of_anticliques(v.co_total_, v.space_, clique_cap);
        if (closure != v.total_)
            throw domain_error("given set is not bi-orthogonally closed (T != T⊥⊥)");
        v.finish();
        return v;
    }

    const SpacePtr& space() const { return space_; }
    const CliqSet& total() const { return total_; }        // T
    const CliqSet& co_total() const { return co_total_; }  // T⊥
    const CliqSet& strict() const { return strict_; }      // T°
    const CliqSet& co_strict() const { return co_strict_; }  // (T⊥)°

    bool is_total_clique(const Cliq& a) const { return set_contains(total_, a); }
    bool is_total_anticlique(const Cliq& c) const { return set_contains(co_total_, c); }

    // a° := ⋂{b ∈ T : b ⊆ a}, computed by greedy removal and re-verified
    // against the intersection definition.
    Cliq strict_part(const Cliq& a) const { return strict_part_in(total_, a); }
    Cliq co_strict_part(const Cliq& c) const { return strict_part_in(co_total_, c); }

    // Position of a strict total clique in the canonical point list T°.
    std::size_t strict_index(const Cliq& a) const {
        auto it = std::lower_bound(strict_.begin(), strict_.end(), a, clique_less);
        if (it == strict_.end() || *it != a) throw domain_error("not a strict total clique");
        return static_cast<std::size_t>(it - strict_.begin());
    }

    // The view of the dual space: totality and co-totality swap roles.
    TotalityView dual_view() const {
        TotalityView v;
        v.space_ = normalize_space(CoherenceSpace::dual(space_));
        v.total_ = co_total_;
        v.co_total_ = total_;
        v.strict_ = co_strict_;
        v.co_strict_ = strict_;
        return v;
    }

private:
    static Cliq strict_part_in(const CliqSet& family, const Cliq& a) {
        if (!std::binary_search(family.begin(), family.end(), a, clique_less))
            throw domain_error("clique is not total");
        // greedy removal
        Cliq g = a;
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t k = 0; k < g.size(); ++k) {
                Cliq sub = g;
                sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(k));
                if (std::binary_search(family.begin(), family.end(), sub, clique_less)) {
                    g = std::move(sub);
                    changed = true;
                    break;
                }
            }
        }
        // intersection definition
        Cliq meet = a;
        for (const auto& b : family)
            if (is_subset(b, a)) meet = cliq_intersect(meet, b);
        if (meet != g) throw error("internal: greedy strict part disagrees with the intersection definition");
        return g;
    }

    void finish() {
        for (const auto& a : total_) {
            Cliq s = strict_part_in(total_, a);
            if (s == a) strict_.push_back(a);
        }
        for (const auto& c : co_total_) {
            Cliq s = strict_part_in(co_total_, c);
            if (s == c) co_strict_.push_back(c);
        }
        strict_ = canonical_set(std::move(strict_));
        co_strict_ = canonical_set(std::move(co_strict_));
    }

    SpacePtr space_;
    CliqSet total_, co_total_, strict_, co_strict_;
};

// a ⊗ b as a clique of the tensor space.
inline Cliq tensor_clique(const SpacePtr& tensor_space, const Cliq& a, const Cliq& b) {
    Cliq out;
    for (TokenIndex x : a)
        for (TokenIndex y : b) out.push_back(tensor_space->pair_index(x, y));
    return normalized(out);
}

// !a = the set of all finite subcliques of a, as a clique of !X.
inline Cliq bang_clique(const SpacePtr& bang_space, const Cliq& a) {
    Cliq out;
    Cliq cur;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        out.push_back(bang_space->bang_index_of(cur));
        for (std::size_t i = start; i < a.size(); ++i) {
            cur.push_back(a[i]);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return normalized(out);
}

// Totality constructions per connective: T_{X⊥}=T_X⊥,
// T_{X⊗Y}=(T_X⊗T_Y)⊥⊥, T_{X⊸Y}={κ : κ̂[T_X]⊆T_Y}, T_{!X}=(!T_X)⊥⊥, T_1=1_Max).
inline TotalityView lift_totality(const std::string& connective, const std::vector<const TotalityView*>& views,
                                  std::size_t token_cap = 16, std::uint64_t clique_cap = (1u << 22)) {
    auto need = [&](std::size_t n) {
        if (views.size() != n) throw domain_error("lift_totality '" + connective + "' takes " +
                                                  std::to_string(n) + " view(s)");
    };
    if (connective == "dual") { need(1); return views[0]->dual_view(); }
    if (connective == "one") {
        need(0);
        return TotalityView::exhaustive(CoherenceSpace::one(), {{0}}, token_cap, clique_cap);
    }
    if (connective == "tensor") {
        need(2);
        SpacePtr sp = CoherenceSpace::tensor(views[0]->space(), views[1]->space());
        CliqSet gens;
        for (const auto& a : views[0]->total())
            for (const auto& b : views[1]->total()) gens.push_back(tensor_clique(sp, a, b));
        return TotalityView::exhaustive(sp, canonical_set(std::move(gens)), token_cap, clique_cap);
    }
    if (connective == "bang") {
        need(1);
        SpacePtr sp = CoherenceSpace::bang(views[0]->space(), clique_cap);
        CliqSet gens;
        for (const auto& a : views[0]->total()) gens.push_back(bang_clique(sp, a));
        return TotalityView::exhaustive(sp, canonical_set(std::move(gens)), token_cap, clique_cap);
    }
    if (connective == "lollipop") {
        need(2);
        SpacePtr sp = CoherenceSpace::lollipop(views[0]->space(), views[1]->space());
        CliqSet total;
        for (const auto& kappa : all_cliques(sp, clique_cap)) {
            bool preserves = true;
            for (const auto& a : views[0]->total()) {
                Cliq image;
                for (TokenIndex t : kappa) {
                    auto [x, y] = sp->pair_of(t);
                    if (contains_token(a, x)) image.push_back(y);
                }
                if (!views[1]->is_total_clique(normalized(image))) { preserves = false; break; }
            }
            if (preserves) total.push_back(kappa);
        }
        return TotalityView::from_total_set(sp, std::move(total), clique_cap);
    }
    throw domain_error("unknown connective '" + connective + "'");
}

// Is a clique total / does a trace preserve totality? For traces the two
// definitions (Tr(F) ∈ T_{X⊸Y} and F[T_X] ⊆ T_Y) are both computed
// and cross-checked.
inline bool is_total_clique(const TotalityView& v, const Cliq& a) { return v.is_total_clique(a); }

inline bool is_total_trace(const Trace& t, const TotalityView& vx, const TotalityView& vy,
                           bool cross_check = true) {
    if (t.kind() != TraceKind::Linear) throw unsupported_error("is_total_trace expects a linear trace");
    if (!same_space(t.source(), vx.space()) || !same_space(t.target(), vy.space()))
        throw domain_error("is_total_trace: views do not match the trace's spaces");
    require_valid(t);
    bool preserves = true;
    for (const auto& a : vx.total()) {
        if (!vy.is_total_clique(apply_trace(t, a))) { preserves = false; break; }
    }
    if (cross_check) {
        TotalityView lolli = lift_totality("lollipop", {&vx, &vy});
        Cliq kappa;
        for (const auto& p : t.pairs()) kappa.push_back(lolli.space()->pair_index(p.input[0], p.output));
        kappa = normalized(kappa);
        bool member = lolli.is_total_clique(kappa);
        if (member != preserves) throw error("internal: the two totality definitions for traces disagree");
    }
    return preserves;
}

// --- internal-completeness witnesses (appendix constructions) --------------

// 𝔞•𝔟 := {(x,y) : x∈𝔞, y∈𝔟}  ∈ (T_X⊗T_Y)⊥
inline Cliq bullet_witness(const SpacePtr& tensor_space, const Cliq& a, const Cliq& b) {
    return tensor_clique(tensor_space, a, b);
}

// ∧ᵢ𝔠ᵢ := { {x₁..xₙ} clique : xᵢ∈𝔠ᵢ }  ∈ (!T_X)⊥
inline Cliq wedge_witness(const SpacePtr& bang_space, const std::vector<Cliq>& cs) {
    const SpacePtr& x = bang_space->operand();
    Cliq out;
    Cliq cur;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == cs.size()) {
            out.push_back(bang_space->bang_index_of(normalized(cur)));
            return;
        }
        for (TokenIndex t : cs[k]) {
            bool ok = true;
            for (TokenIndex u : cur)
                if (!x->coherent(u, t)) { ok = false; break; }
            if (!ok) continue;
            cur.push_back(t);
            rec(k + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return normalized(out);
}

inline Cliq singleton_wedge_witness(const SpacePtr& bang_space, const Cliq& c) {
    return wedge_witness(bang_space, {c});
}

// c¹, c² projections of a clique of X⊗Y.
inline std::pair<Cliq, Cliq> tensor_project(const SpacePtr& tensor_space, const Cliq& c) {
    Cliq c1, c2;
    for (TokenIndex t : c) {
        auto [x, y] = tensor_space->pair_of(t);
        c1.push_back(x);
        c2.push_back(y);
    }
    return {normalized(c1), normalized(c2)};
}

// α¹ := {x : {x} ∈ α ∩ ∧𝔠 for some 𝔠 ∈ T_X⊥}  ∈ T_X°
inline Cliq bang_project(const SpacePtr& bang_space, const TotalityView& vx, const Cliq& alpha) {
    if (vx.co_total().empty()) throw precondition_error("bang_project requires a nonempty co-totality");
    Cliq out;
    for (TokenIndex t : alpha) {
        const Cliq& cl = bang_space->bang_token_clique(t);
        if (cl.size() != 1) continue;
        for (const auto& c : vx.co_total())
            if (contains_token(c, cl[0])) { out.push_back(cl[0]); break; }
    }
    return normalized(out);
}

struct CompletenessReport {
    bool hypotheses_ok = true;
    std::string hypothesis_violation;
    bool ok = false;
    std::string counterexample;  // set difference description when not equal
};

// Exact set equality (T_X⊗T_Y)⊥⊥° = T°_X⊗T°_Y  /  (!T_Z)⊥⊥° = !(T°_Z).
inline CompletenessReport check_internal_completeness(const std::string& connective,
                                                      const std::vector<const TotalityView*>& views,
                                                      std::size_t token_cap = 16,
                                                      std::uint64_t clique_cap = (1u << 22)) {
    CompletenessReport rep;
    auto describe_diff = [](const CliqSet& lhs, const CliqSet& rhs, const SpacePtr& sp) {
        for (const auto& c : lhs)
            if (!set_contains(rhs, c)) return "only on the closure side: " + clique_label(sp, c);
        for (const auto& c : rhs)
            if (!set_contains(lhs, c)) return "only on the componentwise side: " + clique_label(sp, c);
        return std::string();
    };
    if (connective == "tensor") {
        if (views.size() != 2) throw domain_error("tensor completeness takes two views");
        const TotalityView& vx = *views[0];
        const TotalityView& vy = *views[1];
        if (vx.total().empty() || vy.total().empty() || vx.co_total().empty() || vy.co_total().empty()) {
            rep.hypotheses_ok = false;
            rep.hypothesis_violation = "tensor completeness requires T_X, T_Y, T_X⊥, T_Y⊥ all nonempty";
            return rep;
        }
        TotalityView lifted = lift_totality("tensor", views, token_cap, clique_cap);
        CliqSet expect;
        for (const auto& a : vx.strict())
            for (const auto& b : vy.strict()) expect.push_back(tensor_clique(lifted.space(), a, b));
        expect = canonical_set(std::move(expect));
        rep.ok = (lifted.strict() == expect);
        if (!rep.ok) rep.counterexample = describe_diff(lifted.strict(), expect, lifted.space());
        return rep;
    }
    if (connective == "bang") {
        if (views.size() != 1) throw domain_error("bang completeness takes one view");
        TotalityView lifted = lift_totality("bang", views, token_cap, clique_cap);
        CliqSet expect;
        for (const auto& a : views[0]->strict()) expect.push_back(bang_clique(lifted.space(), a));
        expect = canonical_set(std::move(expect));
        rep.ok = (lifted.strict() == expect);
        if (!rep.ok) rep.counterexample = describe_diff(lifted.strict(), expect, lifted.space());
        return rep;
    }
    throw domain_error("internal completeness holds for 'tensor' and 'bang' only");
}

// Total extension: F[A] ⊆ B implies F[A⊥⊥] ⊆ B⊥⊥ for nonempty A, B. This is
// a theorem of the orthogonality calculus, so a failure here is an
// implementation bug, and callers treat it as one.
inline bool total_extension_check(const Trace& f, const CliqSet& A, const CliqSet& B,
                                  std::uint64_t clique_cap = (1u << 22)) {
    if (f.kind() != TraceKind::Linear) throw precondition_error("total_extension_check expects a linear trace");
    if (A.empty() || B.empty())
        throw precondition_error("total_extension_check requires nonempty A and B");
    require_valid(f);
    CliqSet bset = canonical_set(B);
    for (const auto& a : A) {
        if (!set_contains(bset, apply_trace(f, a)))
            throw precondition_error("precondition F[A] ⊆ B fails at " + clique_label(f.source(), a));
    }
    CliqSet closureA = biorthogonal(canonical_set(A), f.source(), clique_cap);
    CliqSet perpB = perp_set(bset, f.target(), clique_cap);
    for (const auto& a : closureA) {
        Cliq img = apply_trace(f, a);
        for (const auto& c : perpB)
            if (!orthogonal(img, c)) return false;  // image not in B⊥⊥
    }
    return true;
}

}  // namespace cohsp
