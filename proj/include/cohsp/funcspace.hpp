#pragma once

// Uniform structure on linear function spaces: the θ construction
// Tr(θ) = {(y,(x,y)) : x∈𝔠, y∈Y} and the point-evaluation decomposition of
// total linear maps out of X⊸Y.

#include "uniformity.hpp"

namespace cohsp {

// θ : Y ⊸ (X⊸Y) for a uni-cover 𝔠 of X. Satisfies θ̂(b)̂(a) = b for total
// a, b because a meets 𝔠 exactly once.
inline Trace theta_trace(const Cliq& c, const SpacePtr& x, const SpacePtr& y,
                         const TotalityView* vx = nullptr) {
    if (!is_anticlique(x, c)) throw domain_error("theta_trace: 𝔠 is not an anti-clique");
    if (vx && !vx->is_total_anticlique(c))
        throw domain_error("theta_trace: 𝔠 is not a total anti-clique (not a uni-cover)");
    if (!y->finite()) throw unsupported_error("theta_trace requires a finite Y");
    SpacePtr lolli = CoherenceSpace::lollipop(x, y);
    std::vector<TracePair> pairs;
    for (std::uint64_t i = 0; i < y->token_count(); ++i) {
        TokenIndex yt = y->at_position(i);
        for (TokenIndex xt : c) pairs.push_back({{yt}, lolli->pair_index(xt, yt)});
    }
    Trace t(TraceKind::Linear, y, lolli, std::move(pairs));
    require_valid(t);
    return t;
}

// Application of a clique κ of X⊸Y, viewed as a map: κ̂(a).
inline Cliq hat_apply(const SpacePtr& lolli, const Cliq& kappa, const Cliq& a) {
    Cliq out;
    for (TokenIndex t : kappa) {
        auto [x, y] = lolli->pair_of(t);
        if (contains_token(a, x)) out.push_back(y);
    }
    return normalized(out);
}

struct PointEvaluation {
    Cliq point;   // a₀ ∈ T°_X
    Trace g;      // total linear Y ⊸ Z
    Cliq theta_cover;  // the uni-cover 𝔠 used to build θ
};

// For a total linear F : (X⊸Y) ⊸ Z and a uni-cover 𝔠_Z, produces a₀ and
// G = F∘θ with F(κ) and G(κ̂(a₀)) in the same block of 𝔠_Z for every strict
// total κ. Requires the modulus found by modulus_for to split literally as
// a₀⊗𝔟; reports a structure error otherwise instead of guessing.
inline PointEvaluation point_evaluation_decomposition(const Trace& f, const TotalityView& vx,
                                                      const TotalityView& vy, const TotalityView& vz,
                                                      const Cliq& cz,
                                                      std::uint64_t clique_cap = (1u << 22)) {
    TotalityView vlolli = lift_totality("lollipop", {&vx, &vy}, 16, clique_cap);
    if (!same_space(f.source(), vlolli.space()) || !same_space(f.target(), vz.space()))
        throw domain_error("point_evaluation_decomposition: trace spaces do not match the views");
    if (!is_total_trace(f, vlolli, vz, false))
        throw precondition_error("point_evaluation_decomposition: F is not total");
    Cliq modulus = modulus_for(f, vlolli, vz, cz, false, true);

    // product-shape check: modulus = a₀ ⊗ 𝔟 with a₀ ∈ T°_X and 𝔟 a uni-cover of Y
    const SpacePtr& lolli = vlolli.space();
    Cliq a0, b;
    for (TokenIndex t : modulus) {
        auto [x, y] = lolli->pair_of(t);
        a0.push_back(x);
        b.push_back(y);
    }
    a0 = normalized(a0);
    b = normalized(b);
    Cliq product;
    for (TokenIndex x : a0)
        for (TokenIndex y : b) product.push_back(lolli->pair_index(x, y));
    product = normalized(product);
    if (product != modulus)
        throw domain_error("structure: modulus " + clique_label(lolli, modulus) +
                           " is not a pure tensor a₀⊗𝔟");
    if (!vx.is_total_clique(a0) || vx.strict_part(a0) != a0)
        throw domain_error("structure: first modulus component is not a strict total clique of X");
    if (!vy.is_total_anticlique(b) || vy.co_strict_part(b) != b)
        throw domain_error("structure: second modulus component is not a uni-cover of Y");

    // the proof uses an arbitrary uni-cover 𝔠 of X; try each and verify the
    // conclusion exhaustively
    std::string last_failure;
    for (const auto& c : vx.co_strict()) {
        Trace theta = theta_trace(c, vx.space(), vy.space(), &vx);
        Trace g = compose(theta, f);
        bool ok = true;
        for (const auto& kappa : vlolli.strict()) {
            Cliq fk = apply_trace(f, kappa);
            Cliq b0 = hat_apply(lolli, kappa, a0);
            Cliq gb = apply_trace(g, b0);
            Cliq t1 = cliq_intersect(fk, cz), t2 = cliq_intersect(gb, cz);
            if (t1.size() != 1 || t2.size() != 1 || t1 != t2) {
                ok = false;
                last_failure = "conclusion fails at κ = " + clique_label(lolli, kappa) +
                               " with θ over " + clique_label(vx.space(), c);
                break;
            }
        }
        if (ok) return {a0, g, c};
    }
    throw domain_error("structure: no uni-cover of X yields a verified decomposition (" +
                       last_failure + ")");
}

}  // namespace cohsp
