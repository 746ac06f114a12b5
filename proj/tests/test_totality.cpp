#include "doctest.h"
#include "test_support.hpp"

using namespace cohsp;

TEST_CASE("orthogonality is singleton intersection") {
    CHECK(orthogonal({0}, {0}));
    CHECK_FALSE(orthogonal({0}, {1}));
    CHECK_FALSE(orthogonal({0, 1}, {0, 1}));
    // in R: a depth-n approximation meets every level anticover k ≤ n once
    auto a = approx_clique(RealOracle::constant(Rat(1, 3)), 6);
    for (unsigned k = 0; k <= 6; ++k) {
        auto dk = level_anticover(k, Rat(-2), Rat(2));
        std::size_t hits = 0;
        for (const auto& t : a)
            for (const auto& d : dk)
                if (t == d) ++hits;
        CHECK(hits == 1);
    }
}

TEST_CASE("perp_set on the named spaces") {
    auto f2 = ts::f2();
    CHECK(perp_set({{0}, {1}}, f2) == CliqSet{{0, 1}});
    auto c2 = ts::c2();
    CHECK(perp_set({{0, 1}}, c2) == CliqSet{{0}, {1}});
    // A = ∅ → every anti-clique
    CHECK(perp_set({}, f2) == canonical_set(all_anticliques(f2)));
    CHECK_THROWS_AS(perp_set({}, r_space()), unsupported_error);
}

TEST_CASE("closure laws hold for every generator set on small spaces") {
    for (const auto& sp : ts::spaces_up_to(3)) {
        CliqSet cliques = all_cliques(sp);
        for (std::uint64_t mask = 1; mask < (1ull << cliques.size()); ++mask) {
            CliqSet A;
            for (std::size_t i = 0; i < cliques.size(); ++i)
                if (mask & (1ull << i)) A.push_back(cliques[i]);
            A = canonical_set(A);
            CliqSet perp = perp_set(A, sp);
            CliqSet closure = perp_of_anticliques(perp, sp);
            for (const auto& a : A) CHECK(set_contains(closure, a));           // A ⊆ A⊥⊥
            CHECK(perp_set(closure, sp) == perp);                              // A⊥ = A⊥⊥⊥
            // antitone: B ⊆ A ⇒ A⊥ ⊆ B⊥ (drop one generator)
            if (A.size() > 1) {
                CliqSet B(A.begin() + 1, A.end());
                CliqSet perpB = perp_set(B, sp);
                for (const auto& c : perp) CHECK(set_contains(perpB, c));
            }
        }
    }
}

TEST_CASE("views: T = T⊥⊥ by construction, upward closure, membership criterion") {
    for (const auto& [sp, v] : ts::sweep_views(3)) {
        // T = (T°)⊥⊥ and T = upward closure of T°
        CHECK(perp_of_anticliques(perp_set(v.strict(), sp), sp) == v.total());
        for (const auto& a : all_cliques(sp)) {
            bool upward = false;
            for (const auto& s : v.strict())
                if (is_subset(s, a)) { upward = true; break; }
            CHECK(upward == v.is_total_clique(a));
            bool criterion = true;
            for (const auto& c : v.co_total())
                if (!orthogonal(a, c)) { criterion = false; break; }
            CHECK(criterion == v.is_total_clique(a));
        }
    }
}

TEST_CASE("strict parts: minimal total subcliques") {
    TotalityView f2v = ts::f2_view();
    CHECK(f2v.strict_part({0}) == Cliq{0});
    CHECK_THROWS_AS(f2v.strict_part({0, 1}), domain_error);  // not even a clique of F2 in T

    TotalityView wv = ts::f2w_view();
    CHECK(wv.strict_part({0, 2}) == Cliq{0});  // {p,w}° = {p}
    CHECK(wv.strict_part(wv.strict_part({0, 2})) == Cliq{0});
    CHECK(set_contains(wv.strict(), Cliq{0}));
}

TEST_CASE("lift_totality per connective") {
    TotalityView f2v = ts::f2_view();
    TotalityView c2v = ts::c2_view();

    TotalityView tens = lift_totality("tensor", {&f2v, &f2v});
    CHECK(tens.strict().size() == 4);
    for (const auto& s : tens.strict()) CHECK(s.size() == 1);

    TotalityView bang = lift_totality("bang", {&f2v});
    auto bsp = bang.space();
    CliqSet expect = {bang_clique(bsp, {0}), bang_clique(bsp, {1})};
    CHECK(bang.strict() == canonical_set(expect));

    TotalityView lolli = lift_totality("lollipop", {&f2v, &f2v});
    Cliq ident;
    for (TokenIndex t = 0; t < 2; ++t) ident.push_back(lolli.space()->pair_index(t, t));
    CHECK(lolli.is_total_clique(normalized(ident)));

    TotalityView dual = lift_totality("dual", {&c2v});
    CHECK(dual.total() == c2v.co_total());
    CHECK(dual.co_total() == c2v.total());
}

TEST_CASE("is_total: cliques and traces, both definitions agreeing") {
    TotalityView f2v = ts::f2_view();
    TotalityView c2v = ts::c2_view();
    CHECK(is_total_trace(identity_trace(ts::f2()), f2v, f2v));
    Trace empty(TraceKind::Linear, ts::f2(), ts::c2(), {});
    CHECK_FALSE(is_total_trace(empty, f2v, c2v));  // F({p}) = ∅ ∉ T

    // cross-check is built into is_total_trace; run it over every valid trace
    auto lolli = CoherenceSpace::lollipop(ts::f2(), ts::c2());
    for (const auto& kappa : all_cliques(lolli)) {
        std::vector<TracePair> pairs;
        for (TokenIndex t : kappa) {
            auto [a, b] = lolli->pair_of(t);
            pairs.push_back({{a}, b});
        }
        Trace tr(TraceKind::Linear, ts::f2(), ts::c2(), std::move(pairs));
        if (validate_trace(tr).ok) CHECK_NOTHROW(is_total_trace(tr, f2v, c2v));
    }
}

TEST_CASE("completeness witnesses") {
    TotalityView f2v = ts::f2_view();
    TotalityView c2v = ts::c2_view();
    auto tens = CoherenceSpace::tensor(ts::f2(), ts::c2());

    Cliq bullet = bullet_witness(tens, {0, 1}, {0});  // {p,q}•{u}
    CHECK(bullet.size() == 2);
    CHECK(is_anticlique(tens, bullet));
    for (const auto& a : f2v.total())
        for (const auto& b : c2v.total()) CHECK(orthogonal(tensor_clique(tens, a, b), bullet));

    auto bsp = CoherenceSpace::bang(ts::f2());
    Cliq wedge = wedge_witness(bsp, {{0, 1}});  // ∧{p,q} = {{p},{q}}
    CHECK(wedge == normalized(Cliq{bsp->bang_index_of({0}), bsp->bang_index_of({1})}));
    for (const auto& a : f2v.total()) CHECK(orthogonal(bang_clique(bsp, a), wedge));
    CHECK(singleton_wedge_witness(bsp, {0, 1}) == wedge);

    auto [c1, c2p] = tensor_project(tens, {tens->pair_index(0, 0)});
    CHECK(c1 == Cliq{0});
    CHECK(c2p == Cliq{0});

    TotalityView bangv = lift_totality("bang", {&f2v});
    for (const auto& alpha : bangv.strict()) {
        Cliq a1 = bang_project(bsp, f2v, alpha);
        CHECK(set_contains(f2v.strict(), a1));
    }
}

TEST_CASE("internal completeness on the named instances, with the hypothesis guard") {
    TotalityView f2v = ts::f2_view();
    TotalityView c2v = ts::c2_view();

    auto rep = check_internal_completeness("tensor", {&f2v, &f2v});
    CHECK(rep.hypotheses_ok);
    CHECK(rep.ok);

    auto repb = check_internal_completeness("bang", {&c2v});
    CHECK(repb.ok);
    TotalityView bangv = lift_totality("bang", {&c2v});
    CHECK(bangv.strict().size() == 1);  // just !{u,v}

    // ∅ as a generator gives T = all cliques and T⊥ = ∅: hypothesis violation
    TotalityView degenerate = TotalityView::exhaustive(ts::f2(), {Cliq{}});
    CHECK(degenerate.co_total().empty());
    auto repg = check_internal_completeness("tensor", {&f2v, &degenerate});
    CHECK_FALSE(repg.hypotheses_ok);
    CHECK_FALSE(repg.ok);
}

TEST_CASE("total extension: identity instance and the empty-set guard") {
    auto f2 = ts::f2();
    Trace id = identity_trace(f2);
    CHECK(total_extension_check(id, {{0}}, {{0}}));
    CHECK_THROWS_AS(total_extension_check(id, {}, {{0}}), precondition_error);
    Trace f(TraceKind::Linear, f2, f2, {{{0}, 1}});
    CHECK_THROWS_AS(total_extension_check(f, {{0}}, {{0}}), precondition_error);  // F[A] ⊄ B
}
