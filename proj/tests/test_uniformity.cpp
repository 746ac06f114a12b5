#include "doctest.h"
#include "test_support.hpp"

using namespace cohsp;

namespace {

Cover abstract_cover(std::size_t n, std::vector<std::vector<std::size_t>> blocks) {
    Cover u;
    u.point_count = n;
    u.blocks = std::move(blocks);
    for (auto& b : u.blocks) std::sort(b.begin(), b.end());
    return u;
}

}  // namespace

TEST_CASE("cover refinement, meet, star, within on abstract point sets") {
    Cover fine = abstract_cover(3, {{0}, {1}, {2}});
    Cover coarse = abstract_cover(3, {{0, 1}, {2}});
    Cover whole = abstract_cover(3, {{0, 1, 2}});

    CHECK(cover_refines(fine, fine));
    CHECK(cover_refines(fine, coarse));
    CHECK_FALSE(cover_refines(coarse, fine));

    CHECK(same_blocks(cover_meet(coarse, whole), coarse));
    Cover other = abstract_cover(3, {{0}, {1, 2}});
    CHECK(same_blocks(cover_meet(coarse, other), fine));
    CHECK(same_blocks(cover_meet(other, coarse), cover_meet(coarse, other)));

    CHECK(star({0}, coarse) == std::vector<std::size_t>{0, 1});
    CHECK(star({}, coarse).empty());
    CHECK(star_refines(coarse, coarse));  // disjoint covers star-refine themselves

    CHECK(within(0, 1, coarse));
    CHECK_FALSE(within(0, 2, coarse));
    CHECK(within(0, 0, coarse));
}

TEST_CASE("enumerate covers: uni and unbounded on the named views") {
    TotalityView f2v = ts::f2_view();
    CHECK(enumerate_unicovers(f2v) == CliqSet{{0, 1}});

    auto ub = enumerate_unbounded_covers(f2v);
    // exactly the trivial cover {∅} and the singleton embedding {{p},{q}}
    std::vector<UnboundedKeys> expect = {{Cliq{}}, {Cliq{0}, Cliq{1}}};
    std::sort(expect.begin(), expect.end());
    CHECK(ub == expect);

    TotalityView c2v = ts::c2_view();
    CHECK(enumerate_unicovers(c2v) == CliqSet{{0}, {1}});
}

TEST_CASE("blocks of every uni/unbounded cover partition T°") {
    for (const auto& [sp, v] : ts::sweep_views(3)) {
        for (const auto& c : enumerate_unicovers(v)) {
            Cover u = materialize_unicover(v, c);
            std::vector<std::size_t> seen(v.strict().size(), 0);
            for (const auto& b : u.blocks)
                for (std::size_t p : b) ++seen[p];
            for (std::size_t cnt : seen) CHECK(cnt == 1);
            for (const auto& b : u.blocks) CHECK_FALSE(b.empty());
        }
        for (const auto& keys : enumerate_unbounded_covers(v)) {
            Cover u = materialize_unbounded(v, keys);
            std::vector<std::size_t> seen(v.strict().size(), 0);
            for (const auto& b : u.blocks)
                for (std::size_t p : b) ++seen[p];
            for (std::size_t cnt : seen) CHECK(cnt == 1);
        }
    }
}

TEST_CASE("wedge of unbounded covers: idempotence, the C2 example, refinement") {
    TotalityView c2v = ts::c2_view();
    UnboundedKeys a = singleton_embedding({0});
    UnboundedKeys b = singleton_embedding({1});
    UnboundedKeys w = wedge_unbounded(c2v, a, b);
    CHECK(w == UnboundedKeys{{0, 1}});
    CHECK(materialize_unbounded(c2v, w).blocks == std::vector<std::vector<std::size_t>>{{0}});

    for (const auto& [sp, v] : ts::sweep_views(3)) {
        auto covers = enumerate_unbounded_covers(v);
        for (const auto& x : covers) {
            CHECK(wedge_unbounded(v, x, x) == x);  // disjoint ⇒ idempotent
            for (const auto& y : covers) {
                UnboundedKeys m = wedge_unbounded(v, x, y);
                CHECK(cover_refines(materialize_unbounded(v, m), materialize_unbounded(v, x)));
                CHECK(cover_refines(materialize_unbounded(v, m), materialize_unbounded(v, y)));
            }
        }
    }
}

TEST_CASE("upper extension: one uni-cover per token") {
    TotalityView f2v = ts::f2_view();
    auto ext = upper_extension({0}, f2v);
    REQUIRE(ext.size() == 1);
    CHECK(ext[0] == Cliq{0, 1});

    TotalityView c2v = ts::c2_view();
    auto ext2 = upper_extension({0, 1}, c2v);
    REQUIRE(ext2.size() == 2);
    CHECK(ext2[0] == Cliq{0});
    CHECK(ext2[1] == Cliq{1});

    CHECK(upper_extension({}, f2v).empty());
    CHECK(upper_extension_cover({}, f2v) == UnboundedKeys{Cliq{}});  // trivial one-block cover

    TotalityView wv = ts::f2w_view();
    CHECK_THROWS_AS(upper_extension({2}, wv), precondition_error);  // ↑{w}° is empty
}

TEST_CASE("finite divide: the spec instances") {
    TotalityView f2v = ts::f2_view();
    // n=0: {a₀}-shaped
    CHECK(finite_divide({Cliq{0}}, f2v) == UnboundedKeys{{0}});
    // F2: ↑∅° \ ↑{p}° = {{q}}
    auto keys = finite_divide({Cliq{0}, Cliq{}}, f2v);
    Cover u = materialize_unbounded(f2v, keys);
    std::vector<std::size_t> pts;
    for (const auto& b : u.blocks) pts.insert(pts.end(), b.begin(), b.end());
    std::sort(pts.begin(), pts.end());
    CHECK(pts == std::vector<std::size_t>{f2v.strict_index({1})});

    TotalityView c2v = ts::c2_view();
    // ↑{u}° ⊆ ↑{u,v}°, so the difference is empty
    CHECK(finite_divide({Cliq{0, 1}, Cliq{0}}, c2v).empty());
}

TEST_CASE("refine_open_cover on the named instances") {
    TotalityView f2v = ts::f2_view();
    auto trivial = refine_open_cover({Cliq{}}, f2v);
    CHECK(trivial == UnboundedKeys{Cliq{}});

    auto keys = refine_open_cover({Cliq{0}, Cliq{1}}, f2v);
    CHECK(keys == UnboundedKeys{{0}, {1}});
    Cover refined = materialize_unbounded(f2v, keys);
    Cover open_cover;
    open_cover.point_count = f2v.strict().size();
    open_cover.blocks = {upper_block(f2v, {0}), upper_block(f2v, {1})};
    CHECK(cover_refines(refined, open_cover));

    CHECK_THROWS_AS(refine_open_cover({Cliq{0}}, f2v), precondition_error);  // misses {q}
}

TEST_CASE("axioms: keyed families on views") {
    TotalityView f2v = ts::f2_view();
    auto ub = enumerate_unbounded_covers(f2v);
    AxiomReport rep = verify_uniformity_axioms(f2v, ub, "U1 U3 U4");
    CHECK(rep.u1);
    CHECK(rep.u3);
    CHECK(rep.u4);

    // σ^b of the C2 view: U3, U4 hold; U1 fails shape
    TotalityView c2v = ts::c2_view();
    std::vector<UnboundedKeys> sigma;
    for (const auto& c : enumerate_unicovers(c2v)) sigma.push_back(singleton_embedding(c));
    AxiomReport rep2 = verify_uniformity_axioms(c2v, sigma, "U1 U3 U4");
    CHECK_FALSE(rep2.u1);
    CHECK(rep2.u3);
    CHECK(rep2.u4);

    // single-point space: all hold vacuously
    TotalityView onev = ts::one_view();
    std::vector<UnboundedKeys> fam;
    for (const auto& c : enumerate_unicovers(onev)) fam.push_back(singleton_embedding(c));
    AxiomReport rep3 = verify_uniformity_axioms(onev, fam, "U1 U3 U4");
    CHECK(rep3.u1);
    CHECK(rep3.u3);
    CHECK(rep3.u4);
}

TEST_CASE("Hausdorff separation by uni-covers on F2") {
    TotalityView f2v = ts::f2_view();
    Cover u = materialize_unicover(f2v, {0, 1});
    std::size_t i = f2v.strict_index({0}), j = f2v.strict_index({1});
    CHECK_FALSE(within(i, j, u));
    CHECK(within(i, i, u));
}

TEST_CASE("Scott compatibility: stars of points are their block upper sets") {
    for (const auto& [sp, v] : ts::sweep_views(3)) {
        for (const auto& keys : enumerate_unbounded_covers(v)) {
            Cover u = materialize_unbounded(v, keys);
            for (std::size_t p = 0; p < v.strict().size(); ++p) {
                // the unique block key a₀ ⊆ point
                std::optional<std::size_t> owner;
                for (std::size_t k = 0; k < keys.size(); ++k)
                    if (is_subset(keys[k], v.strict()[p])) { owner = k; break; }
                REQUIRE(owner.has_value());
                CHECK(star({p}, u) == u.blocks[*owner]);
            }
        }
    }
}

TEST_CASE("modulus_for: identity and constant-shaped traces") {
    TotalityView f2v = ts::f2_view();
    Trace id = identity_trace(ts::f2());
    Cliq b = f2v.co_strict().front();
    CHECK(modulus_for(id, f2v, f2v, b) == b);

    // a constant-shaped total trace on F2: both tokens map to p
    Trace to_p(TraceKind::Linear, ts::f2(), ts::f2(), {{{0}, 0}, {{1}, 0}});
    REQUIRE(validate_trace(to_p).ok);
    REQUIRE(is_total_trace(to_p, f2v, f2v));
    for (const auto& bb : f2v.co_strict()) CHECK_NOTHROW(modulus_for(to_p, f2v, f2v, bb));
}

TEST_CASE("bang transport is a bijection onto the strict bang totality") {
    TotalityView f2v = ts::f2_view();
    auto bsp = CoherenceSpace::bang(ts::f2());
    Cliq image = bang_transport({0}, f2v, bsp);
    CHECK(image == bang_clique(bsp, {0}));
    CHECK(image == normalized(Cliq{bsp->bang_index_of({}), bsp->bang_index_of({0})}));

    TotalityView onev = ts::one_view();
    auto bone = CoherenceSpace::bang(CoherenceSpace::one());
    CHECK(bang_transport({0}, onev, bone).size() == 2);  // {∅, {•}}

    for (const auto& [sp, v] : ts::sweep_views(3)) {
        auto bang_space = CoherenceSpace::bang(sp);
        TotalityView bv = lift_totality("bang", {&v});
        CliqSet mapped;
        for (const auto& a : v.strict()) mapped.push_back(bang_clique(bang_space, a));
        CHECK(canonical_set(mapped) == bv.strict());  // bijection on strict cliques
        // β^ub_X coincides with σ^b_{!X}
        std::vector<UnboundedKeys> beta = enumerate_unbounded_covers(v);
        std::vector<UnboundedKeys> sigma_bang;
        for (const auto& c : bv.co_strict()) {
            UnboundedKeys keys;
            for (TokenIndex t : c) keys.push_back(bang_space->bang_token_clique(t));
            sigma_bang.push_back(canonical_set(keys));
        }
        std::sort(sigma_bang.begin(), sigma_bang.end());
        CHECK(beta == sigma_bang);
    }
}
