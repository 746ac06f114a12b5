#include "doctest.h"
#include "test_support.hpp"

using namespace cohsp;

namespace {

// points {0,1,2}; 𝒰₁ = {{0,1},{1,2}} (the overlap cover), 𝒰₂ separating
UniformSpaceDescriptor threept_separating() {
    UniformSpaceDescriptor d;
    d.point_names = {"0", "1", "2"};
    BasisBlock b01{{0, 1}, {}, {}, "01"}, b12{{1, 2}, {}, {}, "12"};
    BasisBlock s0{{0}, {}, {}, "0"}, s1{{1}, {}, {}, "1"}, s2{{2}, {}, {}, "2"};
    d.covers = {{b01, b12}, {s0, s1, s2}};
    d.validate();
    return d;
}

// chain-connected at every level: both covers are the overlap cover
UniformSpaceDescriptor threept_overlap() {
    UniformSpaceDescriptor d;
    d.point_names = {"0", "1", "2"};
    BasisBlock b01{{0, 1}, {}, {}, "01"}, b12{{1, 2}, {}, {}, "12"};
    d.covers = {{b01, b12}, {b01, b12}};
    d.validate();
    return d;
}

}  // namespace

TEST_CASE("standard representation: tokens, coherence table, empty depth") {
    auto d = threept_separating();
    Representation rep = build_standard_rep(d, 2);
    CHECK(rep.token_count() == 5);  // two level-1 blocks, three level-2 singletons

    // same level ⇒ incoherent; cross level coherent iff blocks overlap
    Cliq l1 = rep.level_family(1), l2 = rep.level_family(2);
    CHECK_FALSE(rep.space->strictly_coherent(l1[0], l1[1]));
    CHECK(rep.space->strictly_coherent(l1[0], l2[0]));   // {0,1} and {0}
    CHECK(rep.space->strictly_coherent(l1[0], l2[1]));   // {0,1} and {1}
    CHECK_FALSE(rep.space->strictly_coherent(l1[0], l2[2]));  // {0,1} and {2}

    Representation empty = build_standard_rep(d, 0);
    CHECK(empty.token_count() == 0);
}

TEST_CASE("delta_decode: unique point, ambiguity, emptiness") {
    auto d = threept_separating();
    Representation rep = build_standard_rep(d, 2);
    Cliq l1 = rep.level_family(1), l2 = rep.level_family(2);

    DecodeResult r = delta_decode(rep, {l1[0], l2[1]}, 2);  // (1,{0,1}) and (2,{1})
    CHECK(r.status == DecodeResult::Status::Point);
    CHECK(r.point == 1);

    DecodeResult amb = delta_decode(rep, {l1[0]}, 2);  // {0,1} alone: two candidates
    CHECK(amb.status == DecodeResult::Status::Ambiguous);

    DecodeResult none = delta_decode(rep, {}, 2);
    CHECK(none.status == DecodeResult::Status::Undefined);
}

TEST_CASE("linearish: standard representations pass, spurious coherence fails") {
    auto d = threept_separating();
    Representation rep = build_standard_rep(d, 2);
    LinearishReport rpt = linearish_check(rep, 2);
    CHECK(rpt.cond_coherence);
    CHECK(rpt.cond_pullback);

    // force a coherence between (1,{0,1}) and (2,{2}): disjoint blocks
    Representation broken =
        build_standard_rep(d, 2, {{Representation::pack(1, 0), Representation::pack(2, 2)}});
    LinearishReport rb = linearish_check(broken, 2);
    CHECK_FALSE(rb.cond_coherence);
    CHECK(rb.witness.find("disjoint") != std::string::npos);

    Representation zero = build_standard_rep(d, 0);
    LinearishReport rz = linearish_check(zero, 0);
    CHECK(rz.cond_coherence);
    CHECK(rz.cond_pullback);
}

TEST_CASE("extension trace: self extension commutes exactly") {
    auto d = threept_separating();
    Representation rep = build_standard_rep(d, 2);
    Trace f = extension_trace(as_linearish(rep), rep);
    CHECK(validate_trace(f).ok);
    for (std::size_t p = 0; p < 3; ++p) {
        Cliq name = canonical_name_finite(rep, p);
        Cliq image = apply_trace(f, name);
        DecodeResult r = delta_decode(rep, image, 2);
        CHECK(r.status == DecodeResult::Status::Point);
        CHECK(r.point == p);
    }
}

TEST_CASE("extension trace on bounded R: γ = (x/2)∘δ commutes at samples") {
    UniformSpaceDescriptor dr = dyadic_interval_descriptor(Rat(-1), Rat(1), 8);
    Representation rep = build_standard_rep(dr, 8);
    UniformSpaceDescriptor target = dyadic_interval_descriptor(Rat(-1), Rat(1), 6);
    Representation target_rep = build_standard_rep(target, 6);

    FunctionSpec half = fn_half();
    LinearishRep gamma = compose_linearish(rep, half, target);
    Trace f = extension_trace(gamma, target_rep, &half);
    CHECK(validate_trace(f).ok);

    RationalSampler sampler(5, Rat(-1), Rat(1));
    for (int k = 0; k < 20; ++k) {
        Rat q = sampler.next();
        Cliq name = canonical_name_interval(rep, q);
        Cliq image = apply_trace(f, name);
        DecodeResult r = delta_decode(target_rep, image, 6);
        REQUIRE(r.status == DecodeResult::Status::Interval);
        CHECK(r.lo <= q / 2);
        CHECK(q / 2 <= r.hi);
        // linearity: each output token has exactly one source in the name
        QueryProfile prof = query_profile(f, name);
        CHECK(prof.max_sources <= 1);
    }
}

TEST_CASE("the dyadic basis reproduces the bounded coherence structure of R") {
    // token (n, [x]) of B corresponds to the dyadic token x of the window;
    // coherence tables agree, compared at depth 6
    UniformSpaceDescriptor dr = dyadic_interval_descriptor(Rat(0), Rat(1), 6);
    Representation rep = build_standard_rep(dr, 6);
    std::vector<std::pair<TokenIndex, Dyadic>> pairs;
    for (unsigned n = 1; n <= 6; ++n) {
        auto fam = rep.level_family(n);
        auto dys = level_anticover(n, Rat(0), Rat(1));
        REQUIRE(fam.size() == dys.size());
        for (std::size_t i = 0; i < fam.size(); ++i) pairs.push_back({fam[i], dys[i]});
    }
    for (const auto& [t1, d1] : pairs)
        for (const auto& [t2, d2] : pairs)
            CHECK(rep.space->strictly_coherent(t1, t2) == (!(d1 == d2) && r_coherent(d1, d2)));
}

TEST_CASE("standard representations over different bases are inter-reducible") {
    auto a = threept_separating();
    UniformSpaceDescriptor b;
    b.point_names = {"0", "1", "2"};
    BasisBlock whole{{0, 1, 2}, {}, {}, "012"};
    BasisBlock s0{{0}, {}, {}, "0"}, s1{{1}, {}, {}, "1"}, s2{{2}, {}, {}, "2"};
    b.covers = {{whole}, {s0, s1, s2}};
    b.validate();

    Representation ra = build_standard_rep(a, 2);
    Representation rb = build_standard_rep(b, 2);
    Trace fab = extension_trace(linearish_into(ra, b, 2), rb);
    Trace fba = extension_trace(linearish_into(rb, a, 2), ra);
    for (std::size_t p = 0; p < 3; ++p) {
        Cliq name = canonical_name_finite(ra, p);
        DecodeResult r1 = delta_decode(rb, apply_trace(fab, name), 2);
        CHECK(r1.status == DecodeResult::Status::Point);
        CHECK(r1.point == p);
        Cliq back = apply_trace(fba, apply_trace(fab, name));
        DecodeResult r2 = delta_decode(ra, back, 2);
        CHECK(r2.status == DecodeResult::Status::Point);
        CHECK(r2.point == p);
    }
}

TEST_CASE("chain connectivity") {
    auto d = threept_separating();
    CHECK(chain_connected(d, 1));
    CHECK_FALSE(chain_connected(d, 2));  // separating cover has no overlaps

    UniformSpaceDescriptor disc;
    disc.point_names = {"0", "1"};
    BasisBlock s0{{0}, {}, {}, "0"}, s1{{1}, {}, {}, "1"};
    disc.covers = {{s0, s1}};
    disc.validate();
    CHECK_FALSE(chain_connected(disc, 1));

    UniformSpaceDescriptor dr = dyadic_interval_descriptor(Rat(0), Rat(1), 6);
    for (unsigned n = 1; n <= 6; ++n) CHECK(chain_connected(dr, n));
}

TEST_CASE("uniform quotient refutation: level form, deletions, bad candidates") {
    auto d = threept_overlap();
    Representation rep = build_standard_rep(d, 2);

    auto level1 = rep.level_family(1);
    RefutationVerdict ok = unicover_shape_refutation(rep, level1, 2);
    CHECK(ok.kind == RefutationVerdict::Kind::ConsistentLevelForm);

    Cliq deleted = {level1[0]};  // drop the overlapping block {1,2}
    RefutationVerdict bad = unicover_shape_refutation(rep, deleted, 2);
    CHECK(bad.kind == RefutationVerdict::Kind::Refuted);
    REQUIRE_FALSE(bad.witness_a.empty());
    REQUIRE_FALSE(bad.witness_b.empty());
    // both witnesses decode (lie in Dom δ) and differ exactly at one level
    CHECK(delta_decode(rep, bad.witness_a, 2).status != DecodeResult::Status::Undefined);
    CHECK(delta_decode(rep, bad.witness_b, 2).status != DecodeResult::Status::Undefined);
    CHECK(intersection_size(bad.witness_a, bad.witness_b) == bad.witness_a.size() - 1);
    // the orthogonality contradiction: the candidate cannot meet both exactly once
    std::size_t ka = intersection_size(bad.witness_a, normalized(deleted));
    std::size_t kb = intersection_size(bad.witness_b, normalized(deleted));
    CHECK((ka != 1 || kb != 1));

    Cliq mixed = {level1[0], rep.level_family(2)[0]};  // coherent cross-level pair
    RefutationVerdict rej = unicover_shape_refutation(rep, mixed, 2);
    CHECK(rej.kind == RefutationVerdict::Kind::NotAnticlique);
}

TEST_CASE("quotient refutation on bounded R") {
    UniformSpaceDescriptor dr = dyadic_interval_descriptor(Rat(0), Rat(1), 3);
    Representation rep = build_standard_rep(dr, 3);
    for (unsigned n = 1; n <= 3; ++n) {
        Cliq level = rep.level_family(n);
        CHECK(unicover_shape_refutation(rep, level, 3).kind ==
              RefutationVerdict::Kind::ConsistentLevelForm);
        for (std::size_t k = 0; k < level.size(); ++k) {
            Cliq cand = level;
            cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(k));
            RefutationVerdict v = unicover_shape_refutation(rep, cand, 3);
            CHECK(v.kind == RefutationVerdict::Kind::Refuted);
        }
    }
}

TEST_CASE("finite representation constructions and classicality") {
    // the F2-style classical representation: {p} ↦ P, {q} ↦ Q
    FiniteRep base;
    base.space = ts::f2();
    base.point_names = {"P", "Q"};
    base.graph = {{{0}, 0}, {{1}, 1}};
    CHECK(classical_check(base).ok);

    FiniteRep tens = rep_construct_tensor(base, base);
    CHECK(tens.graph.size() == 4);
    CHECK(classical_check(tens).ok);

    FiniteRep bang = rep_construct_bang(base);
    CHECK(classical_check(bang).ok);

    // a domain that omits a strict total clique of its own closure: over F2W,
    // {p,w} and {q} close to the totality generated by {p},{q}, whose strict
    // part {p} is not in the domain
    FiniteRep missing;
    missing.space = ts::f2w();
    missing.point_names = {"P", "Q"};
    missing.graph = {{{0, 2}, 0}, {{1}, 1}};
    ClassicalReport bad = classical_check(missing);
    CHECK_FALSE(bad.ok);
    CHECK_FALSE(bad.witness.empty());

    FiniteRep lolli = rep_construct_lollipop(base, base);
    CHECK_FALSE(lolli.graph.empty());
    // the identity trace's clique tracks the identity function
    bool found_identity = false;
    for (const auto& [kappa, fid] : lolli.graph) {
        if (lolli.point_names[fid].find("P↦P") != std::string::npos &&
            lolli.point_names[fid].find("Q↦Q") != std::string::npos)
            found_identity = true;
    }
    CHECK(found_identity);
}
