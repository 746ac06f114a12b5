#include "doctest.h"
#include "test_support.hpp"

using namespace cohsp;

TEST_CASE("dyadic coherence: levels must differ and intervals must meet") {
    Dyadic a{Int(0), 1}, b{Int(1), 2};
    CHECK(r_coherent(a, b));  // [−1/2,1/2] ∩ [0,1/2] ≠ ∅
    Dyadic c{Int(0), 2}, d{Int(1), 2};
    CHECK_FALSE(r_coherent(c, d));  // equal levels
    Dyadic e{Int(4), 2};
    CHECK_FALSE(r_coherent(a, e));  // [−1/2,1/2] ∩ [3/4,5/4] = ∅
    CHECK(r_coherent(a, a));        // reflexive closure
    // boundary touching counts: [x] closed
    Dyadic f{Int(3), 2};  // [1/2, 1] touches [−1/2, 1/2] at 1/2
    CHECK(r_coherent(a, f));
}

TEST_CASE("token packing, labels, and the lazy space enumeration") {
    Dyadic d{Int(-3), 5};
    CHECK(dy_unpack(dy_pack(d)) == d);
    CHECK(dy_label(d) == "-3/2^5");
    CHECK(dy_parse("-3/2^5") == d);
    auto r = r_space();
    CHECK_FALSE(r->finite());
    CHECK(r->coherent(dy_pack(Dyadic{Int(0), 1}), dy_pack(Dyadic{Int(1), 2})));
    // enumeration hits every small token exactly once
    std::set<std::string> seen;
    for (std::uint64_t p = 0; p < 45; ++p) seen.insert(r->token_label(r->at_position(p)));
    CHECK(seen.size() == 45);
    CHECK(seen.count("0/2^0") == 1);
    for (std::uint64_t p = 0; p < 45; ++p) CHECK(r->position_of(r->at_position(p)) == p);
}

TEST_CASE("approx_clique: nearest dyadics per level, pairwise coherent") {
    auto a = approx_clique(RealOracle::constant(Rat(1, 3)), 2);
    REQUIRE(a.size() == 3);
    CHECK(a[0] == Dyadic{Int(0), 0});
    CHECK(a[1] == Dyadic{Int(1), 1});
    CHECK(a[2] == Dyadic{Int(1), 2});

    auto z = approx_clique(RealOracle::constant(Rat(0)), 5);
    for (unsigned n = 0; n <= 5; ++n) CHECK(z[n] == Dyadic{Int(0), n});

    RationalSampler sampler(20240601, Rat(-8), Rat(8));
    for (int k = 0; k < 100; ++k) {
        Rat q = sampler.next();
        auto cl = approx_clique(RealOracle::constant(q), 20);
        for (std::size_t i = 0; i < cl.size(); ++i)
            for (std::size_t j = i + 1; j < cl.size(); ++j) CHECK(r_coherent(cl[i], cl[j]));
        // the represented real sits inside every interval
        for (const auto& t : cl) {
            auto [lo, hi] = dy_interval(t);
            CHECK(lo <= q);
            CHECK(q <= hi);
        }
    }
}

TEST_CASE("oracle consistency violations are data errors") {
    int calls = 0;
    RealOracle bad([&calls](unsigned n) {
        ++calls;
        return n % 2 == 0 ? Rat(0) : Rat(1);  // wildly inconsistent
    });
    CHECK_THROWS_AS(approx_clique(bad, 4), data_error);
}

TEST_CASE("rho_approx: level read-off with its exact error bound") {
    auto a = approx_clique(RealOracle::constant(Rat(1, 3)), 10);
    Rat v = rho_approx(a, 10);
    CHECK(rat_abs(v - Rat(1, 3)) <= rat_pow2_neg(10));
    // exact dyadic at its own level
    auto b = approx_clique(RealOracle::constant(Rat(3, 4)), 4);
    CHECK(rho_approx(b, 2) == Rat(3, 4));
    CHECK_THROWS_AS(rho_approx(a, 11), precondition_error);

    RationalSampler sampler(7, Rat(-4), Rat(4));
    for (int k = 0; k < 100; ++k) {
        Rat q = sampler.next();
        auto cl = approx_clique(RealOracle::constant(q), 12);
        for (unsigned n = 0; n <= 12; ++n) CHECK(rat_abs(rho_approx(cl, n) - q) <= rat_pow2_neg(n));
    }
}

TEST_CASE("level anticover: window boundary convention and incoherence") {
    auto d0 = level_anticover(0, Rat(0), Rat(1));
    std::vector<Dyadic> expect = {{Int(-1), 0}, {Int(0), 0}, {Int(1), 0}, {Int(2), 0}};
    CHECK(d0 == expect);
    for (std::size_t i = 0; i < d0.size(); ++i)
        for (std::size_t j = i + 1; j < d0.size(); ++j) CHECK_FALSE(r_coherent(d0[i], d0[j]));

    // every depth-n prefix within the window meets each level k ≤ n exactly once
    RationalSampler sampler(11, Rat(0), Rat(1));
    for (int s = 0; s < 25; ++s) {
        Rat q = sampler.next();
        auto cl = approx_clique(RealOracle::constant(q), 8);
        for (unsigned k = 0; k <= 8; ++k) {
            auto dk = level_anticover(k, Rat(0), Rat(1));
            std::size_t hits = 0;
            for (const auto& t : cl)
                for (const auto& u : dk)
                    if (t == u) ++hits;
            CHECK(hits == 1);
        }
    }
}

TEST_CASE("coherence implies the value distance bound") {
    RationalSampler sampler(13, Rat(-4), Rat(4));
    std::mt19937_64 rng(99);
    for (int k = 0; k < 200; ++k) {
        Rat q = sampler.next();
        auto cl = approx_clique(RealOracle::constant(q), 16);
        std::size_t i = rng() % cl.size(), j = rng() % cl.size();
        if (!r_coherent(cl[i], cl[j])) continue;
        Rat bound = rat_pow2_neg(cl[i].level) + rat_pow2_neg(cl[j].level);
        CHECK(rat_abs(dy_value(cl[i]) - dy_value(cl[j])) <= bound);
    }
}

TEST_CASE("windowed restriction of R matches the lazy space") {
    WindowedR w = windowed_r(Rat(-1), Rat(1), 3);
    CHECK(w.space->finite());
    for (std::size_t i = 0; i < w.tokens.size(); ++i)
        for (std::size_t j = 0; j < w.tokens.size(); ++j)
            CHECK(w.space->coherent(i, j) == r_coherent(w.tokens[i], w.tokens[j]));
    CHECK(w.index_of(w.tokens[5]) == 5);
    CHECK_THROWS_AS(w.index_of(Dyadic{Int(500), 1}), domain_error);
}

TEST_CASE("maximal prefixes are their own strict parts (window view)") {
    RealWindowView view{Rat(-2), Rat(2), 8};
    auto a = approx_clique(RealOracle::constant(Rat(5, 7)), 8);
    CHECK(view.prefix_total(a, 8));
    // dropping any level breaks prefix totality: no proper subclique is total
    for (std::size_t k = 0; k < a.size(); ++k) {
        auto sub = a;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(k));
        CHECK_FALSE(view.prefix_total(sub, 8));
    }
}
