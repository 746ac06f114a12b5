#include "doctest.h"
#include "test_support.hpp"

using namespace cohsp;

TEST_CASE("x/2: interval containment and a validated realizer") {
    // the containment fact behind the construction: f([3/2 ± 1/2]) = [1/2,1] ⊆ [0,2]
    FunctionSpec half = fn_half();
    CHECK(half.image_within(Rat(1), Rat(2), Rat(0), Rat(2)));
    CHECK(half.modulus(1) == 0);
    CHECK(half.modulus(3) == 2);

    Trace t = linear_realizer(half, 6, Rat(-2), Rat(2));
    CHECK(validate_trace(t).ok);
    // every output level n sources level μ(n+1) tokens only
    for (const auto& p : t.pairs()) {
        Dyadic in = dy_unpack(p.input[0]), out = dy_unpack(p.output);
        CHECK(in.level == half.modulus(out.level + 1));
        auto [ilo, ihi] = dy_interval(in);
        auto [olo, ohi] = dy_interval(out);
        CHECK(half.image_within(ilo, ihi, olo, ohi));
    }
}

TEST_CASE("identity realizer commutes exactly") {
    Trace t = linear_realizer(fn_identity(), 8, Rat(-2), Rat(2));
    CHECK(validate_trace(t).ok);
    auto rep = realization_check(t, fn_identity(), {Rat(1, 3), Rat(-5, 7), Rat(3, 4)}, 8);
    CHECK(rep.ok);
}

TEST_CASE("realizer outputs are total at desk scale: one token per level anticover") {
    for (const FunctionSpec& f : {fn_half(), fn_shift(Rat(1, 3)), fn_abs()}) {
        Trace t = linear_realizer(f, 6, Rat(-2), Rat(2));
        validate_dyadic_trace(t);
        RationalSampler sampler(41, Rat(-1), Rat(1));
        for (int k = 0; k < 10; ++k) {
            Rat q = sampler.next();
            auto a = approx_clique(RealOracle::constant(q), trace_max_source_level(t));
            Cliq in;
            for (const auto& d : a) in.push_back(dy_pack(d));
            Cliq out = apply_trace(t, normalized(in));
            // the image meets every output-window level anticover exactly once
            for (unsigned n = 0; n <= 6; ++n) {
                std::size_t hits = 0;
                for (TokenIndex tok : out)
                    if (dy_unpack(tok).level == n) ++hits;
                CHECK(hits == 1);
            }
        }
    }
}

TEST_CASE("sqrt: containment for all window tokens to source depth 10") {
    FunctionSpec sq = fn_sqrt();
    // output depth 3 sources tokens up to level μ(4) = 10; the constructor
    // re-checks f([x]) ⊆ [h_n(x)] exactly for every pair
    Trace t = linear_realizer(sq, 3, Rat(0), Rat(4));
    CHECK(validate_dyadic_trace(t).ok);
    unsigned max_src = 0;
    for (const auto& p : t.pairs()) max_src = std::max(max_src, dy_unpack(p.input[0]).level);
    CHECK(max_src == 10);
    auto rep = realization_check(t, sq, {Rat(2), Rat(1, 2), Rat(9, 4)}, 3);
    CHECK(rep.ok);

    Expression e = parse_expression("sqrt(2)");
    Rat v = eval_expression(e, 16);
    // |v − √2| ≤ 2^-16, checked by squaring; cross-checked against an
    // independent integer-sqrt reference
    Rat lo = v - rat_pow2_neg(16), hi = v + rat_pow2_neg(16);
    CHECK(lo * lo <= 2);
    CHECK(2 <= hi * hi);
    Int g = int_isqrt(Int(2) * int_pow2(2 * 24));
    Rat reference(g, int_pow2(24));
    CHECK(rat_abs(v - reference) <= rat_pow2_neg(16) + rat_pow2_neg(24));
}

TEST_CASE("transpose of the x/2 realizer validates on R⊥ and inverts sources") {
    Trace t = linear_realizer(fn_half(), 4, Rat(-1), Rat(1));
    Trace tt = transpose(t);
    CHECK(validate_trace(tt).ok);
    CHECK(tt.source()->kind() == SpaceKind::Dual);
    // each output-level token goes back to its unique source
    for (const auto& p : t.pairs()) {
        Cliq back = apply_trace(tt, {p.output});
        CHECK(contains_token(back, p.input[0]));
    }
    CHECK(transpose(tt) == t);
}

TEST_CASE("dyadic sweep validation agrees with the generic validator") {
    Trace lin = linear_realizer(fn_half(), 4, Rat(-1), Rat(1));
    CHECK(validate_trace(lin).ok == validate_dyadic_trace(lin).ok);
    Trace st = stable_realizer(fn_square(), 2, Rat(0), Rat(1));
    CHECK(validate_trace(st).ok == validate_dyadic_trace(st).ok);
    // a broken trace: same source token, clashing same-level outputs
    Trace bad(TraceKind::Linear, r_space(), r_space(),
              {{{dy_pack(Dyadic{Int(0), 2})}, dy_pack(Dyadic{Int(0), 0})},
               {{dy_pack(Dyadic{Int(0), 3})}, dy_pack(Dyadic{Int(4), 0})}});
    CHECK_FALSE(validate_dyadic_trace(bad).ok);
    CHECK_FALSE(validate_trace(bad).ok);
}

TEST_CASE("binary add realizer: the tensor pair example and exact dyadics") {
    FunctionSpec add = fn_add();
    CHECK(add.modulus(1) == 2);
    BinaryRealizer br = binary_linear_realizer(add, 4, Rat(-1), Rat(1));
    CHECK(validate_binary_dyadic_trace(br).ok);
    // the sweep agrees with the generic validator on a small instance
    BinaryRealizer small = binary_linear_realizer(add, 1, Rat(0), Rat(1, 2));
    CHECK(validate_trace(small.trace).ok == validate_binary_dyadic_trace(small).ok);
    // windowed instance at depth 8
    BinaryRealizer deep = binary_linear_realizer(add, 8, Rat(0), Rat(1, 4));
    CHECK(validate_binary_dyadic_trace(deep).ok);

    // the pair (((0,2),(2,2)) → nearest level-0 dyadic to 1/2, tie toward even = 0)
    TokenIndex x = br.wx.index_of(Dyadic{Int(0), 2});
    TokenIndex y = br.wy.index_of(Dyadic{Int(2), 2});
    TokenIndex in = br.source->pair_index(x, y);
    bool found = false;
    for (const auto& p : br.trace.pairs())
        if (p.input[0] == in && dy_unpack(p.output) == Dyadic{Int(0), 0}) found = true;
    CHECK(found);

    // exact dyadics at matching levels: zero rounding error
    Rat v = eval_expression(parse_expression("add(0,1/2)"), 2);
    CHECK(v == Rat(1, 2));

    // applying the trace to a tensor of approximation cliques realizes the sum
    auto ax = approx_clique(RealOracle::constant(Rat(1, 3)), add.modulus(5));
    auto ay = approx_clique(RealOracle::constant(Rat(1, 6)), add.modulus(5));
    Cliq in_cl;
    for (const auto& dx : ax)
        for (const auto& dy : ay)
            in_cl.push_back(br.source->pair_index(br.wx.index_of(dx), br.wy.index_of(dy)));
    Cliq out = apply_trace(br.trace, normalized(in_cl));
    bool ok = false;
    for (TokenIndex t : out) {
        Dyadic h = dy_unpack(t);
        if (h.level != 4) continue;
        auto [olo, ohi] = dy_interval(h);
        if (olo <= Rat(1, 2) && Rat(1, 2) <= ohi) ok = true;
    }
    CHECK(ok);
}

TEST_CASE("stable realizer of x²: support sizes and validity to depth 8") {
    FunctionSpec sq = fn_square();
    Trace t = stable_realizer(sq, 5, Rat(-4), Rat(4));
    CHECK(validate_dyadic_trace(t).ok);
    for (const auto& p : t.pairs()) CHECK(p.input.size() == 2);
    Trace deep = stable_realizer(sq, 8, Rat(0), Rat(1));
    CHECK(validate_dyadic_trace(deep).ok);

    // profile on a concrete input clique: minimal supports of size 2
    unsigned depth = trace_max_source_level(t);
    auto a = approx_clique(RealOracle::constant(Rat(3, 2)), depth);
    Cliq in;
    for (const auto& d : a) in.push_back(dy_pack(d));
    QueryProfile prof = query_profile(t, normalized(in));
    CHECK(prof.outputs > 0);
    CHECK(prof.max_sources == 2);
    CHECK(prof.histogram.count(1) == 0);

    // the diagram commutes at samples
    auto rep = realization_check(t, sq, {Rat(3, 2), Rat(-2), Rat(1, 3)}, 5);
    CHECK(rep.ok);

    // a uniformly continuous function compiled stably degenerates to size-1 pairs
    Trace deg = stable_realizer(fn_half(), 4, Rat(-1), Rat(1));
    CHECK(validate_trace(deg).ok);
    for (const auto& p : deg.pairs()) CHECK(p.input.size() == 1);
}

TEST_CASE("realization_check failures carry witnesses") {
    Trace t = linear_realizer(fn_half(), 8, Rat(-2), Rat(2));
    CHECK(realization_check(t, fn_half(), {Rat(1, 3)}, 8).ok);

    // a valid but broken trace: keep everything except the level-8 outputs
    std::vector<TracePair> kept;
    for (const auto& p : t.pairs())
        if (dy_unpack(p.output).level != 8) kept.push_back(p);
    Trace dropped(TraceKind::Linear, t.source(), t.target(), std::move(kept));
    auto rep = realization_check(dropped, fn_half(), {Rat(1, 3)}, 8);
    CHECK_FALSE(rep.ok);
    CHECK(rep.witness.find("level-8") != std::string::npos);

    // a single-pair trace whose output is shifted by 2^-n
    Dyadic in{Int(1), 1};
    Dyadic good = fn_half().round_at({dy_value(in)}, 1);
    Trace shifted(TraceKind::Linear, r_space(), r_space(),
                  {{{dy_pack(in)}, dy_pack(Dyadic{good.m + 2, good.level})}});
    CHECK(validate_trace(shifted).ok);
    auto rep2 = realization_check(shifted, fn_half(), {Rat(1, 2)}, 1);
    CHECK_FALSE(rep2.ok);
}

TEST_CASE("query dichotomy: linear realizers profile 1, composition preserves it") {
    for (const FunctionSpec& f : {fn_half(), fn_identity(), fn_abs(), fn_shift(Rat(1, 3))}) {
        Trace t = linear_realizer(f, 6, Rat(-2), Rat(2));
        unsigned depth = trace_max_source_level(t);
        auto a = approx_clique(RealOracle::constant(Rat(2, 5)), depth);
        Cliq in;
        for (const auto& d : a) in.push_back(dy_pack(d));
        QueryProfile prof = query_profile(t, normalized(in));
        CHECK(prof.outputs > 0);
        CHECK(prof.max_sources == 1);
    }

    Trace h = linear_realizer(fn_half(), 10, Rat(-2), Rat(2));
    Trace hh = compose(h, h);  // realizes x/4
    auto a = approx_clique(RealOracle::constant(Rat(1, 3)), trace_max_source_level(hh));
    Cliq in;
    for (const auto& d : a) in.push_back(dy_pack(d));
    QueryProfile prof = query_profile(hh, normalized(in));
    CHECK(prof.max_sources == 1);
    // composition soundness: x/4 within 2^-n at the sampled input
    Cliq out = apply_trace(hh, normalized(in));
    bool ok = false;
    for (TokenIndex t : out) {
        Dyadic d = dy_unpack(t);
        auto [olo, ohi] = dy_interval(d);
        if (olo <= Rat(1, 12) && Rat(1, 12) <= ohi) ok = true;
    }
    CHECK(ok);
}

TEST_CASE("linear extraction of x² fails with a non-singleton witness") {
    FunctionSpec sq = fn_square();
    Trace t = stable_realizer(sq, 2, Rat(-4), Rat(4));
    WindowedR w_src = windowed_r(Rat(-4), Rat(4), trace_max_source_level(t));
    WindowedR w_dst = windowed_r(Rat(-20), Rat(20), 2);
    // remap the stable trace onto windowed finite spaces
    std::vector<TracePair> pairs;
    for (const auto& p : t.pairs()) {
        Cliq in;
        bool inside = true;
        for (TokenIndex tok : p.input) {
            Dyadic d = dy_unpack(tok);
            try { in.push_back(w_src.index_of(d)); } catch (const domain_error&) { inside = false; break; }
        }
        if (!inside) continue;
        pairs.push_back({normalized(in), w_dst.index_of(dy_unpack(p.output))});
    }
    Trace wt(TraceKind::Stable, w_src.space, w_dst.space, std::move(pairs));
    REQUIRE(validate_trace(wt).ok);
    auto oracle = [&](const Cliq& a) { return apply_trace(wt, a); };
    try {
        trace_of_function(w_src.space, w_dst.space, oracle, TraceKind::Linear, 2);
        CHECK(false);
    } catch (const domain_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("size 2") != std::string::npos);
    }
}

TEST_CASE("strong uniform continuity of emitted realizers, sampled exactly") {
    for (const FunctionSpec& f : {fn_half(), fn_shift(Rat(1, 3))}) {
        Trace t = linear_realizer(f, 8, Rat(-2), Rat(2));
        for (unsigned n = 2; n <= 8; n += 3) {
            unsigned s = f.modulus(n + 1);
            // 𝔞 = sources of level-n outputs sit exactly at level μ(n+1)
            for (const auto& p : t.pairs())
                if (dy_unpack(p.output).level == n) CHECK(dy_unpack(p.input[0]).level == s);
            RationalSampler sampler(n, Rat(-1), Rat(1));
            std::size_t premise_hits = 0;
            for (int k = 0; k < 60; ++k) {
                Rat q = sampler.next();
                Rat q2 = q + rat_pow2_neg(s + 4);
                auto a = approx_clique(RealOracle::constant(q), 9 + s);
                auto b = approx_clique(RealOracle::constant(q2), 9 + s);
                bool share_source = a[s] == b[s];
                if (!share_source) continue;
                ++premise_hits;
                Cliq ca, cb;
                for (const auto& d : a) ca.push_back(dy_pack(d));
                for (const auto& d : b) cb.push_back(dy_pack(d));
                Cliq fa = apply_trace(t, normalized(ca)), fb = apply_trace(t, normalized(cb));
                // |F(a)−F(b)| < D_n: a common level-n token
                bool share_out = false;
                for (TokenIndex u : fa)
                    for (TokenIndex v : fb)
                        if (u == v && dy_unpack(u).level == n) share_out = true;
                CHECK(share_out);
            }
            CHECK(premise_hits > 10);
        }
    }
}

TEST_CASE("expressions: parsing, evaluation bounds, stable gating, profile") {
    CHECK(eval_expression(parse_expression("id(3/4)"), 5) == Rat(3, 4));
    Rat v = eval_expression(parse_expression("add(1/3,1/6)"), 20);
    CHECK(rat_abs(v - Rat(1, 2)) <= rat_pow2_neg(20));

    CHECK(rat_abs(eval_expression(parse_expression("abs(-0.25)"), 10) - Rat(1, 4)) <= rat_pow2_neg(10));
    CHECK(rat_abs(eval_expression(parse_expression("clamp(0,1,7/3)"), 10) - 1) <= rat_pow2_neg(10));
    CHECK(rat_abs(eval_expression(parse_expression("shift(1/3,half(1/3))"), 14) - Rat(1, 2)) <=
          rat_pow2_neg(14));

    CHECK_THROWS_AS(eval_expression(parse_expression("sq(1/3)"), 10), domain_error);
    Rat sq = eval_expression(parse_expression("sq(1/3)"), 10, true);
    CHECK(rat_abs(sq - Rat(1, 9)) <= rat_pow2_neg(10));
    Rat mu = eval_expression(parse_expression("mul(2/3,3/5)"), 12, true);
    CHECK(rat_abs(mu - Rat(2, 5)) <= rat_pow2_neg(12));

    CHECK_THROWS_AS(parse_expression("frob(1)"), parse_error);
    CHECK_THROWS_AS(parse_expression("add(1)"), parse_error);
    CHECK_THROWS_AS(parse_expression("shift(x, 1)"), parse_error);

    std::vector<std::string> lines;
    expression_profile(parse_expression("sq(add(1/3,1/6))"), lines);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0].find("2 source") != std::string::npos);
    CHECK(lines[1].find("1 source") != std::string::npos);
}

TEST_CASE("trace files round trip") {
    Trace t = linear_realizer(fn_half(), 3, Rat(0), Rat(1));
    std::string text = serialize_trace(t);
    SpaceResolver resolve = [](const std::string& name) -> SpacePtr {
        if (name == "R") return r_space();
        return nullptr;
    };
    Trace back = parse_trace(text, resolve);
    CHECK(back == t);

    // {p,q} is not a clique of F2, so a stable input over it is rejected
    auto f2 = ts::f2();
    CHECK_THROWS_AS(Trace(TraceKind::Stable, f2, f2, {{{0, 1}, 0}}), domain_error);

    // stable trace files round trip too
    Trace st = stable_realizer(fn_square(), 1, Rat(0), Rat(1));
    Trace st_back = parse_trace(serialize_trace(st), resolve);
    CHECK(st_back == st);
}
