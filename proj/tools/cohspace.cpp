// The cohspace command line: space/totality checking, internal completeness,
// uniformity verification, representation checks, realizer compilation, and
// exact real evaluation. Exit codes: 0 all requested checks pass, 1 a check
// failed, 2 usage or data error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <cohsp/cohsp.hpp>

using namespace cohsp;
using nlohmann::json;

namespace {

constexpr const char* kReportSchema = "cohspace.report/1";

struct Report {
    std::string command;
    bool ok = true;
    std::vector<std::pair<std::string, std::string>> lines;  // (status, text)
    bool as_json = false;

    void note(const std::string& text) { lines.push_back({"info", text}); }
    void check(bool pass, const std::string& text) {
        lines.push_back({pass ? "pass" : "fail", text});
        ok = ok && pass;
    }

    int finish() const {
        if (as_json) {
            json j;
            j["schema"] = kReportSchema;
            j["command"] = command;
            j["ok"] = ok;
            j["lines"] = json::array();
            for (const auto& [status, text] : lines) j["lines"].push_back({{"status", status}, {"text", text}});
            std::cout << j.dump(2) << std::endl;
        } else {
            for (const auto& [status, text] : lines) {
                if (status == "info") std::cout << text << "\n";
                else std::cout << (status == "pass" ? "[ok]   " : "[FAIL] ") << text << "\n";
            }
            std::cout << (ok ? "all checks passed" : "CHECKS FAILED") << std::endl;
        }
        return ok ? 0 : 1;
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t g_budget = (1u << 22);
std::uint64_t g_seed = 12345;

TotalityView view_from_file(const std::string& path, SpacePtr* space_out = nullptr) {
    SpaceDescriptor d = parse_space_file(slurp(path));
    SpacePtr sp = descriptor_to_space(d);
    if (space_out) *space_out = sp;
    auto gens = descriptor_generators(d, sp);
    if (gens.empty()) throw data_error("'" + path + "' declares no totality generators");
    return TotalityView::exhaustive(sp, gens, TotalityView::default_token_cap, g_budget);
}

std::string points_line(const TotalityView& v, const std::vector<std::size_t>& pts) {
    std::string s;
    for (std::size_t p : pts) s += (s.empty() ? "" : " ") + clique_label(v.space(), v.strict()[p]);
    return s.empty() ? "(none)" : s;
}

// ---------------------------------------------------------------- check

int run_check(const std::string& path, Report& rep) {
    SpacePtr sp;
    TotalityView v = view_from_file(path, &sp);
    rep.note("space " + sp->name() + ": " + std::to_string(sp->token_count()) + " tokens");
    auto list = [&](const char* name, const CliqSet& s) {
        std::string line = std::string(name) + " =";
        for (const auto& c : s) line += " " + clique_label(sp, c);
        rep.note(line);
    };
    list("T°", v.strict());
    list("T", v.total());
    list("T⊥", v.co_total());
    list("(T⊥)°", v.co_strict());
    // closure laws
    CliqSet closure = perp_of_anticliques(v.co_total(), sp);
    rep.check(closure == v.total(), "T = T⊥⊥");
    rep.check(perp_set(v.total(), sp) == v.co_total(), "T⊥ = T⊥⊥⊥");
    bool upward = true;
    for (const auto& a : all_cliques(sp)) {
        bool has_strict_sub = false;
        for (const auto& s : v.strict())
            if (is_subset(s, a)) { has_strict_sub = true; break; }
        if (has_strict_sub != v.is_total_clique(a)) { upward = false; break; }
    }
    rep.check(upward, "T is the upward closure of T°");
    return 0;
}

// ---------------------------------------------------------------- complete

int run_complete(const std::vector<std::string>& tensor_files, const std::string& bang_file, Report& rep) {
    if (!tensor_files.empty()) {
        TotalityView a = view_from_file(tensor_files[0]);
        TotalityView b = view_from_file(tensor_files[1]);
        auto r = check_internal_completeness("tensor", {&a, &b});
        if (!r.hypotheses_ok) throw data_error(r.hypothesis_violation);
        rep.check(r.ok, "(T_X⊗T_Y)⊥⊥° = T°_X ⊗ T°_Y" + (r.ok ? "" : ": " + r.counterexample));
    }
    if (!bang_file.empty()) {
        TotalityView a = view_from_file(bang_file);
        auto r = check_internal_completeness("bang", {&a});
        rep.check(r.ok, "(!T)⊥⊥° = !(T°)" + (r.ok ? "" : ": " + r.counterexample));
    }
    return 0;
}

// ---------------------------------------------------------------- unif

int run_unif(const std::string& path, const std::string& which, const std::string& modulus_trace,
             const std::string& target_path, Report& rep) {
    SpacePtr src_space;
    TotalityView v = view_from_file(path, &src_space);
    if (!modulus_trace.empty()) {
        if (target_path.empty()) throw data_error("--modulus needs --target <space file>");
        SpacePtr dst_space;
        TotalityView w = view_from_file(target_path, &dst_space);
        SpaceResolver resolve = [&](const std::string& name) -> SpacePtr {
            if (name == src_space->name()) return src_space;
            if (name == dst_space->name()) return dst_space;
            if (name == "R") return r_space();
            return nullptr;
        };
        Trace t = parse_trace(slurp(modulus_trace), resolve);
        bool total = is_total_trace(t, v, w, false);
        rep.check(total, "trace is total w.r.t. the two views");
        if (total) {
            for (const auto& b : w.co_strict()) {
                Cliq a = modulus_for(t, v, w, b, false, true);
                rep.note("modulus for " + clique_label(dst_space, b) + ": " + clique_label(src_space, a));
            }
            rep.check(true, "strong uniform continuity verified for every target uni-cover");
        }
        return 0;
    }
    auto unis = enumerate_unicovers(v);
    auto ubs = enumerate_unbounded_covers(v);
    rep.note("|T°| = " + std::to_string(v.strict().size()) + ", uni-covers: " +
             std::to_string(unis.size()) + ", unbounded covers: " + std::to_string(ubs.size()));
    for (const auto& keys : ubs) {
        Cover u = materialize_unbounded(v, keys);
        rep.note("unbounded cover:");
        for (std::size_t i = 0; i < u.blocks.size(); ++i)
            rep.note("  block " + u.keys[i] + ": " + points_line(v, u.blocks[i]));
    }
    if (which == "axioms" || which == "all") {
        AxiomReport rb = verify_uniformity_axioms(v, ubs, "U1 U3 U4");
        rep.check(rb.u1, "β^ub satisfies U1" + (rb.u1 ? "" : ": " + rb.u1_witness));
        rep.check(rb.u3, "β^ub satisfies U3" + (rb.u3 ? "" : ": " + rb.u3_witness));
        rep.check(rb.u4, "β^ub satisfies U4" + (rb.u4 ? "" : ": " + rb.u4_witness));
        std::vector<UnboundedKeys> sigma;
        for (const auto& c : unis) sigma.push_back(singleton_embedding(c));
        AxiomReport rs = verify_uniformity_axioms(v, sigma, "U3 U4");
        rep.check(rs.u3, "σ^b satisfies U3" + (rs.u3 ? "" : ": " + rs.u3_witness));
        rep.check(rs.u4, "σ^b satisfies U4" + (rs.u4 ? "" : ": " + rs.u4_witness));
    }
    if (which == "fine" || which == "all") {
        // sweep all covers by distinct strict upper sets
        std::vector<Cliq> gens;
        std::vector<std::vector<std::size_t>> blocks;
        for (const auto& a : all_cliques(v.space())) {
            auto blk = upper_block(v, a);
            if (blk.empty()) continue;
            bool seen = false;
            for (const auto& b : blocks)
                if (b == blk) { seen = true; break; }
            if (!seen) { blocks.push_back(blk); gens.push_back(a); }
        }
        bool fine_ok = true;
        std::size_t count = 0;
        const std::size_t npts = v.strict().size();
        for (std::uint64_t mask = 1; mask < (1ull << gens.size()); ++mask) {
            std::uint64_t pts = 0;
            std::vector<Cliq> family;
            Cover open_cover;
            open_cover.point_count = npts;
            for (std::size_t i = 0; i < gens.size(); ++i)
                if (mask & (1ull << i)) {
                    family.push_back(gens[i]);
                    open_cover.blocks.push_back(blocks[i]);
                    for (std::size_t p : blocks[i]) pts |= (1ull << p);
                }
            if (pts != ((1ull << npts) - 1)) continue;
            ++count;
            if (!cover_refines(materialize_unbounded(v, refine_open_cover(family, v)), open_cover)) {
                fine_ok = false;
                break;
            }
        }
        rep.check(fine_ok, "fine uniformity: " + std::to_string(count) + " upper-set covers refined");
    }
    if (which == "scott" || which == "all") {
        bool ok = true;
        for (const auto& keys : ubs) {
            Cover u = materialize_unbounded(v, keys);
            for (std::size_t p = 0; p < v.strict().size(); ++p) {
                std::optional<std::size_t> owner;
                for (std::size_t i = 0; i < keys.size(); ++i)
                    if (is_subset(keys[i], v.strict()[p])) { owner = i; break; }
                if (!owner || star({p}, u) != u.blocks[*owner]) { ok = false; break; }
            }
            if (!ok) break;
        }
        rep.check(ok, "Scott compatibility: st({a},𝔄) = ↑a₀° for every point and cover");
    }
    return 0;
}

// ---------------------------------------------------------------- reps

int run_reps(const std::string& path, unsigned depth, bool do_linearish, bool do_extend,
             int refute_level, int refute_drop, Report& rep) {
    UniformSpaceDescriptor d = parse_descriptor_file(slurp(path));
    if (depth == 0) depth = static_cast<unsigned>(d.covers.size());
    Representation r = build_standard_rep(d, depth);
    rep.note("standard representation with " + std::to_string(r.token_count()) + " tokens at depth " +
             std::to_string(depth));
    for (unsigned n = 1; n <= depth; ++n) {
        bool cc = chain_connected(d, n);
        rep.note("level " + std::to_string(n) + ": " + std::to_string(d.covers[n - 1].size()) +
                 " blocks, " + (cc ? "chain-connected" : "not chain-connected"));
    }
    if (do_linearish) {
        LinearishReport lr = linearish_check(r, depth);
        rep.check(lr.cond_coherence, "linearish (i): coherent tokens have overlapping images" +
                                         (lr.cond_coherence ? "" : ": " + lr.witness));
        rep.check(lr.cond_pullback, "linearish (ii): level families witness every basis cover" +
                                        (lr.cond_pullback ? "" : ": " + lr.witness));
    }
    if (do_extend) {
        Trace f = extension_trace(as_linearish(r), r);
        bool valid = validate_trace(f).ok;
        rep.check(valid, "self-extension trace validates (" + std::to_string(f.pairs().size()) + " pairs)");
        bool commutes = true;
        if (!d.interval_mode) {
            for (std::size_t p = 0; p < d.point_count(); ++p) {
                DecodeResult res = delta_decode(r, apply_trace(f, canonical_name_finite(r, p)), depth);
                if (res.status != DecodeResult::Status::Point &&
                    res.status != DecodeResult::Status::Ambiguous) { commutes = false; break; }
                if (res.status == DecodeResult::Status::Point && res.point != p) { commutes = false; break; }
            }
        } else {
            RationalSampler sampler(g_seed, d.lo, d.hi);
            for (int k = 0; k < 25; ++k) {
                Rat q = sampler.next();
                DecodeResult res = delta_decode(r, apply_trace(f, canonical_name_interval(r, q)), depth);
                if (res.status != DecodeResult::Status::Interval || res.lo > q || q > res.hi) {
                    commutes = false;
                    break;
                }
            }
        }
        rep.check(commutes, "δ∘F = γ at sampled inputs");
    }
    if (refute_level > 0) {
        Cliq level = r.level_family(static_cast<unsigned>(refute_level));
        Cliq candidate = level;
        if (refute_drop >= 0) {
            if (static_cast<std::size_t>(refute_drop) >= candidate.size())
                throw data_error("--drop index out of range");
            candidate.erase(candidate.begin() + refute_drop);
        }
        RefutationVerdict verdict = unicover_shape_refutation(r, candidate, depth);
        switch (verdict.kind) {
            case RefutationVerdict::Kind::ConsistentLevelForm:
                rep.check(true, "candidate is consistent with level form: " + verdict.detail);
                break;
            case RefutationVerdict::Kind::Refuted:
                rep.note("refuted: " + verdict.detail);
                rep.note("witness a  = " + clique_label(r.space, verdict.witness_a));
                rep.note("witness a' = " + clique_label(r.space, verdict.witness_b));
                rep.check(true, "candidate refuted as a uni-cover of Dom(δ)");
                break;
            case RefutationVerdict::Kind::NotAnticlique:
                throw data_error("candidate is not an anti-clique: " + verdict.detail);
        }
    }
    return 0;
}

// ---------------------------------------------------------------- realize / realeval / profile

FunctionSpec spec_by_name(const std::string& name) {
    if (name == "id") return fn_identity();
    if (name == "neg") return fn_neg();
    if (name == "half") return fn_half();
    if (name == "abs") return fn_abs();
    if (name == "sqrt") return fn_sqrt();
    if (name == "sq") return fn_square();
    if (name == "add") return fn_add();
    if (name == "mul") return fn_mul();
    if (name.rfind("shift:", 0) == 0) return fn_shift(rat_parse(name.substr(6)));
    if (name.rfind("scale:", 0) == 0) return fn_scale(rat_parse(name.substr(6)));
    if (name.rfind("min:", 0) == 0) return fn_minc(rat_parse(name.substr(4)));
    if (name.rfind("max:", 0) == 0) return fn_maxc(rat_parse(name.substr(4)));
    if (name.rfind("clamp:", 0) == 0) {
        auto rest = name.substr(6);
        auto comma = rest.find(',');
        if (comma == std::string::npos) throw data_error("clamp:<lo>,<hi>");
        return fn_clamp(rat_parse(rest.substr(0, comma)), rat_parse(rest.substr(comma + 1)));
    }
    throw data_error("unknown function '" + name + "' (try: id neg half abs sqrt sq add mul "
                     "shift:<c> scale:<c> min:<c> max:<c> clamp:<lo>,<hi>)");
}

int run_realize(const std::string& fn, unsigned depth, const Rat& lo, const Rat& hi, bool validate,
                bool stable, const std::string& emit, Report& rep) {
    FunctionSpec f = spec_by_name(fn);
    if (f.arity == 2) {
        BinaryRealizer br = binary_linear_realizer(f, depth, lo, hi);
        rep.note("binary realizer of " + f.name + ": " + std::to_string(br.trace.pairs().size()) +
                 " pairs over (R⊗R) windowed to [" + rat_str(lo) + "," + rat_str(hi) + "]");
        if (validate) rep.check(validate_binary_dyadic_trace(br).ok, "trace validates");
        if (!emit.empty()) {
            std::ofstream out(emit);
            out << serialize_trace(br.trace);
            rep.note("trace written to " + emit);
        }
        return 0;
    }
    Trace t = stable ? stable_realizer(f, depth, lo, hi) : linear_realizer(f, depth, lo, hi);
    rep.note(std::string(stable ? "stable" : "linear") + " realizer of " + f.name + ": " +
             std::to_string(t.pairs().size()) + " pairs, window [" + rat_str(lo) + "," + rat_str(hi) +
             "], depth " + std::to_string(depth));
    if (validate) rep.check(validate_dyadic_trace(t).ok, "trace validates");
    if (!emit.empty()) {
        std::ofstream out(emit);
        out << serialize_trace(t);
        rep.note("trace written to " + emit);
    }
    return 0;
}

void check_window(const Expression& e, const Rat& lo, const Rat& hi) {
    switch (e.kind) {
        case Expression::Kind::Constant:
            if (e.constant < lo || e.constant > hi)
                throw data_error("constant " + rat_str(e.constant) + " lies outside the window [" +
                                 rat_str(lo) + "," + rat_str(hi) + "]");
            return;
        case Expression::Kind::OracleConstant: return;
        case Expression::Kind::Apply:
            for (const auto& a : e.args) check_window(a, lo, hi);
            return;
    }
}

int run_realeval(const std::string& expr_text, unsigned precision, bool profile, bool stable,
                 const std::optional<std::pair<Rat, Rat>>& window, Report& rep) {
    Expression e = parse_expression(expr_text);
    if (window) check_window(e, window->first, window->second);
    Rat v = eval_expression(e, precision, stable);
    rep.note(rat_str(v));
    rep.note("guarantee: |printed - value| <= 2^-" + std::to_string(precision));
    if (profile) {
        std::vector<std::string> lines;
        expression_profile(e, lines);
        for (const auto& l : lines) rep.note(l);
    }
    return 0;
}

int run_profile(const std::string& fn, const Rat& input, unsigned depth, const Rat& lo, const Rat& hi,
                bool stable, Report& rep) {
    FunctionSpec f = spec_by_name(fn);
    if (f.arity != 1) throw data_error("profile expects a unary function");
    Trace t = (stable || f.stable_only()) ? stable_realizer(f, depth, lo, hi)
                                          : linear_realizer(f, depth, lo, hi);
    auto vres = validate_dyadic_trace(t);
    if (!vres.ok) throw data_error("realizer trace invalid");
    auto a = approx_clique(RealOracle::constant(input), trace_max_source_level(t));
    Cliq in;
    for (const auto& d : a) in.push_back(dy_pack(d));
    QueryProfile prof = query_profile(t, normalized(in));
    rep.note("outputs: " + std::to_string(prof.outputs));
    for (auto [support, count] : prof.histogram)
        rep.note("support size " + std::to_string(support) + ": " + std::to_string(count) +
                 " output token(s)");
    rep.check(prof.max_sources <= (t.kind() == TraceKind::Linear ? 1u : 2u),
              "query complexity: " + std::to_string(prof.max_sources) + " source token(s) per output");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coherence spaces with totality: exact real evaluation and desk-scale verification"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "report format: text | json")
        ->check(CLI::IsMember({"text", "json"}));
    std::uint64_t seed = 12345;
    app.add_option("--seed", seed, "seed for randomized sweeps");
    std::uint64_t budget = (1u << 22);
    app.add_option("--budget", budget, "enumeration budget for lazy spaces");

    // check
    auto* c_check = app.add_subcommand("check", "parse a space file and verify its totality closure");
    std::string check_file;
    c_check->add_option("file", check_file, "space file")->required();

    // complete
    auto* c_complete = app.add_subcommand("complete", "internal completeness of tensor / bang totalities");
    std::vector<std::string> tensor_files;
    std::string bang_file;
    c_complete->add_option("--tensor", tensor_files, "two space files")->expected(2);
    c_complete->add_option("--bang", bang_file, "one space file");

    // unif
    auto* c_unif = app.add_subcommand("unif", "uniformity axioms, fine uniformity, Scott compatibility");
    std::string unif_file, unif_which = "all", unif_modulus, unif_target;
    c_unif->add_option("file", unif_file, "space file")->required();
    c_unif->add_option("--check", unif_which, "axioms | fine | scott | all")
        ->check(CLI::IsMember({"axioms", "fine", "scott", "all"}));
    c_unif->add_option("--modulus", unif_modulus, "trace file: verify strong uniform continuity");
    c_unif->add_option("--target", unif_target, "space file of the trace's target view");

    // reps
    auto* c_reps = app.add_subcommand("reps", "standard representations: linearish, extension, quotient");
    std::string reps_file;
    unsigned reps_depth = 0;
    bool reps_linearish = false, reps_extend = false;
    int refute_level = 0, refute_drop = -1;
    c_reps->add_option("file", reps_file, "descriptor file")->required();
    c_reps->add_option("--depth", reps_depth, "materialized depth (default: all covers)");
    c_reps->add_flag("--linearish", reps_linearish, "run the linearish checks");
    c_reps->add_flag("--extend", reps_extend, "build and check the self-extension trace");
    c_reps->add_option("--refute", refute_level, "uni-cover shape check on this level family");
    c_reps->add_option("--drop", refute_drop, "drop this block index from the candidate");

    // realize
    auto* c_realize = app.add_subcommand("realize", "compile a function into a trace over R");
    std::string rz_fn, rz_emit;
    unsigned rz_depth = 8;
    std::vector<std::string> rz_window = {"-2", "2"};
    bool rz_validate = false, rz_stable = false;
    c_realize->add_option("--fn", rz_fn, "function name")->required();
    c_realize->add_option("--depth", rz_depth, "output depth");
    c_realize->add_option("--window", rz_window, "window lo hi")->expected(2);
    c_realize->add_flag("--validate", rz_validate, "validate the emitted trace");
    c_realize->add_flag("--stable", rz_stable, "compile stably");
    c_realize->add_option("--emit", rz_emit, "write the trace to this file");

    // realeval
    auto* c_eval = app.add_subcommand("realeval", "evaluate an expression exactly");
    std::string expr;
    unsigned precision = 20;
    bool eval_profile = false, eval_stable = false;
    std::vector<std::string> eval_window;
    c_eval->add_option("expr", expr, "expression, e.g. \"add(1/3,1/6)\"")->required();
    c_eval->add_option("--precision", precision, "output precision 2^-N");
    c_eval->add_flag("--profile", eval_profile, "print per-node query counts");
    c_eval->add_flag("--stable", eval_stable, "allow non-uniform (stable-only) functions");
    c_eval->add_option("--window", eval_window, "window lo hi the expression's inputs must lie in")
        ->expected(2);

    // profile
    auto* c_prof = app.add_subcommand("profile", "query-complexity profile of a realizer");
    std::string pf_fn, pf_input = "1/3";
    unsigned pf_depth = 6;
    std::vector<std::string> pf_window = {"-2", "2"};
    bool pf_stable = false;
    c_prof->add_option("--fn", pf_fn, "function name")->required();
    c_prof->add_option("--input", pf_input, "input rational");
    c_prof->add_option("--depth", pf_depth, "output depth");
    c_prof->add_option("--window", pf_window, "window lo hi")->expected(2);
    c_prof->add_flag("--stable", pf_stable, "compile stably");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    g_budget = budget;
    g_seed = seed;

    Report rep;
    rep.as_json = (format == "json");
    try {
        if (c_check->parsed()) { rep.command = "check"; run_check(check_file, rep); }
        else if (c_complete->parsed()) {
            rep.command = "complete";
            if (tensor_files.empty() && bang_file.empty())
                throw data_error("complete needs --tensor or --bang");
            run_complete(tensor_files, bang_file, rep);
        } else if (c_unif->parsed()) {
            rep.command = "unif";
            run_unif(unif_file, unif_which, unif_modulus, unif_target, rep);
        }
        else if (c_reps->parsed()) {
            rep.command = "reps";
            run_reps(reps_file, reps_depth, reps_linearish, reps_extend, refute_level, refute_drop, rep);
        } else if (c_realize->parsed()) {
            rep.command = "realize";
            run_realize(rz_fn, rz_depth, rat_parse(rz_window[0]), rat_parse(rz_window[1]), rz_validate,
                        rz_stable, rz_emit, rep);
        } else if (c_eval->parsed()) {
            rep.command = "realeval";
            std::optional<std::pair<Rat, Rat>> win;
            if (!eval_window.empty()) win = {rat_parse(eval_window[0]), rat_parse(eval_window[1])};
            run_realeval(expr, precision, eval_profile, eval_stable, win, rep);
        } else if (c_prof->parsed()) {
            rep.command = "profile";
            run_profile(pf_fn, rat_parse(pf_input), pf_depth, rat_parse(pf_window[0]),
                        rat_parse(pf_window[1]), pf_stable, rep);
        }
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return rep.finish();
}
