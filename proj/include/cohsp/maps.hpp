#pragma once

// Linear and stable maps as traces: a trace is the set of minimal
// (input, output-token) pairs of a map. Linear inputs are single tokens,
// stable inputs finite cliques. A pair set is a valid trace exactly when it
// forms a clique of source⊸target (linear) or !source⊸target (stable).

#include <functional>
#include <mutex>
#include <optional>
#include <sstream>

#include "core.hpp"

namespace cohsp {

enum class TraceKind { Linear, Stable };

inline const char* trace_kind_name(TraceKind k) { return k == TraceKind::Linear ? "linear" : "stable"; }

struct TracePair {
    Cliq input;          // singleton for linear traces
    TokenIndex output;

    friend bool operator==(const TracePair& a, const TracePair& b) {
        return a.input == b.input && a.output == b.output;
    }
    friend bool operator<(const TracePair& a, const TracePair& b) {
        if (clique_less(a.input, b.input)) return true;
        if (clique_less(b.input, a.input)) return false;
        return a.output < b.output;
    }
};

struct TraceViolation {
    std::size_t first_pair = 0, second_pair = 0;
    std::string detail;
};

struct ValidationResult {
    bool ok = true;
    std::optional<TraceViolation> violation;
};

class Trace {
public:
    Trace(TraceKind kind, SpacePtr source, SpacePtr target, std::vector<TracePair> pairs)
        : kind_(kind), source_(std::move(source)), target_(std::move(target)), pairs_(std::move(pairs)) {
        for (auto& p : pairs_) {
            p.input = normalized(p.input);
            if (kind_ == TraceKind::Linear && p.input.size() != 1)
                throw domain_error("linear trace pair must have a single input token");
            for (TokenIndex t : p.input) check_token(source_, t);
            if (kind_ == TraceKind::Stable && !is_clique(source_, p.input))
                throw domain_error("stable trace input is not a clique of the source");
            check_token(target_, p.output);
        }
        std::sort(pairs_.begin(), pairs_.end());
        pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
    }

    Trace(const Trace& o)
        : kind_(o.kind_), source_(o.source_), target_(o.target_), pairs_(o.pairs_) {
        std::lock_guard<std::mutex> lk(o.mutex_);
        validation_ = o.validation_;
    }
    Trace& operator=(const Trace& o) {
        if (this != &o) {
            kind_ = o.kind_; source_ = o.source_; target_ = o.target_; pairs_ = o.pairs_;
            std::lock_guard<std::mutex> lk(o.mutex_);
            validation_ = o.validation_;
        }
        return *this;
    }

    TraceKind kind() const { return kind_; }
    const SpacePtr& source() const { return source_; }
    const SpacePtr& target() const { return target_; }
    const std::vector<TracePair>& pairs() const { return pairs_; }

    friend bool operator==(const Trace& a, const Trace& b) {
        return a.kind_ == b.kind_ && same_space(a.source_, b.source_) &&
               same_space(a.target_, b.target_) && a.pairs_ == b.pairs_;
    }

    const ValidationResult& validation() const {
        std::lock_guard<std::mutex> lk(mutex_);
        if (!validation_) validation_ = compute_validation();
        return *validation_;
    }

    // Lets a structure-aware validator (e.g. the dyadic interval sweep)
    // deposit its verdict so later applications skip the quadratic scan.
    void prime_validation(const ValidationResult& r) const {
        std::lock_guard<std::mutex> lk(mutex_);
        if (!validation_) validation_ = r;
    }

private:
    ValidationResult compute_validation() const {
        ValidationResult r;
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            for (std::size_t j = i + 1; j < pairs_.size(); ++j) {
                const auto& p = pairs_[i];
                const auto& q = pairs_[j];
                bool inputs_coherent;
                if (kind_ == TraceKind::Linear) {
                    inputs_coherent = source_->coherent(p.input[0], q.input[0]);
                } else {
                    inputs_coherent = is_clique(source_, cliq_union(p.input, q.input));
                }
                if (inputs_coherent && !target_->strictly_coherent(p.output, q.output)) {
                    r.ok = false;
                    std::ostringstream os;
                    os << "pairs " << i << " and " << j << ": inputs " << clique_label(source_, p.input)
                       << ", " << clique_label(source_, q.input) << " are coherent but outputs "
                       << target_->token_label(p.output) << ", " << target_->token_label(q.output)
                       << " are not strictly coherent";
                    r.violation = TraceViolation{i, j, os.str()};
                    return r;
                }
            }
        }
        return r;
    }

    TraceKind kind_;
    SpacePtr source_, target_;
    std::vector<TracePair> pairs_;
    mutable std::mutex mutex_;
    mutable std::optional<ValidationResult> validation_;
};

inline ValidationResult validate_trace(const Trace& t) { return t.validation(); }

inline void require_valid(const Trace& t) {
    const auto& v = t.validation();
    if (!v.ok) throw domain_error("invalid trace: " + v.violation->detail);
}

// κ̂(a) for linear traces; for stable traces the finite-support application.
// The result is guaranteed (and asserted) to be a clique of the target.
inline Cliq apply_trace(const Trace& t, const Cliq& input) {
    require_valid(t);
    if (!is_clique(t.source(), input)) throw domain_error("apply_trace input is not a clique");
    Cliq out;
    for (const auto& p : t.pairs()) {
        if (is_subset(p.input, input)) out.push_back(p.output);
    }
    out = normalized(out);
    if (!is_clique(t.target(), out)) throw error("internal: trace application produced a non-clique");
    return out;
}

// Relational composition for linear traces; co-Kleisli composition with
// re-minimization for stable ones.
inline Trace compose(const Trace& f, const Trace& g) {
    if (f.kind() != g.kind()) throw domain_error("compose: trace kinds differ");
    if (!same_space(f.target(), g.source())) throw domain_error("compose: middle spaces differ");
    std::vector<TracePair> out;
    if (f.kind() == TraceKind::Linear) {
        for (const auto& p : f.pairs())
            for (const auto& q : g.pairs())
                if (p.output == q.input[0]) out.push_back({p.input, q.output});
    } else {
        for (const auto& q : g.pairs()) {
            // choose, for every token of q's support, a matching pair of f
            std::vector<std::vector<const TracePair*>> options;
            for (TokenIndex y : q.input) {
                options.emplace_back();
                for (const auto& p : f.pairs())
                    if (p.output == y) options.back().push_back(&p);
            }
            Cliq acc;
            std::function<void(std::size_t, Cliq)> rec = [&](std::size_t k, Cliq cur) {
                if (k == options.size()) {
                    out.push_back({cur, q.output});
                    return;
                }
                for (const TracePair* p : options[k]) {
                    Cliq next = cliq_union(cur, p->input);
                    if (is_clique(f.source(), next)) rec(k + 1, std::move(next));
                }
            };
            rec(0, {});
        }
        // keep only minimal supports per output
        std::vector<TracePair> minimal;
        for (std::size_t i = 0; i < out.size(); ++i) {
            bool is_min = true;
            for (std::size_t j = 0; j < out.size(); ++j) {
                if (i == j || out[j].output != out[i].output) continue;
                if (out[j].input != out[i].input && is_subset(out[j].input, out[i].input)) { is_min = false; break; }
            }
            if (is_min) minimal.push_back(out[i]);
        }
        out = std::move(minimal);
    }
    Trace r(f.kind(), f.source(), g.target(), std::move(out));
    require_valid(r);
    return r;
}

// The transpose F⊥ : Y⊥ ⊸ X⊥ of a linear trace; an involution.
inline Trace transpose(const Trace& f) {
    if (f.kind() != TraceKind::Stable) {
        std::vector<TracePair> out;
        for (const auto& p : f.pairs()) out.push_back({{p.output}, p.input[0]});
        Trace r(TraceKind::Linear, normalize_space(CoherenceSpace::dual(f.target())),
                normalize_space(CoherenceSpace::dual(f.source())), std::move(out));
        require_valid(r);
        return r;
    }
    throw unsupported_error("transpose of a stable trace");
}

// identity trace on a finite space
inline Trace identity_trace(const SpacePtr& x) {
    std::vector<TracePair> out;
    for (std::uint64_t i = 0; i < x->token_count(); ++i) {
        TokenIndex t = x->at_position(i);
        out.push_back({{t}, t});
    }
    return Trace(TraceKind::Linear, x, x, std::move(out));
}

// Stable X→Y and linear !X⊸Y carry the same pair set; these retype it.
inline Trace stable_to_linear(const Trace& f, std::uint64_t bang_cap = (1u << 20)) {
    if (f.kind() != TraceKind::Stable) throw domain_error("stable_to_linear expects a stable trace");
    SpacePtr bx = CoherenceSpace::bang(f.source(), bang_cap);
    std::vector<TracePair> out;
    for (const auto& p : f.pairs()) out.push_back({{bx->bang_index_of(p.input)}, p.output});
    return Trace(TraceKind::Linear, bx, f.target(), std::move(out));
}

inline Trace linear_to_stable(const Trace& f) {
    if (f.kind() != TraceKind::Linear || f.source()->kind() != SpaceKind::Bang)
        throw domain_error("linear_to_stable expects a linear trace out of a bang space");
    std::vector<TracePair> out;
    for (const auto& p : f.pairs()) out.push_back({f.source()->bang_token_clique(p.input[0]), p.output});
    return Trace(TraceKind::Stable, f.source()->operand(), f.target(), std::move(out));
}

// (ε_coh)_X : !X ⊸ X with pairs {({x},x) : x∈X}.
inline Trace dereliction(const SpacePtr& x, std::uint64_t bang_cap = (1u << 20)) {
    if (!x->finite()) throw unsupported_error("dereliction of a non-finite space");
    SpacePtr bx = CoherenceSpace::bang(x, bang_cap);
    std::vector<TracePair> out;
    for (std::uint64_t i = 0; i < x->token_count(); ++i) {
        TokenIndex t = x->at_position(i);
        out.push_back({{bx->bang_index_of(Cliq{t})}, t});
    }
    return Trace(TraceKind::Linear, bx, x, std::move(out));
}

inline Trace bang_adjunction(const std::string& direction, const Trace* t, const SpacePtr& space = nullptr) {
    if (direction == "stable_to_linear") { if (!t) throw domain_error("trace required"); return stable_to_linear(*t); }
    if (direction == "linear_to_stable") { if (!t) throw domain_error("trace required"); return linear_to_stable(*t); }
    if (direction == "dereliction") { if (!space) throw domain_error("space required"); return dereliction(space); }
    throw domain_error("unknown adjunction direction '" + direction + "'");
}

// Extracts the trace of a clique-to-clique oracle on finite spaces by
// minimal-pair search, verifying monotonicity, uniqueness of minimal
// supports, singleton supports for linear extraction, and that reapplying
// the trace reproduces the oracle on every enumerated clique.
inline Trace trace_of_function(const SpacePtr& x, const SpacePtr& y,
                               const std::function<Cliq(const Cliq&)>& f, TraceKind kind,
                               std::optional<std::size_t> max_support = std::nullopt,
                               std::uint64_t clique_cap = (1u << 22)) {
    if (!x->finite() || !y->finite()) throw precondition_error("trace_of_function requires finite spaces");
    std::size_t cap = max_support.value_or(static_cast<std::size_t>(x->token_count()));
    auto cliques = enumerate_cliques(x, cap, std::nullopt, clique_cap);
    std::map<Cliq, Cliq> value;
    for (const auto& a : cliques) {
        Cliq v = normalized(f(a));
        if (!is_clique(y, v))
            throw domain_error("oracle image of " + clique_label(x, a) + " is not a clique of the target");
        value[a] = v;
    }
    // monotonicity on covered pairs
    for (const auto& a : cliques) {
        if (a.empty()) continue;
        for (std::size_t k = 0; k < a.size(); ++k) {
            Cliq sub = a;
            sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(k));
            if (!is_subset(value[sub], value[a]))
                throw domain_error("oracle is not monotone at " + clique_label(x, a));
        }
    }
    std::vector<TracePair> out;
    for (const auto& a : cliques) {
        for (TokenIndex out_tok : value[a]) {
            bool minimal = true;
            for (std::size_t k = 0; k < a.size() && minimal; ++k) {
                Cliq sub = a;
                sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(k));
                if (contains_token(value[sub], out_tok)) minimal = false;
            }
            if (minimal) out.push_back({a, out_tok});
        }
    }
    // uniqueness of the minimal support inside every enumerated clique
    for (const auto& a : cliques) {
        std::map<TokenIndex, std::size_t> counts;
        for (const auto& p : out)
            if (is_subset(p.input, a)) ++counts[p.output];
        for (auto [tok, n] : counts) {
            if (n > 1)
                throw domain_error("minimal support of output " + y->token_label(tok) +
                                   " is not unique inside " + clique_label(x, a) + "; oracle is not stable");
        }
    }
    if (kind == TraceKind::Linear) {
        for (const auto& p : out) {
            if (p.input.size() != 1)
                throw domain_error("linear extraction failed: output " + y->token_label(p.output) +
                                   " has minimal support " + clique_label(x, p.input) +
                                   " of size " + std::to_string(p.input.size()));
        }
        std::vector<TracePair> lin;
        for (const auto& p : out) lin.push_back({p.input, p.output});
        Trace t(TraceKind::Linear, x, y, std::move(lin));
        require_valid(t);
        for (const auto& a : cliques) {
            if (apply_trace(t, a) != value[a])
                throw domain_error("extracted linear trace does not reproduce the oracle at " + clique_label(x, a));
        }
        return t;
    }
    Trace t(TraceKind::Stable, x, y, std::move(out));
    require_valid(t);
    for (const auto& a : cliques) {
        if (apply_trace(t, a) != value[a])
            throw domain_error("extracted trace does not reproduce the oracle at " + clique_label(x, a) +
                               " (support may exceed the size cap)");
    }
    return t;
}

}  // namespace cohsp
