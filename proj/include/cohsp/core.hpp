#pragma once

// Coherence spaces and cliques. A space is a countable token universe with a
// reflexive symmetric coherence relation; connectives build compound spaces
// out of simpler ones. Everything is immutable after construction.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace cohsp {

// Token identity within its space. Finite spaces use dense indices 0..n-1 in
// canonical (declaration/enumeration) order; lazy spaces may use sparse
// encodings, ordered by value.
using TokenIndex = unsigned __int128;

inline std::string token_index_str(TokenIndex t) {
    if (t == 0) return "0";
    std::string s;
    while (t > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(t % 10)));
        t /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

// A finite clique (or anti-clique, when the owning space is a dual) is kept
// as a strictly increasing vector of token indices.
using Cliq = std::vector<TokenIndex>;

inline Cliq normalized(Cliq c) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

// Canonical order on cliques: by size, then lexicographic.
inline bool clique_less(const Cliq& a, const Cliq& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

inline bool contains_token(const Cliq& c, TokenIndex t) {
    return std::binary_search(c.begin(), c.end(), t);
}

inline bool is_subset(const Cliq& a, const Cliq& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline Cliq cliq_union(const Cliq& a, const Cliq& b) {
    Cliq r;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

inline Cliq cliq_intersect(const Cliq& a, const Cliq& b) {
    Cliq r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

inline std::size_t intersection_size(const Cliq& a, const Cliq& b) {
    std::size_t n = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else { ++n; ++i; ++j; }
    }
    return n;
}

enum class SpaceKind { AtomicFinite, AtomicLazy, Dual, Tensor, Lollipop, Bang, One };

class CoherenceSpace;
using SpacePtr = std::shared_ptr<const CoherenceSpace>;

// Callbacks defining a lazy (countably infinite) atomic space.
struct LazyAtomOps {
    std::function<bool(TokenIndex, TokenIndex)> strict_coherent;
    std::function<bool(TokenIndex)> valid;
    std::function<TokenIndex(std::uint64_t)> at_position;    // enumeration order
    std::function<std::uint64_t(TokenIndex)> position_of;
    std::function<std::string(TokenIndex)> label;
    std::function<std::optional<TokenIndex>(const std::string&)> parse;
};

class CoherenceSpace : public std::enable_shared_from_this<CoherenceSpace> {
public:
    static SpacePtr atomic_finite(std::string name, std::vector<std::string> token_names,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& strict_pairs) {
        auto s = std::shared_ptr<CoherenceSpace>(new CoherenceSpace(SpaceKind::AtomicFinite));
        s->name_ = std::move(name);
        s->token_names_ = std::move(token_names);
        const std::size_t n = s->token_names_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (!s->by_name_.emplace(s->token_names_[i], i).second)
                throw parse_error("duplicate token name '" + s->token_names_[i] + "'");
        }
        s->strict_.assign(n, std::vector<bool>(n, false));
        for (auto [i, j] : strict_pairs) {
            if (i >= n || j >= n) throw domain_error("strict pair references undeclared token");
            if (i == j) continue;  // reflexivity is implicit, not strict
            s->strict_[i][j] = s->strict_[j][i] = true;
        }
        return s;
    }

    // The one-token space; 1 and ⊥ coincide, so this serves as both.
    static SpacePtr one() {
        auto s = std::shared_ptr<CoherenceSpace>(new CoherenceSpace(SpaceKind::One));
        s->name_ = "1";
        return s;
    }

    static SpacePtr dual(SpacePtr op) {
        auto s = std::shared_ptr<CoherenceSpace>(new CoherenceSpace(SpaceKind::Dual));
        s->left_ = std::move(op);
        return s;
    }

    static SpacePtr tensor(SpacePtr a, SpacePtr b) { return make_pair_space(SpaceKind::Tensor, std::move(a), std::move(b)); }

    static SpacePtr lollipop(SpacePtr a, SpacePtr b) { return make_pair_space(SpaceKind::Lollipop, std::move(a), std::move(b)); }

    // Tokens of !X are the finite cliques of X. For a finite operand they are
    // tabulated up front in canonical (size, lexicographic) order; for a lazy
    // operand they are enumerated on demand by increasing max position, then
    // size, then lexicographic order.
    static SpacePtr bang(SpacePtr op, std::uint64_t materialize_cap = (1u << 20)) {
        auto s = std::shared_ptr<CoherenceSpace>(new CoherenceSpace(SpaceKind::Bang));
        s->left_ = std::move(op);
        s->bang_cap_ = materialize_cap;
        if (s->left_->finite()) {
            s->bang_tokens_ = all_cliques_of(*s->left_, materialize_cap);
            std::sort(s->bang_tokens_.begin(), s->bang_tokens_.end(), clique_less);
            for (std::size_t i = 0; i < s->bang_tokens_.size(); ++i)
                s->bang_index_.emplace(s->bang_tokens_[i], i);
        } else {
            s->bang_tokens_.push_back({});  // the empty clique first
            s->bang_index_.emplace(Cliq{}, 0);
        }
        return s;
    }

    static SpacePtr atomic_lazy(std::string name, LazyAtomOps ops) {
        auto s = std::shared_ptr<CoherenceSpace>(new CoherenceSpace(SpaceKind::AtomicLazy));
        s->name_ = std::move(name);
        s->lazy_ = std::move(ops);
        return s;
    }

    SpaceKind kind() const { return kind_; }
    const SpacePtr& operand() const { return left_; }
    const SpacePtr& operand2() const { return right_; }

    bool finite() const {
        switch (kind_) {
            case SpaceKind::AtomicFinite: case SpaceKind::One: return true;
            case SpaceKind::AtomicLazy: return false;
            case SpaceKind::Dual: return left_->finite();
            case SpaceKind::Tensor: case SpaceKind::Lollipop: return left_->finite() && right_->finite();
            case SpaceKind::Bang: return left_->finite();
        }
        return false;
    }

    std::uint64_t token_count() const {
        switch (kind_) {
            case SpaceKind::AtomicFinite: return token_names_.size();
            case SpaceKind::One: return 1;
            case SpaceKind::Dual: return left_->token_count();
            case SpaceKind::Tensor: case SpaceKind::Lollipop:
                if (!finite()) break;
                return left_->token_count() * right_->token_count();
            case SpaceKind::Bang:
                if (!finite()) break;
                return bang_tokens_.size();
            case SpaceKind::AtomicLazy: break;
        }
        throw unsupported_error("token_count on a non-finite space");
    }

    bool valid_token(TokenIndex t) const {
        switch (kind_) {
            case SpaceKind::AtomicFinite: return t < token_names_.size();
            case SpaceKind::One: return t == 0;
            case SpaceKind::AtomicLazy: return lazy_.valid(t);
            case SpaceKind::Dual: return left_->valid_token(t);
            case SpaceKind::Tensor: case SpaceKind::Lollipop: {
                auto [a, b] = pair_of(t);
                return left_->valid_token(a) && right_->valid_token(b);
            }
            case SpaceKind::Bang: {
                if (finite()) return t < bang_tokens_.size();
                std::lock_guard<std::mutex> lk(bang_mutex_);
                return t < bang_tokens_.size() || grow_bang_to(static_cast<std::uint64_t>(t) + 1);
            }
        }
        return false;
    }

    // Reflexive symmetric coherence on tokens.
    bool coherent(TokenIndex x, TokenIndex y) const {
        if (x == y) return true;
        return strictly_coherent(x, y);
    }

    bool strictly_coherent(TokenIndex x, TokenIndex y) const {
        if (x == y) return false;
        switch (kind_) {
            case SpaceKind::AtomicFinite:
                return strict_[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
            case SpaceKind::One: return false;
            case SpaceKind::AtomicLazy: return lazy_.strict_coherent(x, y);
            case SpaceKind::Dual: return !left_->coherent(x, y);
            case SpaceKind::Tensor: {
                auto [a1, b1] = pair_of(x);
                auto [a2, b2] = pair_of(y);
                return left_->coherent(a1, a2) && right_->coherent(b1, b2);
            }
            case SpaceKind::Lollipop: {
                auto [a1, b1] = pair_of(x);
                auto [a2, b2] = pair_of(y);
                return !left_->coherent(a1, a2) || right_->strictly_coherent(b1, b2);
            }
            case SpaceKind::Bang: {
                Cliq u = cliq_union(bang_token_clique(x), bang_token_clique(y));
                for (std::size_t i = 0; i < u.size(); ++i)
                    for (std::size_t j = i + 1; j < u.size(); ++j)
                        if (!left_->coherent(u[i], u[j])) return false;
                return true;
            }
        }
        return false;
    }

    // --- pair structure (tensor / lollipop) -------------------------------
    std::pair<TokenIndex, TokenIndex> pair_of(TokenIndex t) const {
        require_pair_kind();
        if (dense_pairs()) {
            std::uint64_t cols = right_->token_count();
            return {t / cols, t % cols};
        }
        return {t >> 64, t & (((TokenIndex)1 << 64) - 1)};
    }

    TokenIndex pair_index(TokenIndex a, TokenIndex b) const {
        require_pair_kind();
        if (dense_pairs()) return a * right_->token_count() + b;
        if ((a >> 64) != 0 || (b >> 64) != 0)
            throw resource_error("tensor/lollipop token component exceeds packing range");
        return (a << 64) | b;
    }

    // --- bang structure ----------------------------------------------------
    const Cliq& bang_token_clique(TokenIndex t) const {
        if (kind_ != SpaceKind::Bang) throw domain_error("not a bang space");
        if (!finite()) {
            std::lock_guard<std::mutex> lk(bang_mutex_);
            if (!grow_bang_to(static_cast<std::uint64_t>(t) + 1))
                throw resource_error("bang token enumeration budget exceeded");
            return bang_tokens_[static_cast<std::size_t>(t)];
        }
        if (t >= bang_tokens_.size()) throw domain_error("foreign bang token");
        return bang_tokens_[static_cast<std::size_t>(t)];
    }

    TokenIndex bang_index_of(const Cliq& clique) const {
        if (kind_ != SpaceKind::Bang) throw domain_error("not a bang space");
        if (finite()) {
            auto it = bang_index_.find(clique);
            if (it == bang_index_.end()) throw domain_error("set is not a clique of the bang operand");
            return it->second;
        }
        std::lock_guard<std::mutex> lk(bang_mutex_);
        for (;;) {
            auto it = bang_index_.find(clique);
            if (it != bang_index_.end()) return it->second;
            if (!grow_bang_to(bang_tokens_.size() + 64))
                throw resource_error("bang token enumeration budget exceeded");
        }
    }

    // --- enumeration --------------------------------------------------------
    TokenIndex at_position(std::uint64_t pos) const {
        switch (kind_) {
            case SpaceKind::AtomicFinite: case SpaceKind::One:
                if (pos >= token_count()) throw domain_error("position out of range");
                return pos;
            case SpaceKind::AtomicLazy: return lazy_.at_position(pos);
            case SpaceKind::Dual: return left_->at_position(pos);
            case SpaceKind::Tensor: case SpaceKind::Lollipop: {
                if (dense_pairs()) {
                    if (pos >= token_count()) throw domain_error("position out of range");
                    return pos;
                }
                auto [pa, pb] = cantor_unpair(pos);
                return pair_index(left_->at_position(pa), right_->at_position(pb));
            }
            case SpaceKind::Bang: {
                if (finite()) {
                    if (pos >= bang_tokens_.size()) throw domain_error("position out of range");
                    return pos;
                }
                std::lock_guard<std::mutex> lk(bang_mutex_);
                if (!grow_bang_to(pos + 1)) throw resource_error("bang token enumeration budget exceeded");
                return pos;
            }
        }
        throw domain_error("bad space");
    }

    std::uint64_t position_of(TokenIndex t) const {
        switch (kind_) {
            case SpaceKind::AtomicFinite: case SpaceKind::One:
                return static_cast<std::uint64_t>(t);
            case SpaceKind::AtomicLazy: return lazy_.position_of(t);
            case SpaceKind::Dual: return left_->position_of(t);
            case SpaceKind::Tensor: case SpaceKind::Lollipop: {
                if (dense_pairs()) return static_cast<std::uint64_t>(t);
                auto [a, b] = pair_of(t);
                return cantor_pair(left_->position_of(a), right_->position_of(b));
            }
            case SpaceKind::Bang: return static_cast<std::uint64_t>(t);
        }
        throw domain_error("bad space");
    }

    // --- names --------------------------------------------------------------
    std::string token_label(TokenIndex t) const {
        switch (kind_) {
            case SpaceKind::AtomicFinite: {
                if (t >= token_names_.size()) throw domain_error("foreign token");
                return token_names_[static_cast<std::size_t>(t)];
            }
            case SpaceKind::One: return "*";
            case SpaceKind::AtomicLazy: return lazy_.label(t);
            case SpaceKind::Dual: return left_->token_label(t);
            case SpaceKind::Tensor: case SpaceKind::Lollipop: {
                auto [a, b] = pair_of(t);
                return "(" + left_->token_label(a) + "," + right_->token_label(b) + ")";
            }
            case SpaceKind::Bang: {
                const Cliq& c = bang_token_clique(t);
                std::string s = "{";
                for (std::size_t i = 0; i < c.size(); ++i) {
                    if (i) s += " ";
                    s += left_->token_label(c[i]);
                }
                return s + "}";
            }
        }
        throw domain_error("bad space");
    }

    std::optional<TokenIndex> token_by_name(const std::string& text) const {
        switch (kind_) {
            case SpaceKind::AtomicFinite: {
                auto it = by_name_.find(text);
                if (it == by_name_.end()) return std::nullopt;
                return TokenIndex(it->second);
            }
            case SpaceKind::One:
                if (text == "*" || text == "unit") return TokenIndex(0);
                return std::nullopt;
            case SpaceKind::AtomicLazy: return lazy_.parse ? lazy_.parse(text) : std::nullopt;
            case SpaceKind::Dual: return left_->token_by_name(text);
            case SpaceKind::Tensor: case SpaceKind::Lollipop: {
                if (text.size() < 2 || text.front() != '(' || text.back() != ')') return std::nullopt;
                std::string inner = text.substr(1, text.size() - 2);
                int depth = 0;
                std::size_t comma = std::string::npos;
                for (std::size_t i = 0; i < inner.size(); ++i) {
                    char c = inner[i];
                    if (c == '(' || c == '{') ++depth;
                    else if (c == ')' || c == '}') --depth;
                    else if (c == ',' && depth == 0) { comma = i; break; }
                }
                if (comma == std::string::npos) return std::nullopt;
                auto a = left_->token_by_name(inner.substr(0, comma));
                auto b = right_->token_by_name(inner.substr(comma + 1));
                if (!a || !b) return std::nullopt;
                return pair_index(*a, *b);
            }
            case SpaceKind::Bang: {
                if (text.size() < 2 || text.front() != '{' || text.back() != '}') return std::nullopt;
                std::string inner = text.substr(1, text.size() - 2);
                Cliq c;
                std::size_t i = 0;
                while (i < inner.size()) {
                    while (i < inner.size() && inner[i] == ' ') ++i;
                    if (i >= inner.size()) break;
                    int depth = 0;
                    std::size_t j = i;
                    for (; j < inner.size(); ++j) {
                        char ch = inner[j];
                        if (ch == '(' || ch == '{') ++depth;
                        else if (ch == ')' || ch == '}') --depth;
                        else if (ch == ' ' && depth == 0) break;
                    }
                    auto tok = left_->token_by_name(inner.substr(i, j - i));
                    if (!tok) return std::nullopt;
                    c.push_back(*tok);
                    i = j;
                }
                c = normalized(c);
                try { return bang_index_of(c); } catch (const error&) { return std::nullopt; }
            }
        }
        return std::nullopt;
    }

    const std::string& name() const { return name_; }

private:
    explicit CoherenceSpace(SpaceKind k) : kind_(k) {}

    static SpacePtr make_pair_space(SpaceKind k, SpacePtr a, SpacePtr b) {
        auto s = std::shared_ptr<CoherenceSpace>(new CoherenceSpace(k));
        s->left_ = std::move(a);
        s->right_ = std::move(b);
        return s;
    }

    void require_pair_kind() const {
        if (kind_ != SpaceKind::Tensor && kind_ != SpaceKind::Lollipop)
            throw domain_error("not a tensor/lollipop space");
    }

    bool dense_pairs() const { return left_->finite() && right_->finite(); }

    static std::uint64_t cantor_pair(std::uint64_t a, std::uint64_t b) {
        unsigned __int128 s = (unsigned __int128)a + b;
        unsigned __int128 v = s * (s + 1) / 2 + b;
        if (v >= ((unsigned __int128)1 << 63)) throw resource_error("enumeration position overflow");
        return static_cast<std::uint64_t>(v);
    }

    static std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t z) {
        std::uint64_t s = 0;
        while ((s + 1) * (s + 2) / 2 <= z) ++s;  // positions stay small at desk scale
        std::uint64_t b = z - s * (s + 1) / 2;
        return {s - b, b};
    }

    // Enumerates every clique of a finite space (backtracking in index order),
    // capped so 2^n blowups surface as resource errors rather than hangs.
    static std::vector<Cliq> all_cliques_of(const CoherenceSpace& sp, std::uint64_t cap) {
        std::vector<Cliq> out;
        const std::uint64_t n = sp.token_count();
        Cliq cur;
        std::function<void(std::uint64_t)> rec = [&](std::uint64_t start) {
            if (out.size() >= cap) throw resource_error("clique enumeration cap exceeded");
            out.push_back(cur);
            for (std::uint64_t t = start; t < n; ++t) {
                bool ok = true;
                for (TokenIndex u : cur)
                    if (!sp.coherent(u, t)) { ok = false; break; }
                if (!ok) continue;
                cur.push_back(t);
                rec(t + 1);
                cur.pop_back();
            }
        };
        rec(0);
        return out;
    }

    // Lazy bang growth: append blocks of cliques whose max element is the
    // next operand position, ordered by size then lexicographic.
    bool grow_bang_to(std::uint64_t want) const {
        while (bang_tokens_.size() < want) {
            if (bang_tokens_.size() >= bang_cap_) return false;
            std::uint64_t m = bang_pos_done_;
            TokenIndex newest = left_->at_position(m);
            std::vector<TokenIndex> prior;
            for (std::uint64_t p = 0; p < m; ++p) {
                TokenIndex t = left_->at_position(p);
                if (left_->coherent(t, newest)) prior.push_back(t);
            }
            std::vector<Cliq> block;
            Cliq cur{newest};
            std::function<void(std::size_t)> rec = [&](std::size_t start) {
                block.push_back(normalized(cur));
                for (std::size_t i = start; i < prior.size(); ++i) {
                    bool ok = true;
                    for (TokenIndex u : cur)
                        if (u != newest && !left_->coherent(u, prior[i])) { ok = false; break; }
                    if (!ok) continue;
                    cur.push_back(prior[i]);
                    rec(i + 1);
                    cur.pop_back();
                }
            };
            rec(0);
            std::sort(block.begin(), block.end(), clique_less);
            for (auto& c : block) {
                if (bang_tokens_.size() >= bang_cap_) return false;
                bang_index_.emplace(c, bang_tokens_.size());
                bang_tokens_.push_back(std::move(c));
            }
            ++bang_pos_done_;
        }
        return true;
    }

    SpaceKind kind_;
    std::string name_;
    std::vector<std::string> token_names_;
    std::vector<std::vector<bool>> strict_;
    std::map<std::string, std::size_t> by_name_;
    LazyAtomOps lazy_;
    SpacePtr left_, right_;
    mutable std::vector<Cliq> bang_tokens_;
    mutable std::map<Cliq, TokenIndex> bang_index_;
    mutable std::uint64_t bang_pos_done_ = 0;
    std::uint64_t bang_cap_ = 0;
    mutable std::mutex bang_mutex_;
};

// Strips even stacks of duals so e.g. dual(dual(X)) compares equal to X.
inline SpacePtr normalize_space(SpacePtr s) {
    while (s->kind() == SpaceKind::Dual && s->operand()->kind() == SpaceKind::Dual)
        s = s->operand()->operand();
    return s;
}

inline bool same_space(const SpacePtr& lhs, const SpacePtr& rhs) {
    SpacePtr a = normalize_space(lhs), b = normalize_space(rhs);
    if (a.get() == b.get()) return true;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case SpaceKind::One: return true;
        case SpaceKind::AtomicFinite: {
            if (a->name() != b->name() || a->token_count() != b->token_count()) return false;
            for (TokenIndex x = 0; x < a->token_count(); ++x)
                for (TokenIndex y = 0; y < a->token_count(); ++y)
                    if (a->coherent(x, y) != b->coherent(x, y)) return false;
            return true;
        }
        case SpaceKind::AtomicLazy: return a->name() == b->name();
        case SpaceKind::Dual: return same_space(a->operand(), b->operand());
        case SpaceKind::Tensor: case SpaceKind::Lollipop:
            return same_space(a->operand(), b->operand()) && same_space(a->operand2(), b->operand2());
        case SpaceKind::Bang: return same_space(a->operand(), b->operand());
    }
    return false;
}

inline void check_token(const SpacePtr& s, TokenIndex t) {
    if (!s->valid_token(t)) throw domain_error("token does not belong to the space");
}

// true iff x and y are coherent; foreign tokens are a domain error.
inline bool coherent(const SpacePtr& s, TokenIndex x, TokenIndex y) {
    check_token(s, x);
    check_token(s, y);
    return s->coherent(x, y);
}

// true iff the tokens are pairwise coherent; the empty set is a clique.
inline bool is_clique(const SpacePtr& s, const Cliq& tokens) {
    for (TokenIndex t : tokens) check_token(s, t);
    for (std::size_t i = 0; i < tokens.size(); ++i)
        for (std::size_t j = i + 1; j < tokens.size(); ++j)
            if (!s->coherent(tokens[i], tokens[j])) return false;
    return true;
}

inline bool is_anticlique(const SpacePtr& s, const Cliq& tokens) {
    for (TokenIndex t : tokens) check_token(s, t);
    for (std::size_t i = 0; i < tokens.size(); ++i)
        for (std::size_t j = i + 1; j < tokens.size(); ++j)
            if (s->strictly_coherent(tokens[i], tokens[j])) return false;
    return true;
}

// Generic space construction by connective name, with arity checks.
inline SpacePtr build_space(const std::string& connective, const std::vector<SpacePtr>& operands) {
    auto need = [&](std::size_t n) {
        if (operands.size() != n)
            throw domain_error("connective '" + connective + "' takes " + std::to_string(n) + " operand(s)");
    };
    if (connective == "dual") { need(1); return CoherenceSpace::dual(operands[0]); }
    if (connective == "tensor") { need(2); return CoherenceSpace::tensor(operands[0], operands[1]); }
    if (connective == "lollipop") { need(2); return CoherenceSpace::lollipop(operands[0], operands[1]); }
    if (connective == "bang") { need(1); return CoherenceSpace::bang(operands[0]); }
    if (connective == "one" || connective == "bottom") { need(0); return CoherenceSpace::one(); }
    throw domain_error("unknown connective '" + connective + "'");
}

// All cliques of size <= max_size, each exactly once, in canonical
// (size, lexicographic) order. Lazy spaces require a token budget: only the
// first `token_budget` tokens of the enumeration are considered.
inline std::vector<Cliq> enumerate_cliques(const SpacePtr& s, std::size_t max_size,
                                           std::optional<std::uint64_t> token_budget = std::nullopt,
                                           std::uint64_t result_cap = (1u << 22)) {
    std::vector<TokenIndex> universe;
    if (s->finite()) {
        for (std::uint64_t i = 0; i < s->token_count(); ++i) universe.push_back(s->at_position(i));
    } else {
        if (!token_budget) throw precondition_error("lazy space requires a token budget");
        for (std::uint64_t i = 0; i < *token_budget; ++i) universe.push_back(s->at_position(i));
    }
    std::sort(universe.begin(), universe.end());
    std::vector<Cliq> out;
    Cliq cur;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t want) {
        if (cur.size() == want) {
            if (out.size() >= result_cap) throw resource_error("clique enumeration budget exceeded");
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < universe.size(); ++i) {
            bool ok = true;
            for (TokenIndex u : cur)
                if (!s->coherent(u, universe[i])) { ok = false; break; }
            if (!ok) continue;
            cur.push_back(universe[i]);
            rec(i + 1, want);
            cur.pop_back();
        }
    };
    for (std::size_t size = 0; size <= max_size && size <= universe.size(); ++size) rec(0, size);
    return out;
}

// Every clique of a finite space; the exhaustive-mode workhorse.
inline std::vector<Cliq> all_cliques(const SpacePtr& s, std::uint64_t cap = (1u << 22)) {
    if (!s->finite()) throw unsupported_error("all_cliques on a non-finite space");
    return enumerate_cliques(s, static_cast<std::size_t>(s->token_count()), std::nullopt, cap);
}

inline std::string clique_label(const SpacePtr& s, const Cliq& c) {
    std::string out = "{";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += " ";
        out += s->token_label(c[i]);
    }
    return out + "}";
}

}  // namespace cohsp
