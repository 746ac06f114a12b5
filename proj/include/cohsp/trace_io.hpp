#pragma once

// Trace file format:
//   trace <kind> <srcspace> -> <dstspace>
//   pair <input> -> <token>
// where <input> is a token name for linear traces and `{id id ...}` for
// stable ones. Space expressions: atomics by name, `~A` dual, `!A` bang,
// `(A*B)` tensor, `(A-oB)` lollipop, `1` the unit.

#include <sstream>

#include "maps.hpp"

namespace cohsp {

using SpaceResolver = std::function<SpacePtr(const std::string&)>;

inline std::string space_expression(const SpacePtr& s) {
    switch (s->kind()) {
        case SpaceKind::AtomicFinite: case SpaceKind::AtomicLazy: return s->name();
        case SpaceKind::One: return "1";
        case SpaceKind::Dual: return "~" + space_expression(s->operand());
        case SpaceKind::Bang: return "!" + space_expression(s->operand());
        case SpaceKind::Tensor:
            return "(" + space_expression(s->operand()) + "*" + space_expression(s->operand2()) + ")";
        case SpaceKind::Lollipop:
            return "(" + space_expression(s->operand()) + "-o" + space_expression(s->operand2()) + ")";
    }
    throw domain_error("bad space");
}

inline SpacePtr parse_space_expression(const std::string& text, const SpaceResolver& resolve) {
    std::function<SpacePtr(std::size_t&, std::size_t)> rec = [&](std::size_t& i, std::size_t end) -> SpacePtr {
        if (i >= end) throw parse_error("empty space expression");
        char c = text[i];
        if (c == '~') { ++i; return CoherenceSpace::dual(rec(i, end)); }
        if (c == '!') { ++i; return CoherenceSpace::bang(rec(i, end)); }
        if (c == '(') {
            int depth = 0;
            std::size_t close = i;
            for (; close < end; ++close) {
                if (text[close] == '(') ++depth;
                else if (text[close] == ')' && --depth == 0) break;
            }
            if (close >= end) throw parse_error("unbalanced '(' in space expression");
            // find the top-level connective: '*' or '-o'
            int d = 0;
            for (std::size_t k = i + 1; k < close; ++k) {
                if (text[k] == '(') ++d;
                else if (text[k] == ')') --d;
                else if (d == 0 && text[k] == '*') {
                    std::size_t li = i + 1;
                    SpacePtr lhs = rec(li, k);
                    std::size_t ri = k + 1;
                    SpacePtr rhs = rec(ri, close);
                    i = close + 1;
                    return CoherenceSpace::tensor(lhs, rhs);
                } else if (d == 0 && text[k] == '-' && k + 1 < close && text[k + 1] == 'o') {
                    std::size_t li = i + 1;
                    SpacePtr lhs = rec(li, k);
                    std::size_t ri = k + 2;
                    SpacePtr rhs = rec(ri, close);
                    i = close + 1;
                    return CoherenceSpace::lollipop(lhs, rhs);
                }
            }
            throw parse_error("no connective inside '(...)'");
        }
        std::size_t j = i;
        while (j < end && text[j] != '*' && text[j] != ')' && text[j] != '(') ++j;
        std::string name = text.substr(i, j - i);
        i = j;
        if (name == "1") return CoherenceSpace::one();
        SpacePtr s = resolve(name);
        if (!s) throw parse_error("unknown space '" + name + "'");
        return s;
    };
    std::size_t i = 0;
    SpacePtr s = rec(i, text.size());
    if (i != text.size()) throw parse_error("trailing input in space expression '" + text + "'");
    return s;
}

inline std::string serialize_trace(const Trace& t) {
    std::ostringstream out;
    out << "trace " << trace_kind_name(t.kind()) << " " << space_expression(t.source()) << " -> "
        << space_expression(t.target()) << "\n";
    for (const auto& p : t.pairs()) {
        out << "pair ";
        if (t.kind() == TraceKind::Linear)
            out << t.source()->token_label(p.input[0]);
        else
            out << clique_label(t.source(), p.input);
        out << " -> " << t.target()->token_label(p.output) << "\n";
    }
    return out.str();
}

inline Trace parse_trace(const std::string& text, const SpaceResolver& resolve) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::optional<TraceKind> kind;
    SpacePtr src, dst;
    std::vector<TracePair> pairs;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        if (head == "trace") {
            std::string k, s, arrow, d;
            if (!(ls >> k >> s >> arrow >> d) || arrow != "->")
                throw parse_error(lineno, "expected: trace <kind> <src> -> <dst>");
            if (k == "linear") kind = TraceKind::Linear;
            else if (k == "stable") kind = TraceKind::Stable;
            else throw parse_error(lineno, "unknown trace kind '" + k + "'");
            src = parse_space_expression(s, resolve);
            dst = parse_space_expression(d, resolve);
        } else if (head == "pair") {
            if (!kind) throw parse_error(lineno, "pair before trace header");
            std::string rest;
            std::getline(ls, rest);
            auto arrow = rest.find("->");
            if (arrow == std::string::npos) throw parse_error(lineno, "expected: pair <input> -> <token>");
            auto trim = [](std::string s) {
                while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
                while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
                return s;
            };
            std::string in_text = trim(rest.substr(0, arrow));
            std::string out_text = trim(rest.substr(arrow + 2));
            Cliq input;
            if (*kind == TraceKind::Linear) {
                auto tok = src->token_by_name(in_text);
                if (!tok) throw parse_error(lineno, "unknown source token '" + in_text + "'");
                input = {*tok};
            } else {
                if (in_text.size() < 2 || in_text.front() != '{' || in_text.back() != '}')
                    throw parse_error(lineno, "stable input must be {id id ...}");
                std::istringstream ts(in_text.substr(1, in_text.size() - 2));
                std::string w;
                while (ts >> w) {
                    auto tok = src->token_by_name(w);
                    if (!tok) throw parse_error(lineno, "unknown source token '" + w + "'");
                    input.push_back(*tok);
                }
            }
            auto out_tok = dst->token_by_name(out_text);
            if (!out_tok) throw parse_error(lineno, "unknown target token '" + out_text + "'");
            pairs.push_back({normalized(input), *out_tok});
        } else {
            throw parse_error(lineno, "unknown directive '" + head + "'");
        }
    }
    if (!kind) throw parse_error("missing trace header");
    return Trace(*kind, src, dst, std::move(pairs));
}

}  // namespace cohsp
