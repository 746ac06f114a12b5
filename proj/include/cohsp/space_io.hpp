#pragma once

// Textual space descriptions. Line-oriented UTF-8, '#' starts a comment:
//
//   space F2
//   tokens p q
//   coherent u v        # zero or more unordered strict-coherence pairs
//   totality {p} {q}    # optional generator cliques
//
// Canonical serialization sorts token names, pairs and generators.

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace cohsp {

struct SpaceDescriptor {
    std::string name;
    std::vector<std::string> tokens;                      // declaration order
    std::set<std::pair<std::string, std::string>> strict_pairs;  // name-sorted within pair
    std::vector<std::vector<std::string>> totality_generators;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

inline std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace detail

inline SpaceDescriptor parse_space_file(const std::string& text) {
    SpaceDescriptor d;
    std::set<std::string> seen;
    bool have_space = false;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    auto known = [&](const std::string& t) { return seen.count(t) > 0; };
    while (std::getline(in, raw)) {
        ++lineno;
        auto words = detail::split_ws(detail::strip_comment(raw));
        if (words.empty()) continue;
        const std::string& head = words[0];
        if (head == "space") {
            if (words.size() != 2) throw parse_error(lineno, "expected: space <name>");
            if (have_space) throw parse_error(lineno, "duplicate 'space' line");
            d.name = words[1];
            have_space = true;
        } else if (head == "tokens") {
            if (words.size() < 2) throw parse_error(lineno, "expected: tokens <id> ...");
            for (std::size_t i = 1; i < words.size(); ++i) {
                if (!seen.insert(words[i]).second)
                    throw parse_error(lineno, "duplicate token '" + words[i] + "'");
                d.tokens.push_back(words[i]);
            }
        } else if (head == "coherent") {
            if (words.size() == 1) continue;  // a bare 'coherent' line declares nothing
            if (words.size() != 3) throw parse_error(lineno, "expected: coherent <id> <id>");
            for (int k = 1; k <= 2; ++k)
                if (!known(words[k])) throw parse_error(lineno, "undeclared token '" + words[k] + "'");
            if (words[1] == words[2])
                throw parse_error(lineno, "reflexive coherence is implicit; pair must be distinct");
            auto p = std::minmax(words[1], words[2]);
            d.strict_pairs.insert({p.first, p.second});
        } else if (head == "totality") {
            std::string rest;
            for (std::size_t i = 1; i < words.size(); ++i) rest += words[i] + " ";
            std::vector<std::string> cur;
            bool open = false;
            std::istringstream rs(rest);
            std::string w;
            while (rs >> w) {
                while (!w.empty() && w.front() == '{') {
                    if (open) throw parse_error(lineno, "nested '{' in totality generators");
                    open = true;
                    cur.clear();
                    w = w.substr(1);
                }
                std::size_t closers = 0;
                while (!w.empty() && w.back() == '}') { ++closers; w.pop_back(); }
                if (!w.empty()) {
                    if (!open) throw parse_error(lineno, "token outside '{...}' in totality line");
                    if (!known(w)) throw parse_error(lineno, "undeclared token '" + w + "'");
                    cur.push_back(w);
                }
                for (; closers > 0; --closers) {
                    if (!open) throw parse_error(lineno, "unbalanced '}' in totality line");
                    std::sort(cur.begin(), cur.end());
                    cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
                    d.totality_generators.push_back(cur);
                    cur.clear();
                    open = false;
                }
            }
            if (open) throw parse_error(lineno, "unbalanced '{' in totality line");
        } else {
            throw parse_error(lineno, "unknown directive '" + head + "'");
        }
    }
    if (!have_space) throw parse_error("missing 'space' line");
    if (d.tokens.empty()) throw parse_error("no tokens declared");
    // Generators must be cliques of the declared coherence.
    for (const auto& g : d.totality_generators) {
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = i + 1; j < g.size(); ++j) {
                auto p = std::minmax(g[i], g[j]);
                if (!d.strict_pairs.count({p.first, p.second}))
                    throw parse_error("totality generator {" + g[i] + " " + g[j] +
                                      " ...} is not a clique: '" + g[i] + "' and '" + g[j] +
                                      "' are incoherent");
            }
    }
    return d;
}

inline std::string serialize_space(const SpaceDescriptor& d) {
    std::ostringstream out;
    out << "space " << d.name << "\n";
    std::vector<std::string> names = d.tokens;
    std::sort(names.begin(), names.end());
    out << "tokens";
    for (const auto& n : names) out << " " << n;
    out << "\n";
    for (const auto& p : d.strict_pairs) out << "coherent " << p.first << " " << p.second << "\n";
    if (!d.totality_generators.empty()) {
        std::vector<std::vector<std::string>> gens = d.totality_generators;
        for (auto& g : gens) std::sort(g.begin(), g.end());
        std::sort(gens.begin(), gens.end());
        gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
        out << "totality";
        for (const auto& g : gens) {
            out << " {";
            for (std::size_t i = 0; i < g.size(); ++i) out << (i ? " " : "") << g[i];
            out << "}";
        }
        out << "\n";
    }
    return out.str();
}

inline SpacePtr descriptor_to_space(const SpaceDescriptor& d) {
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < d.tokens.size(); ++i) idx[d.tokens[i]] = i;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& p : d.strict_pairs) pairs.push_back({idx[p.first], idx[p.second]});
    return CoherenceSpace::atomic_finite(d.name, d.tokens, pairs);
}

inline std::vector<Cliq> descriptor_generators(const SpaceDescriptor& d, const SpacePtr& space) {
    std::vector<Cliq> out;
    for (const auto& g : d.totality_generators) {
        Cliq c;
        for (const auto& n : g) {
            auto t = space->token_by_name(n);
            if (!t) throw domain_error("generator token '" + n + "' not in space");
            c.push_back(*t);
        }
        out.push_back(normalized(c));
    }
    return out;
}

}  // namespace cohsp
