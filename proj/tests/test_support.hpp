#pragma once

// Shared fixtures: the small named spaces used across the suites, and the
// exhaustive sweep over every coherence table / every generated totality on
// few tokens.

#include <cohsp/cohsp.hpp>

namespace ts {

using namespace cohsp;

// tokens p,q; no strict coherence; canonical totality {{p},{q}}
inline SpacePtr f2() { return CoherenceSpace::atomic_finite("F2", {"p", "q"}, {}); }

// tokens u,v; u ⌢ v; canonical totality {{u,v}}
inline SpacePtr c2() { return CoherenceSpace::atomic_finite("C2", {"u", "v"}, {{0, 1}}); }

// F2 plus a token w coherent with both p and q but never covered by the
// totality generators
inline SpacePtr f2w() {
    return CoherenceSpace::atomic_finite("F2W", {"p", "q", "w"}, {{0, 2}, {1, 2}});
}

inline TotalityView f2_view() { return TotalityView::exhaustive(f2(), {{0}, {1}}); }
inline TotalityView c2_view() { return TotalityView::exhaustive(c2(), {{0, 1}}); }
inline TotalityView f2w_view() { return TotalityView::exhaustive(f2w(), {{0}, {1}}); }
inline TotalityView one_view() {
    return TotalityView::exhaustive(CoherenceSpace::one(), {{0}});
}

// Every strict-coherence table on exactly n labeled tokens.
inline std::vector<SpacePtr> spaces_with_tokens(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> all_pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) all_pairs.push_back({i, j});
    std::vector<SpacePtr> out;
    for (std::size_t mask = 0; mask < (std::size_t(1) << all_pairs.size()); ++mask) {
        std::vector<std::pair<std::size_t, std::size_t>> chosen;
        for (std::size_t b = 0; b < all_pairs.size(); ++b)
            if (mask & (std::size_t(1) << b)) chosen.push_back(all_pairs[b]);
        std::vector<std::string> names;
        for (std::size_t i = 0; i < n; ++i) names.push_back("t" + std::to_string(i));
        out.push_back(CoherenceSpace::atomic_finite(
            "S" + std::to_string(n) + "_" + std::to_string(mask), std::move(names), chosen));
    }
    return out;
}

inline std::vector<SpacePtr> spaces_up_to(std::size_t max_tokens) {
    std::vector<SpacePtr> out;
    for (std::size_t n = 1; n <= max_tokens; ++n)
        for (auto& s : spaces_with_tokens(n)) out.push_back(std::move(s));
    return out;
}

// Every distinct totality generated by a nonempty set of cliques, via
// bitmask closure folding: T = (⋂_{g∈G} g⊥)⊥.
inline std::vector<CliqSet> distinct_totalities(const SpacePtr& space) {
    CliqSet cliques = all_cliques(space);
    CliqSet antis = all_anticliques(space);
    const std::size_t nc = cliques.size(), na = antis.size();
    if (nc > 24 || na > 24) throw resource_error("too many cliques for the totality sweep");
    std::vector<std::uint32_t> clique_perp(nc, 0), anti_perp(na, 0);
    for (std::size_t i = 0; i < nc; ++i)
        for (std::size_t j = 0; j < na; ++j)
            if (orthogonal(cliques[i], antis[j])) {
                clique_perp[i] |= (1u << j);
                anti_perp[j] |= (1u << i);
            }
    std::set<std::uint32_t> seen;
    std::vector<CliqSet> out;
    for (std::uint32_t gen = 1; gen < (1u << nc); ++gen) {
        std::uint32_t perp = (1u << na) - 1;
        for (std::size_t i = 0; i < nc; ++i)
            if (gen & (1u << i)) perp &= clique_perp[i];
        std::uint32_t total = (1u << nc) - 1;
        for (std::size_t j = 0; j < na; ++j)
            if (perp & (1u << j)) total &= anti_perp[j];
        if (!seen.insert(total).second) continue;
        CliqSet t;
        for (std::size_t i = 0; i < nc; ++i)
            if (total & (1u << i)) t.push_back(cliques[i]);
        out.push_back(canonical_set(std::move(t)));
    }
    return out;
}

// All exhaustive views (space, totality) on spaces of up to max_tokens.
struct SweptView {
    SpacePtr space;
    TotalityView view;
};

inline std::vector<SweptView> sweep_views(std::size_t max_tokens, bool require_nonempty_strict = false) {
    std::vector<SweptView> out;
    for (const auto& sp : spaces_up_to(max_tokens)) {
        for (auto& t : distinct_totalities(sp)) {
            TotalityView v = TotalityView::from_total_set(sp, t);
            if (require_nonempty_strict && v.strict().empty()) continue;
            out.push_back({sp, std::move(v)});
        }
    }
    return out;
}

}  // namespace ts
