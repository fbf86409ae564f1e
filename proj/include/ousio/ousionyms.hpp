#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "frameworks.hpp"
#include "linalg.hpp"
#include "text.hpp"

namespace ousio {

struct Neighbor {
    std::size_t index = 0; ///< row in the derived lexicon
    std::string term;
    double distance = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct NeighborList {
    std::optional<std::size_t> query_index; ///< set for term queries
    FrameworkTag framework = FrameworkTag::pds;
    Vec3 target{};                          ///< point the distances are measured from
    std::vector<Neighbor> neighbors;        ///< distance ascending, ties by term text

    std::vector<std::string> terms() const {
        std::vector<std::string> out;
        out.reserve(neighbors.size());
        for (const auto& n : neighbors) out.push_back(n.term);
        return out;
    }
};

namespace detail {

/// Exhaustive scan: the k rows closest to `target` in `framework` coordinates,
/// skipping `exclude`. Ordering is (squared distance, term text).
inline std::vector<Neighbor> k_nearest(const DerivedLexicon& lexicon, FrameworkTag framework, const Vec3& target,
                                       std::size_t k, std::optional<std::size_t> exclude) {
    struct Candidate {
        double d2;
        std::size_t index;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(lexicon.size());
    for (std::size_t i = 0; i < lexicon.size(); ++i) {
        if (exclude && *exclude == i) continue;
        candidates.push_back({linalg::squared_distance(lexicon.coords(i, framework), target), i});
    }
    auto less = [&](const Candidate& a, const Candidate& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        return lexicon.term(a.index).text() < lexicon.term(b.index).text();
    };
    const std::size_t take = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(), less);

    std::vector<Neighbor> out;
    out.reserve(take);
    for (std::size_t r = 0; r < take; ++r)
        out.push_back({candidates[r].index, lexicon.term(candidates[r].index).text(), std::sqrt(candidates[r].d2)});
    return out;
}

inline std::size_t require_term(const DerivedLexicon& lexicon, std::string_view term) {
    auto index = lexicon.lookup(term);
    if (!index) throw UnknownTerm(std::string(term));
    return *index;
}

inline void require_k(std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be at least 1");
}

} // namespace detail

/// The k terms nearest to `term` in essential-meaning space, excluding the term itself.
/// Distances are the same in every framework; `framework` only selects the coordinates.
inline NeighborList synousionyms(const DerivedLexicon& lexicon, std::string_view term, std::size_t k,
                                 FrameworkTag framework = FrameworkTag::pds) {
    detail::require_k(k);
    const std::size_t q = detail::require_term(lexicon, term);
    NeighborList list{q, framework, lexicon.coords(q, framework), {}};
    list.neighbors = detail::k_nearest(lexicon, framework, list.target, k, q);
    return list;
}

/// The k terms nearest to the negation of `term`'s point, excluding the term itself.
inline NeighborList antousionyms(const DerivedLexicon& lexicon, std::string_view term, std::size_t k,
                                 FrameworkTag framework = FrameworkTag::pds) {
    detail::require_k(k);
    const std::size_t q = detail::require_term(lexicon, term);
    NeighborList list{q, framework, linalg::negate(lexicon.coords(q, framework)), {}};
    list.neighbors = detail::k_nearest(lexicon, framework, list.target, k, q);
    return list;
}

/// The k terms nearest to an arbitrary point; a term sitting on the point is included.
inline NeighborList nearest_to_point(const DerivedLexicon& lexicon, const ScoreTriple& point, std::size_t k) {
    detail::require_k(k);
    NeighborList list{std::nullopt, point.framework, point.values, {}};
    list.neighbors = detail::k_nearest(lexicon, point.framework, point.values, k, std::nullopt);
    return list;
}

/// TSV: a `#` comment with the query's nine scores (term queries only), a header,
/// then rank, term, distance.
inline void write_neighbors(std::ostream& out, const DerivedLexicon& lexicon, const NeighborList& list) {
    if (list.query_index) {
        out << "# " << lexicon.term(*list.query_index).text();
        const auto& row = lexicon.row(*list.query_index);
        for (std::size_t c = 0; c < kScoreColumns.size(); ++c)
            out << '\t' << kScoreColumns[c] << '=' << text::fixed(row[c], 6);
        out << '\n';
    } else {
        out << "# point " << to_string(list.framework);
        for (double x : list.target) out << '\t' << text::fixed(x, 6);
        out << '\n';
    }
    out << "rank\tterm\tdistance\n";
    for (std::size_t r = 0; r < list.neighbors.size(); ++r)
        out << (r + 1) << '\t' << list.neighbors[r].term << '\t' << text::fixed(list.neighbors[r].distance, 6) << '\n';
}

} // namespace ousio
