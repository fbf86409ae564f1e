#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "lexicon.hpp"
#include "linalg.hpp"
#include "text.hpp"

namespace ousio {

enum class FrameworkTag { vad, ges, pds };

inline constexpr std::array<FrameworkTag, 3> kAllFrameworks{FrameworkTag::vad, FrameworkTag::ges, FrameworkTag::pds};

inline std::string_view to_string(FrameworkTag tag) {
    switch (tag) {
    case FrameworkTag::vad: return "VAD";
    case FrameworkTag::ges: return "GES";
    case FrameworkTag::pds: return "PDS";
    }
    return "?";
}

/// Case-insensitive; accepts "vad", "ges", "pds".
inline FrameworkTag parse_framework(std::string_view name) {
    auto lower = text::to_lower(name);
    if (lower == "vad") return FrameworkTag::vad;
    if (lower == "ges") return FrameworkTag::ges;
    if (lower == "pds") return FrameworkTag::pds;
    throw InvalidArgument("unknown framework '" + std::string(name) + "'");
}

/// Dimension names in framework order. PDS structure is named "structure" here;
/// column headers disambiguate it as "structure_pds".
inline std::array<std::string_view, 3> dimension_names(FrameworkTag tag) {
    switch (tag) {
    case FrameworkTag::vad: return {"valence", "arousal", "dominance"};
    case FrameworkTag::ges: return {"goodness", "energy", "structure"};
    case FrameworkTag::pds: return {"power", "danger", "structure"};
    }
    return {};
}

/// The nine score columns of a derived lexicon, in export order.
inline constexpr std::array<std::string_view, 9> kScoreColumns{
    "valence", "arousal", "dominance", "goodness", "energy", "structure", "power", "danger", "structure_pds"};

/// A dimension is a framework plus an axis index (0..2).
struct Dimension {
    FrameworkTag framework = FrameworkTag::vad;
    int axis = 0;

    std::size_t column() const { return static_cast<std::size_t>(framework) * 3 + static_cast<std::size_t>(axis); }
    std::string_view name() const { return kScoreColumns[column()]; }
    friend bool operator==(const Dimension&, const Dimension&) = default;
};

/// Resolves a column name ("power", "structure_pds", ...). Bare "structure"
/// means GES structure unless `prefer` is PDS.
inline Dimension parse_dimension(std::string_view name, FrameworkTag prefer = FrameworkTag::ges) {
    auto lower = text::to_lower(text::trim(name));
    if (lower == "structure" && prefer == FrameworkTag::pds) return {FrameworkTag::pds, 2};
    for (std::size_t c = 0; c < kScoreColumns.size(); ++c)
        if (kScoreColumns[c] == lower) return {static_cast<FrameworkTag>(c / 3), static_cast<int>(c % 3)};
    throw InvalidArgument("unknown dimension '" + std::string(name) + "'");
}

struct ScoreTriple {
    FrameworkTag framework = FrameworkTag::vad;
    Vec3 values{};

    ScoreTriple() = default;
    ScoreTriple(FrameworkTag tag, Vec3 v) : framework(tag), values(v) {
        for (double x : values)
            if (!std::isfinite(x)) throw InvalidArgument("score triple has a non-finite component");
    }
    double operator[](std::size_t i) const { return values[i]; }
};

struct CorrelationReport {
    double r_va = 0.0;
    double r_ad = 0.0;
    double r_vd = 0.0;
    std::size_t n = 0;
};

/// Pearson correlations between VAD columns, taken about the empirical column means.
inline CorrelationReport correlations(const CenteredLexicon& lexicon) {
    constexpr std::array<const char*, 3> names{"valence", "arousal", "dominance"};
    const std::size_t n = lexicon.size();
    if (n < 2) throw DegenerateColumn(names[0]);

    Vec3 mean{};
    for (const auto& r : lexicon.scores())
        for (int k = 0; k < 3; ++k) mean[k] += r[k];
    for (double& m : mean) m /= static_cast<double>(n);

    Mat3 c{};
    for (const auto& r : lexicon.scores()) {
        const Vec3 d{r[0] - mean[0], r[1] - mean[1], r[2] - mean[2]};
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) c[i][j] += d[i] * d[j];
    }
    for (int k = 0; k < 3; ++k)
        if (!(c[k][k] > 0.0)) throw DegenerateColumn(names[k]);

    auto r = [&](int i, int j) { return std::clamp(c[i][j] / std::sqrt(c[i][i] * c[j][j]), -1.0, 1.0); };
    return {r(0, 1), r(1, 2), r(0, 2), n};
}

/// Sum over terms of r r^T, taken about the origin (the design mean).
inline Mat3 second_moment(const CenteredLexicon& lexicon) {
    Mat3 m{};
    for (const auto& r : lexicon.scores())
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) m[i][j] += r[i] * r[j];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j) m[i][j] = m[j][i];
    return m;
}

/// Share of the total sum of squares carried by each of valence, arousal, dominance.
inline Vec3 vad_variance_shares(const CenteredLexicon& lexicon) {
    const Mat3 m = second_moment(lexicon);
    const double total = m[0][0] + m[1][1] + m[2][2];
    if (!(total > 0.0)) throw RankDeficient("all scores are zero");
    return {m[0][0] / total, m[1][1] / total, m[2][2] / total};
}

/// An orthogonal map from VAD coordinates into `target`, with the singular values
/// of the centered score matrix expressed along the target axes.
struct FrameworkBasis {
    FrameworkTag target = FrameworkTag::ges;
    Mat3 matrix = linalg::identity(); ///< rows map a VAD triple to the target frame
    Vec3 singular_values{};           ///< non-increasing
    Vec3 explained_variance{};        ///< sums to 1

    friend bool operator==(const FrameworkBasis&, const FrameworkBasis&) = default;
};

/// GES basis from the SVD of the centered score matrix.
///
/// The left singular vectors of the 3xN matrix are the eigenvectors of its 3x3
/// second moment about the origin, and the singular values are the square roots
/// of the eigenvalues. Signs follow a fixed convention: goodness has a positive
/// valence loading, energy a positive arousal loading, and structure a negative
/// dominance loading.
inline FrameworkBasis derive_ges(const CenteredLexicon& lexicon) {
    if (lexicon.size() < 3) throw RankDeficient("need at least 3 terms, have " + std::to_string(lexicon.size()));
    const auto eig = linalg::jacobi_eigen(second_moment(lexicon));

    FrameworkBasis basis;
    basis.target = FrameworkTag::ges;
    for (int i = 0; i < 3; ++i) basis.singular_values[i] = std::sqrt(std::max(eig.values[i], 0.0));
    if (!(basis.singular_values[2] >= 1e-12 * basis.singular_values[0]) || basis.singular_values[0] == 0.0)
        throw RankDeficient("smallest singular value " + text::significant(basis.singular_values[2], 6) +
                            " vs largest " + text::significant(basis.singular_values[0], 6));

    basis.matrix = eig.vectors;
    const std::array<double, 3> wanted_sign{+1.0, +1.0, -1.0};
    for (int i = 0; i < 3; ++i) {
        if (basis.matrix[i][i] * wanted_sign[i] < 0.0)
            for (double& x : basis.matrix[i]) x = -x;
    }

    double total = 0.0;
    for (double s : basis.singular_values) total += s * s;
    for (int i = 0; i < 3; ++i) basis.explained_variance[i] = basis.singular_values[i] * basis.singular_values[i] / total;
    return basis;
}

/// Clockwise rotation by pi/4 of the goodness-energy plane; structure is unchanged.
inline Mat3 ges_to_pds_rotation() {
    const double h = std::numbers::sqrt2 / 2.0;
    return {{{h, h, 0.0}, {-h, h, 0.0}, {0.0, 0.0, 1.0}}};
}

inline FrameworkBasis rotate_to_pds(const FrameworkBasis& ges) {
    if (ges.target != FrameworkTag::ges)
        throw WrongFramework("rotate_to_pds expects a GES basis, got " + std::string(to_string(ges.target)));
    FrameworkBasis pds;
    pds.target = FrameworkTag::pds;
    pds.matrix = linalg::multiply(ges_to_pds_rotation(), ges.matrix);

    // Goodness and energy are uncorrelated about the origin, so each rotated axis
    // carries the mean of their second moments.
    const double s1 = ges.singular_values[0], s2 = ges.singular_values[1];
    const double in_plane = std::sqrt((s1 * s1 + s2 * s2) / 2.0);
    pds.singular_values = {in_plane, in_plane, ges.singular_values[2]};
    const double shared = (ges.explained_variance[0] + ges.explained_variance[1]) / 2.0;
    pds.explained_variance = {shared, shared, ges.explained_variance[2]};
    return pds;
}

inline ScoreTriple transform(const ScoreTriple& triple, const FrameworkBasis& basis) {
    if (triple.framework != FrameworkTag::vad)
        throw WrongFramework("transform expects a VAD triple, got " + std::string(to_string(triple.framework)));
    return ScoreTriple(basis.target, linalg::apply(basis.matrix, triple.values));
}

/// Per-term scores in all three frameworks. Rows keep the source lexicon order.
class DerivedLexicon {
public:
    using Row = std::array<double, 9>;

    DerivedLexicon() = default;

    DerivedLexicon(std::vector<Term> terms, std::vector<Row> rows) : terms_(std::move(terms)), rows_(std::move(rows)) {
        if (terms_.size() != rows_.size()) throw InvalidArgument("term and row counts differ");
        index_.reserve(terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (!index_.emplace(terms_[i].text(), i).second) throw DuplicateTerm(terms_[i].text());
    }

    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }
    const Term& term(std::size_t i) const { return terms_.at(i); }
    const Row& row(std::size_t i) const { return rows_.at(i); }

    Vec3 coords(std::size_t i, FrameworkTag tag) const {
        const auto& r = rows_.at(i);
        const auto base = static_cast<std::size_t>(tag) * 3;
        return {r[base], r[base + 1], r[base + 2]};
    }
    double value(std::size_t i, Dimension dim) const { return rows_.at(i)[dim.column()]; }

    std::optional<std::size_t> lookup(std::string_view term) const {
        auto it = index_.find(text::to_lower(term));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::vector<Term> terms_;
    std::vector<Row> rows_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline DerivedLexicon score_lexicon(const CenteredLexicon& lexicon, const FrameworkBasis& ges, const FrameworkBasis& pds) {
    if (ges.target != FrameworkTag::ges) throw WrongFramework("score_lexicon expects a GES basis first");
    if (pds.target != FrameworkTag::pds) throw WrongFramework("score_lexicon expects a PDS basis second");
    std::vector<DerivedLexicon::Row> rows;
    rows.reserve(lexicon.size());
    for (const auto& vad : lexicon.scores()) {
        const Vec3 g = linalg::apply(ges.matrix, vad);
        const Vec3 p = linalg::apply(pds.matrix, vad);
        rows.push_back({vad[0], vad[1], vad[2], g[0], g[1], g[2], p[0], p[1], p[2]});
    }
    return DerivedLexicon(lexicon.terms(), std::move(rows));
}

/// TSV with a header naming all nine score columns, 6 decimal places.
inline void write_derived(std::ostream& out, const DerivedLexicon& derived) {
    out << "term";
    for (auto name : kScoreColumns) out << '\t' << name;
    out << '\n';
    for (std::size_t i = 0; i < derived.size(); ++i) {
        out << derived.term(i).text();
        for (double x : derived.row(i)) out << '\t' << text::fixed(x, 6);
        out << '\n';
    }
}

inline DerivedLexicon read_derived(std::istream& in) {
    std::vector<Term> terms;
    std::vector<DerivedLexicon::Row> rows;
    std::string line;
    std::size_t line_no = 0;
    while (text::get_line(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto fields = text::split(line, '\t');
        if (fields.size() != 10) throw MalformedRow(line_no, "expected 10 fields");
        if (line_no == 1 && fields[0] == "term") continue;
        DerivedLexicon::Row row{};
        for (std::size_t k = 0; k < 9; ++k) {
            auto v = text::parse_double(fields[k + 1]);
            if (!v) throw MalformedRow(line_no, "non-numeric score");
            row[k] = *v;
        }
        try {
            terms.emplace_back(fields[0]);
        } catch (const InvalidArgument& e) {
            throw MalformedRow(line_no, e.what());
        }
        rows.push_back(row);
    }
    return DerivedLexicon(std::move(terms), std::move(rows));
}

inline nlohmann::json to_json(const FrameworkBasis& basis) {
    nlohmann::json j;
    j["target"] = std::string(to_string(basis.target));
    j["matrix"] = basis.matrix;
    j["singular_values"] = basis.singular_values;
    j["explained_variance"] = basis.explained_variance;
    return j;
}

inline FrameworkBasis basis_from_json(const nlohmann::json& j) {
    try {
        FrameworkBasis basis;
        basis.target = parse_framework(j.at("target").get<std::string>());
        basis.matrix = j.at("matrix").get<Mat3>();
        basis.singular_values = j.at("singular_values").get<Vec3>();
        basis.explained_variance = j.at("explained_variance").get<Vec3>();
        return basis;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("invalid basis JSON: ") + e.what());
    }
}

} // namespace ousio
