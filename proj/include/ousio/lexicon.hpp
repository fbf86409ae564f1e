#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace ousio {

/// Number of scored terms in the 2018 release of the NRC VAD lexicon.
inline constexpr std::size_t kNrcTermCount = 20006;

/// Offset removed from every raw score; best-worst scaling places the design mean at 1/2.
inline constexpr double kDesignMean = 0.5;

/// A lower-cased n-gram. Tokens are separated by single spaces.
class Term {
public:
    Term() = default;

    /// Validates and lower-cases `raw`. Throws InvalidArgument on empty text,
    /// tabs/newlines, or empty tokens.
    explicit Term(std::string_view raw) : text_(text::to_lower(raw)) {
        if (text_.empty()) throw InvalidArgument("term is empty");
        if (text_.find_first_of("\t\n\r") != std::string::npos)
            throw InvalidArgument("term contains tab or newline: '" + text_ + "'");
        if (text_.front() == ' ' || text_.back() == ' ' || text_.find("  ") != std::string::npos)
            throw InvalidArgument("term has an empty token: '" + text_ + "'");
        arity_ = 1;
        for (char c : text_)
            if (c == ' ') ++arity_;
    }

    const std::string& text() const noexcept { return text_; }
    std::size_t arity() const noexcept { return arity_; }

    friend bool operator==(const Term& a, const Term& b) { return a.text_ == b.text_; }
    friend auto operator<=>(const Term& a, const Term& b) { return a.text_ <=> b.text_; }

private:
    std::string text_;
    std::size_t arity_ = 0;
};

struct RawEntry {
    Term term;
    double valence = 0.0;
    double arousal = 0.0;
    double dominance = 0.0;

    friend bool operator==(const RawEntry&, const RawEntry&) = default;
};

struct RawLexicon {
    std::vector<RawEntry> entries;

    std::size_t size() const noexcept { return entries.size(); }
    friend bool operator==(const RawLexicon&, const RawLexicon&) = default;
};

/// Column layout of a VAD lexicon file (zero-based field indices).
struct LexiconFormat {
    std::size_t term_column = 0;
    std::size_t valence_column = 1;
    std::size_t arousal_column = 2;
    std::size_t dominance_column = 3;
    char separator = '\t';
};

namespace detail {

inline std::size_t required_fields(const LexiconFormat& f) {
    return 1 + std::max({f.term_column, f.valence_column, f.arousal_column, f.dominance_column});
}

} // namespace detail

/// Parses a VAD lexicon. The first line is treated as a header when any of its
/// score fields is non-numeric. Blank lines are skipped.
inline RawLexicon parse_lexicon(std::istream& in, const LexiconFormat& format = {}) {
    RawLexicon lexicon;
    std::unordered_map<std::string, std::size_t> seen;
    const std::size_t width = detail::required_fields(format);

    std::string line;
    std::size_t line_no = 0;
    while (text::get_line(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto fields = text::split(line, format.separator);
        if (fields.size() < width) throw MalformedRow(line_no, "expected " + std::to_string(width) + " fields");

        auto v = text::parse_double(fields[format.valence_column]);
        auto a = text::parse_double(fields[format.arousal_column]);
        auto d = text::parse_double(fields[format.dominance_column]);
        if (!v || !a || !d) {
            if (line_no == 1) continue; // header
            throw MalformedRow(line_no, "non-numeric score");
        }

        Term term;
        try {
            term = Term(fields[format.term_column]);
        } catch (const InvalidArgument& e) {
            throw MalformedRow(line_no, e.what());
        }
        for (double s : {*v, *a, *d})
            if (s < 0.0 || s > 1.0) throw ScoreOutOfRange(term.text());
        if (!seen.emplace(term.text(), lexicon.entries.size()).second) throw DuplicateTerm(term.text());
        lexicon.entries.push_back({std::move(term), *v, *a, *d});
    }
    return lexicon;
}

/// Canonical serialization: header line plus 6-decimal scores.
inline void write_lexicon(std::ostream& out, const RawLexicon& lexicon) {
    out << "term\tvalence\tarousal\tdominance\n";
    for (const auto& e : lexicon.entries) {
        out << e.term.text() << '\t' << text::fixed(e.valence, 6) << '\t' << text::fixed(e.arousal, 6) << '\t'
            << text::fixed(e.dominance, 6) << '\n';
    }
}

/// VAD scores shifted by the design mean so that each lies in [-1/2, +1/2].
/// Rows follow the input order; columns are (valence, arousal, dominance).
class CenteredLexicon {
public:
    using Row = std::array<double, 3>;

    CenteredLexicon() = default;

    CenteredLexicon(std::vector<Term> terms, std::vector<Row> scores)
        : terms_(std::move(terms)), scores_(std::move(scores)) {
        if (terms_.size() != scores_.size()) throw InvalidArgument("term and score counts differ");
        index_.reserve(terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            for (double s : scores_[i])
                if (!(s >= -0.5 && s <= 0.5)) throw ScoreOutOfRange(terms_[i].text());
            if (!index_.emplace(terms_[i].text(), i).second) throw DuplicateTerm(terms_[i].text());
        }
    }

    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    const std::vector<Row>& scores() const noexcept { return scores_; }
    const Term& term(std::size_t i) const { return terms_.at(i); }
    const Row& row(std::size_t i) const { return scores_.at(i); }

    /// Exact match after lower-casing.
    std::optional<std::size_t> lookup(std::string_view term) const {
        auto it = index_.find(text::to_lower(term));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::vector<Term> terms_;
    std::vector<Row> scores_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Subtracts the fixed design mean (not the empirical mean) from every score.
inline CenteredLexicon center(const RawLexicon& raw) {
    std::vector<Term> terms;
    std::vector<CenteredLexicon::Row> rows;
    terms.reserve(raw.size());
    rows.reserve(raw.size());
    for (const auto& e : raw.entries) {
        terms.push_back(e.term);
        rows.push_back({e.valence - kDesignMean, e.arousal - kDesignMean, e.dominance - kDesignMean});
    }
    return CenteredLexicon(std::move(terms), std::move(rows));
}

inline std::optional<std::size_t> lookup(const CenteredLexicon& lexicon, std::string_view term) {
    return lexicon.lookup(term);
}

} // namespace ousio
