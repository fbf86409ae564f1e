#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "frameworks.hpp"
#include "stats.hpp"
#include "text.hpp"

namespace ousio {

/// Term -> count table of a corpus. Counts are reals so that normalized and
/// merged distributions stay in the same type.
struct ZipfDistribution {
    std::string label;
    std::map<std::string, double> counts;

    bool empty() const noexcept { return counts.empty(); }
    std::size_t size() const noexcept { return counts.size(); }

    double total() const {
        double t = 0.0;
        for (const auto& [term, c] : counts) t += c;
        return t;
    }

    /// Adds `count` to `term` (lower-cased).
    void add(std::string_view term, double count) {
        if (!(count >= 0.0) || !std::isfinite(count)) throw InvalidArgument("counts must be finite and non-negative");
        counts[text::to_lower(term)] += count;
    }

    friend bool operator==(const ZipfDistribution&, const ZipfDistribution&) = default;
};

/// Reads `term TAB count` lines; repeated terms accumulate. A first line whose
/// count field is non-numeric is taken as a header.
inline ZipfDistribution parse_zipf(std::istream& in, std::string label = {}) {
    ZipfDistribution dist;
    dist.label = std::move(label);
    std::string line;
    std::size_t line_no = 0;
    while (text::get_line(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto fields = text::split(line, '\t');
        if (fields.size() != 2) throw MalformedRow(line_no, "expected term and count");
        auto count = text::parse_double(fields[1]);
        if (!count) {
            if (line_no == 1) continue;
            throw MalformedRow(line_no, "non-numeric count");
        }
        if (*count < 0.0) throw MalformedRow(line_no, "negative count");
        if (text::trim(fields[0]).empty()) throw MalformedRow(line_no, "empty term");
        dist.counts[text::to_lower(fields[0])] += *count;
    }
    return dist;
}

/// Writes `term TAB count`, heaviest first (ties by term), counts to 12 significant digits.
inline void write_zipf(std::ostream& out, const ZipfDistribution& dist) {
    std::vector<std::pair<std::string_view, double>> rows(dist.counts.begin(), dist.counts.end());
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [term, count] : rows) out << term << '\t' << text::significant(count, 12) << '\n';
}

/// Each non-empty slice is normalized to sum to 1, then the slices are averaged.
/// Empty slices (zero total) take no part in the average.
inline ZipfDistribution merge_equal_weight(std::span<const ZipfDistribution> slices, std::string label = "merged") {
    std::vector<std::pair<const ZipfDistribution*, double>> live;
    for (const auto& s : slices) {
        const double t = s.total();
        if (t > 0.0) live.emplace_back(&s, t);
    }
    if (live.empty()) throw AllEmpty();
    ZipfDistribution out;
    out.label = std::move(label);
    const double share = 1.0 / static_cast<double>(live.size());
    for (const auto& [slice, total] : live)
        for (const auto& [term, c] : slice->counts)
            if (c > 0.0) out.counts[term] += share * (c / total);
    return out;
}

/// Plain summation of counts across slices.
inline ZipfDistribution merge_raw_sum(std::span<const ZipfDistribution> slices, std::string label = "merged") {
    ZipfDistribution out;
    out.label = std::move(label);
    for (const auto& s : slices)
        for (const auto& [term, c] : s.counts) out.counts[term] += c;
    return out;
}

namespace detail {

inline bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

/// Length of a UTF-8 punctuation sequence (curly quotes, dashes, guillemets,
/// ellipsis) starting at `pos`, or 0.
inline std::size_t unicode_punct_at(std::string_view s, std::size_t pos) {
    // Left/right single quotes, left/right double quotes, en dash, em dash, guillemets, ellipsis.
    static constexpr std::array<std::string_view, 9> marks{"\xE2\x80\x98", "\xE2\x80\x99", "\xE2\x80\x9C",
                                                          "\xE2\x80\x9D", "\xE2\x80\x93", "\xE2\x80\x94",
                                                          "\xC2\xAB",     "\xC2\xBB",     "\xE2\x80\xA6"};
    for (auto m : marks)
        if (s.substr(pos, m.size()) == m) return m.size();
    return 0;
}

inline void emit_token(std::string_view token, ZipfDistribution& dist) {
    // Trim non-word characters from both ends; keep a '#' that directly precedes the word.
    std::size_t b = 0, e = token.size();
    while (b < e) {
        if (auto n = unicode_punct_at(token, b)) { b += n; continue; }
        if (is_word_byte(static_cast<unsigned char>(token[b]))) break;
        ++b;
    }
    while (e > b) {
        bool stripped = false;
        for (std::size_t n : {3u, 2u}) {
            if (e >= b + n && unicode_punct_at(token, e - n) == n) {
                e -= n;
                stripped = true;
                break;
            }
        }
        if (stripped) continue;
        if (is_word_byte(static_cast<unsigned char>(token[e - 1]))) break;
        --e;
    }
    if (b >= e) return;
    if (b > 0 && token[b - 1] == '#') --b;
    dist.counts[text::to_lower(token.substr(b, e - b))] += 1.0;
}

} // namespace detail

/// Minimal splitter for raw text: lower-case, split on whitespace and dashes,
/// strip surrounding punctuation except a leading '#'.
inline ZipfDistribution tokenize(std::string_view body, std::string label = {}) {
    ZipfDistribution dist;
    dist.label = std::move(label);
    std::size_t start = 0;
    auto flush = [&](std::size_t end) {
        if (end > start) detail::emit_token(body.substr(start, end - start), dist);
    };
    std::size_t i = 0;
    while (i < body.size()) {
        const auto c = static_cast<unsigned char>(body[i]);
        const bool space = std::isspace(c) != 0;
        const bool dash = body.substr(i, 3) == "\xE2\x80\x94" || body.substr(i, 3) == "\xE2\x80\x93" || body.substr(i, 2) == "--";
        if (space || dash) {
            flush(i);
            i += space ? 1 : (body[i] == '-' ? 2 : 3);
            start = i;
        } else {
            ++i;
        }
    }
    flush(body.size());
    return dist;
}

inline ZipfDistribution tokenize(std::istream& in, std::string label = {}) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return tokenize(buf.str(), std::move(label));
}

/// A distribution restricted to lexicon terms and renormalized to probabilities.
struct LensedDistribution {
    std::string label;
    std::map<std::string, double> matched; ///< term -> p, summing to 1
    double coverage_tokens = 0.0;          ///< share of the original token mass kept
    double coverage_types = 0.0;           ///< share of the original distinct terms kept

    /// Back to a distribution (counts are the probabilities).
    ZipfDistribution as_distribution() const {
        ZipfDistribution d;
        d.label = label;
        d.counts = matched;
        return d;
    }
};

/// Keeps the terms present in `lexicon` and renormalizes. Throws NoOverlap when none match.
inline LensedDistribution apply_lens(const ZipfDistribution& dist, const DerivedLexicon& lexicon) {
    LensedDistribution out;
    out.label = dist.label;
    double kept = 0.0, total = 0.0;
    std::size_t kept_types = 0, types = 0;
    for (const auto& [term, c] : dist.counts) {
        total += c;
        ++types;
        if (c > 0.0 && lexicon.lookup(term)) {
            out.matched.emplace(term, c);
            kept += c;
            ++kept_types;
        }
    }
    if (out.matched.empty()) throw NoOverlap();
    for (auto& [term, p] : out.matched) p /= kept;
    out.coverage_tokens = total > 0.0 ? kept / total : 0.0;
    out.coverage_types = types > 0 ? static_cast<double>(kept_types) / static_cast<double>(types) : 0.0;
    return out;
}

struct DimensionBias {
    std::string dimension;
    double mean = 0.0;
    double median = 0.0;
    double mass_below = 0.0; ///< probability mass with score < 0
    double mass_above = 0.0; ///< probability mass with score > 0
    double mass_zero = 0.0;
};

struct SafetyBiasReport {
    std::string label;
    FrameworkTag framework = FrameworkTag::pds;
    std::array<DimensionBias, 3> dimensions;
    double coverage_tokens = 0.0;
    double coverage_types = 0.0;
};

/// Token-weighted mean, median, and sign split for each dimension of `framework`.
inline SafetyBiasReport bias_report(const LensedDistribution& lensed, const DerivedLexicon& lexicon, FrameworkTag framework) {
    if (lensed.matched.empty()) throw EmptyInput("lensed distribution is empty");
    std::vector<std::size_t> rows;
    std::vector<double> weights;
    rows.reserve(lensed.matched.size());
    weights.reserve(lensed.matched.size());
    for (const auto& [term, p] : lensed.matched) {
        auto idx = lexicon.lookup(term);
        if (!idx) throw UnknownTerm(term);
        rows.push_back(*idx);
        weights.push_back(p);
    }

    SafetyBiasReport report;
    report.label = lensed.label;
    report.framework = framework;
    report.coverage_tokens = lensed.coverage_tokens;
    report.coverage_types = lensed.coverage_types;
    const auto names = dimension_names(framework);
    for (int axis = 0; axis < 3; ++axis) {
        const Dimension dim{framework, axis};
        std::vector<double> values;
        values.reserve(rows.size());
        for (std::size_t r : rows) values.push_back(lexicon.value(r, dim));

        auto& d = report.dimensions[static_cast<std::size_t>(axis)];
        d.dimension = std::string(names[static_cast<std::size_t>(axis)]);
        double mean = 0.0, below = 0.0, above = 0.0, zero = 0.0, total = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            mean += weights[i] * values[i];
            total += weights[i];
            if (values[i] < 0.0) below += weights[i];
            else if (values[i] > 0.0) above += weights[i];
            else zero += weights[i];
        }
        d.mean = mean;
        d.median = stats::weighted_median(values, weights);
        d.mass_below = below / total;
        d.mass_above = above / total;
        d.mass_zero = zero / total;
    }
    return report;
}

inline nlohmann::json to_json(const SafetyBiasReport& r) {
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& d : r.dimensions)
        dims.push_back({{"dimension", d.dimension},
                        {"mean", d.mean},
                        {"median", d.median},
                        {"mass_below_zero", d.mass_below},
                        {"mass_above_zero", d.mass_above},
                        {"mass_at_zero", d.mass_zero}});
    return {{"label", r.label},
            {"framework", std::string(to_string(r.framework))},
            {"coverage_tokens", r.coverage_tokens},
            {"coverage_types", r.coverage_types},
            {"dimensions", dims}};
}

/// Fixed-width plain-text table.
inline std::string format_table(const SafetyBiasReport& r) {
    std::ostringstream out;
    out << r.label << " (" << to_string(r.framework) << ", token coverage " << text::fixed(r.coverage_tokens, 4)
        << ", type coverage " << text::fixed(r.coverage_types, 4) << ")\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %10s %10s %10s %10s %10s\n", "dimension", "mean", "median", "below0", "above0",
                  "at0");
    out << line;
    for (const auto& d : r.dimensions) {
        std::snprintf(line, sizeof line, "%-10s %10s %10s %10s %10s %10s\n", d.dimension.c_str(), text::fixed(d.mean, 4).c_str(),
                      text::fixed(d.median, 4).c_str(), text::fixed(d.mass_below, 4).c_str(),
                      text::fixed(d.mass_above, 4).c_str(), text::fixed(d.mass_zero, 4).c_str());
        out << line;
    }
    return out.str();
}

} // namespace ousio
