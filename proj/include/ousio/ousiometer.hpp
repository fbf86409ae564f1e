#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "frameworks.hpp"
#include "linalg.hpp"
#include "text.hpp"

namespace ousio {

using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Base resolution of the ousiometer.
inline constexpr Seconds kBaseResolution{15 * 60};

// ---------------------------------------------------------------------------
// Time helpers

/// Accepts "YYYY-MM-DDTHH:MM:SSZ" and the file-name form "YYYY-MM-DDTHH-MM-SSZ".
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    s = text::trim(s);
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[19] != 'Z') return std::nullopt;
    if (s[13] != s[16] || (s[13] != ':' && s[13] != '-')) return std::nullopt;
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    auto y = field(0, 4), mo = field(5, 2), d = field(8, 2), h = field(11, 2), mi = field(14, 2), se = field(17, 2);
    if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*mo)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *h > 23 || *mi > 59 || *se > 59) return std::nullopt;
    return Timestamp{std::chrono::sys_days{ymd}} + std::chrono::hours{*h} + std::chrono::minutes{*mi} + Seconds{*se};
}

inline std::string format_timestamp(Timestamp t, bool file_name = false) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss hms{t - day};
    char buf[64];
    const char sep = file_name ? '-' : ':';
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld%c%02ld%c%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), sep, static_cast<long>(hms.minutes().count()), sep,
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

/// "900", "900s", "15m", "1h", "1d" -> seconds.
inline Seconds parse_duration(std::string_view s) {
    s = text::trim(s);
    if (s.empty()) throw InvalidArgument("empty duration");
    long unit = 1;
    switch (s.back()) {
    case 's': unit = 1; s.remove_suffix(1); break;
    case 'm': unit = 60; s.remove_suffix(1); break;
    case 'h': unit = 3600; s.remove_suffix(1); break;
    case 'd': unit = 86400; s.remove_suffix(1); break;
    default: break;
    }
    long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || value <= 0)
        throw InvalidArgument("invalid duration '" + std::string(s) + "'");
    return Seconds{value * unit};
}

/// Shortest of "Nd", "Nh", "Nm", "Ns" that represents `d` exactly.
inline std::string format_duration(Seconds d) {
    const long s = d.count();
    if (s % 86400 == 0) return std::to_string(s / 86400) + "d";
    if (s % 3600 == 0) return std::to_string(s / 3600) + "h";
    if (s % 60 == 0) return std::to_string(s / 60) + "m";
    return std::to_string(s) + "s";
}

// ---------------------------------------------------------------------------
// Lexical lens

/// Admitted 1-grams mapped to the lexicon row that scores them. With hashtag
/// augmentation "#t" is admitted for every base 1-gram t and inherits t's row,
/// unless the lexicon already scores "#t" itself.
struct LexicalLens {
    std::unordered_map<std::string, std::size_t> admitted;
    bool hashtag_augmented = false;

    bool admits(std::string_view term) const { return admitted.count(std::string(term)) != 0; }
    std::optional<std::size_t> row(std::string_view term) const {
        auto it = admitted.find(std::string(term));
        if (it == admitted.end()) return std::nullopt;
        return it->second;
    }
};

inline LexicalLens build_lens(const DerivedLexicon& lexicon, bool augment_hashtags) {
    LexicalLens lens;
    lens.hashtag_augmented = augment_hashtags;
    for (std::size_t i = 0; i < lexicon.size(); ++i)
        if (lexicon.term(i).arity() == 1) lens.admitted.emplace(lexicon.term(i).text(), i);
    if (augment_hashtags) {
        for (std::size_t i = 0; i < lexicon.size(); ++i)
            if (lexicon.term(i).arity() == 1) lens.admitted.emplace("#" + lexicon.term(i).text(), i);
    }
    return lens;
}

// ---------------------------------------------------------------------------
// Bucket scoring

/// Average scores of one text in all nine columns; absent when nothing passes the lens.
struct BucketScores {
    std::optional<DerivedLexicon::Row> values;
    double coverage_tokens = 0.0;

    std::optional<Vec3> in(FrameworkTag tag) const {
        if (!values) return std::nullopt;
        const auto b = static_cast<std::size_t>(tag) * 3;
        return Vec3{(*values)[b], (*values)[b + 1], (*values)[b + 2]};
    }
};

/// Frequency-weighted mean of every score column over the lensed text.
inline BucketScores score_bucket_all(const ZipfDistribution& dist, const LexicalLens& lens, const DerivedLexicon& scores) {
    double kept = 0.0, total = 0.0;
    std::vector<std::pair<std::size_t, double>> hits;
    for (const auto& [term, c] : dist.counts) {
        total += c;
        if (c <= 0.0) continue;
        if (auto r = lens.row(term)) {
            hits.emplace_back(*r, c);
            kept += c;
        }
    }
    BucketScores out;
    if (hits.empty()) return out;
    out.coverage_tokens = kept / total;
    DerivedLexicon::Row avg{};
    for (const auto& [r, c] : hits) {
        const double p = c / kept;
        const auto& row = scores.row(r);
        for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += p * row[k];
    }
    out.values = avg;
    return out;
}

struct FrameworkScore {
    std::optional<Vec3> value;
    double coverage_tokens = 0.0;
};

inline FrameworkScore score_bucket(const ZipfDistribution& dist, const LexicalLens& lens, const DerivedLexicon& scores,
                                   FrameworkTag framework) {
    const auto all = score_bucket_all(dist, lens, scores);
    return {all.in(framework), all.coverage_tokens};
}

// ---------------------------------------------------------------------------
// Temporal corpora

struct TimeBucket {
    Timestamp time;
    ZipfDistribution dist;
};

struct TemporalCorpus {
    std::vector<TimeBucket> buckets;
    Seconds resolution = kBaseResolution;

    /// Timestamps must increase strictly and sit on the resolution grid.
    void validate() const {
        if (resolution.count() <= 0) throw InvalidArgument("resolution must be positive");
        for (std::size_t i = 0; i < buckets.size(); ++i) {
            const auto since_epoch = buckets[i].time.time_since_epoch().count();
            if (since_epoch % resolution.count() != 0)
                throw MisalignedSeries("bucket " + format_timestamp(buckets[i].time) + " is off the " +
                                       format_duration(resolution) + " grid");
            if (i > 0 && !(buckets[i - 1].time < buckets[i].time))
                throw MisalignedSeries("bucket timestamps must strictly increase at " + format_timestamp(buckets[i].time));
        }
    }
};

/// Reads a directory of per-bucket Zipf files named YYYY-MM-DDTHH-MM-SSZ.tsv.
/// Other files are ignored.
inline TemporalCorpus load_corpus_dir(const std::filesystem::path& dir, Seconds resolution = kBaseResolution) {
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<std::pair<Timestamp, std::filesystem::path>> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".tsv") continue;
        if (auto t = parse_timestamp(entry.path().stem().string())) files.emplace_back(*t, entry.path());
    }
    std::sort(files.begin(), files.end());
    TemporalCorpus corpus;
    corpus.resolution = resolution;
    for (const auto& [t, path] : files) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot read " + path.string());
        corpus.buckets.push_back({t, parse_zipf(in, format_timestamp(t))});
    }
    corpus.validate();
    return corpus;
}

/// Reads `timestamp TAB term TAB count` rows and groups them by timestamp.
inline TemporalCorpus load_corpus_tsv(std::istream& in, Seconds resolution = kBaseResolution) {
    std::map<Timestamp, ZipfDistribution> grouped;
    std::string line;
    std::size_t line_no = 0;
    while (text::get_line(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        auto fields = text::split(line, '\t');
        if (fields.size() != 3) throw MalformedRow(line_no, "expected timestamp, term, count");
        auto t = parse_timestamp(fields[0]);
        auto c = text::parse_double(fields[2]);
        if (!t || !c) {
            if (line_no == 1) continue;
            throw MalformedRow(line_no, !t ? "bad timestamp" : "non-numeric count");
        }
        if (*c < 0.0) throw MalformedRow(line_no, "negative count");
        auto& dist = grouped[*t];
        dist.label = format_timestamp(*t);
        dist.counts[text::to_lower(fields[1])] += *c;
    }
    TemporalCorpus corpus;
    corpus.resolution = resolution;
    for (auto& [t, dist] : grouped) corpus.buckets.push_back({t, std::move(dist)});
    corpus.validate();
    return corpus;
}

// ---------------------------------------------------------------------------
// Series

struct SeriesSample {
    Timestamp time;
    std::optional<double> value;
    double coverage_tokens = 0.0;
};

struct OusioSeries {
    Dimension dimension;
    std::string label; ///< empty for raw series; smoothing tag such as "1d" otherwise
    std::vector<SeriesSample> samples;

    std::string column() const {
        std::string name(dimension.name());
        return label.empty() ? name : name + "_" + label;
    }
};

/// One series per dimension of each requested framework, in framework then axis order.
inline std::vector<OusioSeries> series(const TemporalCorpus& corpus, const LexicalLens& lens, const DerivedLexicon& scores,
                                       std::span<const FrameworkTag> frameworks) {
    corpus.validate();
    std::vector<FrameworkTag> tags(frameworks.begin(), frameworks.end());
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());

    std::vector<OusioSeries> out;
    for (auto tag : tags)
        for (int axis = 0; axis < 3; ++axis) out.push_back({{tag, axis}, {}, {}});

    for (const auto& bucket : corpus.buckets) {
        const auto s = score_bucket_all(bucket.dist, lens, scores);
        for (auto& ser : out) {
            std::optional<double> v;
            if (s.values) v = (*s.values)[ser.dimension.column()];
            ser.samples.push_back({bucket.time, v, s.coverage_tokens});
        }
    }
    return out;
}

/// Centered moving average over samples within +/- window/2 of each timestamp.
/// Absent samples are skipped; a window with no present samples stays absent.
inline OusioSeries smooth(const OusioSeries& input, Seconds window, Seconds resolution) {
    if (window < resolution) throw WindowTooSmall(format_duration(window) + " is below the resolution " + format_duration(resolution));
    if (window.count() % resolution.count() != 0)
        throw InvalidArgument("window " + format_duration(window) + " is not a multiple of the resolution");

    OusioSeries out{input.dimension, format_duration(window), {}};
    out.samples.reserve(input.samples.size());
    const auto& in = input.samples;
    // Offsets are doubled so that half of an odd window length stays integral.
    const long long reach = window.count();
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const auto t = in[i].time;
        while (hi < in.size() && 2 * (in[hi].time - t).count() <= reach) ++hi;
        while (lo < hi && 2 * (t - in[lo].time).count() > reach) ++lo;
        double sum = 0.0;
        std::size_t present = 0;
        for (std::size_t k = lo; k < hi; ++k) {
            if (!in[k].value) continue;
            sum += *in[k].value;
            ++present;
        }
        std::optional<double> v;
        if (present > 0) v = sum / static_cast<double>(present);
        out.samples.push_back({t, v, in[i].coverage_tokens});
    }
    return out;
}

/// CSV with a timestamp column, the nine score columns, token coverage, and then one
/// column per labeled (smoothed) series. Columns without a series are left empty.
inline std::string export_csv(std::span<const OusioSeries> all) {
    if (all.empty()) throw MisalignedSeries("no series to export");
    const auto& ref = all.front().samples;
    std::array<const OusioSeries*, 9> raw{};
    std::vector<const OusioSeries*> extra;
    for (const auto& s : all) {
        if (s.samples.size() != ref.size()) throw MisalignedSeries("series " + s.column() + " has a different length");
        for (std::size_t i = 0; i < ref.size(); ++i)
            if (s.samples[i].time != ref[i].time) throw MisalignedSeries("series " + s.column() + " has different timestamps");
        if (s.label.empty()) {
            auto& slot = raw[s.dimension.column()];
            if (slot) throw MisalignedSeries("duplicate series " + s.column());
            slot = &s;
        } else {
            extra.push_back(&s);
        }
    }

    std::ostringstream out;
    out << "timestamp";
    for (auto name : kScoreColumns) out << ',' << name;
    out << ",coverage_tokens";
    for (const auto* s : extra) out << ',' << s->column();
    out << '\n';
    auto cell = [&](const std::optional<double>& v) {
        out << ',';
        if (v) out << text::fixed(*v, 6);
    };
    for (std::size_t i = 0; i < ref.size(); ++i) {
        out << format_timestamp(ref[i].time);
        for (const auto* s : raw) cell(s ? s->samples[i].value : std::nullopt);
        out << ',' << text::fixed(ref[i].coverage_tokens, 6);
        for (const auto* s : extra) cell(s->samples[i].value);
        out << '\n';
    }
    return out.str();
}

/// Parsed form of an exported CSV.
struct SeriesTable {
    std::vector<std::string> columns; ///< excluding the timestamp column
    std::vector<Timestamp> times;
    std::vector<std::vector<std::optional<double>>> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        return std::nullopt;
    }
};

inline SeriesTable parse_series_csv(std::istream& in) {
    SeriesTable table;
    std::string line;
    std::size_t line_no = 0;
    while (text::get_line(in, line)) {
        ++line_no;
        auto fields = text::split(line, ',');
        if (line_no == 1) {
            if (fields.empty() || fields[0] != "timestamp") throw MalformedRow(1, "missing timestamp header");
            for (std::size_t i = 1; i < fields.size(); ++i) table.columns.emplace_back(fields[i]);
            continue;
        }
        if (text::trim(line).empty()) continue;
        if (fields.size() != table.columns.size() + 1) throw MalformedRow(line_no, "wrong field count");
        auto t = parse_timestamp(fields[0]);
        if (!t) throw MalformedRow(line_no, "bad timestamp");
        table.times.push_back(*t);
        std::vector<std::optional<double>> row;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (fields[i].empty()) {
                row.emplace_back();
                continue;
            }
            auto v = text::parse_double(fields[i]);
            if (!v) throw MalformedRow(line_no, "non-numeric value");
            row.emplace_back(*v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace ousio
