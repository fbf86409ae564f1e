// Command-line front end: derive, scores, ousionyms, ousiogram, corpus-bias, series.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <ousio/ousio.hpp>

namespace fs = std::filesystem;
using namespace ousio;

namespace {

constexpr const char* kDefaultCacheDir = "ousio_cache";

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return in;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << body) || !out.flush()) throw IoError("cannot write '" + path.string() + "'");
}

/// Writes to `path`, or to standard output when `path` is empty or "-".
void emit(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") std::cout << body;
    else write_file(path, body);
}

std::string basis_json(const FrameworkBasis& b) { return to_json(b).dump(2) + "\n"; }

struct Derivation {
    CenteredLexicon lexicon;
    FrameworkBasis ges;
    FrameworkBasis pds;
    DerivedLexicon derived;
};

Derivation derive_from(const std::string& lexicon_path) {
    auto in = open_input(lexicon_path);
    Derivation d;
    d.lexicon = center(parse_lexicon(in));
    d.ges = derive_ges(d.lexicon);
    d.pds = rotate_to_pds(d.ges);
    d.derived = score_lexicon(d.lexicon, d.ges, d.pds);
    return d;
}

std::string vec(const Vec3& v, int decimals, double scale = 1.0) {
    return "(" + text::fixed(v[0] * scale, decimals) + ", " + text::fixed(v[1] * scale, decimals) + ", " +
           text::fixed(v[2] * scale, decimals) + ")";
}

std::string matrix_lines(const Mat3& m) {
    std::string out;
    for (const auto& row : m) out += "  [" + text::fixed(row[0], 4) + ", " + text::fixed(row[1], 4) + ", " + text::fixed(row[2], 4) + "]\n";
    return out;
}

std::string report(const Derivation& d) {
    const auto r = correlations(d.lexicon);
    const auto shares = vad_variance_shares(d.lexicon);
    std::ostringstream out;
    out << "terms: " << d.lexicon.size() << "\n"
        << "correlations (VAD, about empirical means):\n"
        << "  r_VA = " << text::fixed(r.r_va, 2) << "  (" << text::fixed(r.r_va, 6) << ")\n"
        << "  r_AD = " << text::fixed(r.r_ad, 2) << "  (" << text::fixed(r.r_ad, 6) << ")\n"
        << "  r_VD = " << text::fixed(r.r_vd, 2) << "  (" << text::fixed(r.r_vd, 6) << ")\n"
        << "VAD variance shares (%): " << vec(shares, 1, 100.0) << "\n"
        << "singular values: " << vec(d.ges.singular_values, 3) << "\n"
        << "GES explained variance (%): " << vec(d.ges.explained_variance, 1, 100.0) << "\n"
        << "VAD -> GES:\n" << matrix_lines(d.ges.matrix)
        << "VAD -> PDS:\n" << matrix_lines(d.pds.matrix)
        << "PDS explained variance (%): " << vec(d.pds.explained_variance, 1, 100.0) << "\n";
    return out.str();
}

/// Scores as they read back from the cached TSV, so every source gives the same output.
DerivedLexicon canonical(const DerivedLexicon& lex) {
    std::stringstream buffer;
    write_derived(buffer, lex);
    return read_derived(buffer);
}

/// Where derived scores come from, in order of preference: --scores, --lexicon,
/// the configured cache directory, the configured lexicon.
struct ScoreSource {
    std::string scores_path;
    std::string lexicon_path;

    DerivedLexicon load(const Config& config) const {
        if (!scores_path.empty()) {
            auto in = open_input(scores_path);
            return read_derived(in);
        }
        if (!lexicon_path.empty()) return canonical(derive_from(lexicon_path).derived);
        if (config.basis_cache_path) {
            const auto cached = fs::path(*config.basis_cache_path) / "scores.tsv";
            if (fs::exists(cached)) {
                auto in = open_input(cached.string());
                return read_derived(in);
            }
        }
        if (!config.lexicon_path.empty()) return canonical(derive_from(config.lexicon_path).derived);
        throw IoError("no scores available: pass --scores or --lexicon, or set basis_cache_path or lexicon_path in the config");
    }

    void add_options(CLI::App* cmd) {
        cmd->add_option("--scores", scores_path, "Derived scores TSV written by `derive`");
        cmd->add_option("--lexicon", lexicon_path, "VAD lexicon to derive scores from in-process");
    }
};

ZipfDistribution load_distribution(const std::string& path, bool raw_text) {
    auto in = open_input(path);
    const std::string label = fs::path(path).stem().string();
    return raw_text ? tokenize(in, label) : parse_zipf(in, label);
}

ZipfDistribution load_merged(const std::vector<std::string>& paths, const std::string& mode, bool raw_text) {
    std::vector<ZipfDistribution> slices;
    for (const auto& p : paths) slices.push_back(load_distribution(p, raw_text));
    if (slices.size() == 1) return slices.front();
    if (mode == "sum") return merge_raw_sum(slices);
    return merge_equal_weight(slices);
}

std::pair<Dimension, Dimension> parse_plane(const std::string& plane, FrameworkTag prefer) {
    const auto comma = plane.find(',');
    if (comma == std::string::npos) throw InvalidArgument("--plane expects two dimensions separated by a comma");
    return {parse_dimension(plane.substr(0, comma), prefer), parse_dimension(plane.substr(comma + 1), prefer)};
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::io: return 2;
    case ErrorKind::numeric: return 3;
    case ErrorKind::lookup: return 4;
    case ErrorKind::usage: return 1;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ousiometrics: essential-meaning scores, ousionyms, ousiograms, and ousiometer time series"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Config file of `key = value` lines");

    // derive
    auto* derive = app.add_subcommand("derive", "Derive GES/PDS bases and per-term scores from a VAD lexicon");
    std::string derive_lexicon, derive_out;
    derive->add_option("lexicon", derive_lexicon, "VAD lexicon TSV (term, valence, arousal, dominance)");
    derive->add_option("-o,--out", derive_out, "Output directory (default: config basis_cache_path or ousio_cache)");

    // scores
    auto* scores = app.add_subcommand("scores", "Print derived scores for all or selected terms");
    ScoreSource scores_src;
    std::vector<std::string> score_terms;
    scores_src.add_options(scores);
    scores->add_option("terms", score_terms, "Terms to print (default: all)");

    // ousionyms
    auto* onyms = app.add_subcommand("ousionyms", "Nearest terms to a word (syn) or to its negation (ant)");
    ScoreSource onyms_src;
    std::string onym_term, onym_direction = "syn", onym_framework;
    std::size_t onym_k = 10;
    onyms_src.add_options(onyms);
    onyms->add_option("term", onym_term, "Query term")->required();
    onyms->add_option("k", onym_k, "Number of neighbors")->check(CLI::PositiveNumber);
    onyms->add_option("direction", onym_direction, "syn or ant")->check(CLI::IsMember({"syn", "ant"}));
    onyms->add_option("--framework", onym_framework, "Coordinates to search in (distances are identical in all)");

    // ousiogram
    auto* gram = app.add_subcommand("ousiogram", "Annotated 2D histogram of two score dimensions");
    ScoreSource gram_src;
    std::string plane = "power,danger", svg_path, json_path, gram_merge = "equal";
    std::vector<std::string> gram_zipf;
    double bin_width = 0.0, hull_spacing = 0.1;
    std::size_t per_ray = 3;
    bool no_annotations = false, gram_text = false;
    gram_src.add_options(gram);
    gram->add_option("--plane", plane, "Two dimensions, x then y (e.g. power,danger or valence,dominance)");
    gram->add_option("--svg", svg_path, "Write SVG here");
    gram->add_option("--json", json_path, "Write JSON here (default: standard output when no --svg)");
    gram->add_option("--zipf", gram_zipf, "Weight terms by these Zipf distributions (token-weighted mode)");
    gram->add_option("--merge", gram_merge, "How to combine several --zipf files")->check(CLI::IsMember({"equal", "sum"}));
    gram->add_flag("--text", gram_text, "Treat --zipf inputs as raw text and tokenize them");
    gram->add_option("--bin-width", bin_width, "Histogram bin width (default: config or 1/30)");
    gram->add_option("--hull-spacing", hull_spacing, "Arc length between boundary labels");
    gram->add_option("--per-ray", per_ray, "Internal labels per direction")->check(CLI::PositiveNumber);
    gram->add_flag("--no-annotations", no_annotations, "Skip word annotations");

    // corpus-bias
    auto* bias = app.add_subcommand("corpus-bias", "Token-weighted scores and sign split of a corpus");
    ScoreSource bias_src;
    std::vector<std::string> bias_files;
    std::string bias_merge = "equal", bias_framework, bias_format = "json";
    bool bias_text = false;
    bias_src.add_options(bias);
    bias->add_option("files", bias_files, "Zipf TSV files (or raw text with --text)")->required();
    bias->add_option("--merge", bias_merge, "equal: each file weighted equally; sum: counts added")
        ->check(CLI::IsMember({"equal", "sum"}));
    bias->add_option("--framework", bias_framework, "vad, ges, or pds (default: config or pds)");
    bias->add_option("--format", bias_format, "json or table")->check(CLI::IsMember({"json", "table"}));
    bias->add_flag("--text", bias_text, "Treat inputs as raw text and tokenize them");

    // series
    auto* ser = app.add_subcommand("series", "Ousiometer time series of a temporal corpus as CSV");
    ScoreSource ser_src;
    std::string corpus_path, resolution = "15m", ser_out, ser_frameworks = "vad,ges,pds";
    std::vector<std::string> windows;
    bool hashtags = false;
    ser_src.add_options(ser);
    ser->add_option("corpus", corpus_path, "Directory of YYYY-MM-DDTHH-MM-SSZ.tsv files, or one timestamp/term/count TSV")
        ->required();
    ser->add_option("--resolution", resolution, "Bucket resolution (e.g. 15m)");
    ser->add_option("--smooth", windows, "Add centered moving averages with this window (repeatable, e.g. 1h 1d)");
    ser->add_option("--frameworks", ser_frameworks, "Comma-separated frameworks to compute");
    ser->add_flag("--hashtags", hashtags, "Also admit #term for every 1-gram term");
    ser->add_option("-o,--out", ser_out, "Write CSV here (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        Config config;
        if (!config_path.empty()) {
            auto in = open_input(config_path);
            config = parse_config(in);
        }

        if (*derive) {
            const std::string lexicon = derive_lexicon.empty() ? config.lexicon_path : derive_lexicon;
            if (lexicon.empty()) throw InvalidArgument("derive needs a lexicon path");
            const auto d = derive_from(lexicon);
            const fs::path dir = !derive_out.empty() ? fs::path(derive_out)
                                 : config.basis_cache_path ? fs::path(*config.basis_cache_path)
                                                           : fs::path(kDefaultCacheDir);
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
            write_file(dir / "ges_basis.json", basis_json(d.ges));
            write_file(dir / "pds_basis.json", basis_json(d.pds));
            std::ostringstream tsv;
            write_derived(tsv, d.derived);
            write_file(dir / "scores.tsv", tsv.str());
            const auto text = report(d);
            write_file(dir / "report.txt", text);
            std::cout << text;
        } else if (*scores) {
            const auto lex = scores_src.load(config);
            if (score_terms.empty()) {
                write_derived(std::cout, lex);
            } else {
                std::vector<Term> terms;
                std::vector<DerivedLexicon::Row> rows;
                for (const auto& t : score_terms) {
                    auto i = lex.lookup(t);
                    if (!i) throw UnknownTerm(t);
                    terms.push_back(lex.term(*i));
                    rows.push_back(lex.row(*i));
                }
                write_derived(std::cout, DerivedLexicon(std::move(terms), std::move(rows)));
            }
        } else if (*onyms) {
            const auto lex = onyms_src.load(config);
            const auto fw = onym_framework.empty() ? config.default_framework : parse_framework(onym_framework);
            const auto list = onym_direction == "ant" ? antousionyms(lex, onym_term, onym_k, fw)
                                                      : synousionyms(lex, onym_term, onym_k, fw);
            write_neighbors(std::cout, lex, list);
        } else if (*gram) {
            const auto lex = gram_src.load(config);
            const auto [x, y] = parse_plane(plane, config.default_framework);
            std::vector<double> weights;
            if (!gram_zipf.empty()) {
                const auto lensed = apply_lens(load_merged(gram_zipf, gram_merge, gram_text), lex);
                weights.assign(lex.size(), 0.0);
                for (const auto& [term, p] : lensed.matched) weights[*lex.lookup(term)] = p;
            }
            OusiogramOptions opts;
            opts.bin_width = bin_width > 0.0 ? bin_width : config.default_bin_width;
            opts.hull_spacing = hull_spacing;
            opts.n_per_ray = per_ray;
            opts.annotate = !no_annotations;
            const auto spec = build_ousiogram(lex, x, y, weights, opts);
            if (!svg_path.empty()) emit(svg_path, render(spec, RenderFormat::svg));
            if (!json_path.empty() || svg_path.empty()) emit(json_path, render(spec, RenderFormat::json));
        } else if (*bias) {
            const auto lex = bias_src.load(config);
            const auto fw = bias_framework.empty() ? config.default_framework : parse_framework(bias_framework);
            auto dist = load_merged(bias_files, bias_merge, bias_text);
            const auto r = bias_report(apply_lens(dist, lex), lex, fw);
            if (bias_format == "table") std::cout << format_table(r);
            else std::cout << to_json(r).dump(2) << "\n";
        } else if (*ser) {
            const auto lex = ser_src.load(config);
            const auto res = parse_duration(resolution);
            TemporalCorpus corpus;
            if (fs::is_directory(corpus_path)) {
                corpus = load_corpus_dir(corpus_path, res);
            } else {
                auto in = open_input(corpus_path);
                corpus = load_corpus_tsv(in, res);
            }
            std::vector<FrameworkTag> fws;
            for (auto name : text::split(ser_frameworks, ',')) fws.push_back(parse_framework(text::trim(name)));
            const auto lens = build_lens(lex, hashtags);
            auto all = series(corpus, lens, lex, fws);
            const std::size_t raw_count = all.size();
            for (const auto& w : windows) {
                const auto window = parse_duration(w);
                for (std::size_t i = 0; i < raw_count; ++i) all.push_back(smooth(all[i], window, res));
            }
            emit(ser_out, export_csv(all));
        }
    } catch (const Error& e) {
        std::cerr << "ousio: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "ousio: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
