#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include <ousio/ousio.hpp>

#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace ousio;
using namespace ousio::testing;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    out << body;
}

class Workspace {
public:
    Workspace() {
        dir_ = fs::temp_directory_path() / ("ousio_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Workspace() { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    Run run(const std::string& args) const {
        const auto out = dir_ / "stdout.txt";
        const auto err = dir_ / "stderr.txt";
        const std::string cmd = std::string("\"") + OUSIO_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                                err.string() + "\"";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    }

private:
    fs::path dir_;
    static inline int counter_ = 0;
};

/// Derived scores quantized through the 6-decimal TSV the tool reads and writes.
DerivedLexicon canonical(const DerivedLexicon& lex) {
    std::stringstream buffer;
    write_derived(buffer, lex);
    return read_derived(buffer);
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

/// Workspace holding a 2,000-term lexicon shaped like the published point cloud.
struct LexiconFixture {
    Workspace ws;
    RawLexicon raw = nrc_like_raw_lexicon(2000, 11);
    fs::path lexicon = ws.path("lexicon.txt");

    LexiconFixture() { spit(lexicon, lexicon_text(raw)); }
};

} // namespace

TEST_CASE("derive writes bases, scores, and a report") {
    LexiconFixture f;
    const auto cache = f.ws.path("cache");
    const auto r = f.ws.run("derive " + q(f.lexicon) + " -o " + q(cache));
    REQUIRE(r.code == 0);
    for (const char* name : {"ges_basis.json", "pds_basis.json", "scores.tsv", "report.txt"})
        CHECK(fs::exists(cache / name));
    CHECK(r.out == slurp(cache / "report.txt"));
    CHECK(r.out.find("r_VD = ") != std::string::npos);
    CHECK(r.out.find("GES explained variance") != std::string::npos);

    const auto p = run_pipeline(f.raw);
    const auto ges = basis_from_json(nlohmann::json::parse(slurp(cache / "ges_basis.json")));
    const auto pds = basis_from_json(nlohmann::json::parse(slurp(cache / "pds_basis.json")));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            CHECK(ges.matrix[i][j] == p.ges.matrix[i][j]);
            CHECK(pds.matrix[i][j] == p.pds.matrix[i][j]);
        }
    std::ostringstream expected;
    write_derived(expected, p.derived);
    CHECK(slurp(cache / "scores.tsv") == expected.str());
}

TEST_CASE("cached scores give the same output as in-process derivation") {
    LexiconFixture f;
    const auto cache = f.ws.path("cache");
    REQUIRE(f.ws.run("derive " + q(f.lexicon) + " -o " + q(cache)).code == 0);
    const auto scores = cache / "scores.tsv";
    spit(f.ws.path("zipf.tsv"), "w00001\t5\nw00002\t3\nw00017\t9\nhomicide\t2\nunmatched\t4\n");

    for (const std::string cmd : {std::string("scores w00003 success"), std::string("ousionyms w00010 7 syn"),
                                  std::string("ousionyms success 5 ant"),
                                  "corpus-bias " + q(f.ws.path("zipf.tsv")) + " --format table",
                                  std::string("ousiogram --plane power,danger")}) {
        const auto cached = f.ws.run(cmd + " --scores " + q(scores));
        const auto direct = f.ws.run(cmd + " --lexicon " + q(f.lexicon));
        INFO(cmd);
        CHECK(cached.code == 0);
        CHECK(direct.code == 0);
        CHECK(cached.out == direct.out);
    }

    // The config cache directory is picked up when no source is given.
    spit(f.ws.path("ousio.conf"), "# cache\nbasis_cache_path = " + cache.string() + "\n");
    const auto via_config = f.ws.run("--config " + q(f.ws.path("ousio.conf")) + " scores w00003");
    const auto direct = f.ws.run("scores w00003 --lexicon " + q(f.lexicon));
    CHECK(via_config.code == 0);
    CHECK(via_config.out == direct.out);
}

TEST_CASE("config lexicon path and defaults") {
    LexiconFixture f;
    spit(f.ws.path("ousio.conf"), "lexicon_path = " + f.lexicon.string() +
                                      "\ndefault_framework = vad\ndefault_bin_width = 1/10\n");
    const auto conf = "--config " + q(f.ws.path("ousio.conf"));
    const auto r = f.ws.run(conf + " ousionyms w00004 3");
    REQUIRE(r.code == 0);
    CHECK(r.out == f.ws.run("ousionyms w00004 3 --framework vad --lexicon " + q(f.lexicon)).out);

    spit(f.ws.path("zipf.tsv"), "w00001\t5\nw00002\t3\n");
    const auto bias = f.ws.run(conf + " corpus-bias " + q(f.ws.path("zipf.tsv")));
    REQUIRE(bias.code == 0);
    CHECK(nlohmann::json::parse(bias.out)["framework"] == "VAD");

    const auto gram = f.ws.run(conf + " ousiogram --plane valence,dominance");
    REQUIRE(gram.code == 0);
    CHECK(nlohmann::json::parse(gram.out)["histogram"]["bin_width"].get<double>() == Catch::Approx(0.1));

    spit(f.ws.path("bad.conf"), "colour = blue\n");
    const auto bad = f.ws.run("--config " + q(f.ws.path("bad.conf")) + " scores");
    CHECK(bad.code == 2);
    CHECK(bad.err.find("colour") != std::string::npos);
}

TEST_CASE("exit codes") {
    LexiconFixture f;
    const auto lex = " --lexicon " + q(f.lexicon);

    SECTION("missing file is an I/O error naming the path") {
        const auto missing = f.ws.path("no_such_lexicon.txt");
        const auto r = f.ws.run("derive " + q(missing) + " -o " + q(f.ws.path("c")));
        CHECK(r.code == 2);
        CHECK(r.err.find(missing.string()) != std::string::npos);
        CHECK(f.ws.run("scores --scores " + q(missing)).code == 2);
    }
    SECTION("malformed lexicon row") {
        spit(f.ws.path("bad.txt"), "good\t0.1\t0.2\t0.3\nbad\t0.1\t0.2\n");
        CHECK(f.ws.run("derive " + q(f.ws.path("bad.txt")) + " -o " + q(f.ws.path("c"))).code == 2);
    }
    SECTION("score out of range") {
        spit(f.ws.path("bad.txt"), "a\t0.1\t0.2\t1.3\nb\t0.2\t0.3\t0.4\n");
        CHECK(f.ws.run("derive " + q(f.ws.path("bad.txt")) + " -o " + q(f.ws.path("c"))).code == 2);
    }
    SECTION("degenerate lexicon is a numeric error") {
        spit(f.ws.path("flat.txt"), "a\t0.5\t0.2\t0.3\nb\t0.5\t0.3\t0.4\nc\t0.5\t0.1\t0.9\n");
        CHECK(f.ws.run("derive " + q(f.ws.path("flat.txt")) + " -o " + q(f.ws.path("c"))).code == 3);
    }
    SECTION("unknown term is a lookup error") {
        CHECK(f.ws.run("ousionyms notaword 5" + lex).code == 4);
        CHECK(f.ws.run("scores notaword" + lex).code == 4);
    }
    SECTION("corpus with no lexicon overlap is a lookup error") {
        spit(f.ws.path("z.tsv"), "zzz\t4\nyyy\t2\n");
        CHECK(f.ws.run("corpus-bias " + q(f.ws.path("z.tsv")) + lex).code == 4);
    }
    SECTION("usage errors") {
        CHECK(f.ws.run("ousiogram --plane power" + lex).code == 1);
        CHECK(f.ws.run("ousiogram --plane power,sparkle" + lex).code == 1);
        CHECK(f.ws.run("").code != 0);
    }
}

TEST_CASE("outputs are deterministic") {
    LexiconFixture f;
    const auto lex = " --lexicon " + q(f.lexicon);
    std::ostringstream corpus;
    Rng rng(5);
    for (int b = 0; b < 12; ++b)
        for (int k = 0; k < 20; ++k)
            corpus << format_timestamp(Timestamp(Seconds(1577836800 + b * 900))) << "\t" << word(rng.index(2000)) << "\t"
                   << 1 + rng.index(9) << "\n";
    spit(f.ws.path("corpus.tsv"), corpus.str());

    for (const std::string cmd :
         {std::string("ousiogram --plane power,danger --svg -"), std::string("ousiogram --plane goodness,energy"),
          "series " + q(f.ws.path("corpus.tsv")) + " --smooth 1h", std::string("ousionyms w00042 20 ant")}) {
        const auto a = f.ws.run(cmd + lex);
        const auto b = f.ws.run(cmd + lex);
        INFO(cmd);
        CHECK(a.code == 0);
        CHECK(!a.out.empty());
        CHECK(a.out == b.out);
    }
}

TEST_CASE("ousionyms output matches the library") {
    LexiconFixture f;
    const auto lex = canonical(run_pipeline(f.raw).derived);
    const auto r = f.ws.run("ousionyms success 6 ant --lexicon " + q(f.lexicon));
    REQUIRE(r.code == 0);
    std::ostringstream expected;
    write_neighbors(expected, lex, antousionyms(lex, "success", 6, FrameworkTag::pds));
    CHECK(r.out == expected.str());
    CHECK(r.out.rfind("# success\t", 0) == 0);
    CHECK(r.out.find("\nrank\tterm\tdistance\n") != std::string::npos);
}

TEST_CASE("ousiogram writes SVG and JSON") {
    LexiconFixture f;
    const auto svg = f.ws.path("g.svg");
    const auto json = f.ws.path("g.json");
    const auto r = f.ws.run("ousiogram --plane power,danger --svg " + q(svg) + " --json " + q(json) +
                            " --lexicon " + q(f.lexicon));
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto body = slurp(svg);
    CHECK(body.find("<svg") != std::string::npos);
    CHECK(body.find("</svg>") != std::string::npos);
    const auto spec = parse_ousiogram_json(slurp(json));
    const auto expected = build_ousiogram(canonical(run_pipeline(f.raw).derived), parse_dimension("power"), parse_dimension("danger"));
    CHECK(render_json(spec) == render_json(expected));
}

TEST_CASE("token-weighted ousiogram uses the merged Zipf distribution") {
    LexiconFixture f;
    spit(f.ws.path("a.tsv"), "w00001\t5\nw00002\t3\n");
    spit(f.ws.path("b.tsv"), "w00002\t1\nw00003\t7\n");
    const auto r = f.ws.run("ousiogram --plane power,danger --no-annotations --zipf " + q(f.ws.path("a.tsv")) + " " +
                            q(f.ws.path("b.tsv")) + " --lexicon " + q(f.lexicon));
    REQUIRE(r.code == 0);
    const auto spec = parse_ousiogram_json(r.out);
    CHECK(spec.histogram.total() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("corpus-bias matches the library report") {
    LexiconFixture f;
    spit(f.ws.path("a.tsv"), "term\tcount\nw00001\t5\nw00002\t3\nfoo\t9\n");
    spit(f.ws.path("b.tsv"), "w00003\t2\nw00002\t1\n");
    const auto p = run_pipeline(f.raw);

    const auto lex = canonical(p.derived);
    std::ifstream ia(f.ws.path("a.tsv")), ib(f.ws.path("b.tsv"));
    std::vector<ZipfDistribution> slices{parse_zipf(ia, "a"), parse_zipf(ib, "b")};

    SECTION("equal-weight merge, JSON") {
        const auto r = f.ws.run("corpus-bias " + q(f.ws.path("a.tsv")) + " " + q(f.ws.path("b.tsv")) +
                                " --lexicon " + q(f.lexicon));
        REQUIRE(r.code == 0);
        const auto expected = bias_report(apply_lens(merge_equal_weight(slices), lex), lex, FrameworkTag::pds);
        CHECK(nlohmann::json::parse(r.out) == to_json(expected));
    }
    SECTION("raw-sum merge, table") {
        const auto r = f.ws.run("corpus-bias " + q(f.ws.path("a.tsv")) + " " + q(f.ws.path("b.tsv")) +
                                " --merge sum --format table --framework ges --lexicon " + q(f.lexicon));
        REQUIRE(r.code == 0);
        const auto expected = bias_report(apply_lens(merge_raw_sum(slices), lex), lex, FrameworkTag::ges);
        CHECK(r.out == format_table(expected));
    }
    SECTION("raw text input") {
        spit(f.ws.path("t.txt"), "W00001 w00002, w00002! unknown");
        const auto r = f.ws.run("corpus-bias --text " + q(f.ws.path("t.txt")) + " --lexicon " + q(f.lexicon));
        REQUIRE(r.code == 0);
        CHECK(nlohmann::json::parse(r.out)["coverage_tokens"].get<double>() == Catch::Approx(0.75));
    }
}

TEST_CASE("series writes raw and smoothed columns") {
    LexiconFixture f;
    const auto dir = f.ws.path("corpus");
    fs::create_directories(dir);
    for (int b = 0; b < 8; ++b) {
        if (b == 5) continue;
        spit(dir / (format_timestamp(Timestamp(Seconds(1577836800 + b * 900))) + ".tsv"),
             word(b) + "\t3\n" + word(b + 100) + "\t1\n");
    }
    const auto out = f.ws.path("series.csv");
    const auto r = f.ws.run("series " + q(dir) + " --frameworks pds --smooth 45m -o " + q(out) + " --lexicon " +
                            q(f.lexicon));
    REQUIRE(r.code == 0);
    const auto csv = slurp(out);
    const auto header = csv.substr(0, csv.find('\n'));
    CHECK(header.find("power,danger,structure_pds") != std::string::npos);
    CHECK(header.find("power_45m") != std::string::npos);

    const auto p = run_pipeline(f.raw);
    auto corpus = load_corpus_dir(dir);
    const std::array fws{FrameworkTag::pds};
    const auto lex = canonical(p.derived);
    auto all = series(corpus, build_lens(lex, false), lex, fws);
    const std::size_t n = all.size();
    for (std::size_t i = 0; i < n; ++i) all.push_back(smooth(all[i], parse_duration("45m"), corpus.resolution));
    CHECK(csv == export_csv(all));
}
