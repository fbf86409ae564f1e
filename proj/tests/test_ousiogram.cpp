#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <catch_amalgamated.hpp>

#include "support/synthetic.hpp"

using namespace ousio;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kW = 1.0 / 30.0;

std::vector<WeightedPoint> random_points(std::size_t n, std::uint64_t seed, bool random_weights = true) {
    testing::Rng rng(seed);
    std::vector<WeightedPoint> pts;
    for (std::size_t i = 0; i < n; ++i)
        pts.push_back({rng.uniform(-0.7, 0.8), rng.uniform(-0.6, 0.7), random_weights ? rng.uniform(0, 3) : 1.0});
    return pts;
}

std::vector<LabeledPoint> labeled(const std::vector<WeightedPoint>& pts) {
    std::vector<LabeledPoint> out;
    for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({testing::word(i), {pts[i].x, pts[i].y}});
    return out;
}

} // namespace

TEST_CASE("histogram binning follows the zero-anchored half-open lattice") {
    std::vector<WeightedPoint> two{{0.01, 0.01, 1}, {0.02, 0.02, 1}};
    auto h = build_histogram(two, kW);
    CHECK(h.nx == 1);
    CHECK(h.ny == 1);
    CHECK(h.first_x == 0);
    CHECK(h.first_y == 0);
    CHECK(h.at(0, 0) == 2.0);

    std::vector<WeightedPoint> edge{{1.0 / 30.0, 0.0, 1}};
    auto e = build_histogram(edge, kW);
    CHECK(e.first_x == 1);
    CHECK(e.first_y == 0);

    std::vector<WeightedPoint> neg{{-0.001, -0.0, 1}, {-1.0 / 30.0, 0.5, 2}};
    auto n = build_histogram(neg, kW);
    CHECK(n.first_x == -1);
    CHECK(n.lattice_index(-0.001) == -1);
    CHECK(n.mass_at(-0.001, 0.0) == 1.0);
    CHECK(n.mass_at(-1.0 / 30.0, 0.5) == 2.0);
    CHECK(n.mass_at(5.0, 5.0) == 0.0);
    CHECK(n.origin().x == -kW);

    std::vector<WeightedPoint> none;
    CHECK_THROWS_AS(build_histogram(none, kW), EmptyInput);
    CHECK_THROWS_AS(build_histogram(two, 0.0), InvalidArgument);
    std::vector<WeightedPoint> bad{{0, 0, -1}};
    CHECK_THROWS_AS(build_histogram(bad, kW), InvalidArgument);
}

TEST_CASE("histogram mass is conserved and grids cover every point") {
    for (double w : {kW, 0.05, 0.013, 0.25}) {
        auto pts = random_points(5000, 3);
        double total = 0;
        for (const auto& p : pts) total += p.weight;
        auto h = build_histogram(pts, w);
        CHECK_THAT(h.total(), WithinAbs(total, 1e-9));
        for (const auto& p : pts) {
            const long i = h.lattice_index(p.x) - h.first_x, j = h.lattice_index(p.y) - h.first_y;
            CHECK(i >= 0);
            CHECK(j >= 0);
            CHECK(i < long(h.nx));
            CHECK(j < long(h.ny));
            const Point2 o = h.origin();
            CHECK(p.x >= o.x - 1e-12);
            CHECK(p.x < o.x + double(h.nx) * w + 1e-12);
        }
        // Partitioned accumulation merges back to the same grid.
        std::span<const WeightedPoint> all(pts);
        auto merged = merge(build_histogram(all.first(1234), w), build_histogram(all.subspan(1234), w));
        REQUIRE(merged.nx == h.nx);
        REQUIRE(merged.ny == h.ny);
        for (std::size_t k = 0; k < h.counts.size(); ++k) CHECK_THAT(merged.counts[k], WithinAbs(h.counts[k], 1e-9));
    }
}

TEST_CASE("marginal statistics") {
    std::vector<WeightedPoint> three{{0, 0, 1}, {1, 0, 1}, {2, 0, 1}};
    auto m = marginal(three, 0, 1.0, "x");
    CHECK(m.median == 1.0);
    CHECK_THAT(m.weighted_mean, WithinAbs(1.0, 1e-15));
    CHECK_THAT(m.weighted_std, WithinAbs(std::sqrt(2.0 / 3.0), 1e-15));
    CHECK(m.min == 0.0);
    CHECK(m.max == 2.0);
    REQUIRE(m.bins.size() == 3);
    CHECK(m.bins[1].center == 1.5);
    CHECK(m.bins[1].mass == 1.0);

    std::vector<WeightedPoint> none;
    CHECK_THROWS_AS(marginal(none, 0, kW), EmptyInput);

    // Smallest value at which the cumulative weight reaches half.
    std::vector<double> v{3, 1, 2, 4}, w{1, 1, 1, 1};
    CHECK(stats::weighted_median(v, w) == 2.0);
    std::vector<double> w2{0, 5, 1, 4};
    CHECK(stats::weighted_median(v, w2) == 1.0);
}

TEST_CASE("median is invariant under positive rescaling of the weights") {
    auto pts = random_points(777, 9);
    std::vector<double> v, w;
    for (const auto& p : pts) {
        v.push_back(p.y);
        w.push_back(p.weight);
    }
    const double base = stats::weighted_median(v, w);
    for (double scale : {1e-9, 0.1, 3.0, 7.77, 1e6, 1e12}) {
        std::vector<double> ws;
        for (double x : w) ws.push_back(x * scale);
        CHECK(stats::weighted_median(v, ws) == base);
    }
    // Equal integer weights: rescaling never moves an exact half boundary.
    std::vector<double> ev(100), ew(100, 1.0);
    for (int i = 0; i < 100; ++i) ev[i] = i;
    for (double scale : {0.1, 0.3, 1.0 / 3.0, 7.0}) {
        std::vector<double> ws(100, scale);
        CHECK(stats::weighted_median(ev, ws) == stats::weighted_median(ev, ew));
    }
}

TEST_CASE("svd ellipse") {
    SECTION("points on y = x") {
        std::vector<WeightedPoint> line{{0.1, 0.1, 1}, {-0.3, -0.3, 1}, {0.2, 0.2, 2}};
        auto e = svd_ellipse(line);
        CHECK_THAT(e.angle, WithinAbs(std::numbers::pi / 4, 1e-6));
        CHECK(e.semi_minor < 1e-9);
        CHECK(e.center == Point2{0, 0});
    }
    SECTION("isotropic cloud") {
        testing::Rng rng(5);
        std::vector<WeightedPoint> cloud;
        for (int i = 0; i < 20000; ++i) cloud.push_back({0.2 * rng.normal(), 0.2 * rng.normal(), 1});
        auto e = svd_ellipse(cloud);
        CHECK_THAT(e.semi_minor, WithinRel(e.semi_major, 0.02));
    }
    SECTION("matches a closed-form 2x2 eigendecomposition") {
        auto pts = random_points(300, 12);
        double a = 0, b = 0, c = 0, t = 0;
        for (const auto& p : pts) {
            a += p.weight * p.x * p.x;
            b += p.weight * p.x * p.y;
            c += p.weight * p.y * p.y;
            t += p.weight;
        }
        a /= t, b /= t, c /= t;
        const double tr = a + c, det = a * c - b * b;
        const double l1 = tr / 2 + std::sqrt(tr * tr / 4 - det), l2 = tr / 2 - std::sqrt(tr * tr / 4 - det);
        auto e = svd_ellipse(pts);
        CHECK_THAT(e.semi_major, WithinAbs(std::sqrt(l1), 1e-12));
        CHECK_THAT(e.semi_minor, WithinAbs(std::sqrt(l2), 1e-12));
        // The major direction is an eigenvector for l1.
        const double ux = std::cos(e.angle), uy = std::sin(e.angle);
        CHECK_THAT(a * ux + b * uy, WithinAbs(l1 * ux, 1e-12));
        CHECK_THAT(b * ux + c * uy, WithinAbs(l1 * uy, 1e-12));
        CHECK(e.angle >= 0.0);
        CHECK(e.angle < std::numbers::pi);
        CHECK(e.semi_major >= e.semi_minor);
    }
    SECTION("degenerate input") {
        std::vector<WeightedPoint> same{{0.1, 0.1, 1}, {0.1, 0.1, 1}};
        CHECK_THROWS_AS(svd_ellipse(same), Degenerate);
        std::vector<WeightedPoint> origin{{0, 0, 1}, {0, 0, 2}};
        CHECK_THROWS_AS(svd_ellipse(origin), Degenerate);
    }
}

TEST_CASE("convex hull") {
    std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}};
    auto ring = geometry::convex_hull(pts);
    CHECK(ring == std::vector<std::size_t>{0, 1, 2, 3});
    std::vector<Point2> line{{0, 0}, {1, 1}, {2, 2}};
    CHECK(geometry::convex_hull(line).size() == 2);

    testing::Rng rng(8);
    std::vector<Point2> cloud;
    for (int i = 0; i < 300; ++i) cloud.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    auto hull = geometry::convex_hull(cloud);
    // Every point lies on the inner side of every edge.
    for (std::size_t k = 0; k < hull.size(); ++k) {
        const auto& a = cloud[hull[k]];
        const auto& b = cloud[hull[(k + 1) % hull.size()]];
        for (const auto& p : cloud) CHECK(geometry::cross(a, b, p) >= -1e-12);
    }
}

TEST_CASE("hull annotations on a square") {
    std::vector<LabeledPoint> sq{{"a", {0, 0}}, {"b", {1, 0}}, {"c", {1, 1}}, {"d", {0, 1}}};
    auto ann = hull_annotations(sq, HullOptions{1.0});
    REQUIRE(ann.size() == 4);
    std::set<std::string> used;
    for (const auto& a : ann) {
        used.insert(a.term);
        CHECK_THAT(std::hypot(a.normal.x, a.normal.y), WithinAbs(1.0, 1e-15));
        // The term is one of the two corners of the annotated side.
        CHECK_THAT(geometry::dot(a.position, a.normal), WithinAbs(std::max(0.0, a.normal.x + a.normal.y), 1e-15));
    }
    CHECK(used == std::set<std::string>{"a", "b", "c", "d"});

    std::vector<LabeledPoint> collinear{{"a", {0, 0}}, {"b", {1, 1}}, {"c", {2, 2}}};
    CHECK_THROWS_AS(hull_annotations(collinear, HullOptions{}), Degenerate);
}

TEST_CASE("hull annotations are extreme along their normals") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        auto pts = labeled(random_points(20, seed));
        auto ann = hull_annotations(pts, HullOptions{0.2});
        std::set<std::string> used;
        for (const auto& a : ann) {
            CHECK(used.insert(a.term).second);
            // Exhaustive oracle over the terms not chosen earlier.
            std::string best;
            double best_score = -INFINITY;
            for (const auto& p : pts) {
                if (used.count(p.term) && p.term != a.term) continue;
                const double s = p.position.x * a.normal.x + p.position.y * a.normal.y;
                if (s > best_score || (s == best_score && p.term < best)) {
                    best = p.term;
                    best_score = s;
                }
            }
            CHECK(a.term == best);
        }
    }
}

TEST_CASE("boundary-band restricts hull annotations to terms near the hull") {
    auto pts = labeled(random_points(2000, 17));
    std::vector<Point2> xy;
    for (const auto& p : pts) xy.push_back(p.position);
    auto ring = geometry::convex_hull(xy);
    auto ann = hull_annotations(pts, HullOptions{0.05, kW});
    CHECK(ann.size() > 20);
    for (const auto& a : ann) CHECK(geometry::distance_to_boundary(a.position, xy, ring) <= kW);
}

TEST_CASE("axis annotations") {
    SECTION("one point per direction") {
        std::vector<LabeledPoint> star;
        for (int d = 0; d < 8; ++d) {
            auto u = ray_direction(d);
            star.push_back({"t" + std::to_string(d), {0.5 * u.x, 0.5 * u.y}});
        }
        auto ann = axis_annotations(star, 1);
        REQUIRE(ann.size() == 8);
        for (const auto& a : ann) CHECK(a.term == "t" + std::to_string(a.direction));
        CHECK(ray_direction(2) == Point2{0, 1});
        CHECK_THROWS_AS(axis_annotations(star, 0), InvalidArgument);
    }
    SECTION("matches a nearest-unused oracle") {
        auto pts = labeled(random_points(400, 23));
        auto ann = axis_annotations(pts, 3);
        CHECK(ann.size() == 24);
        std::set<std::string> used;
        for (const auto& a : ann) {
            std::string best;
            double best_d = INFINITY;
            for (const auto& p : pts) {
                if (used.count(p.term)) continue;
                const double d = std::pow(p.position.x - a.anchor.x, 2) + std::pow(p.position.y - a.anchor.y, 2);
                if (d < best_d || (d == best_d && p.term < best)) {
                    best = p.term;
                    best_d = d;
                }
            }
            CHECK(a.term == best);
            used.insert(a.term);
            // Anchors lie on the ray within 90% of the extent.
            const auto u = ray_direction(a.direction);
            double extent = 0;
            for (const auto& p : pts) extent = std::max(extent, geometry::dot(p.position, u));
            const double t = geometry::dot(a.anchor, u);
            CHECK(t <= 0.9 * extent + 1e-12);
            CHECK_THAT(a.anchor.x * u.y - a.anchor.y * u.x, WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("ousiogram of a lexicon") {
    auto p = testing::run_pipeline(testing::nrc_like_raw_lexicon(3000, 31));
    const auto power = parse_dimension("power"), danger = parse_dimension("danger");
    auto spec = build_ousiogram(p.derived, power, danger);
    CHECK_THAT(spec.histogram.total(), WithinAbs(double(p.derived.size()), 1e-9));
    CHECK(spec.histogram.dim_x == "power");
    CHECK(spec.marginal_y.axis == "danger");
    CHECK(spec.reference_circle.has_value());
    CHECK(spec.axis_labels.x == AxisEndpoints{"weak", "powerful"});
    CHECK(spec.axis_labels.y == AxisEndpoints{"safe", "dangerous"});
    std::set<std::string> terms;
    for (const auto& a : spec.annotations.boundary) CHECK(terms.insert(a.term).second);
    for (const auto& a : spec.annotations.internal) CHECK(terms.insert(a.term).second);
    CHECK(spec.annotations.internal.size() == 24);

    auto vd = build_ousiogram(p.derived, parse_dimension("valence"), parse_dimension("dominance"));
    CHECK_FALSE(vd.reference_circle.has_value());
    CHECK(vd.ellipse.angle > 0.0);
    CHECK(vd.ellipse.angle < std::numbers::pi / 2);

    // GES planes are aligned with their axes.
    auto ge = build_ousiogram(p.derived, parse_dimension("goodness"), parse_dimension("energy"));
    const double deg = ge.ellipse.angle * 180.0 / std::numbers::pi;
    CHECK(std::min(std::abs(deg), std::abs(180.0 - deg)) < 2.0);
}

TEST_CASE("token-weighted ousiogram: the heaviest word owns the heaviest bin") {
    auto [ges, pds] = testing::identity_bases();
    testing::Rng rng(2);
    std::vector<std::string> terms;
    std::vector<Vec3> pts;
    std::vector<double> weights;
    for (int i = 0; i < 500; ++i) {
        terms.push_back(testing::word(i));
        pts.push_back({rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)});
        weights.push_back(rng.uniform(0, 10));
    }
    // A very frequent function word at (P, D) = (-0.001, -0.300).
    const double h = std::sqrt(0.5);
    const double p = -0.001, d = -0.300;
    terms.push_back("be");
    pts.push_back({h * (p - d), h * (p + d), 0.0}); // VAD such that the identity-GES rotation lands on (p, d)
    weights.push_back(1e5);
    auto lex = testing::derived_from_points(terms, pts, ges, pds);
    const auto i = *lex.lookup("be");
    CHECK_THAT(lex.value(i, parse_dimension("power")), WithinAbs(p, 1e-12));
    CHECK_THAT(lex.value(i, parse_dimension("danger")), WithinAbs(d, 1e-12));

    auto spec = build_ousiogram(lex, parse_dimension("power"), parse_dimension("danger"), weights);
    CHECK_THAT(spec.histogram.total(), WithinAbs(1.0, 1e-9));
    auto top = spec.histogram.max_bin();
    const double bp = lex.value(i, parse_dimension("power")), bd = lex.value(i, parse_dimension("danger"));
    CHECK(long(top.i) == spec.histogram.lattice_index(bp) - spec.histogram.first_x);
    CHECK(long(top.j) == spec.histogram.lattice_index(bd) - spec.histogram.first_y);
    CHECK(spec.histogram.mass_at(bp, bd) == top.mass);

    std::vector<double> zeros(weights.size(), 0.0);
    CHECK_THROWS_AS(build_ousiogram(lex, parse_dimension("power"), parse_dimension("danger"), zeros), EmptyInput);
    std::vector<double> short_weights{1.0};
    CHECK_THROWS_AS(build_ousiogram(lex, parse_dimension("power"), parse_dimension("danger"), short_weights),
                    InvalidArgument);
}

TEST_CASE("JSON rendering round-trips and SVG is standalone") {
    auto p = testing::run_pipeline(testing::nrc_like_raw_lexicon(800, 4));
    for (auto [x, y] : {std::pair{"power", "danger"}, std::pair{"valence", "dominance"}}) {
        auto spec = build_ousiogram(p.derived, parse_dimension(x), parse_dimension(y));
        const auto json = render(spec, RenderFormat::json);
        auto back = parse_ousiogram_json(json);
        CHECK(back == spec);
        CHECK(render_json(back) == json);
        auto doc = nlohmann::json::parse(json);
        for (auto key : {"histogram", "marginal_x", "marginal_y", "ellipse", "annotations", "reference_circle",
                         "axis_labels"})
            CHECK(doc.contains(key));

        const auto svg = render(spec, RenderFormat::svg);
        CHECK(svg.rfind("<?xml", 0) == 0);
        CHECK(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"") != std::string::npos);
        CHECK(svg.find("id=\"svd_ellipse\"") != std::string::npos);
        CHECK(svg.find("class=\"median\"") != std::string::npos);
        CHECK((svg.find("id=\"reference_circle\"") != std::string::npos) == spec.reference_circle.has_value());
        CHECK(svg.find("href") == std::string::npos);
        CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
    }
    CHECK_THROWS_AS(parse_ousiogram_json("{not json"), IoError);
    CHECK_THROWS_AS(parse_ousiogram_json("{}"), IoError);
}

TEST_CASE("SVG without annotations and with awkward labels") {
    auto p = testing::run_pipeline(testing::nrc_like_raw_lexicon(300, 6));
    OusiogramOptions opts;
    opts.annotate = false;
    auto spec = build_ousiogram(p.derived, parse_dimension("power"), parse_dimension("danger"), {}, opts);
    CHECK(spec.annotations.boundary.empty());
    CHECK(spec.annotations.internal.empty());
    auto svg = render_svg(spec);
    CHECK(svg.find("class=\"boundary\"") == std::string::npos);
    CHECK(svg.find("id=\"heatmap\"") != std::string::npos);

    spec.annotations.internal.push_back({"r&d <x>", {0, 0}, 0, {0.1, 0.1}});
    svg = render_svg(spec);
    CHECK(svg.find("r&amp;d &lt;x&gt;") != std::string::npos);
    CHECK(parse_ousiogram_json(render_json(spec)) == spec);
}
