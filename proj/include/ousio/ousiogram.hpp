#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "error.hpp"
#include "frameworks.hpp"
#include "hull.hpp"
#include "stats.hpp"

namespace ousio {

/// Default histogram bin width for ousiograms.
inline constexpr double kDefaultBinWidth = 1.0 / 30.0;

struct WeightedPoint {
    double x = 0.0;
    double y = 0.0;
    double weight = 1.0;
};

/// Dense 2D histogram on a lattice anchored at zero: bin (i, j) covers
/// [i*w, (i+1)*w) x [j*w, (j+1)*w). `first_x`/`first_y` are the lattice indices of
/// the lower-left bin, so the grid's origin is (first_x*w, first_y*w).
struct Histogram2D {
    std::string dim_x = "x";
    std::string dim_y = "y";
    double bin_width = kDefaultBinWidth;
    long first_x = 0;
    long first_y = 0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> counts; ///< row-major: counts[j * nx + i], j along y

    Point2 origin() const { return {static_cast<double>(first_x) * bin_width, static_cast<double>(first_y) * bin_width}; }
    double at(std::size_t i, std::size_t j) const { return counts.at(j * nx + i); }

    double total() const {
        double t = 0.0;
        for (double c : counts) t += c;
        return t;
    }

    /// Lattice index of the bin holding coordinate v.
    long lattice_index(double v) const { return static_cast<long>(std::floor(v / bin_width)); }

    /// Mass of the bin containing (x, y), or 0 outside the grid.
    double mass_at(double x, double y) const {
        const long i = lattice_index(x) - first_x, j = lattice_index(y) - first_y;
        if (i < 0 || j < 0 || i >= static_cast<long>(nx) || j >= static_cast<long>(ny)) return 0.0;
        return at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }

    struct Bin {
        std::size_t i = 0, j = 0;
        double mass = 0.0;
        Point2 lower_left;
    };

    /// The heaviest bin; ties go to the first in row-major order.
    Bin max_bin() const {
        Bin best;
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i)
                if (at(i, j) > best.mass) best = {i, j, at(i, j), {}};
        best.lower_left = {static_cast<double>(first_x + static_cast<long>(best.i)) * bin_width,
                           static_cast<double>(first_y + static_cast<long>(best.j)) * bin_width};
        return best;
    }

    friend bool operator==(const Histogram2D&, const Histogram2D&) = default;
};

inline Histogram2D build_histogram(std::span<const WeightedPoint> points, double bin_width, std::string dim_x = "x",
                                   std::string dim_y = "y") {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw InvalidArgument("bin width must be positive");
    if (points.empty()) throw EmptyInput("histogram has no points");
    Histogram2D h;
    h.dim_x = std::move(dim_x);
    h.dim_y = std::move(dim_y);
    h.bin_width = bin_width;

    long lo_x = std::numeric_limits<long>::max(), hi_x = std::numeric_limits<long>::min();
    long lo_y = lo_x, hi_y = hi_x;
    for (const auto& p : points) {
        if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) throw InvalidArgument("weights must be finite and non-negative");
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidArgument("point coordinates must be finite");
        const long i = h.lattice_index(p.x), j = h.lattice_index(p.y);
        lo_x = std::min(lo_x, i);
        hi_x = std::max(hi_x, i);
        lo_y = std::min(lo_y, j);
        hi_y = std::max(hi_y, j);
    }
    h.first_x = lo_x;
    h.first_y = lo_y;
    h.nx = static_cast<std::size_t>(hi_x - lo_x + 1);
    h.ny = static_cast<std::size_t>(hi_y - lo_y + 1);
    h.counts.assign(h.nx * h.ny, 0.0);
    for (const auto& p : points) {
        const auto i = static_cast<std::size_t>(h.lattice_index(p.x) - lo_x);
        const auto j = static_cast<std::size_t>(h.lattice_index(p.y) - lo_y);
        h.counts[j * h.nx + i] += p.weight;
    }
    return h;
}

/// Adds two histograms on the same lattice; the result covers both grids.
inline Histogram2D merge(const Histogram2D& a, const Histogram2D& b) {
    if (a.bin_width != b.bin_width) throw InvalidArgument("cannot merge histograms with different bin widths");
    Histogram2D out = a;
    out.first_x = std::min(a.first_x, b.first_x);
    out.first_y = std::min(a.first_y, b.first_y);
    const long last_x = std::max(a.first_x + static_cast<long>(a.nx), b.first_x + static_cast<long>(b.nx));
    const long last_y = std::max(a.first_y + static_cast<long>(a.ny), b.first_y + static_cast<long>(b.ny));
    out.nx = static_cast<std::size_t>(last_x - out.first_x);
    out.ny = static_cast<std::size_t>(last_y - out.first_y);
    out.counts.assign(out.nx * out.ny, 0.0);
    for (const Histogram2D* h : {&a, &b})
        for (std::size_t j = 0; j < h->ny; ++j)
            for (std::size_t i = 0; i < h->nx; ++i) {
                const auto oi = static_cast<std::size_t>(h->first_x - out.first_x) + i;
                const auto oj = static_cast<std::size_t>(h->first_y - out.first_y) + j;
                out.counts[oj * out.nx + oi] += h->at(i, j);
            }
    return out;
}

struct MarginalBin {
    double center = 0.0;
    double mass = 0.0;
    friend bool operator==(const MarginalBin&, const MarginalBin&) = default;
};

struct Marginal {
    std::string axis;
    std::vector<MarginalBin> bins;
    double median = 0.0;
    double weighted_mean = 0.0;
    double weighted_std = 0.0;
    double min = 0.0;
    double max = 0.0;

    friend bool operator==(const Marginal&, const Marginal&) = default;
};

/// One-dimensional marginal along the x (axis 0) or y (axis 1) coordinate,
/// binned on the same zero-anchored lattice as the 2D histogram.
inline Marginal marginal(std::span<const WeightedPoint> points, int axis, double bin_width, std::string name = {}) {
    if (points.empty()) throw EmptyInput("marginal has no points");
    if (!(bin_width > 0.0)) throw InvalidArgument("bin width must be positive");
    std::vector<double> values, weights;
    values.reserve(points.size());
    weights.reserve(points.size());
    for (const auto& p : points) {
        values.push_back(axis == 0 ? p.x : p.y);
        weights.push_back(p.weight);
    }
    const auto s = stats::summarize(values, weights);

    Marginal m;
    m.axis = std::move(name);
    m.median = s.median;
    m.weighted_mean = s.mean;
    m.weighted_std = s.std;
    m.min = s.min;
    m.max = s.max;

    const long lo = static_cast<long>(std::floor(s.min / bin_width));
    const long hi = static_cast<long>(std::floor(s.max / bin_width));
    m.bins.resize(static_cast<std::size_t>(hi - lo + 1));
    for (std::size_t k = 0; k < m.bins.size(); ++k)
        m.bins[k].center = (static_cast<double>(lo + static_cast<long>(k)) + 0.5) * bin_width;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        const long k = static_cast<long>(std::floor(values[i] / bin_width)) - lo;
        m.bins[static_cast<std::size_t>(k)].mass += weights[i];
    }
    return m;
}

struct EllipseSpec {
    Point2 center;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double angle = 0.0; ///< radians of the major axis from +x, in [0, pi)

    friend bool operator==(const EllipseSpec&, const EllipseSpec&) = default;
};

/// Principal axes of the in-plane point cloud about the origin. The semi-axes are
/// the root-mean-square extents along the two singular directions (singular value
/// over root total weight).
inline EllipseSpec svd_ellipse(std::span<const WeightedPoint> points) {
    double total = 0.0, a = 0.0, b = 0.0, c = 0.0;
    std::optional<Point2> first;
    bool distinct = false;
    for (const auto& p : points) {
        if (p.weight <= 0.0) continue;
        if (!first) first = Point2{p.x, p.y};
        else if (first->x != p.x || first->y != p.y) distinct = true;
        total += p.weight;
        a += p.weight * p.x * p.x;
        b += p.weight * p.x * p.y;
        c += p.weight * p.y * p.y;
    }
    if (!distinct) throw Degenerate("ellipse needs at least two distinct points");
    a /= total;
    b /= total;
    c /= total;
    const double mid = 0.5 * (a + c);
    const double radius = std::hypot(0.5 * (a - c), b);
    const double major = mid + radius, minor = mid - radius;
    if (!(major > 0.0)) throw Degenerate("in-plane second moment is zero");

    EllipseSpec e;
    e.semi_major = std::sqrt(major);
    e.semi_minor = std::sqrt(std::max(minor, 0.0));
    double angle = 0.5 * std::atan2(2.0 * b, a - c);
    if (angle < 0.0) angle += std::numbers::pi;
    if (angle >= std::numbers::pi) angle -= std::numbers::pi;
    e.angle = angle;
    return e;
}

struct LabeledPoint {
    std::string term;
    Point2 position;
};

struct BoundaryAnnotation {
    std::string term;
    Point2 anchor;   ///< midpoint of the hull arc
    Point2 normal;   ///< outward unit normal at the anchor
    Point2 position; ///< the term's own coordinates

    friend bool operator==(const BoundaryAnnotation&, const BoundaryAnnotation&) = default;
};

struct InternalAnnotation {
    std::string term;
    Point2 anchor;      ///< point on the ray the term was matched to
    int direction = 0;  ///< 0..7, counter-clockwise from +x in steps of pi/4
    Point2 position;

    friend bool operator==(const InternalAnnotation&, const InternalAnnotation&) = default;
};

struct AnnotationSet {
    std::vector<BoundaryAnnotation> boundary;
    std::vector<InternalAnnotation> internal;

    friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

struct HullOptions {
    double spacing = 0.1; ///< target arc length between boundary labels
    /// Only terms within this distance of the hull boundary are eligible.
    double band = std::numeric_limits<double>::infinity();
};

/// Boundary labels: the hull perimeter is cut into arcs of roughly `spacing`, and
/// for each arc the unused term lying furthest along the arc's outward normal is
/// chosen (ties by term text). Terms already in `used` are skipped and newly
/// chosen terms are added to it.
inline std::vector<BoundaryAnnotation> hull_annotations(std::span<const LabeledPoint> points, const HullOptions& options,
                                                        std::unordered_set<std::string>& used) {
    if (!(options.spacing > 0.0)) throw InvalidArgument("hull spacing must be positive");
    std::vector<Point2> xy;
    xy.reserve(points.size());
    for (const auto& p : points) xy.push_back(p.position);
    const auto ring = geometry::convex_hull(xy);
    if (ring.size() < 3) throw Degenerate("points are collinear; no convex hull");

    std::vector<std::size_t> eligible;
    eligible.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        if (std::isinf(options.band) || geometry::distance_to_boundary(xy[i], xy, ring) <= options.band)
            eligible.push_back(i);

    std::vector<BoundaryAnnotation> out;
    for (const auto& sample : geometry::segment_perimeter(xy, ring, options.spacing)) {
        std::optional<std::size_t> best;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t i : eligible) {
            if (used.count(points[i].term)) continue;
            const double score = geometry::dot(xy[i], sample.normal);
            if (!best || score > best_score || (score == best_score && points[i].term < points[*best].term)) {
                best = i;
                best_score = score;
            }
        }
        if (!best) break;
        used.insert(points[*best].term);
        out.push_back({points[*best].term, sample.position, sample.normal, xy[*best]});
    }
    return out;
}

inline std::vector<BoundaryAnnotation> hull_annotations(std::span<const LabeledPoint> points, const HullOptions& options) {
    std::unordered_set<std::string> used;
    return hull_annotations(points, options, used);
}

/// Unit direction for ray index 0..7 (counter-clockwise from +x).
inline Point2 ray_direction(int index) {
    const double angle = index * std::numbers::pi / 4.0;
    // Exact cardinal directions avoid cos(pi/2) residue.
    const double c = std::round(std::cos(angle) * 1e12) / 1e12, s = std::round(std::sin(angle) * 1e12) / 1e12;
    const double norm = std::hypot(c, s);
    return {c / norm, s / norm};
}

/// Internal labels along the four cardinal and four intercardinal rays. Each ray gets
/// `n_per_ray` anchors at fractions j/n (j = 1..n) of 90% of the data's extent along
/// it; each anchor takes the nearest unused term (ties by term text).
inline std::vector<InternalAnnotation> axis_annotations(std::span<const LabeledPoint> points, std::size_t n_per_ray,
                                                        std::unordered_set<std::string>& used) {
    if (n_per_ray == 0) throw InvalidArgument("n_per_ray must be at least 1");
    std::vector<InternalAnnotation> out;
    for (int dir = 0; dir < 8; ++dir) {
        const Point2 u = ray_direction(dir);
        double extent = 0.0;
        for (const auto& p : points) extent = std::max(extent, geometry::dot(p.position, u));
        if (!(extent > 0.0)) continue;
        for (std::size_t j = 1; j <= n_per_ray; ++j) {
            const double t = 0.9 * extent * static_cast<double>(j) / static_cast<double>(n_per_ray);
            const Point2 anchor{t * u.x, t * u.y};
            std::optional<std::size_t> best;
            double best_d = 0.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (used.count(points[i].term)) continue;
                const double dx = points[i].position.x - anchor.x, dy = points[i].position.y - anchor.y;
                const double d = dx * dx + dy * dy;
                if (!best || d < best_d || (d == best_d && points[i].term < points[*best].term)) {
                    best = i;
                    best_d = d;
                }
            }
            if (!best) return out;
            used.insert(points[*best].term);
            out.push_back({points[*best].term, anchor, dir, points[*best].position});
        }
    }
    return out;
}

inline std::vector<InternalAnnotation> axis_annotations(std::span<const LabeledPoint> points, std::size_t n_per_ray) {
    std::unordered_set<std::string> used;
    return axis_annotations(points, n_per_ray, used);
}

/// Endpoint adjectives for the negative and positive ends of a dimension.
struct AxisEndpoints {
    std::string negative;
    std::string positive;
    friend bool operator==(const AxisEndpoints&, const AxisEndpoints&) = default;
};

inline AxisEndpoints endpoint_adjectives(Dimension dim) {
    static const std::array<AxisEndpoints, 9> table{{
        {"negative", "positive"},
        {"calm", "aroused"},
        {"submissive", "dominant"},
        {"bad", "good"},
        {"low energy", "high energy"},
        {"structured", "unstructured"},
        {"weak", "powerful"},
        {"safe", "dangerous"},
        {"structured", "unstructured"},
    }};
    return table[dim.column()];
}

struct AxisLabels {
    AxisEndpoints x;
    AxisEndpoints y;
    friend bool operator==(const AxisLabels&, const AxisLabels&) = default;
};

struct OusiogramSpec {
    Histogram2D histogram;
    Marginal marginal_x;
    Marginal marginal_y;
    EllipseSpec ellipse;
    AnnotationSet annotations;
    std::optional<double> reference_circle;
    AxisLabels axis_labels;

    friend bool operator==(const OusiogramSpec&, const OusiogramSpec&) = default;
};

struct OusiogramOptions {
    double bin_width = kDefaultBinWidth;
    double hull_spacing = 0.1;
    std::size_t n_per_ray = 3;
    bool annotate = true;
};

/// Builds an ousiogram over two score columns of a derived lexicon.
///
/// Without `weights` every term counts once. With `weights` (one entry per lexicon
/// row, e.g. token frequencies) the masses are normalized to sum to 1 and rows of
/// zero weight are left out. Boundary labels are restricted to terms within one bin
/// width of the hull. A power-danger plane gets a reference circle whose radius is
/// the root-mean-square of the ellipse semi-axes.
inline OusiogramSpec build_ousiogram(const DerivedLexicon& lexicon, Dimension x, Dimension y,
                                     std::span<const double> weights = {}, const OusiogramOptions& options = {}) {
    if (!weights.empty() && weights.size() != lexicon.size())
        throw InvalidArgument("weights must have one entry per lexicon row");

    double total = 0.0;
    if (!weights.empty()) {
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be finite and non-negative");
            total += w;
        }
        if (!(total > 0.0)) throw EmptyInput("all weights are zero");
    }

    std::vector<WeightedPoint> points;
    std::vector<LabeledPoint> labeled;
    points.reserve(lexicon.size());
    labeled.reserve(lexicon.size());
    for (std::size_t i = 0; i < lexicon.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i] / total;
        if (w <= 0.0) continue;
        const double px = lexicon.value(i, x), py = lexicon.value(i, y);
        points.push_back({px, py, w});
        labeled.push_back({lexicon.term(i).text(), {px, py}});
    }
    if (points.empty()) throw EmptyInput("no terms to plot");

    OusiogramSpec spec;
    spec.histogram = build_histogram(points, options.bin_width, std::string(x.name()), std::string(y.name()));
    spec.marginal_x = marginal(points, 0, options.bin_width, std::string(x.name()));
    spec.marginal_y = marginal(points, 1, options.bin_width, std::string(y.name()));
    spec.ellipse = svd_ellipse(points);
    spec.axis_labels = {endpoint_adjectives(x), endpoint_adjectives(y)};
    if (x == Dimension{FrameworkTag::pds, 0} && y == Dimension{FrameworkTag::pds, 1}) {
        const double a = spec.ellipse.semi_major, b = spec.ellipse.semi_minor;
        spec.reference_circle = std::sqrt(0.5 * (a * a + b * b));
    }
    if (options.annotate && labeled.size() >= 3) {
        std::unordered_set<std::string> used;
        spec.annotations.boundary =
            hull_annotations(labeled, HullOptions{options.hull_spacing, options.bin_width}, used);
        spec.annotations.internal = axis_annotations(labeled, options.n_per_ray, used);
    }
    return spec;
}

} // namespace ousio
