#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ousio {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

namespace geometry {

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Indices of the convex hull vertices in counter-clockwise order, starting from
/// the lowest-x (then lowest-y) point. Collinear boundary points are dropped.
/// Returns fewer than 3 indices when the input is collinear.
inline std::vector<std::size_t> convex_hull(std::span<const Point2> points) {
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].x != points[b].x) return points[a].x < points[b].x;
        return points[a].y < points[b].y;
    });
    order.erase(std::unique(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] == points[b]; }),
                order.end());
    if (order.size() < 3) return order;

    // Andrew's monotone chain.
    std::vector<std::size_t> hull(2 * order.size());
    std::size_t k = 0;
    for (std::size_t i : order) {
        while (k >= 2 && cross(points[hull[k - 2]], points[hull[k - 1]], points[i]) <= 0) --k;
        hull[k++] = i;
    }
    for (std::size_t j = order.size() - 1, t = k + 1; j-- > 0;) {
        const std::size_t i = order[j];
        while (k >= t && cross(points[hull[k - 2]], points[hull[k - 1]], points[i]) <= 0) --k;
        hull[k++] = i;
    }
    hull.resize(k - 1);
    return hull;
}

/// Distance from `p` to the closed segment [a, b].
inline double distance_to_segment(const Point2& p, const Point2& a, const Point2& b) {
    const Point2 ab{b.x - a.x, b.y - a.y};
    const double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot({p.x - a.x, p.y - a.y}, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, {a.x + t * ab.x, a.y + t * ab.y});
}

/// Distance from `p` to the boundary of the polygon given by `ring` (vertex indices into `points`).
inline double distance_to_boundary(const Point2& p, std::span<const Point2> points, std::span<const std::size_t> ring) {
    double best = INFINITY;
    for (std::size_t i = 0; i < ring.size(); ++i)
        best = std::min(best, distance_to_segment(p, points[ring[i]], points[ring[(i + 1) % ring.size()]]));
    return best;
}

/// A point on a closed polyline together with the outward normal of the edge it lies on.
struct PerimeterSample {
    Point2 position;
    Point2 normal;
};

/// Splits the perimeter of a counter-clockwise ring into n = max(1, round(L / spacing))
/// arcs of equal length, starting at the first vertex, and returns each arc's midpoint
/// with the outward unit normal of the edge that contains it.
inline std::vector<PerimeterSample> segment_perimeter(std::span<const Point2> points, std::span<const std::size_t> ring,
                                                      double spacing) {
    const std::size_t m = ring.size();
    std::vector<double> edge_start(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        edge_start[i + 1] = edge_start[i] + distance(points[ring[i]], points[ring[(i + 1) % m]]);
    const double perimeter = edge_start[m];
    const auto n = static_cast<std::size_t>(std::max(1.0, std::round(perimeter / spacing)));
    const double arc = perimeter / static_cast<double>(n);

    std::vector<PerimeterSample> samples;
    samples.reserve(n);
    std::size_t edge = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const double at = (static_cast<double>(s) + 0.5) * arc;
        while (edge + 1 < m && edge_start[edge + 1] <= at) ++edge;
        const Point2& a = points[ring[edge]];
        const Point2& b = points[ring[(edge + 1) % m]];
        const double len = edge_start[edge + 1] - edge_start[edge];
        const double t = len > 0 ? (at - edge_start[edge]) / len : 0.0;
        // For a counter-clockwise ring the outward normal of a->b is (dy, -dx).
        const Point2 normal{(b.y - a.y) / len, -(b.x - a.x) / len};
        samples.push_back({{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}, normal});
    }
    return samples;
}

} // namespace geometry
} // namespace ousio
