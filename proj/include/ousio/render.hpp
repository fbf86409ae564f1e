#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "ousiogram.hpp"
#include "text.hpp"

namespace ousio {

// JSON encodings. Points are [x, y] pairs; the histogram grid is a list of rows
// from the bottom (lowest y) up.

inline void to_json(nlohmann::json& j, const Point2& p) { j = nlohmann::json::array({p.x, p.y}); }
inline void from_json(const nlohmann::json& j, Point2& p) {
    p.x = j.at(0).get<double>();
    p.y = j.at(1).get<double>();
}

inline void to_json(nlohmann::json& j, const Histogram2D& h) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < h.ny; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < h.nx; ++c) row.push_back(h.at(c, r));
        rows.push_back(std::move(row));
    }
    j = {{"dim_x", h.dim_x},     {"dim_y", h.dim_y}, {"bin_width", h.bin_width}, {"origin", h.origin()},
         {"first_x", h.first_x}, {"first_y", h.first_y}, {"nx", h.nx}, {"ny", h.ny}, {"counts", rows}};
}
inline void from_json(const nlohmann::json& j, Histogram2D& h) {
    j.at("dim_x").get_to(h.dim_x);
    j.at("dim_y").get_to(h.dim_y);
    j.at("bin_width").get_to(h.bin_width);
    j.at("first_x").get_to(h.first_x);
    j.at("first_y").get_to(h.first_y);
    j.at("nx").get_to(h.nx);
    j.at("ny").get_to(h.ny);
    const auto& rows = j.at("counts");
    if (rows.size() != h.ny) throw IoError("histogram row count does not match ny");
    h.counts.clear();
    h.counts.reserve(h.nx * h.ny);
    for (const auto& row : rows) {
        if (row.size() != h.nx) throw IoError("histogram column count does not match nx");
        for (const auto& v : row) h.counts.push_back(v.get<double>());
    }
}

inline void to_json(nlohmann::json& j, const MarginalBin& b) { j = nlohmann::json::array({b.center, b.mass}); }
inline void from_json(const nlohmann::json& j, MarginalBin& b) {
    b.center = j.at(0).get<double>();
    b.mass = j.at(1).get<double>();
}

inline void to_json(nlohmann::json& j, const Marginal& m) {
    j = {{"axis", m.axis},
         {"bins", m.bins},
         {"median", m.median},
         {"weighted_mean", m.weighted_mean},
         {"weighted_std", m.weighted_std},
         {"min", m.min},
         {"max", m.max}};
}
inline void from_json(const nlohmann::json& j, Marginal& m) {
    j.at("axis").get_to(m.axis);
    j.at("bins").get_to(m.bins);
    j.at("median").get_to(m.median);
    j.at("weighted_mean").get_to(m.weighted_mean);
    j.at("weighted_std").get_to(m.weighted_std);
    j.at("min").get_to(m.min);
    j.at("max").get_to(m.max);
}

inline void to_json(nlohmann::json& j, const EllipseSpec& e) {
    j = {{"center", e.center}, {"semi_axes", {e.semi_major, e.semi_minor}}, {"angle", e.angle}};
}
inline void from_json(const nlohmann::json& j, EllipseSpec& e) {
    j.at("center").get_to(e.center);
    e.semi_major = j.at("semi_axes").at(0).get<double>();
    e.semi_minor = j.at("semi_axes").at(1).get<double>();
    j.at("angle").get_to(e.angle);
}

inline void to_json(nlohmann::json& j, const BoundaryAnnotation& a) {
    j = {{"term", a.term}, {"anchor", a.anchor}, {"normal", a.normal}, {"position", a.position}};
}
inline void from_json(const nlohmann::json& j, BoundaryAnnotation& a) {
    j.at("term").get_to(a.term);
    j.at("anchor").get_to(a.anchor);
    j.at("normal").get_to(a.normal);
    j.at("position").get_to(a.position);
}

inline void to_json(nlohmann::json& j, const InternalAnnotation& a) {
    j = {{"term", a.term}, {"anchor", a.anchor}, {"direction", a.direction}, {"position", a.position}};
}
inline void from_json(const nlohmann::json& j, InternalAnnotation& a) {
    j.at("term").get_to(a.term);
    j.at("anchor").get_to(a.anchor);
    j.at("direction").get_to(a.direction);
    j.at("position").get_to(a.position);
}

inline void to_json(nlohmann::json& j, const AnnotationSet& a) { j = {{"boundary", a.boundary}, {"internal", a.internal}}; }
inline void from_json(const nlohmann::json& j, AnnotationSet& a) {
    j.at("boundary").get_to(a.boundary);
    j.at("internal").get_to(a.internal);
}

inline void to_json(nlohmann::json& j, const AxisEndpoints& e) { j = {{"negative", e.negative}, {"positive", e.positive}}; }
inline void from_json(const nlohmann::json& j, AxisEndpoints& e) {
    j.at("negative").get_to(e.negative);
    j.at("positive").get_to(e.positive);
}

inline void to_json(nlohmann::json& j, const AxisLabels& a) { j = {{"x", a.x}, {"y", a.y}}; }
inline void from_json(const nlohmann::json& j, AxisLabels& a) {
    j.at("x").get_to(a.x);
    j.at("y").get_to(a.y);
}

inline void to_json(nlohmann::json& j, const OusiogramSpec& s) {
    j = {{"histogram", s.histogram},
         {"marginal_x", s.marginal_x},
         {"marginal_y", s.marginal_y},
         {"ellipse", s.ellipse},
         {"annotations", s.annotations},
         {"reference_circle", s.reference_circle ? nlohmann::json(*s.reference_circle) : nlohmann::json(nullptr)},
         {"axis_labels", s.axis_labels}};
}
inline void from_json(const nlohmann::json& j, OusiogramSpec& s) {
    j.at("histogram").get_to(s.histogram);
    j.at("marginal_x").get_to(s.marginal_x);
    j.at("marginal_y").get_to(s.marginal_y);
    j.at("ellipse").get_to(s.ellipse);
    j.at("annotations").get_to(s.annotations);
    const auto& circle = j.at("reference_circle");
    if (circle.is_null()) s.reference_circle.reset();
    else s.reference_circle = circle.get<double>();
    j.at("axis_labels").get_to(s.axis_labels);
}

inline std::string render_json(const OusiogramSpec& spec) { return nlohmann::json(spec).dump(2) + "\n"; }

inline OusiogramSpec parse_ousiogram_json(std::string_view document) {
    try {
        return nlohmann::json::parse(document).get<OusiogramSpec>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("invalid ousiogram JSON: ") + e.what());
    }
}

namespace svg_detail {

inline std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) { return text::fixed(v, 2); }

/// Maps data coordinates onto the main panel.
struct Frame {
    double left = 70, top = 130, size = 480; // panel placement in px
    double lo = -1, hi = 1;                  // data limits on both axes
    double sx(double x) const { return left + (x - lo) / (hi - lo) * size; }
    double sy(double y) const { return top + (hi - y) / (hi - lo) * size; }
    double scale() const { return size / (hi - lo); }
};

inline std::string gray(double darkness) {
    const int level = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(darkness, 0.0, 1.0))));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", level, level, level);
    return buf;
}

} // namespace svg_detail

/// Standalone SVG 1.1 rendering: heatmap shaded by log(1 + mass) relative to the
/// heaviest bin, marginals with median triangles, the SVD ellipse, an optional dashed
/// reference circle, both annotation sets, and endpoint labels.
inline std::string render_svg(const OusiogramSpec& spec) {
    using namespace svg_detail;
    const auto& h = spec.histogram;

    Frame f;
    // Limits of [-1, 1], widened if the data reaches further.
    const Point2 o = h.origin();
    const double reach = std::max({1.0, std::abs(o.x), std::abs(o.y), std::abs(o.x + static_cast<double>(h.nx) * h.bin_width),
                                   std::abs(o.y + static_cast<double>(h.ny) * h.bin_width)});
    f.lo = -reach;
    f.hi = reach;
    const double marginal_height = 90.0;
    const double width = f.left + f.size + marginal_height + 90.0;
    const double height = f.top + f.size + 70.0;

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height) << "\" fill=\"#ffffff\"/>\n";

    // Panel and axes.
    out << "<g id=\"panel\">\n"
        << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\"" << num(f.size) << "\" height=\""
        << num(f.size) << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n"
        << "<line x1=\"" << num(f.sx(f.lo)) << "\" y1=\"" << num(f.sy(0)) << "\" x2=\"" << num(f.sx(f.hi)) << "\" y2=\""
        << num(f.sy(0)) << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n"
        << "<line x1=\"" << num(f.sx(0)) << "\" y1=\"" << num(f.sy(f.lo)) << "\" x2=\"" << num(f.sx(0)) << "\" y2=\""
        << num(f.sy(f.hi)) << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n"
        << "</g>\n";

    // Heatmap.
    double max_mass = 0.0;
    for (double c : h.counts) max_mass = std::max(max_mass, c);
    out << "<g id=\"heatmap\">\n";
    const double cell = h.bin_width * f.scale();
    for (std::size_t j = 0; j < h.ny; ++j) {
        for (std::size_t i = 0; i < h.nx; ++i) {
            const double m = h.at(i, j);
            if (m <= 0.0) continue;
            const double x0 = o.x + static_cast<double>(i) * h.bin_width;
            const double y1 = o.y + static_cast<double>(j + 1) * h.bin_width;
            out << "<rect x=\"" << num(f.sx(x0)) << "\" y=\"" << num(f.sy(y1)) << "\" width=\"" << num(cell)
                << "\" height=\"" << num(cell) << "\" fill=\"" << gray(0.15 + 0.85 * std::log1p(m) / std::log1p(max_mass))
                << "\"/>\n";
        }
    }
    out << "</g>\n";

    // Marginals: top for x, right for y. Positive-side bars are darker.
    auto marginal_bars = [&](const Marginal& m, bool horizontal) {
        double peak = 0.0;
        for (const auto& b : m.bins) peak = std::max(peak, b.mass);
        if (peak <= 0.0) return;
        out << "<g id=\"marginal_" << (horizontal ? 'x' : 'y') << "\">\n";
        const double bw = h.bin_width * f.scale();
        for (const auto& b : m.bins) {
            const double len = b.mass / peak * (marginal_height - 10.0);
            const std::string fill = b.center > 0 ? "#555555" : "#aaaaaa";
            if (horizontal) {
                out << "<rect x=\"" << num(f.sx(b.center - 0.5 * h.bin_width)) << "\" y=\"" << num(f.top - 5.0 - len)
                    << "\" width=\"" << num(bw) << "\" height=\"" << num(len) << "\" fill=\"" << fill << "\"/>\n";
            } else {
                out << "<rect x=\"" << num(f.left + f.size + 5.0) << "\" y=\"" << num(f.sy(b.center + 0.5 * h.bin_width))
                    << "\" width=\"" << num(len) << "\" height=\"" << num(bw) << "\" fill=\"" << fill << "\"/>\n";
            }
        }
        // Median triangle pointing at the panel.
        if (horizontal) {
            const double x = f.sx(m.median), y = f.top - 2.0;
            out << "<polygon class=\"median\" points=\"" << num(x) << ',' << num(y) << ' ' << num(x - 5) << ','
                << num(y - 9) << ' ' << num(x + 5) << ',' << num(y - 9) << "\" fill=\"#000000\"/>\n";
        } else {
            const double x = f.left + f.size + 2.0, y = f.sy(m.median);
            out << "<polygon class=\"median\" points=\"" << num(x) << ',' << num(y) << ' ' << num(x + 9) << ','
                << num(y - 5) << ' ' << num(x + 9) << ',' << num(y + 5) << "\" fill=\"#000000\"/>\n";
        }
        out << "</g>\n";
    };
    marginal_bars(spec.marginal_x, true);
    marginal_bars(spec.marginal_y, false);

    // SVD ellipse and reference circle.
    const auto& e = spec.ellipse;
    out << "<ellipse id=\"svd_ellipse\" cx=\"" << num(f.sx(e.center.x)) << "\" cy=\"" << num(f.sy(e.center.y)) << "\" rx=\""
        << num(e.semi_major * f.scale()) << "\" ry=\"" << num(e.semi_minor * f.scale()) << "\" transform=\"rotate("
        << num(-e.angle * 180.0 / std::numbers::pi) << ' ' << num(f.sx(e.center.x)) << ' ' << num(f.sy(e.center.y))
        << ")\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.2\"/>\n";
    if (spec.reference_circle) {
        out << "<circle id=\"reference_circle\" cx=\"" << num(f.sx(0)) << "\" cy=\"" << num(f.sy(0)) << "\" r=\""
            << num(*spec.reference_circle * f.scale())
            << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.8\" stroke-dasharray=\"4 3\"/>\n";
    }

    // Annotations.
    out << "<g id=\"annotations\" font-family=\"sans-serif\" font-size=\"8\">\n";
    for (const auto& a : spec.annotations.boundary) {
        const double px = f.sx(a.anchor.x), py = f.sy(a.anchor.y);
        double angle = -std::atan2(a.normal.y, a.normal.x) * 180.0 / std::numbers::pi;
        std::string anchor = "start";
        if (angle > 90.0 || angle < -90.0) {
            angle += angle > 0 ? -180.0 : 180.0;
            anchor = "end";
        }
        const double lx = px + 4.0 * a.normal.x, ly = py - 4.0 * a.normal.y;
        out << "<text class=\"boundary\" x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" text-anchor=\"" << anchor
            << "\" dominant-baseline=\"middle\" transform=\"rotate(" << num(angle) << ' ' << num(lx) << ' ' << num(ly)
            << ")\">" << escape(a.term) << "</text>\n";
    }
    for (const auto& a : spec.annotations.internal) {
        out << "<text class=\"internal\" x=\"" << num(f.sx(a.position.x)) << "\" y=\"" << num(f.sy(a.position.y))
            << "\" text-anchor=\"middle\" dominant-baseline=\"middle\">" << escape(a.term) << "</text>\n";
    }
    out << "</g>\n";

    // Endpoint labels on the axes and compound labels in the corners.
    const auto& lx = spec.axis_labels.x;
    const auto& ly = spec.axis_labels.y;
    out << "<g id=\"axis_labels\" font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<text x=\"" << num(f.left + f.size / 2) << "\" y=\"" << num(f.top + f.size + 40) << "\" text-anchor=\"middle\">"
        << escape(h.dim_x) << "</text>\n"
        << "<text x=\"" << num(f.left - 45) << "\" y=\"" << num(f.top + f.size / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
        << num(f.left - 45) << ' ' << num(f.top + f.size / 2) << ")\">" << escape(h.dim_y) << "</text>\n"
        << "<text x=\"" << num(f.left) << "\" y=\"" << num(f.top + f.size + 18) << "\" text-anchor=\"start\">"
        << escape(lx.negative) << "</text>\n"
        << "<text x=\"" << num(f.left + f.size) << "\" y=\"" << num(f.top + f.size + 18) << "\" text-anchor=\"end\">"
        << escape(lx.positive) << "</text>\n"
        << "<text x=\"" << num(f.left - 20) << "\" y=\"" << num(f.top + f.size) << "\" text-anchor=\"start\" transform=\"rotate(-90 "
        << num(f.left - 20) << ' ' << num(f.top + f.size) << ")\">" << escape(ly.negative) << "</text>\n"
        << "<text x=\"" << num(f.left - 20) << "\" y=\"" << num(f.top) << "\" text-anchor=\"end\" transform=\"rotate(-90 "
        << num(f.left - 20) << ' ' << num(f.top) << ")\">" << escape(ly.positive) << "</text>\n";
    const double inset = 8.0;
    out << "<text x=\"" << num(f.left + f.size - inset) << "\" y=\"" << num(f.top + 14) << "\" text-anchor=\"end\">"
        << escape(lx.positive + "-" + ly.positive) << "</text>\n"
        << "<text x=\"" << num(f.left + inset) << "\" y=\"" << num(f.top + 14) << "\" text-anchor=\"start\">"
        << escape(lx.negative + "-" + ly.positive) << "</text>\n"
        << "<text x=\"" << num(f.left + inset) << "\" y=\"" << num(f.top + f.size - inset) << "\" text-anchor=\"start\">"
        << escape(lx.negative + "-" + ly.negative) << "</text>\n"
        << "<text x=\"" << num(f.left + f.size - inset) << "\" y=\"" << num(f.top + f.size - inset) << "\" text-anchor=\"end\">"
        << escape(lx.positive + "-" + ly.negative) << "</text>\n"
        << "</g>\n</svg>\n";
    return out.str();
}

enum class RenderFormat { json, svg };

inline std::string render(const OusiogramSpec& spec, RenderFormat format) {
    return format == RenderFormat::json ? render_json(spec) : render_svg(spec);
}

} // namespace ousio
