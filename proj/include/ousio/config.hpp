#pragma once

#include <istream>
#include <optional>
#include <string>

#include "error.hpp"
#include "frameworks.hpp"
#include "ousiogram.hpp"
#include "text.hpp"

namespace ousio {

/// Paths and defaults for the command-line tool, read from `key = value` lines.
/// Blank lines and lines starting with '#' are ignored.
struct Config {
    std::string lexicon_path;
    std::optional<std::string> basis_cache_path; ///< directory written by `derive`
    double default_bin_width = kDefaultBinWidth;
    FrameworkTag default_framework = FrameworkTag::pds;
};

inline Config parse_config(std::istream& in) {
    Config config;
    std::string line;
    std::size_t line_no = 0;
    while (text::get_line(in, line)) {
        ++line_no;
        auto body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto eq = body.find('=');
        if (eq == std::string_view::npos) throw MalformedRow(line_no, "expected key = value");
        const auto key = text::trim(body.substr(0, eq));
        const auto value = text::trim(body.substr(eq + 1));
        if (key == "lexicon_path") {
            config.lexicon_path = std::string(value);
        } else if (key == "basis_cache_path") {
            if (value.empty()) config.basis_cache_path.reset();
            else config.basis_cache_path = std::string(value);
        } else if (key == "default_bin_width") {
            auto w = text::parse_double(value);
            if (!w) {
                // Allow fractions such as 1/30.
                auto slash = value.find('/');
                if (slash != std::string_view::npos) {
                    auto num = text::parse_double(value.substr(0, slash));
                    auto den = text::parse_double(value.substr(slash + 1));
                    if (num && den && *den != 0.0) w = *num / *den;
                }
            }
            if (!w || !(*w > 0.0)) throw MalformedRow(line_no, "default_bin_width must be a positive number");
            config.default_bin_width = *w;
        } else if (key == "default_framework") {
            try {
                config.default_framework = parse_framework(value);
            } catch (const InvalidArgument& e) {
                throw MalformedRow(line_no, e.what());
            }
        } else {
            throw MalformedRow(line_no, "unknown key '" + std::string(key) + "'");
        }
    }
    return config;
}

} // namespace ousio
