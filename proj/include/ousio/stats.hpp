#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace ousio::stats {

struct WeightedSummary {
    double total_weight = 0.0;
    double mean = 0.0;
    double std = 0.0; ///< population standard deviation under the normalized weights
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
};

inline void check_weights(std::span<const double> values, std::span<const double> weights, const char* what) {
    if (values.size() != weights.size()) throw InvalidArgument(std::string(what) + ": values and weights differ in length");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument(std::string(what) + ": weights must be finite and non-negative");
}

/// Smallest value at which the cumulative weight reaches half the total.
/// The comparison carries a relative slack of 1e-12 so that rescaling the
/// weights cannot move the median through rounding.
inline double weighted_median(std::span<const double> values, std::span<const double> weights) {
    check_weights(values, weights, "weighted_median");
    std::vector<std::size_t> order;
    order.reserve(values.size());
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] > 0.0) {
            order.push_back(i);
            total += weights[i];
        }
    }
    if (order.empty()) throw EmptyInput("weighted_median needs positive total weight");
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    const double half = 0.5 * total * (1.0 - 1e-12);
    double cumulative = 0.0;
    for (std::size_t i : order) {
        cumulative += weights[i];
        if (cumulative >= half) return values[i];
    }
    return values[order.back()];
}

inline WeightedSummary summarize(std::span<const double> values, std::span<const double> weights) {
    check_weights(values, weights, "summarize");
    WeightedSummary s;
    s.total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(s.total_weight > 0.0)) throw EmptyInput("summarize needs positive total weight");

    double sum = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        sum += weights[i] * values[i];
        if (first || values[i] < s.min) s.min = values[i];
        if (first || values[i] > s.max) s.max = values[i];
        first = false;
    }
    s.mean = sum / s.total_weight;
    double ss = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - s.mean;
        ss += weights[i] * d * d;
    }
    s.std = std::sqrt(ss / s.total_weight);
    s.median = weighted_median(values, weights);
    return s;
}

} // namespace ousio::stats
