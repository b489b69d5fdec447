#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "k2rag/error.hpp"

namespace k2rag::stats {

inline double mean(const std::vector<double>& values) {
    if (values.empty())
        throw Error(ErrorCategory::internal, "mean of empty set");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

/// Quantile by linear interpolation between closest ranks: h = (n-1)*q.
/// Input must be sorted ascending.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty())
        throw Error(ErrorCategory::internal, "quantile of empty set");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    double h = static_cast<double>(sorted.size() - 1) * q;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = static_cast<std::size_t>(std::ceil(h));
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, q);
}

} // namespace k2rag::stats
