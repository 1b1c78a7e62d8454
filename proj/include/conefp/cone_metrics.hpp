#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "conefp/positive_vector.hpp"

namespace conefp {

namespace detail {

// Smallest and largest coordinate ratio x_i / y_i for strictly positive raw
// vectors. The pair (min, max) brackets every scalar comparison of x against y.
inline std::pair<double, double> ratio_extremes(const std::vector<double>& x,
                                                const std::vector<double>& y) {
    check_same_dim(x.size(), y.size(), "ratio_extremes");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = x[i] / y[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

inline double thompson_raw(const std::vector<double>& x, const std::vector<double>& y) {
    const auto [lo, hi] = ratio_extremes(x, y);
    return std::max(std::log(hi), -std::log(lo));
}

inline double hilbert_raw(const std::vector<double>& x, const std::vector<double>& y) {
    const auto [lo, hi] = ratio_extremes(x, y);
    return std::log(hi / lo);
}

// Thompson distance between a*x and y where only log(a) is known. Keeps the
// scale in log space so products of thousands of step norms cannot overflow.
inline double thompson_log_scaled(double log_a, const std::vector<double>& x,
                                  const std::vector<double>& y) {
    const auto [lo, hi] = ratio_extremes(x, y);
    return std::max(log_a + std::log(hi), -(log_a + std::log(lo)));
}

inline std::vector<double> normalized_sup_raw(const std::vector<double>& x) {
    const double n = sup_norm(x);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / n;
    return out;
}

}  // namespace detail

/// M(x/y): the least beta with x <= beta * y in the orthant order.
inline double m_upper(const PositiveVector& x, const PositiveVector& y) {
    return detail::ratio_extremes(x.entries(), y.entries()).second;
}

/// m(x/y): the greatest alpha with alpha * y <= x.
inline double m_lower(const PositiveVector& x, const PositiveVector& y) {
    return detail::ratio_extremes(x.entries(), y.entries()).first;
}

/// Thompson metric max{log M(x/y), log M(y/x)}; a metric on the open orthant.
inline double thompson(const PositiveVector& x, const PositiveVector& y) {
    return detail::thompson_raw(x.entries(), y.entries());
}

/// Hilbert projective metric log(M(x/y) / m(x/y)); invariant under positive
/// scaling of either argument and zero exactly on proportional pairs.
inline double hilbert(const PositiveVector& x, const PositiveVector& y) {
    return detail::hilbert_raw(x.entries(), y.entries());
}

/// Rescale to sup-norm one.
inline PositiveVector normalize_sup(const PositiveVector& x) {
    return PositiveVector(detail::normalized_sup_raw(x.entries()));
}

}  // namespace conefp
