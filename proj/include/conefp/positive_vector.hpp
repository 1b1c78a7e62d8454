#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "conefp/errors.hpp"

namespace conefp {

/// Entries below this bound are rejected so that ratio and log arithmetic
/// stays well clear of denormal range.
inline constexpr double kMinPositiveEntry = 1e-300;

namespace detail {

inline double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

inline bool entrywise_leq(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline void check_same_dim(std::size_t a, std::size_t b, const char* where) {
    if (a != b)
        throw DimensionMismatch(std::string(where) + ": dimensions " + std::to_string(a) +
                                " and " + std::to_string(b) + " differ");
}

}  // namespace detail

/// A strictly positive vector, the points of the open positive orthant.
/// Immutable after construction; every entry is finite and >= 1e-300.
class PositiveVector {
public:
    explicit PositiveVector(std::vector<double> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) throw ValidationError("PositiveVector: dimension must be >= 1");
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const double e = entries_[i];
            if (!std::isfinite(e))
                throw ValidationError("PositiveVector: entry " + std::to_string(i + 1) +
                                      " is not finite");
            if (e < kMinPositiveEntry)
                throw ValidationError("PositiveVector: entry " + std::to_string(i + 1) +
                                      " is below the positivity floor");
        }
    }

    static PositiveVector ones(int n) {
        return PositiveVector(std::vector<double>(static_cast<std::size_t>(n), 1.0));
    }

    int dim() const { return static_cast<int>(entries_.size()); }
    double operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& entries() const { return entries_; }
    double sup_norm() const { return detail::sup_norm(entries_); }

    friend bool operator==(const PositiveVector& a, const PositiveVector& b) {
        return a.entries_ == b.entries_;
    }

private:
    std::vector<double> entries_;
};

/// A nonnegative vector; houses boundary points and coordinate projections.
class NonnegVector {
public:
    explicit NonnegVector(std::vector<double> entries) : entries_(std::move(entries)) {
        if (entries_.empty()) throw ValidationError("NonnegVector: dimension must be >= 1");
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const double e = entries_[i];
            if (!std::isfinite(e) || e < 0.0)
                throw ValidationError("NonnegVector: entry " + std::to_string(i + 1) +
                                      " must be finite and >= 0");
        }
    }

    static NonnegVector zero(int n) {
        return NonnegVector(std::vector<double>(static_cast<std::size_t>(n), 0.0));
    }

    /// Projection onto the coordinates in `keep` (everything else zeroed).
    static NonnegVector project(const std::vector<double>& x, const std::vector<int>& keep) {
        std::vector<double> out(x.size(), 0.0);
        for (int j : keep) out[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
        return NonnegVector(std::move(out));
    }

    int dim() const { return static_cast<int>(entries_.size()); }
    double operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& entries() const { return entries_; }
    bool is_zero() const {
        return std::all_of(entries_.begin(), entries_.end(), [](double e) { return e == 0.0; });
    }

private:
    std::vector<double> entries_;
};

}  // namespace conefp
