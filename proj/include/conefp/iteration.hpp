#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "conefp/cone_metrics.hpp"
#include "conefp/map_models.hpp"
#include "conefp/positive_vector.hpp"
#include "conefp/rng.hpp"

namespace conefp {

struct SolveOptions {
    double tolerance = 1e-10;       // on the Hilbert distance between consecutive iterates
    int max_iters = 100000;
    std::optional<double> damping;  // lambda in (0,1); absent = plain normalized iteration
    bool record_trace = false;
    std::uint64_t seed = 0;
    int period_window = 64;

    void validate() const {
        if (!(tolerance > 0.0 && tolerance < 1.0))
            throw ValidationError("SolveOptions: tolerance must be in (0,1)");
        if (max_iters < 1) throw ValidationError("SolveOptions: max_iters must be >= 1");
        if (damping && !(*damping >= 0.0 && *damping < 1.0))
            throw ValidationError("SolveOptions: damping must be in [0,1)");
        if (period_window < 1) throw ValidationError("SolveOptions: period window must be >= 1");
    }
};

/// Recorded orbit. Row k holds the sup-normalized iterate x_k, the ratio
/// bracket [m_k, M_k] of f(x_k)/x_k, the Hilbert step distance to x_{k+1},
/// and the sup norm of f(x_k) before normalization (`scale`, needed to
/// reconstruct the unnormalized orbit in log space).
struct OrbitTrace {
    std::vector<std::vector<double>> iterates;
    std::vector<double> max_ratio;
    std::vector<double> min_ratio;
    std::vector<double> d_hilbert_step;
    std::vector<double> scale;
    bool damped = false;

    std::size_t size() const { return iterates.size(); }
};

struct SolveResult {
    explicit SolveResult(PositiveVector u) : eigenvector(std::move(u)) {}

    PositiveVector eigenvector;        // sup-norm 1; last iterate when not converged
    double eigenvalue_lower = 0.0;     // Collatz-Wielandt bracket at the final step
    double eigenvalue_upper = 0.0;
    bool converged = false;
    int iterations_used = 0;
    std::optional<OrbitTrace> trace;
    std::optional<int> period_detected;
    std::string diagnostic;
};

/// Smallest p <= window with hilbert(x_k, x_{k+p}) < tolerance across the
/// final window of the trace; nullopt when no such p exists.
inline std::optional<int> detect_period(const OrbitTrace& trace, int window, double tolerance) {
    const std::size_t len = trace.size();
    if (window < 1) throw ValidationError("detect_period: window must be >= 1");
    if (len < 2 * static_cast<std::size_t>(window))
        throw ValidationError("detect_period: trace must hold at least 2*window iterates");
    for (int p = 1; p <= window; ++p) {
        bool matches = true;
        for (std::size_t k = len - static_cast<std::size_t>(window) - static_cast<std::size_t>(p);
             k + static_cast<std::size_t>(p) < len && matches; ++k) {
            if (detail::hilbert_raw(trace.iterates[k], trace.iterates[k + static_cast<std::size_t>(p)]) >=
                tolerance)
                matches = false;
        }
        if (matches) return p;
    }
    return std::nullopt;
}

namespace detail {

struct RollingWindow {
    // Last capacity iterates, kept for on-line period detection.
    std::size_t capacity;
    std::vector<std::vector<double>> ring;
    std::size_t total = 0;

    explicit RollingWindow(std::size_t cap) : capacity(cap) {}

    void push(const std::vector<double>& x) {
        if (ring.size() < capacity)
            ring.push_back(x);
        else
            ring[total % capacity] = x;
        ++total;
    }

    OrbitTrace as_trace() const {
        OrbitTrace t;
        const std::size_t count = std::min(total, capacity);
        t.iterates.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            t.iterates.push_back(ring[(total - count + i) % capacity]);
        return t;
    }
};

}  // namespace detail

namespace detail {

inline SolveResult run_iteration(const MapModel& map, const PositiveVector& x0,
                                 const SolveOptions& opts, bool damped_mode) {
    opts.validate();
    if (x0.dim() != map.dim()) throw DimensionMismatch("iterate: start has wrong dimension");
    const double lambda = damped_mode ? *opts.damping : 1.0;

    std::vector<double> x = normalized_sup_raw(x0.entries());
    OrbitTrace trace;
    trace.damped = damped_mode;
    RollingWindow recent(2 * static_cast<std::size_t>(opts.period_window) + 2);
    recent.push(x);

    SolveResult result{PositiveVector(x)};
    double last_m = 0.0, last_hi = 0.0;

    for (int k = 0; k < opts.max_iters; ++k) {
        std::vector<double> y;
        try {
            y = map.eval_raw(x);
        } catch (const EvaluationError& err) {
            result.converged = false;
            result.iterations_used = k;
            result.diagnostic = std::string("evaluation aborted: ") + err.what();
            result.eigenvector = PositiveVector(x);
            if (opts.record_trace) result.trace = std::move(trace);
            return result;
        }
        double ratio_lo = std::numeric_limits<double>::infinity(), ratio_hi = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] / x[i];
            ratio_lo = std::min(ratio_lo, r);
            ratio_hi = std::max(ratio_hi, r);
        }
        if (!(ratio_hi > 0.0) || !std::isfinite(ratio_hi)) {
            result.iterations_used = k;
            result.diagnostic = "evaluation aborted: degenerate ratio bracket";
            if (opts.record_trace) result.trace = std::move(trace);
            return result;
        }
        last_m = ratio_lo;
        last_hi = ratio_hi;
        const double residual = std::log(ratio_hi / ratio_lo);

        // Next iterate. The damped step first rescales f by the certified
        // upper ratio so that the damping targets eigenvalue one.
        std::vector<double> next(x.size());
        if (lambda == 1.0) {
            next = y;
        } else {
            for (std::size_t i = 0; i < x.size(); ++i)
                next[i] = lambda * y[i] / ratio_hi + (1.0 - lambda) * x[i];
        }
        const double step_norm = sup_norm(next);
        for (auto& e : next) e /= step_norm;

        const double dh_step = hilbert_raw(x, next);
        if (opts.record_trace) {
            trace.iterates.push_back(x);
            trace.max_ratio.push_back(ratio_hi);
            trace.min_ratio.push_back(ratio_lo);
            trace.d_hilbert_step.push_back(dh_step);
            trace.scale.push_back(sup_norm(y));
        }

        result.iterations_used = k + 1;
        result.eigenvalue_lower = ratio_lo;
        result.eigenvalue_upper = ratio_hi;

        // Boundary escape: iterates of maps without a positive eigenvector
        // can drain a coordinate to zero.
        double min_entry = std::numeric_limits<double>::infinity();
        for (double e : next) min_entry = std::min(min_entry, e);
        if (min_entry < kMinPositiveEntry) {
            result.converged = false;
            result.diagnostic = "boundary escape: an iterate coordinate fell below the positivity floor";
            result.eigenvector = PositiveVector(x);
            if (opts.record_trace) result.trace = std::move(trace);
            return result;
        }

        if (residual < opts.tolerance) {
            result.converged = true;
            result.eigenvector = PositiveVector(lambda == 1.0 ? next : x);
            if (opts.record_trace) result.trace = std::move(trace);
            return result;
        }

        x = std::move(next);
        recent.push(x);

        // Periodic orbits keep the residual flat; look for them on line.
        if ((k + 1) % opts.period_window == 0 &&
            recent.total >= 2 * static_cast<std::size_t>(opts.period_window)) {
            const auto window_trace = recent.as_trace();
            if (auto p = detect_period(window_trace, opts.period_window, opts.tolerance);
                p && *p >= 2) {
                result.converged = false;
                result.period_detected = *p;
                result.diagnostic = "orbit settled on a period-" + std::to_string(*p) + " cycle";
                result.eigenvector = PositiveVector(x);
                if (opts.record_trace) result.trace = std::move(trace);
                return result;
            }
        }
    }

    result.converged = false;
    result.eigenvector = PositiveVector(x);
    result.eigenvalue_lower = last_m;
    result.eigenvalue_upper = last_hi;
    result.diagnostic = "max_iters reached";
    if (opts.record_trace) {
        // A final period scan helps the caller diagnose the stall.
        if (trace.size() >= 2 * static_cast<std::size_t>(opts.period_window)) {
            if (auto p = detect_period(trace, opts.period_window, opts.tolerance); p && *p >= 2)
                result.period_detected = *p;
        }
        result.trace = std::move(trace);
    }
    return result;
}

}  // namespace detail

/// Normalized power iteration x_{k+1} = f(x_k)/||f(x_k)||, stopping when the
/// Hilbert distance between consecutive iterates drops below the tolerance.
inline SolveResult iterate_normalized(const MapModel& map, const PositiveVector& x0,
                                      const SolveOptions& opts = {}) {
    SolveOptions plain = opts;
    plain.damping.reset();
    return detail::run_iteration(map, x0, plain, false);
}

/// Damped iteration x_{k+1} = normalize(lambda f(x_k)/rho_k + (1-lambda) x_k)
/// with rho_k the running upper ratio estimate. Fixed directions coincide
/// with the eigendirections of f, and the damping converges on periodic
/// examples where the plain iteration cycles.
inline SolveResult iterate_damped(const MapModel& map, const PositiveVector& x0,
                                  const SolveOptions& opts) {
    if (!opts.damping || !(*opts.damping > 0.0 && *opts.damping < 1.0))
        throw ValidationError("iterate_damped: damping must be set in (0,1)");
    return detail::run_iteration(map, x0, opts, true);
}

/// Largest epsilon with f(y) - f(x) >= epsilon (y - x) at this pair, taken
/// over the coordinates that actually move; nullopt when no positive epsilon
/// works (the pair witnesses a failure of the type K property).
inline std::optional<double> type_k_witness(const MapModel& map, const PositiveVector& x,
                                            const PositiveVector& y) {
    if (x.dim() != y.dim()) throw DimensionMismatch("type_k_witness: dimension mismatch");
    bool any_strict = false;
    for (int i = 0; i < x.dim(); ++i) {
        if (x[i] > y[i]) throw ValidationError("type_k_witness: requires x <= y entrywise");
        if (x[i] < y[i]) any_strict = true;
    }
    if (!any_strict) throw ValidationError("type_k_witness: requires x != y");
    const auto fx = map.eval_raw(x.entries());
    const auto fy = map.eval_raw(y.entries());
    double eps = std::numeric_limits<double>::infinity();
    for (int i = 0; i < x.dim(); ++i) {
        if (y[i] > x[i])
            eps = std::min(eps, (fy[static_cast<std::size_t>(i)] - fx[static_cast<std::size_t>(i)]) /
                                    (y[i] - x[i]));
    }
    if (!(eps > 0.0)) return std::nullopt;
    return eps;
}

/// Trace rows as CSV: k, x_1..x_n, M_k, m_k, dH_step.
inline void write_trace_csv(std::ostream& out, const OrbitTrace& trace) {
    if (trace.iterates.empty()) return;
    const std::size_t n = trace.iterates.front().size();
    out << "k";
    for (std::size_t j = 1; j <= n; ++j) out << ",x_" << j;
    out << ",M_k,m_k,dH_step\n";
    char buf[32];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ',' << buf;
    };
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << k;
        for (double e : trace.iterates[k]) emit(e);
        emit(trace.max_ratio[k]);
        emit(trace.min_ratio[k]);
        emit(trace.d_hilbert_step[k]);
        out << '\n';
    }
}

}  // namespace conefp
