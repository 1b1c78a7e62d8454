#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "conefp/cone_metrics.hpp"
#include "conefp/eig.hpp"
#include "conefp/iteration.hpp"
#include "conefp/map_models.hpp"
#include "conefp/structure.hpp"

namespace conefp {

enum class RateClass { Linear, Sublinear, Inconclusive };

inline std::string rate_class_name(RateClass c) {
    switch (c) {
        case RateClass::Linear: return "linear";
        case RateClass::Sublinear: return "sublinear";
        case RateClass::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

/// Result of fitting d_k ~ c * theta^k on the tail of a distance sequence.
struct RateReport {
    double theta_hat = 1.0;  // in (0, 1]
    RateClass classification = RateClass::Inconclusive;
    std::optional<double> theoretical_bound;  // second-modulus ratio when available
    std::optional<double> lambda_combined;
    std::optional<double> combined_rate;
    int window_begin = 0;  // first index of the fit window
    int window_length = 0;
    double fit_residual_rms = 0.0;
};

inline constexpr double kDistanceFloor = 1e-13;
inline constexpr double kSublinearRatioThreshold = 0.995;
inline constexpr double kLinearThetaMax = 0.999;
inline constexpr double kLinearResidualMax = 0.1;

/// Estimates the R-linear rate of a nonnegative distance sequence by a
/// least-squares fit of log d_k against k over the tail (last 30% of the
/// entries still above the resolution floor). Sequences whose consecutive
/// ratios creep up toward one are classified sublinear.
inline RateReport empirical_rate(const std::vector<double>& distances) {
    if (distances.size() < 20)
        throw ValidationError("empirical_rate: need at least 20 distance samples");
    for (double d : distances)
        if (!std::isfinite(d) || d < 0.0)
            throw ValidationError("empirical_rate: distances must be finite and >= 0");

    std::vector<int> usable;
    for (std::size_t k = 0; k < distances.size(); ++k)
        if (distances[k] > kDistanceFloor) usable.push_back(static_cast<int>(k));

    RateReport report;
    if (usable.size() < 10) {
        // Converged below resolution almost immediately; the data only
        // supports a resolution-limited upper estimate of theta over the
        // steps it took to reach the floor.
        report.classification = RateClass::Linear;
        if (usable.empty()) {
            report.theta_hat = std::numeric_limits<double>::epsilon();
        } else {
            const int first = usable.front();
            int floor_hit = static_cast<int>(distances.size()) - 1;
            for (std::size_t k = static_cast<std::size_t>(first) + 1; k < distances.size(); ++k)
                if (distances[k] <= kDistanceFloor) {
                    floor_hit = static_cast<int>(k);
                    break;
                }
            const double d0 = distances[static_cast<std::size_t>(first)];
            const int steps = std::max(floor_hit - first, 1);
            report.theta_hat = std::clamp(
                std::pow(kDistanceFloor / std::max(d0, kDistanceFloor), 1.0 / steps),
                std::numeric_limits<double>::epsilon(), 1.0);
        }
        report.window_begin = usable.empty() ? 0 : usable.front();
        report.window_length = static_cast<int>(usable.size());
        return report;
    }

    const std::size_t tail_len = std::max<std::size_t>(
        5, static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(usable.size()))));
    const std::vector<int> tail(usable.end() - static_cast<long>(tail_len), usable.end());
    report.window_begin = tail.front();
    report.window_length = static_cast<int>(tail.size());

    // least squares slope of log d vs k
    double sk = 0.0, sl = 0.0, skk = 0.0, skl = 0.0;
    for (int k : tail) {
        const double l = std::log(distances[static_cast<std::size_t>(k)]);
        sk += k;
        sl += l;
        skk += static_cast<double>(k) * k;
        skl += k * l;
    }
    const double m = static_cast<double>(tail.size());
    const double denom = m * skk - sk * sk;
    const double slope = (m * skl - sk * sl) / denom;
    const double intercept = (sl - slope * sk) / m;
    double rss = 0.0;
    for (int k : tail) {
        const double l = std::log(distances[static_cast<std::size_t>(k)]);
        const double e = l - (intercept + slope * k);
        rss += e * e;
    }
    report.fit_residual_rms = std::sqrt(rss / m);
    report.theta_hat = std::clamp(std::exp(slope), std::numeric_limits<double>::epsilon(), 1.0);

    // Sublinear detector: consecutive ratios close to one and not decaying.
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < tail.size(); ++i)
        if (tail[i + 1] == tail[i] + 1)
            ratios.push_back(distances[static_cast<std::size_t>(tail[i + 1])] /
                             distances[static_cast<std::size_t>(tail[i])]);
    bool sublinear = ratios.size() >= 4;
    if (sublinear) {
        std::vector<double> sorted = ratios;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        if (median <= kSublinearRatioThreshold) sublinear = false;
        for (std::size_t i = 0; i + 1 < ratios.size() && sublinear; ++i)
            if (ratios[i + 1] < ratios[i] - 1e-9) sublinear = false;
    }

    if (sublinear)
        report.classification = RateClass::Sublinear;
    else if (report.theta_hat <= kLinearThetaMax && report.fit_residual_rms <= kLinearResidualMax)
        report.classification = RateClass::Linear;
    else
        report.classification = RateClass::Inconclusive;
    return report;
}

/// Number of leading trace entries whose Hilbert distance to u sits above
/// the resolution of u itself. A solver eigenvector is only trustworthy
/// down to the final ratio-bracket gap of its trace; distances below that
/// are noise and would pollute a rate fit.
inline std::size_t trusted_orbit_length(const OrbitTrace& trace, const PositiveVector& u) {
    const std::size_t len = trace.size();
    if (len == 0) return 0;
    const double final_gap = std::log(trace.max_ratio[len - 1] / trace.min_ratio[len - 1]);
    const double trust = std::max(kDistanceFloor, 30.0 * final_gap);
    std::size_t k = 0;
    for (; k < len; ++k)
        if (detail::hilbert_raw(trace.iterates[k], u.entries()) <= trust) break;
    return k;
}

/// Hilbert distances from the trace iterates to u over the trusted prefix,
/// padded with below-resolution zeros so the sequence always meets the
/// 20-sample minimum of the rate fit (past convergence the true distances
/// are indistinguishable from zero anyway).
inline std::vector<double> distances_to_eigenvector(const OrbitTrace& trace,
                                                    const PositiveVector& u) {
    const std::size_t kept = trusted_orbit_length(trace, u);
    std::vector<double> d;
    d.reserve(std::max<std::size_t>(kept, 20));
    for (std::size_t k = 0; k < kept; ++k)
        d.push_back(detail::hilbert_raw(trace.iterates[k], u.entries()));
    while (d.size() < 20) d.push_back(0.0);
    return d;
}

/// Spectral certificate rho_2/rho for the local linear rate at an
/// eigenvector, valid when the Jacobian pattern there is primitive.
struct JacobianRateBound {
    std::optional<double> bound;
    std::string reason;       // set when the bound is absent
    double rho = 0.0;         // largest modulus, when computed
    double rho2 = 0.0;        // second largest modulus, when computed
};

inline JacobianRateBound jacobian_rate_bound(const MapModel& map, const PositiveVector& u) {
    if (u.dim() != map.dim()) throw DimensionMismatch("jacobian_rate_bound: dimension mismatch");
    if (hilbert(map.eval(u), u) > 1e-8)
        throw ValidationError("jacobian_rate_bound: u is not an eigenvector to 1e-8");

    JacobianRateBound out;
    Matrix jac;
    try {
        jac = map.jacobian(u);
    } catch (const NondifferentiablePoint& e) {
        out.reason = std::string("jacobian unavailable: ") + e.what();
        return out;
    }
    if (jac.rows < 2) {
        out.reason = "one-dimensional map has no second eigenvalue";
        out.rho = std::abs(jac(0, 0));
        return out;
    }
    const auto moduli = eig_moduli(jac);
    out.rho = moduli[0];
    out.rho2 = moduli[1];
    if (!is_primitive_pattern(pattern_digraph(jac))) {
        out.reason = "jacobian pattern at u is not primitive (rho2/rho = " +
                     std::to_string(out.rho > 0.0 ? out.rho2 / out.rho : 1.0) + ")";
        return out;
    }
    if (out.rho <= 0.0) {
        out.reason = "spectral radius of the jacobian vanished";
        return out;
    }
    out.bound = out.rho2 / out.rho;
    return out;
}

/// Geometric interpolation of two rates: the exponent balancing
/// eta^lambda = theta^(1-lambda).
struct CombinedRate {
    double lambda;
    double rate;
};

inline CombinedRate combine_rates(double eta, double theta) {
    if (!(eta > 0.0 && eta < 1.0) || !(theta > 0.0 && theta < 1.0))
        throw ValidationError("combine_rates: both arguments must lie in (0,1)");
    const double lambda = std::log(theta) / (std::log(eta) + std::log(theta));
    return {lambda, std::pow(eta, lambda)};
}

/// Rate estimates for the equivalent convergence quantities of a converged
/// normalized orbit: the Hilbert distance to u, the Thompson distance of the
/// rescaled unnormalized orbit to lambda*u, and the sup-norm distance of the
/// normalized orbit to u.
struct RateEquivalence {
    RateReport hilbert_to_u;
    RateReport thompson_rescaled;
    RateReport norm_to_u;
    double lambda_hat = 1.0;   // estimated limit scaling of f^k(x)/r^k against u
    double r_hat = 1.0;        // eigenvalue estimate used for the rescaling
    double max_spread = 0.0;   // largest pairwise gap between the three estimates
    bool agree = false;        // pairwise within 0.05
};

inline RateEquivalence rate_equivalence_check(const MapModel& map, const OrbitTrace& trace,
                                              const PositiveVector& u) {
    if (trace.damped)
        throw ValidationError("rate_equivalence_check: requires an undamped orbit");
    if (trace.size() < 2)
        throw ValidationError("rate_equivalence_check: trace is too short");
    if (u.dim() != map.dim()) throw DimensionMismatch("rate_equivalence_check: dimension mismatch");
    const std::size_t len = trace.size();
    const double final_gap =
        std::log(trace.max_ratio[len - 1] / trace.min_ratio[len - 1]);
    if (!(final_gap < 1e-6))
        throw ValidationError("rate_equivalence_check: trace does not come from a converged solve");

    RateEquivalence out;
    out.r_hat = trace.max_ratio[len - 1];
    const double log_r = std::log(out.r_hat);

    // log of the rescaled orbit magnitude: log ||-free scale of f^k(x)/r^k
    std::vector<double> log_scale(len, 0.0);
    for (std::size_t k = 1; k < len; ++k)
        log_scale[k] = log_scale[k - 1] + std::log(trace.scale[k - 1]) - log_r;

    const auto& u_entries = u.entries();
    out.lambda_hat =
        std::exp(log_scale[len - 1]) *
        detail::ratio_extremes(trace.iterates[len - 1], u_entries).second;
    const double log_lambda = std::log(out.lambda_hat);

    // all three sequences share the truncation of the Hilbert one, which
    // cuts the tail that sits below the resolution of u; padding keeps them
    // long enough to fit
    const std::size_t kept = trusted_orbit_length(trace, u);
    const std::size_t padded = std::max<std::size_t>(kept, 20);
    std::vector<double> d_hilbert(padded, 0.0), d_thompson(padded, 0.0), d_norm(padded, 0.0);
    for (std::size_t k = 0; k < kept; ++k) {
        d_hilbert[k] = detail::hilbert_raw(trace.iterates[k], u_entries);
        d_thompson[k] =
            detail::thompson_log_scaled(log_scale[k] - log_lambda, trace.iterates[k], u_entries);
        double nd = 0.0;
        for (std::size_t i = 0; i < u_entries.size(); ++i)
            nd = std::max(nd, std::abs(trace.iterates[k][i] - u_entries[i]));
        d_norm[k] = nd;
    }

    out.hilbert_to_u = empirical_rate(d_hilbert);
    out.thompson_rescaled = empirical_rate(d_thompson);
    out.norm_to_u = empirical_rate(d_norm);

    const double a = out.hilbert_to_u.theta_hat;
    const double b = out.thompson_rescaled.theta_hat;
    const double c = out.norm_to_u.theta_hat;
    out.max_spread = std::max({std::abs(a - b), std::abs(a - c), std::abs(b - c)});
    out.agree = out.max_spread <= 0.05;
    return out;
}

}  // namespace conefp
