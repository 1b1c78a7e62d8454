#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conefp/errors.hpp"
#include "conefp/map_models.hpp"

namespace conefp {

// ---------------------------------------------------------------------------
// Topical expression trees
// ---------------------------------------------------------------------------

/// Affine term a.x + b with a sub-stochastic coefficient row (entries >= 0,
/// sum <= 1). Sub-stochasticity is the syntactic certificate that the whole
/// tree is monotone and sup-norm nonexpansive; rows summing to exactly one
/// additionally give additive homogeneity. Constant branches such as
/// min(x_2, 1) need the sub-stochastic case.
struct TopicalAffine {
    std::vector<double> coeffs;
    double offset = 0.0;

    bool stochastic() const {
        double total = 0.0;
        for (double c : coeffs) total += c;
        return std::abs(total - 1.0) <= 1e-12;
    }
};

class TopicalExpr {
public:
    enum class Kind { Affine, Max, Min, LogSumExp };

    static TopicalExpr affine(std::vector<double> coeffs, double offset) {
        double total = 0.0;
        for (double c : coeffs) {
            if (!std::isfinite(c) || c < 0.0)
                throw ValidationError("TopicalExpr: coefficients must be finite and >= 0");
            total += c;
        }
        if (total > 1.0 + 1e-12)
            throw ValidationError("TopicalExpr: coefficient row must sum to at most 1");
        if (!std::isfinite(offset)) throw ValidationError("TopicalExpr: offset must be finite");
        TopicalExpr e;
        e.kind_ = Kind::Affine;
        e.term_.coeffs = std::move(coeffs);
        e.term_.offset = offset;
        return e;
    }

    static TopicalExpr max(std::vector<TopicalExpr> children) {
        return combine(Kind::Max, std::move(children));
    }
    static TopicalExpr min(std::vector<TopicalExpr> children) {
        return combine(Kind::Min, std::move(children));
    }
    /// Smooth aggregation log(sum exp(children)); the log-coordinate image of
    /// a sum node. Not piecewise affine.
    static TopicalExpr log_sum_exp(std::vector<TopicalExpr> children) {
        return combine(Kind::LogSumExp, std::move(children));
    }

    Kind kind() const { return kind_; }
    const TopicalAffine& term() const { return term_; }
    const std::vector<TopicalExpr>& children() const { return children_; }

    int max_variable() const {
        if (kind_ == Kind::Affine) {
            for (int j = static_cast<int>(term_.coeffs.size()) - 1; j >= 0; --j)
                if (term_.coeffs[static_cast<std::size_t>(j)] != 0.0) return j;
            return static_cast<int>(term_.coeffs.size()) - 1;
        }
        int m = -1;
        for (const auto& c : children_) m = std::max(m, c.max_variable());
        return m;
    }

    bool all_rows_stochastic() const {
        if (kind_ == Kind::Affine) return term_.stochastic();
        for (const auto& c : children_)
            if (!c.all_rows_stochastic()) return false;
        return true;
    }

    bool contains(Kind k) const {
        if (kind_ == k) return true;
        for (const auto& c : children_)
            if (c.contains(k)) return true;
        return false;
    }

    double eval(const std::vector<double>& x) const {
        switch (kind_) {
            case Kind::Affine: {
                double v = term_.offset;
                for (std::size_t j = 0; j < term_.coeffs.size(); ++j) v += term_.coeffs[j] * x[j];
                return v;
            }
            case Kind::Max: {
                double v = -std::numeric_limits<double>::infinity();
                for (const auto& c : children_) v = std::max(v, c.eval(x));
                return v;
            }
            case Kind::Min: {
                double v = std::numeric_limits<double>::infinity();
                for (const auto& c : children_) v = std::min(v, c.eval(x));
                return v;
            }
            case Kind::LogSumExp: {
                // shift by the max for stability
                std::vector<double> vals;
                vals.reserve(children_.size());
                double peak = -std::numeric_limits<double>::infinity();
                for (const auto& c : children_) {
                    vals.push_back(c.eval(x));
                    peak = std::max(peak, vals.back());
                }
                double s = 0.0;
                for (double v : vals) s += std::exp(v - peak);
                return peak + std::log(s);
            }
        }
        return 0.0;
    }

    /// Leafwise map: offset_new = scale * offset + shift, coefficient rows
    /// rescaled by `scale` and augmented by `unit_weight` on coordinate
    /// `unit_var`. Valid through max and min for scale > 0.
    TopicalExpr reweighted(double scale, double shift, int unit_var, double unit_weight) const {
        if (kind_ == Kind::Affine) {
            std::vector<double> coeffs(term_.coeffs.size());
            for (std::size_t j = 0; j < coeffs.size(); ++j) coeffs[j] = scale * term_.coeffs[j];
            if (unit_weight != 0.0) coeffs[static_cast<std::size_t>(unit_var)] += unit_weight;
            return affine(std::move(coeffs), scale * term_.offset + shift);
        }
        if (kind_ == Kind::LogSumExp)
            throw ValidationError("TopicalExpr: cannot rescale a smooth aggregation leafwise");
        std::vector<TopicalExpr> mapped;
        mapped.reserve(children_.size());
        for (const auto& c : children_) mapped.push_back(c.reweighted(scale, shift, unit_var, unit_weight));
        return combine(kind_, std::move(mapped));
    }

    /// Leafwise constant shift; also valid through log_sum_exp.
    TopicalExpr shifted(double delta) const {
        if (kind_ == Kind::Affine) {
            auto coeffs = term_.coeffs;
            return affine(std::move(coeffs), term_.offset + delta);
        }
        std::vector<TopicalExpr> mapped;
        mapped.reserve(children_.size());
        for (const auto& c : children_) mapped.push_back(c.shifted(delta));
        return combine(kind_, std::move(mapped));
    }

private:
    static TopicalExpr combine(Kind k, std::vector<TopicalExpr> children) {
        if (children.empty()) throw ValidationError("TopicalExpr: node needs at least one child");
        TopicalExpr e;
        e.kind_ = k;
        e.children_ = std::move(children);
        return e;
    }

    Kind kind_ = Kind::Affine;
    TopicalAffine term_;
    std::vector<TopicalExpr> children_;
};

/// Monotone sup-norm nonexpansive self-map of R^n given per coordinate by a
/// min-max tree over sub-stochastic affine terms (plus the smooth
/// log-sum-exp node produced by log conjugation of sum expressions). When
/// every coefficient row sums to one the map is also additively homogeneous.
class TopicalMap {
public:
    TopicalMap(int dim, std::vector<TopicalExpr> coords) : dim_(dim), coords_(std::move(coords)) {
        if (dim_ < 1) throw ValidationError("TopicalMap: dimension must be >= 1");
        if (static_cast<int>(coords_.size()) != dim_)
            throw ValidationError("TopicalMap: need one expression per coordinate");
        for (const auto& c : coords_) check_rows(c);
        smooth_ = false;
        homogeneous_ = true;
        for (const auto& c : coords_) {
            smooth_ = smooth_ || c.contains(TopicalExpr::Kind::LogSumExp);
            homogeneous_ = homogeneous_ && c.all_rows_stochastic();
        }
    }

    int dim() const { return dim_; }
    const std::vector<TopicalExpr>& coords() const { return coords_; }
    bool piecewise_affine() const { return !smooth_; }
    bool additively_homogeneous() const { return homogeneous_; }

    std::vector<double> eval(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != dim_)
            throw DimensionMismatch("TopicalMap::eval: dimension mismatch");
        std::vector<double> y(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i) y[static_cast<std::size_t>(i)] = coords_[static_cast<std::size_t>(i)].eval(x);
        for (double v : y)
            if (!std::isfinite(v)) throw EvaluationError("TopicalMap::eval: non-finite output");
        return y;
    }

private:
    void check_rows(const TopicalExpr& e) const {
        if (e.kind() == TopicalExpr::Kind::Affine) {
            if (static_cast<int>(e.term().coeffs.size()) != dim_)
                throw ValidationError("TopicalMap: affine row length must equal the dimension");
            return;
        }
        for (const auto& c : e.children()) check_rows(c);
    }

    int dim_;
    std::vector<TopicalExpr> coords_;
    bool smooth_;
    bool homogeneous_;
};

inline std::vector<double> eval_topical(const TopicalMap& f, const std::vector<double>& x) {
    return f.eval(x);
}

/// Convex combination (1-lambda) id + lambda F as a topical map, used to run
/// the averaged iteration through the same machinery. Requires a piecewise
/// affine map.
inline TopicalMap averaged_with_identity(const TopicalMap& f, double lambda = 0.5) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw ValidationError("averaged_with_identity: lambda must be in (0,1)");
    if (!f.piecewise_affine())
        throw ValidationError("averaged_with_identity: requires a piecewise affine map");
    std::vector<TopicalExpr> coords;
    coords.reserve(static_cast<std::size_t>(f.dim()));
    for (int i = 0; i < f.dim(); ++i)
        coords.push_back(f.coords()[static_cast<std::size_t>(i)].reweighted(lambda, 0.0, i, 1.0 - lambda));
    return TopicalMap(f.dim(), std::move(coords));
}

/// F(x) - w, again a topical map (the coefficient rows are untouched).
inline TopicalMap subtract_drift(const TopicalMap& f, const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != f.dim())
        throw DimensionMismatch("subtract_drift: dimension mismatch");
    std::vector<TopicalExpr> coords;
    coords.reserve(static_cast<std::size_t>(f.dim()));
    for (int i = 0; i < f.dim(); ++i)
        coords.push_back(f.coords()[static_cast<std::size_t>(i)].shifted(-w[static_cast<std::size_t>(i)]));
    return TopicalMap(f.dim(), std::move(coords));
}

// ---------------------------------------------------------------------------
// Fixed points, cycle times, half-lines
// ---------------------------------------------------------------------------

namespace detail {

inline double sup_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace detail

struct KmOptions {
    double tolerance = 1e-10;  // on ||F(x) - x||_inf
    int max_iters = 100000;
};

struct KmResult {
    std::vector<double> fixed_point;  // last iterate when not converged
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
    std::optional<std::vector<double>> cycle_time_estimate;  // attached on failure
};

/// Averaged fixed-point iteration x <- (x + F(x))/2 for the sup-norm
/// nonexpansive map F. Converges whenever F has a fixed point; on failure a
/// cycle time estimate explains the drift.
inline KmResult km_fixed_point(const TopicalMap& f, const std::vector<double>& x0,
                               const KmOptions& opts = {}) {
    if (static_cast<int>(x0.size()) != f.dim())
        throw DimensionMismatch("km_fixed_point: start has wrong dimension");
    KmResult res;
    std::vector<double> x = x0;
    for (int k = 0; k <= opts.max_iters; ++k) {
        const auto fx = f.eval(x);
        res.residual = detail::sup_dist(fx, x);
        res.iterations = k;
        if (res.residual < opts.tolerance) {
            res.fixed_point = x;
            res.converged = true;
            return res;
        }
        if (k == opts.max_iters) break;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.5 * (x[i] + fx[i]);
    }
    res.fixed_point = x;
    res.converged = false;
    // estimate the drift from a plain orbit continuation
    const int kCycleSteps = 1000;
    std::vector<double> y = x;
    for (int k = 0; k < kCycleSteps; ++k) y = f.eval(y);
    std::vector<double> w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = (y[i] - x[i]) / kCycleSteps;
    res.cycle_time_estimate = std::move(w);
    return res;
}

/// F^K(x0)/K; the cycle time vector up to O(1/K) independently of x0.
inline std::vector<double> cycle_time(const TopicalMap& f, const std::vector<double>& x0, int iters) {
    if (iters < 100) throw ValidationError("cycle_time: need at least 100 iterations");
    if (static_cast<int>(x0.size()) != f.dim())
        throw DimensionMismatch("cycle_time: start has wrong dimension");
    std::vector<double> x = x0;
    for (int k = 0; k < iters; ++k) x = f.eval(x);
    std::vector<double> w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = x[i] / iters;
    return w;
}

struct HalfLine {
    std::vector<double> v;
    std::vector<double> w;
};

/// Checks the invariant half-line identity F(v + t w) = v + (t+1) w on a
/// sample grid of t values.
inline bool half_line_check(const TopicalMap& f, const HalfLine& h, const std::vector<double>& t_grid,
                            double tolerance = 1e-10) {
    if (static_cast<int>(h.v.size()) != f.dim() || static_cast<int>(h.w.size()) != f.dim())
        throw DimensionMismatch("half_line_check: half-line has wrong dimension");
    if (t_grid.size() < 10) throw ValidationError("half_line_check: need at least 10 grid points");
    std::vector<double> point(h.v.size());
    for (double t : t_grid) {
        if (t < 0.0) throw ValidationError("half_line_check: grid values must be >= 0");
        for (std::size_t i = 0; i < point.size(); ++i) point[i] = h.v[i] + t * h.w[i];
        const auto image = f.eval(point);
        for (std::size_t i = 0; i < point.size(); ++i) {
            const double expected = h.v[i] + (t + 1.0) * h.w[i];
            if (std::abs(image[i] - expected) > tolerance) return false;
        }
    }
    return true;
}

inline std::vector<double> uniform_grid(double t_max, int points) {
    if (points < 2) throw ValidationError("uniform_grid: need at least 2 points");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        grid[static_cast<std::size_t>(i)] = t_max * static_cast<double>(i) / (points - 1);
    return grid;
}

struct ReducedMap {
    TopicalMap g;          // F - w
    int settle_steps = 0;  // m with F^{k+m}(x) = G^k(F^m(x)) + k w on the samples
};

/// Removes a verified drift w from F and confirms the conjugation identity
/// F^{k+m}(x) = G^k(F^m(x)) + k w on sample starts, doubling m until it
/// holds for k <= 20.
inline ReducedMap reduce_by_half_line(const TopicalMap& f, const std::vector<double>& w,
                                      const std::vector<std::vector<double>>& samples,
                                      double tolerance = 1e-8) {
    TopicalMap g = subtract_drift(f, w);
    if (samples.empty()) throw ValidationError("reduce_by_half_line: need at least one sample start");
    constexpr int kMaxK = 20;
    constexpr int kMaxM = 1 << 14;
    for (int m = 0; m <= kMaxM; m = (m == 0) ? 1 : 2 * m) {
        bool ok = true;
        for (const auto& x0 : samples) {
            if (static_cast<int>(x0.size()) != f.dim())
                throw DimensionMismatch("reduce_by_half_line: sample has wrong dimension");
            std::vector<double> fm = x0;
            for (int i = 0; i < m; ++i) fm = f.eval(fm);
            std::vector<double> f_orbit = fm;  // F^{k+m}(x0)
            std::vector<double> g_orbit = fm;  // G^k(F^m(x0))
            for (int k = 1; k <= kMaxK && ok; ++k) {
                f_orbit = f.eval(f_orbit);
                g_orbit = g.eval(g_orbit);
                for (std::size_t i = 0; i < f_orbit.size() && ok; ++i) {
                    const double expected = g_orbit[i] + k * w[i];
                    if (std::abs(f_orbit[i] - expected) > tolerance) ok = false;
                }
            }
            if (!ok) break;
        }
        if (ok) return {std::move(g), m};
    }
    throw EvaluationError(
        "reduce_by_half_line: conjugation identity failed for all m <= 2^14; w is likely not "
        "the cycle time vector");
}

inline constexpr double kDistanceFloorLocal = 1e-13;

struct LocalLinearOptions {
    int max_orbit = 4000;
    double settle_fraction = 0.25;  // skip this share of the orbit as transient
    double gamma_margin = 1e-9;     // accept gamma only below 1 - margin
};

struct LocalLinearResult {
    bool found = false;
    int m = 0;
    double gamma = 1.0;
};

/// Searches m in {1,2,4,...,256} for a tail contraction
/// ||F^{k+m}(x0) - u|| <= gamma ||F^k(x0) - u|| with gamma < 1.
inline LocalLinearResult verify_local_linear(const TopicalMap& f, const std::vector<double>& u,
                                             const std::vector<double>& x0,
                                             const LocalLinearOptions& opts = {}) {
    if (static_cast<int>(u.size()) != f.dim() || static_cast<int>(x0.size()) != f.dim())
        throw DimensionMismatch("verify_local_linear: dimension mismatch");
    const auto fu = f.eval(u);
    if (detail::sup_dist(fu, u) > 1e-8)
        throw ValidationError("verify_local_linear: u is not a fixed point to 1e-8");

    std::vector<double> dist;
    std::vector<double> x = x0;
    dist.push_back(detail::sup_dist(x, u));
    for (int k = 0; k < opts.max_orbit; ++k) {
        x = f.eval(x);
        dist.push_back(detail::sup_dist(x, u));
        if (dist.back() <= 1e-14) break;
    }
    const std::size_t len = dist.size();
    const std::size_t k_min = static_cast<std::size_t>(opts.settle_fraction * static_cast<double>(len));

    LocalLinearResult best;
    for (int m = 1; m <= 256; m *= 2) {
        double gamma = 0.0;
        bool any_pair = false;
        for (std::size_t k = k_min; k + static_cast<std::size_t>(m) < len; ++k) {
            if (dist[k] <= kDistanceFloorLocal) continue;
            any_pair = true;
            gamma = std::max(gamma, dist[k + static_cast<std::size_t>(m)] / dist[k]);
        }
        if (!any_pair) {
            // orbit reached u below resolution; finite convergence
            best.found = true;
            best.m = m;
            best.gamma = 1e-15;
            return best;
        }
        if (gamma < 1.0 - opts.gamma_margin) {
            best.found = true;
            best.m = m;
            best.gamma = std::max(gamma, 1e-15);
            return best;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Log conjugation bridge from the multiplicative DSL
// ---------------------------------------------------------------------------

namespace detail {

inline TopicalExpr log_conjugate_expr(const Expr& e, int dim) {
    switch (e.kind()) {
        case Expr::Kind::Monomial: {
            std::vector<double> row(static_cast<std::size_t>(dim), 0.0);
            const auto& alpha = e.exponents();
            for (std::size_t j = 0; j < alpha.size(); ++j) row[j] = alpha[j];
            return TopicalExpr::affine(std::move(row), std::log(e.coeff()));
        }
        case Expr::Kind::Max: {
            std::vector<TopicalExpr> children;
            for (const auto& c : e.children()) children.push_back(log_conjugate_expr(c, dim));
            return TopicalExpr::max(std::move(children));
        }
        case Expr::Kind::Min: {
            std::vector<TopicalExpr> children;
            for (const auto& c : e.children()) children.push_back(log_conjugate_expr(c, dim));
            return TopicalExpr::min(std::move(children));
        }
        case Expr::Kind::Sum: {
            std::vector<TopicalExpr> children;
            for (const auto& c : e.children()) children.push_back(log_conjugate_expr(c, dim));
            return TopicalExpr::log_sum_exp(std::move(children));
        }
    }
    throw std::logic_error("log_conjugate_expr: unreachable");
}

}  // namespace detail

/// The topical map log . f . exp of a DSL map. Pure max/min/monomial trees
/// land in the piecewise affine class; sum nodes become smooth log-sum-exp
/// aggregations, and the result is then usable for evaluation only.
inline TopicalMap log_conjugate(const ExprMap& f) {
    std::vector<TopicalExpr> coords;
    coords.reserve(static_cast<std::size_t>(f.dim()));
    for (const auto& c : f.coords()) coords.push_back(detail::log_conjugate_expr(c, f.dim()));
    return TopicalMap(f.dim(), std::move(coords));
}

// ---------------------------------------------------------------------------
// Table form (value iteration operator)
// ---------------------------------------------------------------------------

/// Reads the table form of a value iteration operator. Format: '#' comments,
/// a header line with the state count n, then one line per (state, action):
///   state; action; reward; p_1 p_2 ... p_n
/// The coordinate map is the max over the state's actions of reward + p.x.
inline TopicalMap load_mdp_table(std::istream& in) {
    std::string line;
    int line_no = 0;
    int n = -1;
    std::map<int, std::vector<TopicalExpr>> actions;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (n < 0) {
            std::istringstream hs(line);
            std::string extra;
            if (!(hs >> n) || (hs >> extra))
                throw ParseError("table: expected a header line with the state count", line_no);
            if (n < 1) throw ParseError("table: state count must be >= 1", line_no);
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream fs(line);
        while (std::getline(fs, field, ';')) fields.push_back(field);
        if (fields.size() != 4)
            throw ParseError("table: expected \"state; action; reward; probabilities\"", line_no);
        int state;
        double reward;
        try {
            state = std::stoi(fields[0]);
            reward = std::stod(fields[2]);
        } catch (const std::exception&) {
            throw ParseError("table: malformed state or reward field", line_no);
        }
        if (state < 1 || state > n) throw ParseError("table: state out of range", line_no);
        std::istringstream ps(fields[3]);
        std::vector<double> probs;
        double p;
        while (ps >> p) probs.push_back(p);
        if (static_cast<int>(probs.size()) != n)
            throw ParseError("table: expected " + std::to_string(n) + " probabilities", line_no);
        double total = 0.0;
        for (double q : probs) {
            if (q < 0.0) throw ParseError("table: probabilities must be >= 0", line_no);
            total += q;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw ParseError("table: probabilities must sum to 1 within 1e-12", line_no);
        actions[state - 1].push_back(TopicalExpr::affine(std::move(probs), reward));
    }
    if (n < 0) throw ParseError("table: missing header line", line_no);
    std::vector<TopicalExpr> coords;
    for (int s = 0; s < n; ++s) {
        auto it = actions.find(s);
        if (it == actions.end())
            throw ParseError("table: state " + std::to_string(s + 1) + " has no actions", line_no);
        coords.push_back(TopicalExpr::max(std::move(it->second)));
    }
    return TopicalMap(n, std::move(coords));
}

}  // namespace conefp
