#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "conefp/cone_metrics.hpp"
#include "conefp/eig.hpp"
#include "conefp/iteration.hpp"
#include "conefp/map_models.hpp"
#include "conefp/rate.hpp"
#include "conefp/rng.hpp"
#include "conefp/structure.hpp"
#include "conefp/topical.hpp"

namespace conefp {

struct PropertyResult {
    std::string name;
    long trials = 0;
    long failures = 0;
    std::string detail;  // first failure, for diagnostics
    bool passed() const { return failures == 0; }
};

/// Test hooks for negative controls. theta_corruption shifts every empirical
/// rate estimate computed inside the rates suite, so a nonzero value must
/// trip the named rate properties.
struct VerifyHooks {
    double theta_corruption = 0.0;
};

namespace verify_detail {

class PropertyRecorder {
public:
    explicit PropertyRecorder(std::string name) { result_.name = std::move(name); }

    void check(bool ok, const std::string& what) {
        ++result_.trials;
        if (!ok) {
            ++result_.failures;
            if (result_.detail.empty()) result_.detail = what;
        }
    }

    PropertyResult take() { return std::move(result_); }

private:
    PropertyResult result_;
};

inline std::uint64_t property_stream(const std::string& name, int trial) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h ^ (static_cast<std::uint64_t>(trial) << 1);
}

// The model zoo exercised by the map properties: every shipped kind plus a
// couple of seeded random instances.
inline std::vector<std::pair<std::string, MapModel>> model_zoo(std::uint64_t seed) {
    std::vector<std::pair<std::string, MapModel>> zoo;
    zoo.emplace_back("matrix.symmetric", MatrixMap::from_rows({{2, 1}, {1, 2}}));
    zoo.emplace_back("matrix.permutation", MatrixMap::from_rows({{0, 1}, {1, 0}}));
    zoo.emplace_back("matrix.triangular", MatrixMap::from_rows({{1, 1}, {0, 2}}));
    zoo.emplace_back("tensor.order3",
                     TensorMap(3, 2, {{{0, 0, 0}, 1.0}, {{0, 1, 1}, 2.0}, {{1, 0, 1}, 1.0}}));
    zoo.emplace_back(
        "expr.smooth",
        ExprMap(3, {Expr::sum({Expr::monomial(1.0, {0.5, 0.5, 0}), Expr::monomial(2.0, {1, 0, 0})}),
                    Expr::monomial(1.0, {0, 0, 1}),
                    Expr::sum({Expr::monomial(0.5, {0, 1, 0}), Expr::monomial(0.5, {0, 0, 1})})}));
    zoo.emplace_back(
        "expr.minmax",
        ExprMap(2, {Expr::max({Expr::monomial(2.0, {1, 0}), Expr::monomial(0.5, {0.5, 0.5})}),
                    Expr::min({Expr::monomial(1.0, {1, 0}), Expr::monomial(3.0, {0.25, 0.75})})}));
    zoo.emplace_back("builtin.example1", BuiltinMap(BuiltinTag::Example1));
    zoo.emplace_back("builtin.example2", BuiltinMap(BuiltinTag::Example2));

    SubstreamRng rng(seed, property_stream("zoo", 0));
    const int n = 4;
    Matrix a(n, n);
    for (auto& v : a.data) v = rng.uniform(0.05, 1.5);
    zoo.emplace_back("matrix.random4", MatrixMap(a));

    std::vector<TensorMap::Entry> entries;
    for (int i = 0; i < 3; ++i)
        for (int t = 0; t < 3; ++t)
            entries.push_back({{i, rng.uniform_int(0, 2), rng.uniform_int(0, 2)},
                               rng.uniform(0.1, 2.0)});
    zoo.emplace_back("tensor.random3", TensorMap(3, 3, std::move(entries)));
    return zoo;
}

inline std::vector<std::pair<std::string, TopicalMap>> topical_zoo() {
    auto aff = [](std::vector<double> a, double b) { return TopicalExpr::affine(std::move(a), b); };
    std::vector<std::pair<std::string, TopicalMap>> zoo;
    zoo.emplace_back("topical.shift_swap",
                     TopicalMap(2, {aff({0, 1}, 1.0), aff({1, 0}, 1.0)}));
    zoo.emplace_back("topical.clamped_swap",
                     TopicalMap(2, {TopicalExpr::min({aff({0, 1}, 0.0), aff({0, 0}, 1.0)}),
                                    TopicalExpr::min({aff({1, 0}, 0.0), aff({0, 0}, 1.0)})}));
    zoo.emplace_back("topical.drifting_max",
                     TopicalMap(2, {TopicalExpr::max({aff({1, 0}, 2.0), aff({0, 1}, 0.0)}),
                                    TopicalExpr::max({aff({1, 0}, 0.0), aff({0, 1}, 1.0)})}));
    zoo.emplace_back("topical.blend",
                     TopicalMap(3, {aff({0.5, 0.25, 0.25}, 0.0),
                                    TopicalExpr::max({aff({0, 1, 0}, -1.0), aff({1, 0, 0}, 0.5)}),
                                    TopicalExpr::min({aff({0, 0, 1}, 0.0), aff({1. / 3, 1. / 3, 1. / 3}, 2.0)})}));
    return zoo;
}

// Oracle for the SCC checks: mutual reachability via per-vertex BFS, with no
// code shared with the Tarjan implementation.
inline std::vector<std::vector<int>> scc_oracle(const Digraph& g) {
    const int n = g.order();
    std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n),
                                         std::vector<bool>(static_cast<std::size_t>(n), false));
    for (int s = 0; s < n; ++s) {
        std::vector<int> queue{s};
        reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(s)] = true;
        for (std::size_t h = 0; h < queue.size(); ++h)
            for (int w : g.successors(queue[h]))
                if (!reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(w)]) {
                    reach[static_cast<std::size_t>(s)][static_cast<std::size_t>(w)] = true;
                    queue.push_back(w);
                }
    }
    std::vector<int> owner(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> comps;
    for (int v = 0; v < n; ++v) {
        if (owner[static_cast<std::size_t>(v)] >= 0) continue;
        std::vector<int> comp;
        for (int w = 0; w < n; ++w)
            if (reach[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] &&
                reach[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)]) {
                comp.push_back(w);
                owner[static_cast<std::size_t>(w)] = 1;
            }
        comps.push_back(std::move(comp));
    }
    return comps;
}

inline bool same_partition(std::vector<std::vector<int>> a, std::vector<std::vector<int>> b) {
    auto norm = [](std::vector<std::vector<int>>& p) {
        for (auto& c : p) std::sort(c.begin(), c.end());
        std::sort(p.begin(), p.end());
    };
    norm(a);
    norm(b);
    return a == b;
}

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

inline std::vector<PropertyResult> verify_metrics(std::uint64_t seed, long pairs = 10000) {
    using verify_detail::PropertyRecorder;
    using verify_detail::property_stream;
    PropertyRecorder two_sided("metrics.hilbert_le_two_thompson");
    PropertyRecorder tri_t("metrics.thompson_triangle");
    PropertyRecorder tri_h("metrics.hilbert_triangle");
    PropertyRecorder scale("metrics.hilbert_scale_invariance");
    PropertyRecorder product("metrics.ratio_product");
    PropertyRecorder normality("metrics.sup_norm_normality");

    for (long trial = 0; trial < pairs; ++trial) {
        SubstreamRng rng(seed, property_stream("metrics", static_cast<int>(trial)));
        const int n = rng.uniform_int(2, 8);
        const auto x = rng.interior_point(n);
        const auto y = rng.interior_point(n);
        const auto z = rng.interior_point(n);

        two_sided.check(hilbert(x, y) <= 2.0 * thompson(x, y) + 1e-12, "d_H > 2 d_T");
        tri_t.check(thompson(x, z) <= thompson(x, y) + thompson(y, z) + 1e-12,
                    "thompson triangle violated");
        tri_h.check(hilbert(x, z) <= hilbert(x, y) + hilbert(y, z) + 1e-12,
                    "hilbert triangle violated");

        const double alpha = std::exp(rng.uniform(-3, 3));
        const double beta = std::exp(rng.uniform(-3, 3));
        std::vector<double> xs(x.entries()), ys(y.entries());
        for (auto& v : xs) v *= alpha;
        for (auto& v : ys) v *= beta;
        scale.check(std::abs(hilbert(PositiveVector(xs), PositiveVector(ys)) - hilbert(x, y)) <=
                        1e-12,
                    "hilbert changed under scaling");

        product.check(m_upper(x, y) * m_upper(y, x) >= 1.0 - 1e-12, "ratio product below one");
        std::vector<double> prop(x.entries());
        for (auto& v : prop) v *= beta;
        product.check(std::abs(m_upper(x, PositiveVector(prop)) *
                                   m_upper(PositiveVector(prop), x) -
                               1.0) <= 1e-12,
                      "ratio product not one on a proportional pair");

        std::vector<double> smaller(x.entries());
        for (auto& v : smaller) v *= rng.uniform(0.1, 1.0);
        normality.check(detail::sup_norm(smaller) <= x.sup_norm() + 1e-15,
                        "sup norm not monotone on ordered pair");
    }
    return {two_sided.take(), tri_t.take(),   tri_h.take(),
            scale.take(),     product.take(), normality.take()};
}

inline std::vector<PropertyResult> verify_models(std::uint64_t seed, long trials_per_model = 1000) {
    using verify_detail::PropertyRecorder;
    using verify_detail::property_stream;
    PropertyRecorder order("models.order_preserving");
    PropertyRecorder homog("models.homogeneity");
    PropertyRecorder nonexp("models.thompson_nonexpansive");
    PropertyRecorder pattern("models.jacobian_pattern_stability");
    PropertyRecorder fin_diff("models.jacobian_finite_differences");

    const auto zoo = verify_detail::model_zoo(seed);
    for (const auto& [name, map] : zoo) {
        for (long trial = 0; trial < trials_per_model; ++trial) {
            SubstreamRng rng(seed, property_stream("models." + name, static_cast<int>(trial)));
            const auto x = rng.interior_point(map.dim());
            std::vector<double> bigger(x.entries());
            for (auto& v : bigger) v += rng.uniform(0.0, 0.8);
            const auto fx = map.eval_raw(x.entries());
            const auto fy = map.eval_raw(bigger);
            bool ordered = true;
            for (std::size_t i = 0; i < fx.size(); ++i)
                if (fx[i] > fy[i] + 1e-12) ordered = false;
            order.check(ordered, name + ": order preservation failed");

            bool hom = true;
            for (double t : {0.5, 2.0, 10.0}) {
                std::vector<double> scaled(x.entries());
                for (auto& v : scaled) v *= t;
                const auto fs = map.eval_raw(scaled);
                for (std::size_t i = 0; i < fx.size(); ++i)
                    if (std::abs(fs[i] - t * fx[i]) > 1e-10 * t * detail::sup_norm(fx) + 1e-14)
                        hom = false;
            }
            homog.check(hom, name + ": homogeneity failed");

            const auto y = rng.interior_point(map.dim());
            nonexp.check(detail::thompson_raw(map.eval_raw(x.entries()), map.eval_raw(y.entries())) <=
                             detail::thompson_raw(x.entries(), y.entries()) + 1e-10,
                         name + ": expansion in the Thompson metric");
        }

        // pattern stability only makes sense for everywhere-differentiable
        // multiplicatively convex models
        const bool smooth_kind =
            map.kind() == MapKind::Tensor ||
            (map.kind() == MapKind::Expr && map.as_expr()->smooth());
        if (smooth_kind) {
            const auto expected = map.digraph();
            for (int trial = 0; trial < 100; ++trial) {
                SubstreamRng rng(seed, property_stream("models.pattern." + name, trial));
                const auto x = rng.interior_point(map.dim());
                pattern.check(pattern_digraph(map.jacobian(x)) == expected,
                              name + ": jacobian pattern drifted");
            }
        }

        for (int trial = 0; trial < 25; ++trial) {
            SubstreamRng rng(seed, property_stream("models.fd." + name, trial));
            const auto x = rng.interior_point(map.dim());
            Matrix analytic;
            try {
                analytic = map.jacobian(x);
            } catch (const NondifferentiablePoint&) {
                continue;
            }
            const int n = map.dim();
            const double h = 1e-6;
            double worst = 0.0;
            for (int j = 0; j < n; ++j) {
                auto hi = x.entries(), lo = x.entries();
                hi[static_cast<std::size_t>(j)] += h;
                lo[static_cast<std::size_t>(j)] -= h;
                const auto fhi = map.eval_raw(hi);
                const auto flo = map.eval_raw(lo);
                for (int i = 0; i < n; ++i) {
                    const double fd = (fhi[static_cast<std::size_t>(i)] - flo[static_cast<std::size_t>(i)]) / (2 * h);
                    const double denom = std::max({std::abs(fd), std::abs(analytic(i, j)), 1e-8});
                    worst = std::max(worst, std::abs(fd - analytic(i, j)) / denom);
                }
            }
            fin_diff.check(worst <= 1e-5, name + ": jacobian disagrees with finite differences");
        }
    }
    return {order.take(), homog.take(), nonexp.take(), pattern.take(), fin_diff.take()};
}

inline std::vector<PropertyResult> verify_structure(std::uint64_t seed) {
    using verify_detail::PropertyRecorder;
    using verify_detail::property_stream;
    PropertyRecorder exhaustive("structure.scc_exhaustive_small");
    PropertyRecorder random_scc("structure.scc_random");
    PropertyRecorder spectrum("structure.matrix_cw_matches_spectrum");
    PropertyRecorder existence("structure.existence_realized");
    PropertyRecorder monotone("structure.bracket_monotone");

    // every digraph on up to 4 vertices
    for (int n = 1; n <= 4; ++n) {
        const unsigned long long graphs = 1ULL << (n * n);
        for (unsigned long long mask = 0; mask < graphs; ++mask) {
            Digraph g(n);
            int bit = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j, ++bit)
                    if (mask & (1ULL << bit)) g.add_arc(i, j);
            exhaustive.check(verify_detail::same_partition(strongly_connected_components(g),
                                                           verify_detail::scc_oracle(g)),
                             "scc mismatch on exhaustive digraph");
        }
    }

    for (int trial = 0; trial < 500; ++trial) {
        SubstreamRng rng(seed, property_stream("structure.scc", trial));
        const int n = rng.uniform_int(2, 6);
        Digraph g(n);
        const int arcs = rng.uniform_int(0, n * n);
        for (int a = 0; a < arcs; ++a) g.add_arc(rng.uniform_int(0, n - 1), rng.uniform_int(0, n - 1));
        random_scc.check(verify_detail::same_partition(strongly_connected_components(g),
                                                       verify_detail::scc_oracle(g)),
                         "scc mismatch on random digraph");
    }

    for (int trial = 0; trial < 40; ++trial) {
        SubstreamRng rng(seed, property_stream("structure.spectrum", trial));
        const int n = rng.uniform_int(2, 6);
        Matrix a(n, n);
        for (auto& v : a.data) v = rng.uniform(0.05, 2.0);
        std::vector<int> all;
        for (int i = 0; i < n; ++i) all.push_back(i);
        const auto cw = cw_number(MatrixMap(a), all);
        const double rho = eig_moduli(a)[0];
        spectrum.check(cw.converged && std::abs(cw.value - rho) <= 1e-8 * rho,
                       "cw number disagrees with the dominant eigenvalue modulus");
    }

    for (const auto& [name, map] : verify_detail::model_zoo(seed)) {
        const auto exist = has_positive_eigenvector(map);
        if (exist.exists) {
            SolveOptions opts;
            opts.tolerance = 1e-10;
            auto res = iterate_normalized(map, PositiveVector::ones(map.dim()), opts);
            if (!res.converged) {
                opts.damping = 0.5;
                res = iterate_damped(map, PositiveVector::ones(map.dim()), opts);
            }
            existence.check(res.converged &&
                                hilbert(map.eval(res.eigenvector), res.eigenvector) <= 1e-8,
                            name + ": existence certified but no eigenvector found");
        }

        SolveOptions trace_opts;
        trace_opts.record_trace = true;
        trace_opts.max_iters = 400;
        SubstreamRng rng(seed, property_stream("structure.bracket." + name, 0));
        const auto res = iterate_normalized(map, rng.interior_point(map.dim()), trace_opts);
        if (res.trace) {
            const auto& tr = *res.trace;
            bool nested = true;
            for (std::size_t k = 1; k < tr.size(); ++k) {
                if (tr.max_ratio[k] > tr.max_ratio[k - 1] + 1e-12) nested = false;
                if (tr.min_ratio[k] < tr.min_ratio[k - 1] - 1e-12) nested = false;
            }
            monotone.check(nested, name + ": ratio brackets are not nested");
        }
    }
    return {exhaustive.take(), random_scc.take(), spectrum.take(), existence.take(),
            monotone.take()};
}

inline std::vector<PropertyResult> verify_rates(std::uint64_t seed, const VerifyHooks& hooks = {}) {
    using verify_detail::PropertyRecorder;
    using verify_detail::property_stream;
    PropertyRecorder grid("rates.combine_identity_grid");
    PropertyRecorder combine_props("rates.combine_symmetry_monotonicity");
    PropertyRecorder perm_inv("rates.eig_permutation_invariance");
    PropertyRecorder below_bound("rates.matrix_rate_below_bound");
    PropertyRecorder arctan("rates.arctan_classified_sublinear");
    PropertyRecorder lin("rates.primitive_orbit_classified_linear");

    for (int i = 1; i < 50; ++i)
        for (int j = 1; j < 50; ++j) {
            const double eta = 0.01 + (0.98 * i) / 49.0;
            const double theta = 0.01 + (0.98 * j) / 49.0;
            const auto c = combine_rates(eta, theta);
            grid.check(std::abs(std::pow(eta, c.lambda) - std::pow(theta, 1.0 - c.lambda)) <= 1e-12,
                       "balanced-rate identity off grid point");
        }

    for (int trial = 0; trial < 200; ++trial) {
        SubstreamRng rng(seed, property_stream("rates.combine", trial));
        const double eta = rng.uniform(0.02, 0.95);
        const double theta = rng.uniform(0.02, 0.95);
        const auto c = combine_rates(eta, theta);
        const auto s = combine_rates(theta, eta);
        bool ok = std::abs(s.lambda - (1.0 - c.lambda)) <= 1e-12 &&
                  std::abs(s.rate - c.rate) <= 1e-12 && c.rate < 1.0 && c.lambda > 0.0 &&
                  c.lambda < 1.0;
        ok = ok && combine_rates(std::min(eta * 1.05, 0.99), theta).rate > c.rate;
        ok = ok && combine_rates(eta, std::min(theta * 1.05, 0.99)).rate > c.rate;
        combine_props.check(ok, "combine_rates symmetry or monotonicity failed");
    }

    for (int trial = 0; trial < 40; ++trial) {
        SubstreamRng rng(seed, property_stream("rates.perm", trial));
        const int n = rng.uniform_int(2, 10);
        Matrix a(n, n);
        for (auto& v : a.data) v = rng.uniform(0.0, 1.0);
        std::vector<int> perm(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        Matrix b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                b(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) = a(i, j);
        const auto ma = eig_moduli(a);
        const auto mb = eig_moduli(b);
        bool ok = true;
        for (int i = 0; i < n; ++i)
            if (std::abs(ma[static_cast<std::size_t>(i)] - mb[static_cast<std::size_t>(i)]) > 1e-8)
                ok = false;
        perm_inv.check(ok, "eig moduli changed under permutation similarity");
    }

    // orbit rates stay below the Jacobian certificate; starts are kept a
    // bounded Hilbert distance away from the eigenvector so the recorded
    // trace is long enough to fit
    {
        const MapModel map = MatrixMap::from_rows({{2, 1}, {1, 2}});
        const PositiveVector u = PositiveVector::ones(2);
        const auto bound = jacobian_rate_bound(map, u);
        for (int s = 0; s < 20; ++s) {
            SubstreamRng rng(seed, property_stream("rates.bound", s));
            const double t = rng.uniform(0.25, 1.0);
            const PositiveVector x0{{std::exp(t), std::exp(-t)}};
            SolveOptions opts;
            opts.record_trace = true;
            opts.tolerance = 1e-12;
            const auto res = iterate_normalized(map, x0, opts);
            if (!res.converged || !bound.bound) {
                below_bound.check(false, "solve or certificate unavailable");
                continue;
            }
            const auto d = distances_to_eigenvector(*res.trace, res.eigenvector);
            const double theta = empirical_rate(d).theta_hat + hooks.theta_corruption;
            below_bound.check(theta <= *bound.bound + 0.05,
                              "empirical rate exceeds the spectral certificate");
        }
    }

    {
        std::vector<double> d;
        double a = 1.0;
        for (int k = 0; k < 200; ++k) {
            a = std::atan(a);
            d.push_back(a);
        }
        const auto rep = empirical_rate(d);
        arctan.check(rep.classification == RateClass::Sublinear &&
                         rep.theta_hat + hooks.theta_corruption <= 1.0,
                     "slow orbit not classified sublinear");
    }

    for (int trial = 0; trial < 10; ++trial) {
        SubstreamRng rng(seed, property_stream("rates.linear", trial));
        const int n = rng.uniform_int(2, 4);
        // skip matrices with a huge spectral gap: their orbits hit the
        // resolution floor before a 20-sample fit window exists
        Matrix a(n, n);
        for (int attempt = 0; attempt < 50; ++attempt) {
            for (auto& v : a.data) v = rng.uniform(0.2, 2.0);
            const auto moduli = eig_moduli(a);
            const double gap = moduli[1] / moduli[0];
            if (gap >= 0.3 && gap <= 0.9) break;
        }
        SolveOptions opts;
        opts.record_trace = true;
        opts.tolerance = 1e-12;
        std::vector<double> far(static_cast<std::size_t>(n), 1.0);
        far[0] = std::exp(1.0);
        const auto res = iterate_normalized(MatrixMap(a), PositiveVector(far), opts);
        if (!res.converged) {
            lin.check(false, "primitive matrix orbit failed to converge");
            continue;
        }
        const auto d = distances_to_eigenvector(*res.trace, res.eigenvector);
        auto rep = empirical_rate(d);
        rep.theta_hat = std::min(1.0, rep.theta_hat + hooks.theta_corruption);
        const bool still_linear =
            rep.classification == RateClass::Linear && rep.theta_hat <= kLinearThetaMax;
        lin.check(still_linear, "primitive matrix orbit not classified linear");
    }

    return {grid.take(),        combine_props.take(), perm_inv.take(),
            below_bound.take(), arctan.take(),        lin.take()};
}

inline std::vector<PropertyResult> verify_topical(std::uint64_t seed) {
    using verify_detail::PropertyRecorder;
    using verify_detail::property_stream;
    PropertyRecorder nonexp("topical.sup_norm_nonexpansive");
    PropertyRecorder homog("topical.additive_homogeneity");
    PropertyRecorder cycle("topical.cycle_time_start_independence");
    PropertyRecorder bridge("topical.log_conjugate_bridge");
    PropertyRecorder local_linear("topical.km_implies_local_linear");

    const auto zoo = verify_detail::topical_zoo();
    for (const auto& [name, f] : zoo) {
        for (int trial = 0; trial < 1000; ++trial) {
            SubstreamRng rng(seed, property_stream("topical." + name, trial));
            std::vector<double> x, y;
            for (int i = 0; i < f.dim(); ++i) {
                x.push_back(rng.uniform(-10, 10));
                y.push_back(rng.uniform(-10, 10));
            }
            const auto fx = f.eval(x);
            const auto fy = f.eval(y);
            double dxy = 0.0, dfxy = 0.0;
            for (int i = 0; i < f.dim(); ++i) {
                dxy = std::max(dxy, std::abs(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]));
                dfxy = std::max(dfxy, std::abs(fx[static_cast<std::size_t>(i)] - fy[static_cast<std::size_t>(i)]));
            }
            nonexp.check(dfxy <= dxy + 1e-12, name + ": sup-norm expansion");

            if (f.additively_homogeneous() && trial < 200) {
                bool ok = true;
                for (double c : {-5.0, 1.0, 10.0}) {
                    std::vector<double> xc(x);
                    for (auto& v : xc) v += c;
                    const auto fxc = f.eval(xc);
                    for (int i = 0; i < f.dim(); ++i)
                        if (std::abs(fxc[static_cast<std::size_t>(i)] -
                                     (fx[static_cast<std::size_t>(i)] + c)) > 1e-12)
                            ok = false;
                }
                homog.check(ok, name + ": additive homogeneity failed");
            }
        }

        for (int trial = 0; trial < 25; ++trial) {
            SubstreamRng rng(seed, property_stream("topical.cycle." + name, trial));
            std::vector<double> x0, x1;
            for (int i = 0; i < f.dim(); ++i) {
                x0.push_back(rng.uniform(-5, 5));
                x1.push_back(rng.uniform(-5, 5));
            }
            const int iters = 250;
            const auto wa = cycle_time(f, x0, iters);
            const auto wb = cycle_time(f, x1, iters);
            double start_gap = 0.0, w_gap = 0.0;
            for (int i = 0; i < f.dim(); ++i) {
                start_gap = std::max(start_gap, std::abs(x0[static_cast<std::size_t>(i)] -
                                                         x1[static_cast<std::size_t>(i)]));
                w_gap = std::max(w_gap, std::abs(wa[static_cast<std::size_t>(i)] -
                                                 wb[static_cast<std::size_t>(i)]));
            }
            cycle.check(w_gap <= 2.0 * start_gap / iters + 1e-12,
                        name + ": cycle time depends on the start");
        }
    }

    {
        ExprMap f(2, {Expr::max({Expr::monomial(1.0, {1, 0}), Expr::monomial(1.0, {0, 1})}),
                      Expr::monomial(1.0, {0.5, 0.5})});
        ExprMap s(2, {Expr::sum({Expr::monomial(1.0, {1, 0}), Expr::monomial(1.0, {0, 1})}),
                      Expr::monomial(1.0, {0, 1})});
        for (const ExprMap* m : {&f, &s}) {
            const auto topical = log_conjugate(*m);
            const MapModel model(*m);
            for (int trial = 0; trial < 200; ++trial) {
                SubstreamRng rng(seed, property_stream("topical.bridge", trial));
                const auto x = rng.interior_point(2);
                std::vector<double> logx{std::log(x[0]), std::log(x[1])};
                const auto lhs = topical.eval(logx);
                const auto rhs = model.eval_raw(x.entries());
                bool ok = true;
                for (int i = 0; i < 2; ++i)
                    if (std::abs(lhs[static_cast<std::size_t>(i)] -
                                 std::log(rhs[static_cast<std::size_t>(i)])) > 1e-12)
                        ok = false;
                bridge.check(ok, "log conjugation does not commute with evaluation");
            }
        }
    }

    for (int inst = 0; inst < 25; ++inst) {
        SubstreamRng rng(seed, property_stream("topical.local_linear", inst));
        const int n = 3;
        std::vector<double> u_star;
        for (int i = 0; i < n; ++i) u_star.push_back(rng.uniform(-2, 2));
        std::vector<TopicalExpr> coords;
        for (int i = 0; i < n; ++i) {
            std::vector<TopicalExpr> branches;
            const int actions = rng.uniform_int(1, 3);
            for (int a = 0; a < actions; ++a) {
                std::vector<double> row(static_cast<std::size_t>(n));
                double total = 0.0;
                for (auto& p : row) {
                    p = rng.uniform(0.0, 1.0);
                    total += p;
                }
                for (auto& p : row) p /= total;
                double dot = 0.0;
                for (int j = 0; j < n; ++j)
                    dot += row[static_cast<std::size_t>(j)] * u_star[static_cast<std::size_t>(j)];
                branches.push_back(
                    TopicalExpr::affine(std::move(row), u_star[static_cast<std::size_t>(i)] - dot));
            }
            coords.push_back(rng.bernoulli(0.5) ? TopicalExpr::max(std::move(branches))
                                                : TopicalExpr::min(std::move(branches)));
        }
        const TopicalMap f(n, std::move(coords));
        std::vector<double> x0;
        for (int i = 0; i < n; ++i) x0.push_back(rng.uniform(-3, 3));
        const auto km = km_fixed_point(f, x0);
        if (!km.converged) {
            local_linear.check(false, "constructed fixed-point instance did not solve");
            continue;
        }
        const auto lin = verify_local_linear(averaged_with_identity(f), km.fixed_point, x0);
        local_linear.check(lin.found && lin.gamma < 1.0,
                           "km solved but no local linear contraction found");
    }

    return {nonexp.take(), homog.take(), cycle.take(), bridge.take(), local_linear.take()};
}

inline std::vector<std::string> verify_suite_names() {
    return {"metrics", "models", "structure", "rates", "topical"};
}

/// Runs one suite (or "all") deterministically for the given seed.
inline std::vector<PropertyResult> run_verify_suite(const std::string& suite, std::uint64_t seed,
                                                    const VerifyHooks& hooks = {}) {
    std::vector<PropertyResult> out;
    auto append = [&](std::vector<PropertyResult> more) {
        for (auto& r : more) out.push_back(std::move(r));
    };
    bool matched = false;
    if (suite == "metrics" || suite == "all") {
        append(verify_metrics(seed));
        matched = true;
    }
    if (suite == "models" || suite == "all") {
        append(verify_models(seed));
        matched = true;
    }
    if (suite == "structure" || suite == "all") {
        append(verify_structure(seed));
        matched = true;
    }
    if (suite == "rates" || suite == "all") {
        append(verify_rates(seed, hooks));
        matched = true;
    }
    if (suite == "topical" || suite == "all") {
        append(verify_topical(seed));
        matched = true;
    }
    if (!matched)
        throw ValidationError("run_verify_suite: unknown suite '" + suite +
                              "'; expected metrics|models|structure|rates|topical|all");
    return out;
}

}  // namespace conefp
