#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "conefp/rate.hpp"
#include "conefp/rng.hpp"

using Catch::Approx;
using namespace conefp;

namespace {

PositiveVector pv(std::vector<double> v) { return PositiveVector(std::move(v)); }
MapModel symmetric2() { return MatrixMap::from_rows({{2, 1}, {1, 2}}); }

std::vector<double> geometric(double theta, int len, double c = 1.0) {
    std::vector<double> d(static_cast<std::size_t>(len));
    double v = c;
    for (int k = 0; k < len; ++k) {
        d[static_cast<std::size_t>(k)] = v;
        v *= theta;
    }
    return d;
}

std::vector<double> arctan_sequence(int len) {
    std::vector<double> d(static_cast<std::size_t>(len));
    double a = 1.0;
    for (int k = 0; k < len; ++k) {
        a = std::atan(a);
        d[static_cast<std::size_t>(k)] = a;
    }
    return d;
}

}  // namespace

TEST_CASE("empirical rate on a clean geometric sequence") {
    const auto rep = empirical_rate(geometric(0.5, 100));
    REQUIRE(rep.classification == RateClass::Linear);
    REQUIRE(rep.theta_hat == Approx(0.5).margin(1e-6));
    REQUIRE(rep.fit_residual_rms < 1e-10);
}

TEST_CASE("iterated arctan distances are classified sublinear") {
    const auto rep = empirical_rate(arctan_sequence(200));
    REQUIRE(rep.classification == RateClass::Sublinear);
}

TEST_CASE("polynomially perturbed geometric sequence still reads as linear") {
    std::vector<double> d;
    for (int k = 0; k < 200; ++k) d.push_back((k + 1) * std::pow(0.8, k));
    const auto rep = empirical_rate(d);
    REQUIRE(rep.classification == RateClass::Linear);
    REQUIRE(rep.theta_hat == Approx(0.8).margin(0.02));
}

TEST_CASE("empirical rate handles sequences that collapse immediately") {
    std::vector<double> d(static_cast<std::size_t>(40), 0.0);
    d[0] = 1e-14;
    const auto rep = empirical_rate(d);
    REQUIRE(rep.classification == RateClass::Linear);
    REQUIRE(rep.theta_hat <= 1e-10);

    std::vector<double> fast{1.0, 1e-4, 1e-8, 1e-12};
    fast.resize(40, 0.0);
    const auto fr = empirical_rate(fast);
    REQUIRE(fr.classification == RateClass::Linear);
    REQUIRE(fr.theta_hat < 1e-2);
}

TEST_CASE("empirical rate input validation") {
    REQUIRE_THROWS_AS(empirical_rate(std::vector<double>(5, 1.0)), ValidationError);
    std::vector<double> bad(25, 1.0);
    bad[3] = -1.0;
    REQUIRE_THROWS_AS(empirical_rate(bad), ValidationError);
}

TEST_CASE("jacobian rate bound certificates") {
    const auto sym = jacobian_rate_bound(symmetric2(), pv({1, 1}));
    REQUIRE(sym.bound);
    REQUIRE(*sym.bound == Approx(1.0 / 3.0).margin(1e-8));

    const auto perm =
        jacobian_rate_bound(MatrixMap::from_rows({{0, 1}, {1, 0}}), pv({1, 1}));
    REQUIRE_FALSE(perm.bound);
    REQUIRE(perm.reason.find("primitive") != std::string::npos);

    // identity Jacobian at the eigenvector: reducible pattern, ratio one
    const auto smooth = jacobian_rate_bound(MapModel(BuiltinMap(BuiltinTag::Example1)), pv({1, 1}));
    REQUIRE_FALSE(smooth.bound);
    REQUIRE(smooth.rho == Approx(1.0).margin(1e-12));
    REQUIRE(smooth.rho2 == Approx(1.0).margin(1e-12));

    // not an eigenvector
    REQUIRE_THROWS_AS(jacobian_rate_bound(symmetric2(), pv({5, 1})), ValidationError);
}

TEST_CASE("combine_rates closed forms") {
    const auto sym = combine_rates(0.04, 0.04);
    REQUIRE(sym.lambda == Approx(0.5).margin(1e-14));
    REQUIRE(sym.rate == Approx(0.2).margin(1e-14));

    const auto tenth = combine_rates(0.01, 0.1);
    REQUIRE(tenth.lambda == Approx(1.0 / 3.0).margin(1e-14));
    REQUIRE(tenth.rate == Approx(0.21544346900318834).margin(1e-12));

    const auto quarter = combine_rates(0.25, 0.5);
    REQUIRE(quarter.lambda == Approx(1.0 / 3.0).margin(1e-14));
    REQUIRE(quarter.rate == Approx(0.6299605249474366).margin(1e-12));

    REQUIRE_THROWS_AS(combine_rates(0.0, 0.5), ValidationError);
    REQUIRE_THROWS_AS(combine_rates(0.5, 1.0), ValidationError);
}

TEST_CASE("combine_rates properties") {
    for (int trial = 0; trial < 300; ++trial) {
        SubstreamRng rng(77, static_cast<std::uint64_t>(trial));
        const double eta = rng.uniform(0.01, 0.99);
        const double theta = rng.uniform(0.01, 0.99);
        const auto c = combine_rates(eta, theta);
        REQUIRE(c.lambda > 0.0);
        REQUIRE(c.lambda < 1.0);
        REQUIRE(c.rate < 1.0);
        REQUIRE(std::pow(eta, c.lambda) == Approx(std::pow(theta, 1.0 - c.lambda)).margin(1e-12));

        // swapping arguments mirrors lambda
        const auto swapped = combine_rates(theta, eta);
        REQUIRE(swapped.lambda == Approx(1.0 - c.lambda).margin(1e-12));
        REQUIRE(swapped.rate == Approx(c.rate).margin(1e-12));

        // strictly increasing in each argument
        const double bump = rng.uniform(0.001, 0.009);
        if (eta + bump < 0.995) REQUIRE(combine_rates(eta + bump, theta).rate > c.rate);
        if (theta + bump < 0.995) REQUIRE(combine_rates(eta, theta + bump).rate > c.rate);
    }
    // rate approaches theta as eta vanishes
    REQUIRE(combine_rates(1e-12, 0.3).rate == Approx(0.3).margin(0.02));
}

TEST_CASE("rate equivalence on the symmetric matrix orbit") {
    SolveOptions opts;
    opts.record_trace = true;
    opts.tolerance = 1e-12;
    const auto res = iterate_normalized(symmetric2(), pv({0.4, 1.7}), opts);
    REQUIRE(res.converged);
    const auto eq = rate_equivalence_check(symmetric2(), *res.trace, res.eigenvector);
    REQUIRE(eq.agree);
    REQUIRE(eq.hilbert_to_u.theta_hat == Approx(1.0 / 3.0).margin(0.05));
    REQUIRE(eq.thompson_rescaled.theta_hat == Approx(1.0 / 3.0).margin(0.05));
    REQUIRE(eq.norm_to_u.theta_hat == Approx(1.0 / 3.0).margin(0.05));
    REQUIRE(eq.r_hat == Approx(3.0).margin(1e-8));
}

TEST_CASE("rate equivalence is vacuous when the orbit starts at u") {
    SolveOptions opts;
    opts.record_trace = true;
    // force a long trace by running the tensor map from its eigenvector
    // direction; distances stay at the resolution floor
    std::vector<double> flat(static_cast<std::size_t>(25), 1e-15);
    OrbitTrace trace;
    for (int k = 0; k < 25; ++k) {
        trace.iterates.push_back({1.0, 1.0});
        trace.max_ratio.push_back(3.0);
        trace.min_ratio.push_back(3.0);
        trace.d_hilbert_step.push_back(0.0);
        trace.scale.push_back(3.0);
    }
    const auto eq = rate_equivalence_check(symmetric2(), trace, pv({1, 1}));
    REQUIRE(eq.agree);
}

TEST_CASE("rate equivalence rejects damped or unconverged traces") {
    OrbitTrace damped;
    damped.damped = true;
    REQUIRE_THROWS_AS(rate_equivalence_check(symmetric2(), damped, pv({1, 1})), ValidationError);

    const MapModel perm = MatrixMap::from_rows({{0, 1}, {1, 0}});
    SolveOptions opts;
    opts.record_trace = true;
    opts.max_iters = 40;
    opts.period_window = 64;  // larger than max_iters so the run is not cut short
    const auto res = iterate_normalized(perm, pv({1, 3}), opts);
    REQUIRE_FALSE(res.converged);
    REQUIRE(res.trace->size() >= 20);
    REQUIRE_THROWS_AS(rate_equivalence_check(perm, *res.trace, pv({1, 1})), ValidationError);
}
