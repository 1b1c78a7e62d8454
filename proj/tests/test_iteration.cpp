#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "conefp/iteration.hpp"
#include "conefp/rng.hpp"
#include "conefp/structure.hpp"

using Catch::Approx;
using namespace conefp;

namespace {

PositiveVector pv(std::vector<double> v) { return PositiveVector(std::move(v)); }

MapModel symmetric2() { return MatrixMap::from_rows({{2, 1}, {1, 2}}); }
MapModel permutation2() { return MatrixMap::from_rows({{0, 1}, {1, 0}}); }
MapModel tensor_example() {
    return TensorMap(3, 2, {{{0, 0, 0}, 1.0}, {{0, 1, 1}, 2.0}, {{1, 0, 1}, 1.0}});
}

double tensor_direction_root() {
    auto g = [](double t) { return 2 * t * t * t + t - 1.0; };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normalized iteration finds the Perron direction") {
    SolveOptions opts;
    opts.record_trace = true;
    const auto res = iterate_normalized(symmetric2(), pv({1, 2}), opts);
    REQUIRE(res.converged);
    REQUIRE(res.eigenvector[0] == Approx(1.0).margin(1e-9));
    REQUIRE(res.eigenvector[1] == Approx(1.0).margin(1e-9));
    REQUIRE(res.eigenvalue_lower == Approx(3.0).margin(1e-8));
    REQUIRE(res.eigenvalue_upper == Approx(3.0).margin(1e-8));
    REQUIRE(res.eigenvalue_upper / res.eigenvalue_lower - 1.0 <= 10 * opts.tolerance);
    REQUIRE(hilbert(symmetric2().eval(res.eigenvector), res.eigenvector) <= 10 * opts.tolerance);
}

TEST_CASE("periodic orbit is detected instead of converging") {
    const auto res = iterate_normalized(permutation2(), pv({1, 3}));
    REQUIRE_FALSE(res.converged);
    REQUIRE(res.period_detected);
    REQUIRE(*res.period_detected == 2);
}

TEST_CASE("tensor eigenpair matches the bisection oracle") {
    SolveOptions opts;
    opts.tolerance = 1e-12;
    const auto res = iterate_normalized(tensor_example(), pv({1, 1}), opts);
    REQUIRE(res.converged);
    const double t = tensor_direction_root();
    REQUIRE(res.eigenvector[1] / res.eigenvector[0] == Approx(t).margin(1e-8));
    REQUIRE(res.eigenvalue_upper == Approx(1.0 / std::sqrt(t)).margin(1e-8));
}

TEST_CASE("damped iteration converges where the plain one cycles") {
    SolveOptions opts;
    opts.damping = 0.5;
    opts.record_trace = true;
    opts.max_iters = 200;
    const auto res = iterate_damped(permutation2(), pv({1, 3}), opts);
    REQUIRE(res.converged);
    REQUIRE(res.eigenvector[0] == Approx(1.0).margin(1e-8));
    REQUIRE(res.eigenvector[1] == Approx(1.0).margin(1e-8));
    REQUIRE(res.eigenvalue_upper == Approx(1.0).margin(1e-8));

    // hand-simulated first damped step from (1,3): normalize((1, 5/3)) = (3/5, 1)
    const auto& trace = *res.trace;
    REQUIRE(trace.iterates.at(1)[0] == Approx(0.6).margin(1e-12));
    REQUIRE(trace.iterates.at(1)[1] == Approx(1.0).margin(1e-12));
}

TEST_CASE("damped iteration is fixed immediately at an eigenvector") {
    SolveOptions opts;
    opts.damping = 0.5;
    const auto res = iterate_damped(symmetric2(), pv({1, 1}), opts);
    REQUIRE(res.converged);
    REQUIRE(res.iterations_used == 1);
    REQUIRE(res.eigenvector == pv({1, 1}));
}

TEST_CASE("damped and plain solvers agree on the eigenvector") {
    SolveOptions damped;
    damped.damping = 0.9;
    const auto a = iterate_damped(symmetric2(), pv({2, 5}), damped);
    const auto b = iterate_normalized(symmetric2(), pv({2, 5}));
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    REQUIRE(hilbert(a.eigenvector, b.eigenvector) <= 1e-8);
}

TEST_CASE("detect_period on recorded traces") {
    SolveOptions opts;
    opts.record_trace = true;
    opts.max_iters = 300;

    auto perm = iterate_normalized(permutation2(), pv({1, 3}), opts);
    REQUIRE(perm.trace);
    REQUIRE(detect_period(*perm.trace, 8, 1e-10) == 2);

    auto conv = iterate_normalized(symmetric2(), pv({1, 3}), opts);
    // pad the converged trace by repeating the last iterate to give the
    // detector a full window
    auto padded = *conv.trace;
    while (padded.iterates.size() < 64) padded.iterates.push_back(padded.iterates.back());
    REQUIRE(detect_period(padded, 8, 1e-6) == 1);

    const MapModel cyc3 = MatrixMap::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    auto three = iterate_normalized(cyc3, pv({1, 2, 3}), opts);
    REQUIRE(three.trace);
    REQUIRE(detect_period(*three.trace, 8, 1e-10) == 3);
    REQUIRE(three.period_detected);
    REQUIRE(*three.period_detected == 3);
}

TEST_CASE("type K witness") {
    const MapModel identity = MatrixMap::from_rows({{1, 0}, {0, 1}});
    REQUIRE(type_k_witness(identity, pv({1, 1}), pv({2, 3})) == Approx(1.0));

    REQUIRE_FALSE(type_k_witness(permutation2(), pv({1, 1}), pv({2, 1})).has_value());

    const auto eps = type_k_witness(symmetric2(), pv({1, 1}), pv({2, 1}));
    REQUIRE(eps);
    REQUIRE(*eps == Approx(2.0));

    REQUIRE_THROWS_AS(type_k_witness(identity, pv({2, 1}), pv({1, 1})), ValidationError);
    REQUIRE_THROWS_AS(type_k_witness(identity, pv({1, 1}), pv({1, 1})), ValidationError);
}

TEST_CASE("ratio brackets are monotone and nested along plain orbits") {
    SolveOptions opts;
    opts.record_trace = true;
    for (const auto& map : {symmetric2(), tensor_example()}) {
        const auto res = iterate_normalized(map, pv({0.4, 1.9}), opts);
        const auto& tr = *res.trace;
        for (std::size_t k = 1; k < tr.size(); ++k) {
            REQUIRE(tr.max_ratio[k] <= tr.max_ratio[k - 1] + 1e-12);
            REQUIRE(tr.min_ratio[k] >= tr.min_ratio[k - 1] - 1e-12);
        }
    }
}

TEST_CASE("hilbert distance to a known eigenvector never grows") {
    SolveOptions opts;
    opts.record_trace = true;
    const auto res = iterate_normalized(symmetric2(), pv({0.2, 1.0}), opts);
    const auto u = pv({1, 1});
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& xk : res.trace->iterates) {
        const double d = detail::hilbert_raw(xk, u.entries());
        REQUIRE(d <= prev + 1e-12);
        prev = d;
    }
}

TEST_CASE("type K maps with positive eigenvectors converge from random starts") {
    for (const auto& map : {symmetric2(), tensor_example()}) {
        REQUIRE(is_type_k(map));
        REQUIRE(has_positive_eigenvector(map).exists);
        for (int s = 0; s < 50; ++s) {
            SubstreamRng rng(1234, static_cast<std::uint64_t>(s));
            const auto res = iterate_normalized(map, rng.interior_point(map.dim()));
            REQUIRE(res.converged);
        }
    }
}

TEST_CASE("boundary escape is reported for maps without positive eigenvectors") {
    SolveOptions opts;
    opts.max_iters = 5000;
    opts.record_trace = true;
    const auto res = iterate_normalized(MatrixMap::from_rows({{2, 1}, {0, 1}}), pv({1, 1}), opts);
    REQUIRE_FALSE(res.converged);
    double smallest = 1.0;
    for (const auto& xk : res.trace->iterates)
        smallest = std::min(smallest, *std::min_element(xk.begin(), xk.end()));
    REQUIRE(smallest < 1e-6);
    REQUIRE(res.diagnostic.find("boundary") != std::string::npos);
}

TEST_CASE("trace CSV export") {
    SolveOptions opts;
    opts.record_trace = true;
    const auto res = iterate_normalized(symmetric2(), pv({1, 2}), opts);
    std::ostringstream out;
    write_trace_csv(out, *res.trace);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "k,x_1,x_2,M_k,m_k,dH_step");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    REQUIRE(rows == res.trace->size());
}

TEST_CASE("solver option validation") {
    SolveOptions bad;
    bad.tolerance = 0.0;
    REQUIRE_THROWS_AS(iterate_normalized(symmetric2(), pv({1, 1}), bad), ValidationError);
    SolveOptions no_damping;
    REQUIRE_THROWS_AS(iterate_damped(symmetric2(), pv({1, 1}), no_damping), ValidationError);
}
