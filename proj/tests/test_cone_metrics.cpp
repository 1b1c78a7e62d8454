#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "conefp/cone_metrics.hpp"
#include "conefp/rng.hpp"

using Catch::Approx;
using namespace conefp;

namespace {
PositiveVector pv(std::vector<double> v) { return PositiveVector(std::move(v)); }
}  // namespace

TEST_CASE("positive vector validation") {
    REQUIRE_THROWS_AS(pv({}), ValidationError);
    REQUIRE_THROWS_AS(pv({1.0, 0.0}), ValidationError);
    REQUIRE_THROWS_AS(pv({1.0, -2.0}), ValidationError);
    REQUIRE_THROWS_AS(pv({1.0, std::nan("")}), ValidationError);
    REQUIRE_THROWS_AS(pv({1.0, 1e-301}), ValidationError);
    REQUIRE_NOTHROW(pv({1e-299, 1.0}));
    REQUIRE(pv({3.0, 1.0}).dim() == 2);

    REQUIRE_THROWS_AS(NonnegVector({-1.0}), ValidationError);
    REQUIRE(NonnegVector::zero(3).is_zero());
}

TEST_CASE("ratio bounds") {
    REQUIRE(m_upper(pv({2, 6}), pv({1, 2})) == Approx(3.0));
    REQUIRE(m_upper(pv({1, 4}), pv({1, 4})) == Approx(1.0));
    REQUIRE(m_upper(pv({1, 4}), pv({2, 1})) == Approx(4.0));

    REQUIRE(m_lower(pv({2, 6}), pv({1, 2})) == Approx(2.0));
    REQUIRE(m_lower(pv({1, 4}), pv({1, 4})) == Approx(1.0));
    REQUIRE(m_lower(pv({1, 4}), pv({2, 1})) == Approx(0.5));

    REQUIRE_THROWS_AS(m_upper(pv({1, 2}), pv({1, 2, 3})), DimensionMismatch);
}

TEST_CASE("thompson metric examples") {
    const double e = std::exp(1.0);
    REQUIRE(thompson(pv({1, 1}), pv({e, e})) == Approx(1.0));
    REQUIRE(thompson(pv({2, 5}), pv({2, 5})) == Approx(0.0));
    REQUIRE(thompson(pv({1, 4}), pv({1, 1})) == Approx(std::log(4.0)));
    REQUIRE_THROWS_AS(thompson(pv({1}), pv({1, 2})), DimensionMismatch);
}

TEST_CASE("hilbert metric examples") {
    REQUIRE(hilbert(pv({1, 2}), pv({2, 4})) == Approx(0.0).margin(1e-15));
    REQUIRE(hilbert(pv({1, 4}), pv({1, 1})) == Approx(std::log(4.0)));
    REQUIRE(hilbert(pv({2, 6}), pv({1, 2})) == Approx(std::log(1.5)));
}

TEST_CASE("normalize_sup") {
    const auto a = normalize_sup(pv({2, 4}));
    REQUIRE(a[0] == Approx(0.5));
    REQUIRE(a[1] == Approx(1.0));
    REQUIRE(normalize_sup(pv({1, 1})) == pv({1, 1}));
    const auto b = normalize_sup(pv({3, 1, 2}));
    REQUIRE(b[0] == Approx(1.0));
    REQUIRE(b[1] == Approx(1.0 / 3.0));
    REQUIRE(b[2] == Approx(2.0 / 3.0));
}

TEST_CASE("metric properties on random samples") {
    for (int trial = 0; trial < 2000; ++trial) {
        SubstreamRng rng(42, static_cast<std::uint64_t>(trial));
        const int n = rng.uniform_int(2, 8);
        const auto x = rng.interior_point(n);
        const auto y = rng.interior_point(n);
        const auto z = rng.interior_point(n);

        // two-sided comparison of the projective and Thompson distances
        REQUIRE(hilbert(x, y) <= 2.0 * thompson(x, y) + 1e-12);

        // triangle inequalities
        REQUIRE(thompson(x, z) <= thompson(x, y) + thompson(y, z) + 1e-12);
        REQUIRE(hilbert(x, z) <= hilbert(x, y) + hilbert(y, z) + 1e-12);

        // scale invariance of the projective metric
        const double alpha = std::exp(rng.uniform(-2, 2));
        const double beta = std::exp(rng.uniform(-2, 2));
        std::vector<double> xs(x.entries()), ys(y.entries());
        for (auto& v : xs) v *= alpha;
        for (auto& v : ys) v *= beta;
        REQUIRE(hilbert(PositiveVector(xs), PositiveVector(ys)) ==
                Approx(hilbert(x, y)).margin(1e-12));

        // symmetry and the product inequality
        REQUIRE(thompson(x, y) == Approx(thompson(y, x)));
        REQUIRE(m_upper(x, y) * m_upper(y, x) >= 1.0 - 1e-12);

        // sup-norm normality with constant one: 0 <= a <= b forces |a| <= |b|
        std::vector<double> lower(x.entries());
        for (std::size_t i = 0; i < lower.size(); ++i) lower[i] *= rng.uniform(0.0, 1.0) * 0.999 + 1e-6;
        REQUIRE(PositiveVector(lower).sup_norm() <= x.sup_norm());
    }
}

TEST_CASE("m_upper product is one exactly on proportional pairs") {
    for (int trial = 0; trial < 200; ++trial) {
        SubstreamRng rng(7, static_cast<std::uint64_t>(trial));
        const auto x = rng.interior_point(rng.uniform_int(2, 6));
        const double c = std::exp(rng.uniform(-1, 1));
        std::vector<double> scaled(x.entries());
        for (auto& v : scaled) v *= c;
        const PositiveVector y{scaled};
        REQUIRE(m_upper(x, y) * m_upper(y, x) == Approx(1.0).margin(1e-12));
        REQUIRE(hilbert(x, y) == Approx(0.0).margin(1e-12));
    }
}
