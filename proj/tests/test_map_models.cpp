#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "conefp/map_models.hpp"
#include "conefp/rng.hpp"

using Catch::Approx;
using namespace conefp;

namespace {

PositiveVector pv(std::vector<double> v) { return PositiveVector(std::move(v)); }

MapModel symmetric2() { return MatrixMap::from_rows({{2, 1}, {1, 2}}); }

MapModel tensor_example() {
    // order 3, n = 2: A(1,1,1) = 1, A(1,2,2) = 2, A(2,1,2) = 1
    return TensorMap(3, 2,
                     {{{0, 0, 0}, 1.0}, {{0, 1, 1}, 2.0}, {{1, 0, 1}, 1.0}});
}

Matrix central_differences(const MapModel& map, const std::vector<double>& x, double h = 1e-6) {
    const int n = map.dim();
    Matrix jac(n, n);
    for (int j = 0; j < n; ++j) {
        auto hi = x, lo = x;
        hi[static_cast<std::size_t>(j)] += h;
        lo[static_cast<std::size_t>(j)] -= h;
        const auto fhi = map.eval_raw(hi);
        const auto flo = map.eval_raw(lo);
        for (int i = 0; i < n; ++i)
            jac(i, j) = (fhi[static_cast<std::size_t>(i)] - flo[static_cast<std::size_t>(i)]) / (2 * h);
    }
    return jac;
}

double max_rel_error(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) {
            const double denom = std::max({std::abs(a(i, j)), std::abs(b(i, j)), 1e-8});
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / denom);
        }
    return worst;
}

}  // namespace

TEST_CASE("model validation") {
    REQUIRE_THROWS_AS(MatrixMap::from_rows({{1, 0}, {0, 0}}), ValidationError);      // zero row
    REQUIRE_THROWS_AS(MatrixMap::from_rows({{1, -1}, {0, 1}}), ValidationError);     // negative
    REQUIRE_THROWS_AS(TensorMap(1, 2, {}), ValidationError);                         // order too small
    REQUIRE_THROWS_AS(TensorMap(2, 2, {{{0, 0}, 1.0}}), ValidationError);            // coord 2 empty
    REQUIRE_THROWS_AS(Expr::monomial(1.0, {0.5, 0.4}), ValidationError);             // sum != 1
    REQUIRE_THROWS_AS(Expr::monomial(-1.0, {1.0}), ValidationError);
    REQUIRE_THROWS_AS(Expr::max({}), ValidationError);
}

TEST_CASE("tensor duplicate entries are summed at load") {
    TensorMap t(2, 2, {{{0, 0}, 1.0}, {{0, 0}, 2.5}, {{0, 1}, 1.0}, {{1, 0}, 1.0}});
    REQUIRE(t.entries().size() == 3);
    const auto y = t.eval_raw({1.0, 1.0});
    REQUIRE(y[0] == Approx(4.5));
}

TEST_CASE("eval on the named examples") {
    const auto y = symmetric2().eval(pv({1, 1}));
    REQUIRE(y[0] == Approx(3.0));
    REQUIRE(y[1] == Approx(3.0));

    const auto t = tensor_example().eval(pv({1, 1}));
    REQUIRE(t[0] == Approx(std::sqrt(3.0)));
    REQUIRE(t[1] == Approx(1.0));

    const double e = std::exp(1.0);
    const auto b = MapModel(BuiltinMap(BuiltinTag::Example1)).eval(pv({1.0 / e, e}));
    REQUIRE(b[0] == Approx(std::exp(-std::atan(1.0))).epsilon(1e-14));
    REQUIRE(b[1] == Approx(std::exp(std::atan(1.0))).epsilon(1e-14));

    REQUIRE_THROWS_AS(symmetric2().eval(pv({1, 2, 3})), DimensionMismatch);
}

TEST_CASE("builtin second example closed-form orbit step") {
    const double e = std::exp(1.0);
    const auto b = MapModel(BuiltinMap(BuiltinTag::Example2)).eval(pv({1.0 / e, 1.0}));
    REQUIRE(b[0] == Approx(std::exp(-std::atan(1.0))).epsilon(1e-14));
    REQUIRE(b[1] == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("associated digraphs") {
    const auto perm = MapModel(MatrixMap::from_rows({{0, 1}, {1, 0}})).digraph();
    REQUIRE(perm.arc_count() == 2);
    REQUIRE(perm.has_arc(0, 1));
    REQUIRE(perm.has_arc(1, 0));

    const auto tg = tensor_example().digraph();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) REQUIRE(tg.has_arc(i, j));

    // min node takes the intersection of its branch supports
    ExprMap min_map(2, {Expr::min({Expr::monomial(1.0, {1, 0}), Expr::monomial(1.0, {0, 1})}),
                        Expr::monomial(1.0, {0, 1})});
    const auto mg = MapModel(min_map).digraph();
    REQUIRE(mg.arc_count() == 1);
    REQUIRE(mg.has_arc(1, 1));

    const auto bg = MapModel(BuiltinMap(BuiltinTag::Example1)).digraph();
    REQUIRE(bg.arc_count() == 4);
}

TEST_CASE("jacobians against hand derivations and finite differences") {
    // linear map: the matrix itself
    const auto jac_lin = symmetric2().jacobian(pv({0.3, 1.7}));
    REQUIRE(jac_lin(0, 0) == Approx(2.0));
    REQUIRE(jac_lin(0, 1) == Approx(1.0));

    // tensor at the all-ones point, differentiated by hand
    const auto jt = tensor_example().jacobian(pv({1, 1}));
    REQUIRE(jt(0, 0) == Approx(1.0 / std::sqrt(3.0)));
    REQUIRE(jt(0, 1) == Approx(2.0 / std::sqrt(3.0)));
    REQUIRE(jt(1, 0) == Approx(0.5));
    REQUIRE(jt(1, 1) == Approx(0.5));

    // the smooth builtin has the identity Jacobian at its eigenvector
    const auto jb = MapModel(BuiltinMap(BuiltinTag::Example1)).jacobian(pv({1, 1}));
    REQUIRE(jb(0, 0) == Approx(1.0));
    REQUIRE(jb(0, 1) == Approx(0.0).margin(1e-15));
    REQUIRE(jb(1, 0) == Approx(0.0).margin(1e-15));
    REQUIRE(jb(1, 1) == Approx(1.0));

    for (int trial = 0; trial < 25; ++trial) {
        SubstreamRng rng(3, static_cast<std::uint64_t>(trial));
        const auto x2 = rng.interior_point(2);
        for (const MapModel& map :
             {tensor_example(), MapModel(BuiltinMap(BuiltinTag::Example1)),
              MapModel(BuiltinMap(BuiltinTag::Example2))}) {
            Matrix analytic;
            try {
                analytic = map.jacobian(x2);
            } catch (const NondifferentiablePoint&) {
                continue;  // random diagonal tie; nothing to compare
            }
            REQUIRE(max_rel_error(analytic, central_differences(map, x2.entries())) < 1e-5);
        }
    }
}

TEST_CASE("max and min ties are nondifferentiable points") {
    ExprMap m(2, {Expr::max({Expr::monomial(1.0, {1, 0}), Expr::monomial(1.0, {0, 1})}),
                  Expr::monomial(1.0, {0, 1})});
    const MapModel map(m);
    REQUIRE_THROWS_AS(map.jacobian(pv({1, 1})), NondifferentiablePoint);
    REQUIRE_NOTHROW(map.jacobian(pv({1, 2})));

    const MapModel ex2{BuiltinMap(BuiltinTag::Example2)};
    REQUIRE_THROWS_AS(ex2.jacobian(pv({1.5, 1.5})), NondifferentiablePoint);
    REQUIRE_NOTHROW(ex2.jacobian(pv({1.0, 2.0})));
}

TEST_CASE("order preservation and homogeneity on sampled models") {
    std::vector<MapModel> zoo{symmetric2(), tensor_example(),
                              MapModel(BuiltinMap(BuiltinTag::Example1)),
                              MapModel(BuiltinMap(BuiltinTag::Example2))};
    ExprMap mixed(2, {Expr::max({Expr::monomial(2.0, {1, 0}),
                                 Expr::sum({Expr::monomial(0.5, {0.5, 0.5}),
                                            Expr::monomial(1.0, {0, 1})})}),
                      Expr::min({Expr::monomial(1.0, {1, 0}), Expr::monomial(3.0, {0.25, 0.75})})});
    zoo.push_back(MapModel(mixed));

    for (const auto& map : zoo) {
        for (int trial = 0; trial < 300; ++trial) {
            SubstreamRng rng(17, static_cast<std::uint64_t>(trial));
            const auto x = rng.interior_point(map.dim());
            std::vector<double> bigger(x.entries());
            for (auto& v : bigger) v += rng.uniform(0.0, 0.5);
            const auto fx = map.eval_raw(x.entries());
            const auto fy = map.eval_raw(bigger);
            for (std::size_t i = 0; i < fx.size(); ++i) REQUIRE(fx[i] <= fy[i] + 1e-12);

            for (double t : {0.5, 2.0, 10.0}) {
                std::vector<double> scaled(x.entries());
                for (auto& v : scaled) v *= t;
                const auto fs = map.eval_raw(scaled);
                for (std::size_t i = 0; i < fx.size(); ++i)
                    REQUIRE(std::abs(fs[i] - t * fx[i]) <=
                            1e-10 * t * detail::sup_norm(fx) + 1e-14);
            }
        }
    }
}

TEST_CASE("jacobian pattern of smooth models matches the digraph everywhere") {
    ExprMap smooth(3, {Expr::sum({Expr::monomial(1.0, {0.5, 0.5, 0}), Expr::monomial(2.0, {1, 0, 0})}),
                       Expr::monomial(1.0, {0, 0, 1}),
                       Expr::sum({Expr::monomial(0.5, {0, 1, 0}), Expr::monomial(0.5, {0, 0, 1})})});
    for (const MapModel& map : {tensor_example(), MapModel(smooth)}) {
        const auto expected = map.digraph();
        for (int trial = 0; trial < 100; ++trial) {
            SubstreamRng rng(23, static_cast<std::uint64_t>(trial));
            const auto x = rng.interior_point(map.dim());
            REQUIRE(pattern_digraph(map.jacobian(x)) == expected);
        }
    }
}

TEST_CASE("tensor text reader") {
    std::istringstream good(
        "# order-3 example\n"
        "3 2\n"
        "1 1 1 1.0\n"
        "1 2 2 2.0   # duplicate below\n"
        "2 1 2 0.25\n"
        "2 1 2 0.75\n");
    const TensorMap t = load_tensor_text(good);
    REQUIRE(t.order() == 3);
    REQUIRE(t.dim() == 2);
    REQUIRE(t.entries().size() == 3);
    const auto y = t.eval_raw({1.0, 1.0});
    REQUIRE(y[0] == Approx(std::sqrt(3.0)));
    REQUIRE(y[1] == Approx(1.0));

    std::istringstream no_header("1 1 1 1.0\n");
    REQUIRE_THROWS_AS(load_tensor_text(no_header), ParseError);

    std::istringstream bad_index("3 2\n1 3 1 1.0\n2 1 1 1.0\n");
    try {
        load_tensor_text(bad_index);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        REQUIRE(e.line == 2);
    }

    std::istringstream short_line("3 2\n1 1 1\n");
    REQUIRE_THROWS_AS(load_tensor_text(short_line), ParseError);
}

TEST_CASE("builtin maps reject boundary input") {
    const MapModel b{BuiltinMap(BuiltinTag::Example1)};
    REQUIRE_THROWS_AS(b.eval_raw({0.0, 1.0}), EvaluationError);
}
