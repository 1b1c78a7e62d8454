#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>

#include "conefp/eig.hpp"
#include "conefp/rng.hpp"

using Catch::Approx;
using namespace conefp;

namespace {

// Characteristic-polynomial oracle for n <= 3: Durand-Kerner on the monic
// polynomial, entirely independent of the Hessenberg/QR path.
std::vector<double> charpoly_moduli(const Matrix& a) {
    using C = std::complex<double>;
    const int n = a.rows;
    std::vector<C> coeff;  // monic: x^n + c[n-1] x^(n-1) + ... + c[0]
    if (n == 1) {
        coeff = {C(-a(0, 0))};
    } else if (n == 2) {
        const double tr = a(0, 0) + a(1, 1);
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        coeff = {C(det), C(-tr)};
    } else {
        const double tr = a(0, 0) + a(1, 1) + a(2, 2);
        const double m01 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        const double m02 = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
        const double m12 = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
        const double det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        coeff = {C(-det), C(m01 + m02 + m12), C(-tr)};
    }
    auto eval = [&](C x) {
        C v(1.0, 0.0);
        for (int k = n - 1; k >= 0; --k) v = v * x + coeff[static_cast<std::size_t>(k)];
        return v;
    };
    std::vector<C> roots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = std::pow(C(0.4, 0.9), i);
    for (int sweep = 0; sweep < 500; ++sweep) {
        double shift = 0.0;
        for (int i = 0; i < n; ++i) {
            C denom(1.0, 0.0);
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)];
            const C delta = eval(roots[static_cast<std::size_t>(i)]) / denom;
            roots[static_cast<std::size_t>(i)] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < 1e-14) break;
    }
    std::vector<double> moduli;
    for (const auto& r : roots) moduli.push_back(std::abs(r));
    std::sort(moduli.rbegin(), moduli.rend());
    return moduli;
}

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return a;
}

}  // namespace

TEST_CASE("eig moduli on closed-form cases") {
    const auto sym = eig_moduli(from_rows({{2, 1}, {1, 2}}));
    REQUIRE(sym[0] == Approx(3.0).margin(1e-10));
    REQUIRE(sym[1] == Approx(1.0).margin(1e-10));

    const auto rot = eig_moduli(from_rows({{0, 1}, {1, 0}}));
    REQUIRE(rot[0] == Approx(1.0).margin(1e-10));
    REQUIRE(rot[1] == Approx(1.0).margin(1e-10));

    const auto id3 = eig_moduli(Matrix::identity(3));
    for (double m : id3) REQUIRE(m == Approx(1.0).margin(1e-12));

    // complex pair: rotation by 90 degrees has both moduli 1
    const auto c = eig_moduli(from_rows({{0, -1}, {1, 0}}));
    REQUIRE(c[0] == Approx(1.0).margin(1e-10));
    REQUIRE(c[1] == Approx(1.0).margin(1e-10));
}

TEST_CASE("eig moduli match the characteristic polynomial oracle") {
    for (int trial = 0; trial < 400; ++trial) {
        SubstreamRng rng(5, static_cast<std::uint64_t>(trial));
        const int n = rng.uniform_int(1, 3);
        Matrix a(n, n);
        for (auto& v : a.data) v = rng.uniform(-3.0, 3.0);
        const auto fast = eig_moduli(a);
        const auto oracle = charpoly_moduli(a);
        for (int i = 0; i < n; ++i)
            REQUIRE(fast[static_cast<std::size_t>(i)] ==
                    Approx(oracle[static_cast<std::size_t>(i)]).margin(1e-8));
    }
}

TEST_CASE("eig moduli are invariant under permutation similarity") {
    for (int trial = 0; trial < 60; ++trial) {
        SubstreamRng rng(9, static_cast<std::uint64_t>(trial));
        const int n = rng.uniform_int(2, 12);
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
        for (int i = 0; i < n; ++i)
            REQUIRE(ma[static_cast<std::size_t>(i)] ==
                    Approx(mb[static_cast<std::size_t>(i)]).margin(1e-8));
    }
}

TEST_CASE("eig moduli on larger upper-triangular matrices are the diagonal") {
    SubstreamRng rng(13, 0);
    const int n = 40;
    Matrix a(n, n);
    std::vector<double> diag;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) a(i, j) = rng.uniform(-2.0, 2.0);
        diag.push_back(std::abs(a(i, i)));
    }
    std::sort(diag.rbegin(), diag.rend());
    const auto m = eig_moduli(a);
    for (int i = 0; i < n; ++i)
        REQUIRE(m[static_cast<std::size_t>(i)] == Approx(diag[static_cast<std::size_t>(i)]).margin(1e-8));
}

TEST_CASE("eig input validation") {
    REQUIRE_THROWS_AS(eig_moduli(Matrix(2, 3)), ValidationError);
    REQUIRE_THROWS_AS(eig_moduli(Matrix(300, 300)), ValidationError);
    Matrix bad(2, 2);
    bad(0, 0) = std::nan("");
    REQUIRE_THROWS_AS(eig_moduli(bad), ValidationError);
}
