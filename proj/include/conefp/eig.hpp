#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "conefp/errors.hpp"
#include "conefp/matrix.hpp"

namespace conefp {

namespace detail {

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transformations (elmhes). Only eigenvalues are needed downstream, so the
// multipliers are not accumulated.
inline void hessenberg_reduce(Matrix& a) {
    const int n = a.rows;
    for (int m = 1; m < n - 1; ++m) {
        double piv = 0.0;
        int i_piv = m;
        for (int i = m; i < n; ++i) {
            if (std::abs(a(i, m - 1)) > std::abs(piv)) {
                piv = a(i, m - 1);
                i_piv = i;
            }
        }
        if (piv == 0.0) continue;
        if (i_piv != m) {
            for (int j = m - 1; j < n; ++j) std::swap(a(i_piv, j), a(m, j));
            for (int i = 0; i < n; ++i) std::swap(a(i, i_piv), a(i, m));
        }
        for (int i = m + 1; i < n; ++i) {
            const double y = a(i, m - 1) / a(m, m - 1);
            if (y == 0.0) continue;
            a(i, m - 1) = 0.0;
            for (int j = m; j < n; ++j) a(i, j) -= y * a(m, j);
            for (int j = 0; j < n; ++j) a(j, m) += y * a(j, i);
        }
    }
}

// Francis double-shift QR on an upper Hessenberg matrix; fills wr/wi with
// the real and imaginary parts of the eigenvalues. `max_sweeps` caps the
// total number of QR steps.
inline void hessenberg_qr_eigenvalues(Matrix& a, std::vector<double>& wr, std::vector<double>& wi,
                                      int max_sweeps) {
    const int n = a.rows;
    wr.assign(static_cast<std::size_t>(n), 0.0);
    wi.assign(static_cast<std::size_t>(n), 0.0);

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    if (anorm == 0.0) return;  // the zero matrix

    int nn = n - 1;
    double t = 0.0;
    int sweeps = 0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                const double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                const double scale = (s == 0.0) ? anorm : s;
                if (std::abs(a(l, l - 1)) + scale == scale) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {  // one real eigenvalue isolated
                wr[static_cast<std::size_t>(nn)] = x + t;
                wi[static_cast<std::size_t>(nn)] = 0.0;
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {  // a 2x2 block isolated
                    const double p = 0.5 * (y - x);
                    const double q = p * p + w;
                    const double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        const double zz = p + (p >= 0.0 ? z : -z);
                        wr[static_cast<std::size_t>(nn - 1)] = wr[static_cast<std::size_t>(nn)] = x + zz;
                        if (zz != 0.0) wr[static_cast<std::size_t>(nn)] = x - w / zz;
                        wi[static_cast<std::size_t>(nn - 1)] = wi[static_cast<std::size_t>(nn)] = 0.0;
                    } else {
                        wr[static_cast<std::size_t>(nn - 1)] = wr[static_cast<std::size_t>(nn)] = x + p;
                        wi[static_cast<std::size_t>(nn - 1)] = -z;
                        wi[static_cast<std::size_t>(nn)] = z;
                    }
                    nn -= 2;
                } else {
                    if (++sweeps > max_sweeps) {
                        std::vector<double> partial;
                        for (int i = nn + 1; i < n; ++i)
                            partial.push_back(std::hypot(wr[static_cast<std::size_t>(i)],
                                                         wi[static_cast<std::size_t>(i)]));
                        std::sort(partial.rbegin(), partial.rend());
                        throw EigenvalueFailure("eig_moduli: QR sweep budget exhausted",
                                                std::move(partial));
                    }
                    if (its == 10 || its == 20) {
                        // exceptional shift to break symmetry stalls
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        const double s =
                            std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    double p = 0.0, q = 0.0, z = 0.0, r = 0.0, s = 0.0;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                                        std::abs(a(m + 1, m + 1)));
                        if (u + v == v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = std::sqrt(p * p + q * q + r * r);
                        if (p < 0.0) s = -s;
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {  // row modification
                            p = a(k, j) + q * a(k + 1, j);
                            if (k != nn - 1) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * y;
                            a(k, j) -= p * x;
                        }
                        const int mmin = (nn < k + 3) ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {  // column modification
                            p = x * a(i, k) + y * a(i, k + 1);
                            if (k != nn - 1) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (l < nn - 1 && nn >= 0);
    }
}

}  // namespace detail

inline constexpr int kMaxEigDim = 256;

/// All eigenvalue moduli of a real square matrix, nonincreasing, via
/// Hessenberg reduction followed by shifted QR iteration.
inline std::vector<double> eig_moduli(const Matrix& a_in) {
    if (!a_in.square() || a_in.rows < 1) throw ValidationError("eig_moduli: matrix must be square");
    if (a_in.rows > kMaxEigDim)
        throw ValidationError("eig_moduli: dimension capped at " + std::to_string(kMaxEigDim));
    for (double v : a_in.data)
        if (!std::isfinite(v)) throw ValidationError("eig_moduli: entries must be finite");

    Matrix a = a_in;
    const int n = a.rows;
    if (n == 1) return {std::abs(a(0, 0))};

    detail::hessenberg_reduce(a);
    std::vector<double> wr, wi;
    detail::hessenberg_qr_eigenvalues(a, wr, wi, 100 * n);

    std::vector<double> moduli(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        moduli[static_cast<std::size_t>(i)] =
            std::hypot(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
    std::sort(moduli.rbegin(), moduli.rend());
    return moduli;
}

}  // namespace conefp
