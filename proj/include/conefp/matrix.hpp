#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "conefp/errors.hpp"

namespace conefp {

/// Small dense row-major matrix. Problems here are desk scale, so there is
/// no blocking or aliasing cleverness anywhere.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {
        if (r < 0 || c < 0) throw ValidationError("Matrix: negative dimension");
    }

    double& operator()(int i, int j) {
        return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) +
                    static_cast<std::size_t>(j)];
    }
    double operator()(int i, int j) const {
        return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) +
                    static_cast<std::size_t>(j)];
    }

    bool square() const { return rows == cols; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& x) {
    if (static_cast<std::size_t>(a.cols) != x.size())
        throw DimensionMismatch("matvec: matrix has " + std::to_string(a.cols) +
                                " columns, vector has " + std::to_string(x.size()) + " entries");
    std::vector<double> y(static_cast<std::size_t>(a.rows), 0.0);
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

}  // namespace conefp
