#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dream/errors.hpp"

namespace dream {

/// Dense row-major matrix of doubles. All accumulation is done in double.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }

    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (double v : a)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// C = A * B
inline Mat matmul(const Mat& A, const Mat& B) {
    if (A.cols != B.rows)
        throw DataError("matmul: inner dimensions disagree (" + std::to_string(A.cols) +
                        " vs " + std::to_string(B.rows) + ")");
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i) {
        const double* arow = A.row(i);
        double* crow = C.row(i);
        for (int k = 0; k < A.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = B.row(k);
            for (int j = 0; j < B.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return C;
}

/// C = A^T * B  (A is n x r, B is n x c, result r x c)
inline Mat matmul_at_b(const Mat& A, const Mat& B) {
    if (A.rows != B.rows)
        throw DataError("matmul_at_b: row counts disagree");
    Mat C(A.cols, B.cols);
    for (int n = 0; n < A.rows; ++n) {
        const double* arow = A.row(n);
        const double* brow = B.row(n);
        for (int i = 0; i < A.cols; ++i) {
            const double ani = arow[i];
            if (ani == 0.0) continue;
            double* crow = C.row(i);
            for (int j = 0; j < B.cols; ++j) crow[j] += ani * brow[j];
        }
    }
    return C;
}

/// C = A * B^T  (A is n x c, B is m x c, result n x m)
inline Mat matmul_a_bt(const Mat& A, const Mat& B) {
    if (A.cols != B.cols)
        throw DataError("matmul_a_bt: column counts disagree");
    Mat C(A.rows, B.rows);
    for (int i = 0; i < A.rows; ++i) {
        const double* arow = A.row(i);
        double* crow = C.row(i);
        for (int j = 0; j < B.rows; ++j) {
            const double* brow = B.row(j);
            double s = 0.0;
            for (int k = 0; k < A.cols; ++k) s += arow[k] * brow[k];
            crow[j] = s;
        }
    }
    return C;
}

inline double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const double* a, int n) { return std::sqrt(dot(a, a, n)); }

}  // namespace dream
