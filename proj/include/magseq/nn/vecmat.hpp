#pragma once

#include <cstddef>
#include <vector>

namespace magseq {

using Vec = std::vector<double>;

// Dense row-major matrix; the only shapes used here are m x m and m x 1.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double* row(std::size_t r) { return data.data() + r * cols; }

    bool operator==(const Mat&) const = default;
};

// y += W x
inline void gemv_acc(const Mat& w, const Vec& x, Vec& y) {
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double* wr = w.row(r);
        double s = 0.0;
        for (std::size_t c = 0; c < w.cols; ++c) s += wr[c] * x[c];
        y[r] += s;
    }
}

// y += W^T x
inline void gemv_transpose_acc(const Mat& w, const Vec& x, Vec& y) {
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double* wr = w.row(r);
        const double xr = x[r];
        for (std::size_t c = 0; c < w.cols; ++c) y[c] += wr[c] * xr;
    }
}

// W += u v^T
inline void outer_acc(Mat& w, const Vec& u, const Vec& v) {
    for (std::size_t r = 0; r < w.rows; ++r) {
        double* wr = w.row(r);
        const double ur = u[r];
        for (std::size_t c = 0; c < w.cols; ++c) wr[c] += ur * v[c];
    }
}

inline void axpy(double a, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

} // namespace magseq
