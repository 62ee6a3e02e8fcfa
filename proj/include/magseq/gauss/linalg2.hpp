#pragma once

#include <cmath>
#include <utility>

namespace magseq {

struct Vec2 {
    double x = 0.0, y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
};

// Row-major 2x2 matrix.
struct Mat2 {
    double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }

    Mat2 transpose() const { return {a00, a10, a01, a11}; }
    double trace() const { return a00 + a11; }
    double det() const { return a00 * a11 - a01 * a10; }

    friend Mat2 operator+(Mat2 a, Mat2 b) {
        return {a.a00 + b.a00, a.a01 + b.a01, a.a10 + b.a10, a.a11 + b.a11};
    }
    friend Mat2 operator-(Mat2 a, Mat2 b) {
        return {a.a00 - b.a00, a.a01 - b.a01, a.a10 - b.a10, a.a11 - b.a11};
    }
    friend Mat2 operator*(double s, Mat2 m) {
        return {s * m.a00, s * m.a01, s * m.a10, s * m.a11};
    }
    friend Mat2 operator*(Mat2 a, Mat2 b) {
        return {a.a00 * b.a00 + a.a01 * b.a10, a.a00 * b.a01 + a.a01 * b.a11,
                a.a10 * b.a00 + a.a11 * b.a10, a.a10 * b.a01 + a.a11 * b.a11};
    }
    friend Vec2 operator*(Mat2 m, Vec2 v) {
        return {m.a00 * v.x + m.a01 * v.y, m.a10 * v.x + m.a11 * v.y};
    }
};

inline Mat2 outer(Vec2 a, Vec2 b) {
    return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
}

inline Mat2 symmetrize(Mat2 m) {
    const double off = 0.5 * (m.a01 + m.a10);
    return {m.a00, off, off, m.a11};
}

// Eigenvalues of a symmetric 2x2, ascending.
inline std::pair<double, double> sym_eigenvalues(Mat2 m) {
    const double half_tr = 0.5 * (m.a00 + m.a11);
    const double d = 0.5 * (m.a00 - m.a11);
    const double rad = std::sqrt(d * d + m.a01 * m.a10);
    return {half_tr - rad, half_tr + rad};
}

inline double min_eigenvalue_sym(Mat2 m) { return sym_eigenvalues(m).first; }

inline Mat2 inverse(Mat2 m) {
    const double d = m.det();
    return {m.a11 / d, -m.a01 / d, -m.a10 / d, m.a00 / d};
}

inline bool invertible(Mat2 m, double rel_tol = 1e-12) {
    const double scale = std::abs(m.a00) + std::abs(m.a01) + std::abs(m.a10) +
                         std::abs(m.a11);
    return std::abs(m.det()) > rel_tol * scale * scale;
}

// Moore-Penrose inverse of a symmetric PSD 2x2 via its eigendecomposition.
inline Mat2 pseudo_inverse_sym(Mat2 m, double rel_tol = 1e-12) {
    m = symmetrize(m);
    const auto [lo, hi] = sym_eigenvalues(m);
    const double cut = rel_tol * std::max(std::abs(hi), std::abs(lo));
    auto inv_or_zero = [&](double lambda) {
        return std::abs(lambda) > cut ? 1.0 / lambda : 0.0;
    };
    // eigenvector for eigenvalue lambda: (a01, lambda - a00) or (lambda - a11, a10)
    auto eigvec = [&](double lambda) -> Vec2 {
        Vec2 v{m.a01, lambda - m.a00};
        if (std::abs(v.x) + std::abs(v.y) < cut + 1e-300) v = {lambda - m.a11, m.a10};
        const double n = std::sqrt(dot(v, v));
        if (n == 0.0) return {1.0, 0.0};
        return {v.x / n, v.y / n};
    };
    if (std::abs(m.a01) == 0.0) {
        return Mat2::diag(std::abs(m.a00) > cut ? 1.0 / m.a00 : 0.0,
                          std::abs(m.a11) > cut ? 1.0 / m.a11 : 0.0);
    }
    const Vec2 v1 = eigvec(lo), v2 = eigvec(hi);
    return inv_or_zero(lo) * outer(v1, v1) + inv_or_zero(hi) * outer(v2, v2);
}

} // namespace magseq
