#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

// Small dense linear algebra for desk-scale dimensions (n <= 8).
// Everything is stack-allocated and value-semantic; no heap, no aliasing.

namespace carlab {

inline constexpr int kMaxDim = 8;
// Rank-4 tensors only appear in weight evaluations, which are capped lower.
inline constexpr int kMaxDim4 = 4;

struct Vec {
    int n = 0;
    std::array<double, kMaxDim> a{};

    Vec() = default;
    explicit Vec(int dim) : n(dim) {
        if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("Vec: dimension out of range");
    }
    static Vec zero(int dim) { return Vec(dim); }
    static Vec unit(int dim, int i) {
        Vec v(dim);
        v[i] = 1.0;
        return v;
    }

    double& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return a[static_cast<std::size_t>(i)]; }

    double dot(const Vec& o) const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += a[i] * o.a[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) a[i] += o.a[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n; ++i) a[i] -= o.a[i];
        return *this;
    }
    Vec& operator*=(double c) {
        for (int i = 0; i < n; ++i) a[i] *= c;
        return *this;
    }
    friend Vec operator+(Vec l, const Vec& r) { return l += r; }
    friend Vec operator-(Vec l, const Vec& r) { return l -= r; }
    friend Vec operator*(double c, Vec v) { return v *= c; }
    friend Vec operator*(Vec v, double c) { return v *= c; }
};

struct Mat {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> a{};

    Mat() = default;
    explicit Mat(int dim) : n(dim) {
        if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("Mat: dimension out of range");
    }
    static Mat zero(int dim) { return Mat(dim); }
    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < n * n; ++i) a[i] += o.a[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (int i = 0; i < n * n; ++i) a[i] -= o.a[i];
        return *this;
    }
    Mat& operator*=(double c) {
        for (int i = 0; i < n * n; ++i) a[i] *= c;
        return *this;
    }
    friend Mat operator+(Mat l, const Mat& r) { return l += r; }
    friend Mat operator-(Mat l, const Mat& r) { return l -= r; }
    friend Mat operator*(double c, Mat m) { return m *= c; }

    Vec operator*(const Vec& v) const {
        Vec r(n);
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int j = 0; j < n; ++j) s += (*this)(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }
    Mat operator*(const Mat& o) const {
        Mat r(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                double lik = (*this)(i, k);
                if (lik == 0.0) continue;
                for (int j = 0; j < n; ++j) r(i, j) += lik * o(k, j);
            }
        return r;
    }

    Mat transpose() const {
        Mat r(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    double trace() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += (*this)(i, i);
        return s;
    }
    double frobenius() const {
        double s = 0;
        for (int i = 0; i < n * n; ++i) s += a[i] * a[i];
        return std::sqrt(s);
    }
    double max_abs() const {
        double m = 0;
        for (int i = 0; i < n * n; ++i) m = std::max(m, std::abs(a[i]));
        return m;
    }
    double sym_defect() const {
        double m = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }
    // quadratic form x^T M x
    double quad(const Vec& x) const {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += (*this)(i, j) * x[i] * x[j];
        return s;
    }
};

inline Mat outer(const Vec& u, const Vec& v) {
    Mat m(u.n);
    for (int i = 0; i < u.n; ++i)
        for (int j = 0; j < u.n; ++j) m(i, j) = u[i] * v[j];
    return m;
}

// Order-3 tensor, index convention T(k,i,j) = d_k a^{ij}.
struct Ten3 {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim * kMaxDim> a{};

    Ten3() = default;
    explicit Ten3(int dim) : n(dim) {
        if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("Ten3: dimension out of range");
    }
    double& operator()(int k, int i, int j) { return a[static_cast<std::size_t>((k * n + i) * n + j)]; }
    double operator()(int k, int i, int j) const { return a[static_cast<std::size_t>((k * n + i) * n + j)]; }

    Mat slice(int k) const {  // matrix d_k a^{ij}
        Mat m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = (*this)(k, i, j);
        return m;
    }
    double max_abs() const {
        double m = 0;
        for (const double v : a) m = std::max(m, std::abs(v));
        return m;
    }
};

// Order-4 tensor, index convention T(k,l,i,j) = d_k d_l a^{ij} (or 4th partials of a scalar).
struct Ten4 {
    int n = 0;
    std::array<double, kMaxDim4 * kMaxDim4 * kMaxDim4 * kMaxDim4> a{};

    Ten4() = default;
    explicit Ten4(int dim) : n(dim) {
        if (dim < 0 || dim > kMaxDim4) throw std::invalid_argument("Ten4: dimension out of range");
    }
    double& operator()(int k, int l, int i, int j) {
        return a[static_cast<std::size_t>(((k * n + l) * n + i) * n + j)];
    }
    double operator()(int k, int l, int i, int j) const {
        return a[static_cast<std::size_t>(((k * n + l) * n + i) * n + j)];
    }
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
// Deterministic; accurate to ~1e-15 * |A| for n <= 8. Ascending order.
Vec sym_eigenvalues(const Mat& m);

double sym_eig_min(const Mat& m);
double sym_eig_max(const Mat& m);

}  // namespace carlab
