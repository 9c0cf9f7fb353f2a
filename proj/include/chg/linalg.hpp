#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace chg {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    std::array<cplx, 3> v{};

    Vec3() = default;
    Vec3(cplx a, cplx b, cplx c) : v{a, b, c} {}

    cplx& operator[](int i) { return v[static_cast<size_t>(i)]; }
    const cplx& operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(cplx s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3 operator/(const Vec3& a, cplx s) { return {a[0] / s, a[1] / s, a[2] / s}; }

inline Vec3 conj(const Vec3& a) {
    return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])};
}

// Bilinear cross product (no conjugation).
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

// Euclidean Hermitian dot product, linear in the first slot.
inline cplx dotc(const Vec3& a, const Vec3& b) {
    return a[0] * std::conj(b[0]) + a[1] * std::conj(b[1]) + a[2] * std::conj(b[2]);
}

inline double norm2(const Vec3& a) { return std::sqrt(std::real(dotc(a, a))); }
inline double maxabs(const Vec3& a) {
    return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

inline bool finite(const Vec3& a) {
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag())) return false;
    return true;
}

struct Mat3 {
    // Row-major entries.
    std::array<cplx, 9> a{};

    cplx& operator()(int r, int c) { return a[static_cast<size_t>(3 * r + c)]; }
    const cplx& operator()(int r, int c) const { return a[static_cast<size_t>(3 * r + c)]; }

    static Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }
    static Mat3 diagonal(cplx d0, cplx d1, cplx d2) {
        Mat3 m;
        m(0, 0) = d0;
        m(1, 1) = d1;
        m(2, 2) = d2;
        return m;
    }
    static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        Mat3 m;
        for (int c = 0; c < 3; ++c) {
            m(0, c) = r0[c];
            m(1, c) = r1[c];
            m(2, c) = r2[c];
        }
        return m;
    }
    static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        Mat3 m;
        for (int r = 0; r < 3; ++r) {
            m(r, 0) = c0[r];
            m(r, 1) = c1[r];
            m(r, 2) = c2[r];
        }
        return m;
    }

    Vec3 row(int r) const { return {(*this)(r, 0), (*this)(r, 1), (*this)(r, 2)}; }
    Vec3 column(int c) const { return {(*this)(0, c), (*this)(1, c), (*this)(2, c)}; }
};

inline Mat3 operator+(const Mat3& x, const Mat3& y) {
    Mat3 m;
    for (size_t i = 0; i < 9; ++i) m.a[i] = x.a[i] + y.a[i];
    return m;
}
inline Mat3 operator-(const Mat3& x, const Mat3& y) {
    Mat3 m;
    for (size_t i = 0; i < 9; ++i) m.a[i] = x.a[i] - y.a[i];
    return m;
}
inline Mat3 operator*(cplx s, const Mat3& x) {
    Mat3 m;
    for (size_t i = 0; i < 9; ++i) m.a[i] = s * x.a[i];
    return m;
}
inline Mat3 operator/(const Mat3& x, cplx s) { return (1.0 / s) * x; }

inline Mat3 operator*(const Mat3& x, const Mat3& y) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            cplx s = 0.0;
            for (int k = 0; k < 3; ++k) s += x(r, k) * y(k, c);
            m(r, c) = s;
        }
    return m;
}

inline Vec3 operator*(const Mat3& x, const Vec3& u) {
    Vec3 w;
    for (int r = 0; r < 3; ++r) w[r] = x(r, 0) * u[0] + x(r, 1) * u[1] + x(r, 2) * u[2];
    return w;
}

inline Mat3 transpose(const Mat3& x) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = x(c, r);
    return m;
}
inline Mat3 conj(const Mat3& x) {
    Mat3 m;
    for (size_t i = 0; i < 9; ++i) m.a[i] = std::conj(x.a[i]);
    return m;
}
inline Mat3 adjoint(const Mat3& x) { return conj(transpose(x)); }

inline cplx trace(const Mat3& x) { return x(0, 0) + x(1, 1) + x(2, 2); }

inline cplx det(const Mat3& x) {
    return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
           x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
           x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

// Sum of principal 2x2 minors (second characteristic coefficient).
inline cplx minor_sum(const Mat3& x) {
    return (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) +
           (x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0)) +
           (x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0));
}

inline Mat3 inverse(const Mat3& x) {
    const cplx d = det(x);
    if (std::abs(d) == 0.0) throw std::domain_error("Mat3: singular matrix");
    Mat3 m;
    m(0, 0) = (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) / d;
    m(0, 1) = (x(0, 2) * x(2, 1) - x(0, 1) * x(2, 2)) / d;
    m(0, 2) = (x(0, 1) * x(1, 2) - x(0, 2) * x(1, 1)) / d;
    m(1, 0) = (x(1, 2) * x(2, 0) - x(1, 0) * x(2, 2)) / d;
    m(1, 1) = (x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0)) / d;
    m(1, 2) = (x(0, 2) * x(1, 0) - x(0, 0) * x(1, 2)) / d;
    m(2, 0) = (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0)) / d;
    m(2, 1) = (x(0, 1) * x(2, 0) - x(0, 0) * x(2, 1)) / d;
    m(2, 2) = (x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0)) / d;
    return m;
}

inline double maxabs(const Mat3& x) {
    double m = 0.0;
    for (const auto& e : x.a) m = std::max(m, std::abs(e));
    return m;
}
inline double frobenius(const Mat3& x) {
    double s = 0.0;
    for (const auto& e : x.a) s += std::norm(e);
    return std::sqrt(s);
}
inline bool finite(const Mat3& x) {
    for (const auto& e : x.a)
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
    return true;
}

// Distance between projective classes of matrices: align y to x by the entry
// of largest modulus, then compare entrywise, relative to the scale of x.
inline double projective_distance(const Mat3& x, const Mat3& y) {
    size_t imax = 0;
    for (size_t i = 1; i < 9; ++i)
        if (std::abs(y.a[i]) > std::abs(y.a[imax])) imax = i;
    if (std::abs(y.a[imax]) == 0.0) return maxabs(x) == 0.0 ? 0.0 : 1.0;
    const cplx c = x.a[imax] / y.a[imax];
    double scale = std::max(maxabs(x), 1e-300);
    return maxabs(x - c * y) / scale;
}

inline double projective_distance(const Vec3& x, const Vec3& y) {
    int imax = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(y[i]) > std::abs(y[imax])) imax = i;
    if (std::abs(y[imax]) == 0.0) return maxabs(x) == 0.0 ? 0.0 : 1.0;
    const cplx c = x[imax] / y[imax];
    double scale = std::max(maxabs(x), 1e-300);
    return maxabs(x - c * y) / scale;
}

// Tests M = w*Id for some scalar w; reports w when asked.
inline bool is_scalar_matrix(const Mat3& m, double tol, cplx* scalar = nullptr) {
    const cplx w = trace(m) / 3.0;
    double scale = std::max(maxabs(m), 1.0);
    if (maxabs(m - w * Mat3::identity()) > tol * scale) return false;
    if (scalar) *scalar = w;
    return true;
}

} // namespace chg
