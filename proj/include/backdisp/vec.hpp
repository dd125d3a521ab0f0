#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace backdisp {

// Small fixed-capacity vector for points in R^2 / R^3. Everything here is
// value-semantics and allocation-free; the dimension is carried at runtime
// because it comes from configuration, not from types.
struct Vec {
    std::array<double, 3> c{0.0, 0.0, 0.0};
    int n = 3;

    Vec() = default;
    Vec(double x, double y) : c{x, y, 0.0}, n(2) {}
    Vec(double x, double y, double z) : c{x, y, z}, n(3) {}

    static Vec zero(int dim) {
        if (dim != 2 && dim != 3) throw std::invalid_argument("Vec: dimension must be 2 or 3");
        Vec v; v.n = dim; v.c = {0.0, 0.0, 0.0};
        return v;
    }

    double operator[](int i) const { return c[static_cast<size_t>(i)]; }
    double& operator[](int i) { return c[static_cast<size_t>(i)]; }

    Vec operator+(const Vec& o) const { Vec r = *this; for (int i = 0; i < n; ++i) r.c[i] += o.c[i]; return r; }
    Vec operator-(const Vec& o) const { Vec r = *this; for (int i = 0; i < n; ++i) r.c[i] -= o.c[i]; return r; }
    Vec operator*(double s) const { Vec r = *this; for (int i = 0; i < n; ++i) r.c[i] *= s; return r; }

    double dot(const Vec& o) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += c[i] * o.c[i];
        return s;
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    Vec unit() const {
        double m = norm();
        if (m <= 0.0) throw std::invalid_argument("Vec::unit: zero vector");
        return *this * (1.0 / m);
    }
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

// Deterministic orthonormal basis of the hyperplane orthogonal to `axis`.
// Gram-Schmidt against a fixed trial vector; the trial switches to the
// second coordinate axis when `axis` is within 1e-8 of the first, so the
// construction never degenerates and never depends on input history.
inline std::array<Vec, 2> orthonormal_complement(const Vec& axis) {
    Vec a = axis.unit();
    if (a.n == 2) {
        Vec t(-a[1], a[0]);
        return {t, Vec::zero(2)};
    }
    Vec trial(1.0, 0.0, 0.0);
    if (std::abs(a.dot(trial)) > 1.0 - 1e-8) trial = Vec(0.0, 1.0, 0.0);
    Vec e1 = trial - a * a.dot(trial);
    e1 = e1.unit();
    Vec e2(a[1] * e1[2] - a[2] * e1[1],
           a[2] * e1[0] - a[0] * e1[2],
           a[0] * e1[1] - a[1] * e1[0]);
    return {e1, e2};
}

// Rotation taking the canonical pole (e_z in 3-d, e_x in 2-d) to `axis`.
// Stored row-major; apply() is a plain matrix-vector product.
struct Rotation {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};
    int n = 3;

    Vec apply(const Vec& v) const {
        if (n == 2) {
            return Vec(m[0] * v[0] + m[1] * v[1],
                       m[3] * v[0] + m[4] * v[1]);
        }
        return Vec(m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
                   m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
                   m[6] * v[0] + m[7] * v[1] + m[8] * v[2]);
    }
};

inline Rotation rotation_to_axis(const Vec& axis) {
    Vec a = axis.unit();
    Rotation R;
    R.n = a.n;
    if (a.n == 2) {
        // column image of e_x is a, of e_y its positive quarter-turn
        R.m = {a[0], -a[1], 0, a[1], a[0], 0, 0, 0, 1};
        return R;
    }
    double cz = a[2];
    if (cz > 1.0 - 1e-12) return R;                       // already the pole
    if (cz < -1.0 + 1e-12) {                              // antipode: half-turn about e_x
        R.m = {1, 0, 0, 0, -1, 0, 0, 0, -1};
        return R;
    }
    // Rodrigues with rotation axis v = e_z x a (never tiny here)
    double vx = -a[1], vy = a[0];
    double s2 = vx * vx + vy * vy;
    double k = (1.0 - cz) / s2;
    R.m = {cz + k * vx * vx, k * vx * vy,      vy,
           k * vx * vy,      cz + k * vy * vy, -vx,
           -vy,              vx,               cz};
    return R;
}

inline double unit_sphere_area(int dim) {
    // |S^{dim-1}|, the measure of the unit sphere in R^dim
    switch (dim) {
        case 1: return 2.0;               // two points
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        default: throw std::invalid_argument("unit_sphere_area: dimension must be 1, 2 or 3");
    }
}

} // namespace backdisp
