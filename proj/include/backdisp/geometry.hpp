#pragma once

#include <complex>
#include <stdexcept>

#include "quadrature.hpp"
#include "vec.hpp"

namespace backdisp {

using cdouble = std::complex<double>;

struct SphereDescriptor {
    Vec center;
    double radius = 1.0;
    int dim = 3;
};

// A sphere or a hyperplane {y : normal.y = offset}. The hyperplane case
// only arises as the r=1 degeneration of the dual surface family.
struct SurfaceDescriptor {
    enum class Kind { sphere, hyperplane };
    Kind kind = Kind::sphere;
    SphereDescriptor sphere;
    Vec normal;          // unit, hyperplane only
    double offset = 0.0; // hyperplane only
};

// Sphere of points xi with |xi - eta/2| = r|eta|/2. Passes through 0 and
// eta exactly when r = 1.
inline SphereDescriptor ewald_sphere(const Vec& eta, double r) {
    double e = eta.norm();
    if (e <= 0.0) throw std::invalid_argument("ewald_sphere: eta must be nonzero");
    if (r <= 0.0) throw std::invalid_argument("ewald_sphere: r must be positive");
    return SphereDescriptor{eta * 0.5, r * e * 0.5, eta.n};
}

// Dual surface: the set of eta whose r-sphere passes through xi. Sphere of
// center 2 xi/(1-r^2), radius 2r|xi|/|1-r^2| for r != 1; the hyperplane
// {eta : xi.eta = |xi|^2} at r = 1.
inline SurfaceDescriptor nr_surface(const Vec& xi, double r) {
    double x = xi.norm();
    if (x <= 0.0) throw std::invalid_argument("nr_surface: xi must be nonzero");
    if (r <= 0.0) throw std::invalid_argument("nr_surface: r must be positive");
    SurfaceDescriptor s;
    if (r == 1.0) {
        s.kind = SurfaceDescriptor::Kind::hyperplane;
        s.normal = xi.unit();
        s.offset = x;
        return s;
    }
    s.kind = SurfaceDescriptor::Kind::sphere;
    double d = 1.0 - r * r;
    s.sphere = SphereDescriptor{xi * (2.0 / d), 2.0 * r * x / std::abs(d), xi.n};
    return s;
}

// Surface integral over a concrete sphere: sum of w_i rho^{n-1} f(c + rho u_i).
// Exactness is inherited from the unit-sphere rule; the rho^{n-1} factor is
// the scaling of surface measure.
template <class F>
cdouble integrate_sphere(F&& f, const SphereDescriptor& s, const SphericalQuadrature& q) {
    if (q.dim != s.dim) throw std::invalid_argument("integrate_sphere: dimension mismatch");
    double scale = std::pow(s.radius, s.dim - 1);
    cdouble acc(0.0, 0.0);
    for (size_t i = 0; i < q.size(); ++i) {
        Vec y = s.center + s.radius * q.nodes[i];
        acc += q.weights[i] * cdouble(f(y));
    }
    return scale * acc;
}

// Integral of f over the disc {v : v.xi = 0, |v| <= |xi|} centred at the
// origin in the hyperplane orthogonal to xi. Polar coordinates in an
// orthonormal frame of xi^perp: radial Gauss rule times a circle rule
// (q, which must have dim n-1). In dimension 2 the disc is a segment and
// the circle rule degenerates to the exact two-point set.
template <class F>
cdouble integrate_hyperplane_disc(F&& f, const Vec& xi, const SphericalQuadrature& q) {
    double R = xi.norm();
    if (R <= 0.0) throw std::invalid_argument("integrate_hyperplane_disc: xi must be nonzero");
    auto frame = orthonormal_complement(xi);
    std::vector<double> tn, tw;
    cdouble acc(0.0, 0.0);
    if (xi.n == 2) {
        gauss_on_interval(q.order > 0 ? q.order + 1 : 16, 0.0, R, tn, tw);
        for (size_t i = 0; i < tn.size(); ++i) {
            Vec v = frame[0] * tn[i];
            acc += tw[i] * (cdouble(f(v)) + cdouble(f(v * -1.0)));
        }
        return acc;
    }
    if (xi.n != 3 || q.dim != 2)
        throw std::invalid_argument("integrate_hyperplane_disc: need a circle rule (dim 2) for a 3-d ambient space");
    gauss_on_interval(q.order > 0 ? q.order + 1 : 16, 0.0, R, tn, tw);
    for (size_t i = 0; i < tn.size(); ++i) {
        cdouble ring(0.0, 0.0);
        for (size_t j = 0; j < q.size(); ++j) {
            Vec v = (frame[0] * q.nodes[j][0] + frame[1] * q.nodes[j][1]) * tn[i];
            ring += q.weights[j] * cdouble(f(v));
        }
        acc += tw[i] * tn[i] * ring;   // Jacobian t^{n-2}, n = 3
    }
    return acc;
}

} // namespace backdisp
