#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "vec.hpp"

namespace backdisp {

// ---------------------------------------------------------------------------
// Order-of-integration identity on the two-parameter sphere family
//
//   LHS: integrate f(eta, xi) over xi on the sphere {|xi - a*eta| = b|eta|},
//        then over eta in a box.
//   RHS: integrate f(eta, xi) * |eta|/|xi| over eta on the dual sphere
//        {center (a/(a^2-b^2)) xi, radius (b/|a^2-b^2|)|xi|}, then over xi.
//
// Both sides converge to the same value for a != b; the residual is the
// relative disagreement of the two nested quadratures.
// ---------------------------------------------------------------------------

struct FubiniOptions {
    double support_radius = 0.0; // f vanishes when either argument leaves this ball (caller-declared)
    int outer_points = 32;       // tensor Gauss points per axis on the bounding box
    int inner_order = 16;        // per-panel order of the graded sphere rule (m = order/2+1 nodes)
    int inner_levels = 14;       // pole-grading depth of the sphere rule
    int threads = 1;
    // When f is radial in the sphere variable at fixed outer point (true for
    // radially symmetric test functions), the azimuth sum of the oriented
    // rule is constant and can be collapsed into a single evaluation per
    // polar node. Enabling this for non-axisymmetric f silently integrates
    // the wrong thing; it is the caller's promise, not a detected property.
    bool axisymmetric_inner = false;
};

namespace detail {

// One side of the identity: outer tensor-Gauss box integral of an inner
// sphere integral with center cf*p and radius rf*|p|. The sphere rule is
// oriented so its polar axis follows the center direction; the integrand
// concentration near the origin-side pole is what the grading resolves.
template <class Inner>
cdouble fubini_side(double cf, double rf, double box_halfwidth, double support_radius,
                    const FubiniOptions& opt, Inner&& inner_f) {
    std::vector<double> gx, gw;
    gauss_on_interval(opt.outer_points, -box_halfwidth, box_halfwidth, gx, gw);
    const int N = opt.outer_points;
    const int m = opt.inner_order / 2 + 1;

    std::vector<double> un, uw;
    polar_u_rule(m, opt.inner_levels, un, uw);
    SphericalQuadrature canonical;
    if (!opt.axisymmetric_inner)
        canonical = polar_graded_quadrature(3, opt.inner_order, opt.inner_levels);

    const double reach = std::max(std::abs(cf) - rf, 0.0);
    std::vector<cdouble> slabs(static_cast<size_t>(N), cdouble(0.0, 0.0));

    parallel_for(static_cast<size_t>(N), opt.threads, [&](size_t ix) {
        cdouble slab(0.0, 0.0);
        for (int iy = 0; iy < N; ++iy) {
            for (int iz = 0; iz < N; ++iz) {
                Vec p(gx[ix], gx[iy], gx[iz]);
                double pn = p.norm();
                if (pn > support_radius || pn == 0.0) continue;
                if (reach * pn > support_radius) continue; // sphere misses the support ball
                Vec cen = p * cf;
                double rho = rf * pn;
                Vec axis = (cf >= 0.0 ? p : p * -1.0) * (1.0 / pn);
                double wouter = gw[ix] * gw[iy] * gw[iz];
                cdouble sphere_sum(0.0, 0.0);
                if (opt.axisymmetric_inner) {
                    Vec e1 = orthonormal_complement(axis)[0];
                    for (size_t k = 0; k < un.size(); ++k) {
                        double s = std::sqrt(std::max(0.0, 1.0 - un[k] * un[k]));
                        Vec y = cen + rho * (axis * un[k] + e1 * s);
                        sphere_sum += (uw[k] * 2.0 * M_PI) * inner_f(p, y);
                    }
                } else {
                    Rotation R = rotation_to_axis(axis);
                    for (size_t k = 0; k < canonical.size(); ++k) {
                        Vec y = cen + rho * R.apply(canonical.nodes[k]);
                        sphere_sum += canonical.weights[k] * inner_f(p, y);
                    }
                }
                slab += wouter * (rho * rho) * sphere_sum;
            }
        }
        slabs[ix] = slab;
    });

    cdouble total(0.0, 0.0);
    for (const cdouble& s : slabs) total += s;
    return total;
}

} // namespace detail

template <class F>
double fubini_residual(F&& f, double a, double b, const FubiniOptions& opt) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("fubini_residual: parameters must be positive");
    if (a == b) throw std::invalid_argument("fubini_residual: a = b gives hyperplane fibers, excluded");
    if (opt.support_radius <= 0.0) throw std::invalid_argument("fubini_residual: caller must supply the support radius");
    if (opt.outer_points < 2) throw std::invalid_argument("fubini_residual: outer rule too small");

    const double L = opt.support_radius;
    cdouble lhs = detail::fubini_side(a, b, L, L, opt,
        [&](const Vec& eta, const Vec& xi) { return cdouble(f(eta, xi)); });

    // Dual-side sphere parameters, and a box shrunk to where those spheres
    // can still meet the support ball (the fibers run away from the origin
    // when |kappa| > mu, so the useful xi range contracts by that factor).
    const double kappa = a / (a * a - b * b);
    const double mu = b / std::abs(a * a - b * b);
    const double shrink = std::max(std::abs(kappa) - mu, 1e-12);
    const double Lr = std::min(L, L / shrink);
    cdouble rhs = detail::fubini_side(kappa, mu, Lr, L, opt,
        [&](const Vec& xi, const Vec& eta) {
            double en = eta.norm();
            double xn = xi.norm();
            if (en == 0.0) return cdouble(0.0, 0.0);
            return cdouble(f(eta, xi)) * (en / xn);
        });

    double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale == 0.0) return 0.0;
    return std::abs(lhs - rhs) / scale;
}

// ---------------------------------------------------------------------------
// Great-subsphere averaging identity: integrating f over all unit vectors
// orthogonal to theta, then over theta, equals |S^{n-2}| times the plain
// sphere average of f. Defined for n >= 3 (the orthogonal subsphere of a
// circle is a point pair and the identity degenerates).
// ---------------------------------------------------------------------------

struct SantaloSides {
    cdouble lhs;
    cdouble rhs;
    double residual; // |lhs-rhs| relative to the L1-magnitude bound of both sides
};

template <class F>
SantaloSides santalo_sides(F&& f, const SphericalQuadrature& q) {
    if (q.dim != 3) throw std::invalid_argument("santalo_sides: defined for dimension >= 3 (supported: 3)");
    SphericalQuadrature inner = sphere_quadrature(2, std::max(q.order, 6));
    cdouble lhs(0.0, 0.0), rhs(0.0, 0.0);
    double scale = 0.0;
    const double subsphere = 2.0 * M_PI; // |S^{n-2}| for n = 3
    for (size_t i = 0; i < q.size(); ++i) {
        const Vec& theta = q.nodes[i];
        auto frame = orthonormal_complement(theta);
        cdouble ring(0.0, 0.0);
        for (size_t j = 0; j < inner.size(); ++j) {
            Vec omega = frame[0] * inner.nodes[j][0] + frame[1] * inner.nodes[j][1];
            ring += inner.weights[j] * cdouble(f(omega));
        }
        lhs += q.weights[i] * ring;
        cdouble ftheta = cdouble(f(theta));
        rhs += q.weights[i] * ftheta;
        scale += q.weights[i] * std::abs(ftheta);
    }
    rhs *= subsphere;
    scale *= subsphere;
    SantaloSides out;
    out.lhs = lhs;
    out.rhs = rhs;
    out.residual = (scale > 0.0) ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
    return out;
}

template <class F>
double santalo_residual(F&& f, const SphericalQuadrature& q) {
    return santalo_sides(std::forward<F>(f), q).residual;
}

// ---------------------------------------------------------------------------
// Radial line density of the surface measure of the sphere S_b(x): the
// pushforward of dsigma_b under z -> |z| is absolutely continuous with
// density
//   2^{3-n} |S^{n-2}| |x|^{2-n} b t ((|x|+b)^2-t^2)^{(n-3)/2} (t^2-(|x|-b)^2)^{(n-3)/2}
// supported on (||x|-b|, |x|+b). Total mass is the sphere area |S^{n-1}| b^{n-1}.
// ---------------------------------------------------------------------------

inline double leckband_density(const Vec& x, double b, double t, int n) {
    if (n != x.n) throw std::invalid_argument("leckband_density: dimension mismatch");
    double xn = x.norm();
    if (xn <= 0.0) throw std::invalid_argument("leckband_density: x must be nonzero");
    if (b <= 0.0 || t <= 0.0) throw std::invalid_argument("leckband_density: b and t must be positive");
    double lo = std::abs(xn - b), hi = xn + b;
    if (t <= lo || t >= hi) return 0.0;
    double cA = (xn + b) * (xn + b) - t * t;
    double cB = t * t - (xn - b) * (xn - b);
    double ex = 0.5 * (n - 3);
    double c = unit_sphere_area(n - 1);
    return std::pow(2.0, 3 - n) * c * std::pow(xn, 2 - n) * b * t * std::pow(cA * cB, ex);
}

// Integral of a radial function h(|z|) over the sphere S_b(x), evaluated as
// a line integral against the density above. The substitution
//   t^2 = (A+B)/2 - ((A-B)/2) cos(phi),  A = (|x|+b)^2, B = (|x|-b)^2
// turns the density factors into sin^{n-2}(phi) and all |x| powers cancel
// into the prefactor |S^{n-2}| b^{n-1}, so the formula is regular at x = 0
// and at the interval endpoints (where the n=2 density blows up).
template <class H>
cdouble leckband_integrate(H&& h, const Vec& x, double b, int n, int nodes = 64) {
    if (n != x.n) throw std::invalid_argument("leckband_integrate: dimension mismatch");
    if (b <= 0.0) throw std::invalid_argument("leckband_integrate: b must be positive");
    double xn = x.norm();
    double A = (xn + b) * (xn + b);
    double B = (xn - b) * (xn - b);
    double mid = 0.5 * (A + B), half = 0.5 * (A - B);
    double pref = unit_sphere_area(n - 1) * std::pow(b, n - 1);
    std::vector<double> pn, pw;
    gauss_on_interval(nodes, 0.0, M_PI, pn, pw);
    cdouble acc(0.0, 0.0);
    for (size_t i = 0; i < pn.size(); ++i) {
        double u = mid - half * std::cos(pn[i]);
        double s = std::sin(pn[i]);
        double jac = (n == 2) ? 1.0 : s; // sin^{n-2}
        acc += pw[i] * jac * cdouble(h(std::sqrt(std::max(u, 0.0))));
    }
    return pref * acc;
}

// ---------------------------------------------------------------------------
// Kernel integrals over spheres: distance-power kernels integrated over
// S_rho(c), reduced to one polar dimension since the integrand depends only
// on |x - y|. dist^2(theta) = (d-rho)^2 + 4 d rho sin^2(theta/2), with
// d = |x - c|; the form is exact and avoids cancellation near theta = 0.
// ---------------------------------------------------------------------------

namespace detail {

// Panels [pi 2^{-j-1}, pi 2^{-j}] graded toward theta = 0 where the kernel
// may be singular; the skipped innermost cap carries O(theta_min^{n-1-a})
// relative mass, and theta_min is chosen so that is below 1e-8.
template <class G>
double sphere_kernel_reduce(double d, double rho, int n, double singular_power, G&& g,
                            int nodes_per_panel = 12) {
    double gap = n - 1 - singular_power;
    double theta_min = (gap > 0.0) ? std::pow(1e-8, 1.0 / gap) : 1e-12;
    theta_min = std::min(std::max(theta_min, 1e-290), 0.5);
    int J = static_cast<int>(std::ceil(std::log2(M_PI / theta_min)));
    J = std::min(std::max(J, 24), 900);

    const GaussRule& gl = gauss_legendre(nodes_per_panel);
    double total = 0.0;
    for (int j = 0; j < J; ++j) {
        double hi = M_PI * std::ldexp(1.0, -j);
        double lo = 0.5 * hi;
        double mid = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
        double panel = 0.0;
        for (size_t i = 0; i < gl.x.size(); ++i) {
            double th = mid + hw * gl.x[i];
            double sh = std::sin(0.5 * th);
            double dist = std::sqrt((d - rho) * (d - rho) + 4.0 * d * rho * sh * sh);
            double jac = (n == 2) ? 1.0 : std::sin(th);
            panel += hw * gl.w[i] * jac * g(dist);
        }
        total += panel;
    }
    return unit_sphere_area(n - 1) * std::pow(rho, n - 1) * total;
}

} // namespace detail

// Integral of |x-y|^{-a} (1+|x-y|^2)^{-b/2} over the sphere s. Finite for
// a < n-1 even when x lies on the sphere; the uniform-in-rho boundedness
// (for a+b > n-1) is what the sampling checks exercise.
inline double kernel_integral_ab(const Vec& x, const SphereDescriptor& s, double a, double b,
                                 int nodes_per_panel = 12) {
    if (x.n != s.dim) throw std::invalid_argument("kernel_integral_ab: dimension mismatch");
    if (a < 0.0 || b < 0.0) throw std::invalid_argument("kernel_integral_ab: exponents must be nonnegative");
    int n = s.dim;
    double d = (x - s.center).norm();
    double rho = s.radius;
    bool on_sphere = std::abs(d - rho) <= 1e-12 * std::max(rho, d);
    if (on_sphere && a >= n - 1)
        throw std::domain_error("kernel_integral_ab: divergent, x on the sphere with a >= n-1");
    return detail::sphere_kernel_reduce(d, rho, n, on_sphere ? a : 0.0,
        [a, b](double t) { return std::pow(t, -a) * std::pow(1.0 + t * t, -0.5 * b); },
        nodes_per_panel);
}

// Integral of |x-y|^{-(n-1-2 lambda)} over the sphere s, 0 < lambda <= (n-1)/2.
// Scales like rho^{2 lambda} uniformly in the position of x.
inline double kernel_integral_lambda(const Vec& x, const SphereDescriptor& s, double lambda, int n,
                                     int nodes_per_panel = 12) {
    if (n != s.dim || x.n != s.dim) throw std::invalid_argument("kernel_integral_lambda: dimension mismatch");
    if (!(lambda > 0.0) || lambda > 0.5 * (n - 1))
        throw std::invalid_argument("kernel_integral_lambda: lambda must lie in (0, (n-1)/2]");
    double a = n - 1 - 2.0 * lambda;
    double d = (x - s.center).norm();
    bool near = std::abs(d - s.radius) <= 1e-12 * std::max(s.radius, d);
    return detail::sphere_kernel_reduce(d, s.radius, n, near ? a : 0.0,
        [a](double t) { return std::pow(t, -a); },
        nodes_per_panel);
}

} // namespace backdisp
