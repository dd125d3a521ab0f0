#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gauss.hpp"
#include "vec.hpp"

namespace backdisp {

// Quadrature rule on the unit sphere S^{dim-1}. Weights sum to the sphere
// measure (2*pi for dim 2, 4*pi for dim 3); nodes are unit vectors.
struct SphericalQuadrature {
    int dim = 3;
    int order = 0;
    std::vector<Vec> nodes;
    std::vector<double> weights;

    size_t size() const { return nodes.size(); }
};

// Product rule: Gauss-Legendre in the polar cosine times equispaced azimuth.
// Exact for spherical polynomials of total degree <= order. In dimension 2
// it degenerates to the equispaced rule on the circle, which is exact for
// trigonometric polynomials far beyond `order`.
inline SphericalQuadrature sphere_quadrature(int dim, int order) {
    if (order < 1) throw std::invalid_argument("sphere_quadrature: order must be positive");
    SphericalQuadrature q;
    q.dim = dim;
    q.order = order;
    if (dim == 2) {
        int N = 2 * (order + 1);
        double w = 2.0 * M_PI / N;
        q.nodes.reserve(N);
        q.weights.assign(N, w);
        for (int k = 0; k < N; ++k) {
            double phi = 2.0 * M_PI * (k + 0.5) / N;
            q.nodes.emplace_back(std::cos(phi), std::sin(phi));
        }
        return q;
    }
    if (dim != 3) throw std::invalid_argument("sphere_quadrature: dimension must be 2 or 3");
    int m = order / 2 + 1;
    int naz = 2 * m + 2;
    const GaussRule& g = gauss_legendre(m);
    double wphi = 2.0 * M_PI / naz;
    q.nodes.reserve(static_cast<size_t>(m) * naz);
    q.weights.reserve(static_cast<size_t>(m) * naz);
    for (int i = 0; i < m; ++i) {
        double u = g.x[i];
        double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        for (int k = 0; k < naz; ++k) {
            double phi = 2.0 * M_PI * (k + 0.5) / naz;
            q.nodes.emplace_back(s * std::cos(phi), s * std::sin(phi), u);
            q.weights.push_back(g.w[i] * wphi);
        }
    }
    return q;
}

namespace detail {

// Panel edges in u = polar cosine, symmetric about 0, shrinking
// geometrically toward both endpoints; innermost cap has width 2^{1-levels}.
inline std::vector<double> graded_u_edges(int levels) {
    std::vector<double> edges;
    edges.push_back(-1.0);
    for (int j = levels; j >= 2; --j) edges.push_back(-(1.0 - std::ldexp(2.0, -j)));
    edges.push_back(0.0);
    for (int j = 2; j <= levels; ++j) edges.push_back(1.0 - std::ldexp(2.0, -j));
    edges.push_back(1.0);
    return edges;
}

} // namespace detail

// 1-D pole-graded rule in the polar cosine on [-1, 1]: per-panel Gauss with
// m nodes on the graded panel set. Weights sum to 2. This is the azimuth-
// collapsed core of polar_graded_quadrature, usable on its own when the
// integrand is axisymmetric about the polar axis.
inline void polar_u_rule(int m, int levels, std::vector<double>& u, std::vector<double>& w) {
    if (m < 1) throw std::invalid_argument("polar_u_rule: node count must be positive");
    if (levels < 1) throw std::invalid_argument("polar_u_rule: levels must be positive");
    std::vector<double> edges = detail::graded_u_edges(levels);
    u.clear();
    w.clear();
    std::vector<double> xn, wn;
    for (size_t p = 0; p + 1 < edges.size(); ++p) {
        gauss_on_interval(m, edges[p], edges[p + 1], xn, wn);
        u.insert(u.end(), xn.begin(), xn.end());
        w.insert(w.end(), wn.begin(), wn.end());
    }
}

// Pole-graded rule. Panels in the polar variable shrink geometrically
// toward both poles (edges 1 - 2^{1-j}), each panel carrying its own Gauss
// rule. Needed when the integrand concentrates in a polar cap of width that
// the plain product rule cannot resolve; `levels` controls how deep the
// grading goes (the innermost cap has u-width 2^{1-levels}).
inline SphericalQuadrature polar_graded_quadrature(int dim, int order, int levels) {
    if (order < 1) throw std::invalid_argument("polar_graded_quadrature: order must be positive");
    if (levels < 1) throw std::invalid_argument("polar_graded_quadrature: levels must be positive");
    SphericalQuadrature q;
    q.dim = dim;
    q.order = order;
    int m = order / 2 + 1;
    std::vector<double> edges = detail::graded_u_edges(levels);

    if (dim == 2) {
        // integrate in the angle, two symmetric half-circles; panel edges are
        // the images acos(u) so the grading matches the 3-d rule
        std::vector<double> xn, wn;
        for (size_t p = 0; p + 1 < edges.size(); ++p) {
            double a = std::acos(edges[p + 1]);   // acos reverses order
            double b = std::acos(edges[p]);
            gauss_on_interval(m, a, b, xn, wn);
            for (size_t i = 0; i < xn.size(); ++i) {
                q.nodes.emplace_back(std::cos(xn[i]), std::sin(xn[i]));
                q.weights.push_back(wn[i]);
                q.nodes.emplace_back(std::cos(xn[i]), -std::sin(xn[i]));
                q.weights.push_back(wn[i]);
            }
        }
        return q;
    }
    if (dim != 3) throw std::invalid_argument("polar_graded_quadrature: dimension must be 2 or 3");
    int naz = 2 * m + 2;
    double wphi = 2.0 * M_PI / naz;
    std::vector<double> xn, wn;
    for (size_t p = 0; p + 1 < edges.size(); ++p) {
        gauss_on_interval(m, edges[p], edges[p + 1], xn, wn);
        for (size_t i = 0; i < xn.size(); ++i) {
            double u = xn[i];
            double s = std::sqrt(std::max(0.0, 1.0 - u * u));
            for (int k = 0; k < naz; ++k) {
                double phi = 2.0 * M_PI * (k + 0.5) / naz;
                q.nodes.emplace_back(s * std::cos(phi), s * std::sin(phi), u);
                q.weights.push_back(wn[i] * wphi);
            }
        }
    }
    return q;
}

// Same rule with its polar axis rotated onto `axis`. Accuracy of a
// pole-graded rule then becomes independent of the direction of the feature
// it resolves.
inline SphericalQuadrature oriented(const SphericalQuadrature& q, const Vec& axis) {
    Rotation R = rotation_to_axis(axis);
    SphericalQuadrature out;
    out.dim = q.dim;
    out.order = q.order;
    out.weights = q.weights;
    out.nodes.reserve(q.nodes.size());
    for (const Vec& v : q.nodes) out.nodes.push_back(R.apply(v));
    return out;
}

} // namespace backdisp
