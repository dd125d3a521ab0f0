#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "vec.hpp"

namespace backdisp {

using cdouble = std::complex<double>;

// A potential represented entirely on the Fourier side by its radial
// profile. profile(rho) is the transform value at |xi| = rho under the
// convention FT(q)(xi) = integral of exp(-i x.xi) q(x) dx (the inverse
// carries (2pi)^{-n}). nominal_regularity is the supremum of the Sobolev
// scale the potential belongs to; membership at the supremum itself fails.
struct RadialFourierProfile {
    int dim = 3;
    std::function<cdouble(double)> profile;
    std::function<cdouble(double)> profile_derivative;
    std::optional<double> fourier_support_radius; // present iff the transform vanishes beyond it
    double nominal_regularity = 0.0;
    std::string label;
};

namespace detail {

inline double ipow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

} // namespace detail

// (1 + rho^2)^{-s/2}. Square integrable in dimension n only for s > n/2;
// sits in the Sobolev scale up to (but not at) s - n/2.
inline RadialFourierProfile power_profile(double s, int n) {
    if (!(s > 0.5 * n))
        throw std::invalid_argument("power_profile: s <= n/2 is not square integrable");
    RadialFourierProfile p;
    p.dim = n;
    p.profile = [s](double rho) { return cdouble(std::exp(-0.5 * s * std::log1p(rho * rho)), 0.0); };
    p.profile_derivative = [s](double rho) {
        return cdouble(-s * rho * std::exp(-(0.5 * s + 1.0) * std::log1p(rho * rho)), 0.0);
    };
    p.nominal_regularity = s - 0.5 * n;
    p.label = "power(s=" + std::to_string(s) + ")";
    return p;
}

inline RadialFourierProfile gaussian_profile(double a, int n) {
    if (!(a > 0.0)) throw std::invalid_argument("gaussian_profile: a must be positive");
    RadialFourierProfile p;
    p.dim = n;
    p.profile = [a](double rho) { return cdouble(std::exp(-a * rho * rho), 0.0); };
    p.profile_derivative = [a](double rho) { return cdouble(-2.0 * a * rho * std::exp(-a * rho * rho), 0.0); };
    p.nominal_regularity = std::numeric_limits<double>::infinity();
    p.label = "gaussian(a=" + std::to_string(a) + ")";
    return p;
}

// Closed-form transform of the indicator of the R-ball. The value at 0 is
// the ball volume; the tail oscillates under a rho^{-(n+1)/2} envelope,
// placing the potential exactly at Sobolev regularity 1/2.
inline RadialFourierProfile ball_indicator_profile(double R, int n) {
    if (!(R > 0.0)) throw std::invalid_argument("ball_indicator_profile: R must be positive");
    if (n != 2 && n != 3) throw std::invalid_argument("ball_indicator_profile: dimension must be 2 or 3");
    RadialFourierProfile p;
    p.dim = n;
    if (n == 3) {
        // 4 pi (sin(R rho) - R rho cos(R rho)) / rho^3; the series form keeps
        // full precision through the cancellation at small argument
        p.profile = [R](double rho) {
            double y = R * rho;
            if (y < 0.5) {
                double y2 = y * y;
                double g = 1.0 / 3.0 + y2 * (-1.0 / 30.0 + y2 * (1.0 / 840.0 + y2 * (-1.0 / 45360.0 + y2 / 3991680.0)));
                return cdouble(4.0 * M_PI * R * R * R * g, 0.0);
            }
            return cdouble(4.0 * M_PI * (std::sin(y) - y * std::cos(y)) / (rho * rho * rho), 0.0);
        };
        p.profile_derivative = [R](double rho) {
            double y = R * rho;
            if (y < 0.5) {
                double y2 = y * y;
                double gp = y * (-1.0 / 15.0 + y2 * (1.0 / 210.0 + y2 * (-1.0 / 7560.0 + y2 / 498960.0)));
                return cdouble(4.0 * M_PI * R * R * R * R * gp, 0.0);
            }
            double num = R * R * std::sin(y) / (rho * rho) - 3.0 * (std::sin(y) - y * std::cos(y)) / (rho * rho * rho * rho);
            return cdouble(4.0 * M_PI * num, 0.0);
        };
    } else {
        // 2 pi R J1(R rho) / rho, derivative -2 pi R^2 J2(R rho) / rho
        p.profile = [R](double rho) {
            double y = R * rho;
            if (y < 1e-4) {
                double y2 = y * y;
                return cdouble(2.0 * M_PI * R * R * (0.5 + y2 * (-1.0 / 16.0 + y2 / 384.0)), 0.0);
            }
            return cdouble(2.0 * M_PI * R * std::cyl_bessel_j(1, y) / rho, 0.0);
        };
        p.profile_derivative = [R](double rho) {
            double y = R * rho;
            if (y < 1e-4) {
                double y2 = y * y;
                return cdouble(-2.0 * M_PI * R * R * R * y * (1.0 / 8.0 - y2 / 96.0), 0.0);
            }
            return cdouble(-2.0 * M_PI * R * R * std::cyl_bessel_j(2, y) / rho, 0.0);
        };
    }
    p.nominal_regularity = 0.5;
    p.label = "ball(R=" + std::to_string(R) + ")";
    return p;
}

// (1 - (rho/rho0)^2)^m on [0, rho0], identically zero beyond. The support
// radius drives exact vanishing logic downstream: every consumer sees
// bit-exact zeros outside, not small numbers.
inline RadialFourierProfile bandlimited_profile(double rho0, int m, int n) {
    if (!(rho0 > 0.0)) throw std::invalid_argument("bandlimited_profile: rho0 must be positive");
    if (m < 1) throw std::invalid_argument("bandlimited_profile: smoothness m must be >= 1");
    RadialFourierProfile p;
    p.dim = n;
    p.profile = [rho0, m](double rho) {
        if (rho > rho0) return cdouble(0.0, 0.0);
        double t = rho / rho0;
        return cdouble(detail::ipow(1.0 - t * t, m), 0.0);
    };
    p.profile_derivative = [rho0, m](double rho) {
        if (rho > rho0) return cdouble(0.0, 0.0);
        double t = rho / rho0;
        return cdouble(-2.0 * m * rho / (rho0 * rho0) * detail::ipow(1.0 - t * t, m - 1), 0.0);
    };
    p.fourier_support_radius = rho0;
    p.nominal_regularity = std::numeric_limits<double>::infinity();
    p.label = "bandlimited(rho0=" + std::to_string(rho0) + ",m=" + std::to_string(m) + ")";
    return p;
}

inline cdouble eval_fourier(const RadialFourierProfile& p, const Vec& xi) {
    if (xi.n != p.dim) throw std::invalid_argument("eval_fourier: dimension mismatch");
    return p.profile(xi.norm());
}

// Fourier transform of the coordinate-multiplied potential x_i q, namely
// i d/dxi_i of the transform: i (xi_i/|xi|) profile'(|xi|). Odd in xi.
inline cdouble coordinate_weighted_fourier(const RadialFourierProfile& p, int i, const Vec& xi) {
    if (xi.n != p.dim) throw std::invalid_argument("coordinate_weighted_fourier: dimension mismatch");
    if (i < 0 || i >= p.dim) throw std::invalid_argument("coordinate_weighted_fourier: axis index out of range");
    double rho = xi.norm();
    if (rho == 0.0) {
        cdouble d0 = p.profile_derivative(0.0);
        if (std::abs(d0) == 0.0) return cdouble(0.0, 0.0);
        throw std::domain_error("coordinate_weighted_fourier: singular derivative at xi = 0");
    }
    return cdouble(0.0, 1.0) * (xi[i] / rho) * p.profile_derivative(rho);
}

// Pointwise rescaling q -> c q; dispersion operators respond quadratically.
inline RadialFourierProfile scaled_profile(const RadialFourierProfile& p, cdouble c) {
    RadialFourierProfile out = p;
    auto f = p.profile;
    auto fd = p.profile_derivative;
    out.profile = [f, c](double rho) { return c * f(rho); };
    out.profile_derivative = [fd, c](double rho) { return c * fd(rho); };
    out.label = p.label + "[scaled]";
    return out;
}

} // namespace backdisp
