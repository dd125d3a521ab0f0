#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "profiles.hpp"
#include "quadrature.hpp"
#include "vec.hpp"

namespace backdisp {

// Tunables of the principal-value evaluation and of the resolvent oracle.
// delta is the half-width of the difference-quotient window around r = 1;
// tau only enters the optional window-split diagnostic (the estimate-
// replication window delta/<eta>^tau); r_max truncates the outer integral
// for potentials without compact Fourier support.
struct PVConfig {
    double delta = 0.5;
    double tau = 2.0;
    double r_max = 8.0;
    int n_r_inner = 24;
    int n_r_outer = 16;
    int sphere_order = 16;
    std::vector<double> eps_ladder = {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125};
    int graded_levels = 0; // 0: choose from |eta|
};

inline void validate_pv(const PVConfig& cfg) {
    if (!(cfg.delta > 0.0) || !(cfg.delta < 1.0)) throw config_error("pv: delta must lie in (0,1)");
    if (!(cfg.tau > 1.0)) throw config_error("pv: tau must exceed 1");
    if (!(cfg.r_max > 1.0 + cfg.delta)) throw config_error("pv: r_max must exceed 1 + delta");
    if (cfg.n_r_inner < 2 || cfg.n_r_outer < 2) throw config_error("pv: quadrature counts must be at least 2");
    if (cfg.sphere_order < 4) throw config_error("pv: sphere order must be at least 4");
    for (size_t i = 0; i + 1 < cfg.eps_ladder.size(); ++i)
        if (!(cfg.eps_ladder[i] > cfg.eps_ladder[i + 1]))
            throw config_error("pv: eps ladder must be strictly decreasing");
    if (!cfg.eps_ladder.empty() && !(cfg.eps_ladder.back() > 0.0))
        throw config_error("pv: eps ladder must be positive");
}

struct DispersionSample {
    Vec eta;
    std::optional<double> r;
    cdouble s1_value{0.0, 0.0};
    cdouble pv_value{0.0, 0.0};
    cdouble q2_paper{0.0, 0.0};      // s1_value + pv_value
    cdouble q2_plemelj{0.0, 0.0};    // -i pi s1_value + pv_value
    std::optional<cdouble> oracle_value;
    std::map<std::string, double> residuals;
};

// Smooth radial cutoff: 0 on |xi| <= C0, 1 on |xi| >= 2 C0, a C-infinity
// monotone ramp in between (the classical exp(-1/t) partition function).
inline double cutoff_chi(const Vec& xi, double C0) {
    if (!(C0 > 0.0)) throw std::invalid_argument("cutoff_chi: C0 must be positive");
    double t = (xi.norm() - C0) / C0;
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

// Sphere rule used for all Ewald-sphere integrals at a given |eta|. The
// integrand concentrates near the poles in a cap of u-width ~ 1/|eta|^2
// (both factors of the product peak where one argument radius is small),
// so the grading depth follows 2 log2|eta| with margin.
inline SphericalQuadrature make_dispersion_rule(int dim, const PVConfig& cfg, double eta_norm) {
    int levels = cfg.graded_levels;
    if (levels <= 0) {
        levels = std::max(12, static_cast<int>(std::ceil(2.0 * std::log2(1.0 + eta_norm))) + 4);
        levels = std::min(levels, 40);
    }
    return polar_graded_quadrature(dim, cfg.sphere_order, levels);
}

namespace detail {

// Integral of w1(xi) w2(eta-xi) over the sphere {|xi - eta/2| = r|eta|/2},
// with the rule's polar axis rotated onto eta. Plain surface integral, no
// normalization.
template <class W>
cdouble ewald_product_integral(W&& node_value, const Vec& eta, double r, const SphericalQuadrature& geo) {
    double E = eta.norm();
    if (E <= 0.0) throw std::invalid_argument("ewald integral: eta must be nonzero");
    if (!(r > 0.0)) throw std::invalid_argument("ewald integral: r must be positive");
    if (geo.dim != eta.n) throw std::invalid_argument("ewald integral: rule dimension mismatch");
    Vec cen = eta * 0.5;
    double rho = 0.5 * r * E;
    Rotation R = rotation_to_axis(eta * (1.0 / E));
    cdouble acc(0.0, 0.0);
    for (size_t k = 0; k < geo.size(); ++k) {
        Vec xi = cen + rho * R.apply(geo.nodes[k]);
        acc += geo.weights[k] * node_value(xi, eta - xi);
    }
    return std::pow(rho, eta.n - 1) * acc;
}

} // namespace detail

// Positive control kernel: (1/|eta|) integral over the Ewald sphere of
// |f1(xi)| |f2(eta - xi)|.
template <class F1, class F2>
double k_r(F1&& f1, F2&& f2, const Vec& eta, double r, const SphericalQuadrature& geo) {
    cdouble v = detail::ewald_product_integral(
        [&](const Vec& xi, const Vec& cxi) { return cdouble(std::abs(cdouble(f1(xi))) * std::abs(cdouble(f2(cxi))), 0.0); },
        eta, r, geo);
    return v.real() / eta.norm();
}

// The spherical double dispersion operator at shell parameter r:
// (2/(|eta|(1+r))) integral of qhat(xi) qhat(eta-xi) over the Ewald sphere.
// For band-limited profiles the integrand vanishes node-wise outside the
// support window, so the returned zeros are exact.
inline cdouble s_r(const RadialFourierProfile& q, const Vec& eta, double r, const SphericalQuadrature& geo) {
    cdouble v = detail::ewald_product_integral(
        [&](const Vec& xi, const Vec& cxi) { return eval_fourier(q, xi) * eval_fourier(q, cxi); },
        eta, r, geo);
    return v * (2.0 / (eta.norm() * (1.0 + r)));
}

// Shell parameters outside which s_r vanishes identically: points of the
// r-sphere have |xi| >= |1-r||eta|/2 and |eta-xi| >= |1-r||eta|/2, so |1-r|
// beyond 2 rho0/|eta| kills one factor at every point.
inline std::pair<double, double> s_r_support_bounds(const RadialFourierProfile& q, const Vec& eta) {
    if (!q.fourier_support_radius)
        throw std::invalid_argument("s_r_support_bounds: profile is not band-limited");
    double E = eta.norm();
    if (E <= 0.0) throw std::invalid_argument("s_r_support_bounds: eta must be nonzero");
    double w = 2.0 * (*q.fourier_support_radius) / E;
    return {std::max(0.0, 1.0 - w), 1.0 + w};
}

// d/dr of s_r by central differences at steps h and h/2 with Richardson
// combination. The pair must agree to within a coarse factor; a gross
// mismatch that is also significant against the magnitude of s_r itself
// means h is unusable (stepping across a support edge, for instance).
inline cdouble ds_r_dr(const RadialFourierProfile& q, const Vec& eta, double r, double h,
                       const SphericalQuadrature& geo) {
    if (!(h > 0.0) || !(r - h > 0.0)) throw std::invalid_argument("ds_r_dr: need 0 < h < r");
    cdouble sp = s_r(q, eta, r + h, geo);
    cdouble sm = s_r(q, eta, r - h, geo);
    cdouble sp2 = s_r(q, eta, r + 0.5 * h, geo);
    cdouble sm2 = s_r(q, eta, r - 0.5 * h, geo);
    cdouble d1 = (sp - sm) / (2.0 * h);
    cdouble d2 = (sp2 - sm2) / h;
    double mismatch = std::abs(d2 - d1);
    double scale = std::max(std::max(std::abs(sp), std::abs(sm)), std::max(std::abs(sp2), std::abs(sm2)));
    if (mismatch > 0.25 * (std::abs(d1) + std::abs(d2)) && mismatch * h > 1e-5 * scale)
        throw step_size_error("ds_r_dr: central differences at h and h/2 disagree");
    return (4.0 * d2 - d1) / 3.0;
}

// Majorant for |d/dr s_r|: K_r(qhat, qhat) plus |eta| times the sum of
// K_r(coordinate-weighted qhat, qhat) over axes. Constants of the bound are
// not represented; callers report the measured ratio.
inline double kpoint_rhs(const RadialFourierProfile& q, const Vec& eta, double r,
                         const SphericalQuadrature& geo) {
    auto qhat = [&](const Vec& xi) { return eval_fourier(q, xi); };
    double total = k_r(qhat, qhat, eta, r, geo);
    double E = eta.norm();
    for (int i = 0; i < q.dim; ++i) {
        auto xiq = [&](const Vec& xi) { return coordinate_weighted_fourier(q, i, xi); };
        total += E * k_r(xiq, qhat, eta, r, geo);
    }
    return total;
}

struct PVResult {
    cdouble value{0.0, 0.0};
    double tail_estimate = 0.0;  // bound on the truncated |r| > r_cut contribution
    double tail_fraction = 0.0;  // tail relative to |value|
    bool tail_warning = false;   // fraction above 1%
};

namespace detail {

// Dyadic block edges for the outer principal-value region on one side of
// the window, clipped to [lo_clip, 1-delta] below and [1+delta, r_cut] above.
inline std::vector<std::pair<double, double>> pv_outer_blocks(double delta, double lo_clip, double r_cut) {
    std::vector<std::pair<double, double>> blocks;
    for (int k = 0;; ++k) {
        double hi = 1.0 - delta * std::ldexp(1.0, k);
        if (hi <= lo_clip) break;
        double lo = std::max(lo_clip, 1.0 - delta * std::ldexp(1.0, k + 1));
        blocks.emplace_back(lo, hi);
        if (lo <= lo_clip) break;
    }
    for (int k = 0;; ++k) {
        double lo = 1.0 + delta * std::ldexp(1.0, k);
        if (lo >= r_cut) break;
        blocks.emplace_back(lo, std::min(r_cut, 1.0 + delta * std::ldexp(1.0, k + 1)));
    }
    return blocks;
}

} // namespace detail

// Principal value of the shell integral int_0^inf s_r/(1-r) dr. Inside the
// window |1-r| <= delta the integrand is replaced by the bounded quotient
// (s_r - s_1)/(1-r) (the symmetric window makes the s_1/(1-r) part cancel
// exactly); outside, plain s_r/(1-r) over dyadic blocks up to r_cut. Gauss
// nodes are interior so r = 1 itself is never evaluated. For potentials
// without compact Fourier support the discarded r > r_cut mass is estimated
// from the decay of the positive control kernel and reported, flagged when
// it exceeds 1% of the result.
inline PVResult pv_eval(const RadialFourierProfile& q, const Vec& eta, const PVConfig& cfg) {
    validate_pv(cfg);
    double E = eta.norm();
    if (E <= 0.0) throw std::invalid_argument("pv_eval: eta must be nonzero");
    SphericalQuadrature rule = make_dispersion_rule(eta.n, cfg, E);

    bool band = q.fourier_support_radius.has_value();
    double lo_clip = 0.0, r_cut = cfg.r_max;
    if (band) {
        auto [rl, rh] = s_r_support_bounds(q, eta);
        lo_clip = rl;
        r_cut = std::min(cfg.r_max, rh);
    }

    cdouble s1 = s_r(q, eta, 1.0, rule);
    cdouble total(0.0, 0.0);

    std::vector<double> xn, wn;
    for (int side = 0; side < 2; ++side) {
        double a = side == 0 ? 1.0 - cfg.delta : 1.0;
        double b = side == 0 ? 1.0 : 1.0 + cfg.delta;
        gauss_on_interval(cfg.n_r_inner, a, b, xn, wn);
        for (size_t i = 0; i < xn.size(); ++i)
            total += wn[i] * (s_r(q, eta, xn[i], rule) - s1) / (1.0 - xn[i]);
    }

    for (const auto& [lo, hi] : detail::pv_outer_blocks(cfg.delta, lo_clip, r_cut)) {
        gauss_on_interval(cfg.n_r_outer, lo, hi, xn, wn);
        for (size_t i = 0; i < xn.size(); ++i)
            total += wn[i] * s_r(q, eta, xn[i], rule) / (1.0 - xn[i]);
    }

    PVResult out;
    out.value = total;
    if (!band) {
        auto qhat = [&](const Vec& xi) { return eval_fourier(q, xi); };
        double g0 = 2.0 * k_r(qhat, qhat, eta, r_cut, rule) / ((1.0 + r_cut) * (r_cut - 1.0));
        double g1 = 2.0 * k_r(qhat, qhat, eta, 2.0 * r_cut, rule) / ((1.0 + 2.0 * r_cut) * (2.0 * r_cut - 1.0));
        double g2 = 2.0 * k_r(qhat, qhat, eta, 4.0 * r_cut, rule) / ((1.0 + 4.0 * r_cut) * (4.0 * r_cut - 1.0));
        if (g0 > 0.0 && g1 > 0.0 && g2 > 0.0) {
            double p = 0.5 * (std::log2(g0 / g1) + std::log2(g1 / g2));
            out.tail_estimate = (p > 1.0) ? g0 * r_cut / (p - 1.0)
                                          : std::numeric_limits<double>::infinity();
        } else {
            out.tail_estimate = 0.0; // control kernel already underflowed
        }
        double mag = std::abs(out.value);
        out.tail_fraction = (mag > 0.0) ? out.tail_estimate / mag
                                        : (out.tail_estimate > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        out.tail_warning = out.tail_fraction > 0.01;
    }
    return out;
}

// Estimate-replication diagnostic: the same principal value split into the
// narrow window |1-r| <= delta_eta = delta/<eta>^tau (difference quotient),
// the annulus delta_eta < |1-r| <= delta (plain integrand, the two sides
// cancel the s_1 logarithm pairwise), and the outer region. The sum must
// agree with pv_eval up to quadrature error; tau enters only here.
struct PVWindowSplit {
    cdouble inner, annulus, outer;
    double delta_eta;
    cdouble sum() const { return inner + annulus + outer; }
};

inline PVWindowSplit pv_window_diagnostic(const RadialFourierProfile& q, const Vec& eta, const PVConfig& cfg) {
    validate_pv(cfg);
    double E = eta.norm();
    if (E <= 0.0) throw std::invalid_argument("pv_window_diagnostic: eta must be nonzero");
    SphericalQuadrature rule = make_dispersion_rule(eta.n, cfg, E);
    double de = cfg.delta / std::pow(1.0 + E * E, 0.5 * cfg.tau);

    bool band = q.fourier_support_radius.has_value();
    double lo_clip = 0.0, r_cut = cfg.r_max;
    if (band) {
        auto [rl, rh] = s_r_support_bounds(q, eta);
        lo_clip = rl;
        r_cut = std::min(cfg.r_max, rh);
    }

    cdouble s1 = s_r(q, eta, 1.0, rule);
    PVWindowSplit out;
    out.delta_eta = de;
    out.inner = out.annulus = out.outer = cdouble(0.0, 0.0);

    std::vector<double> xn, wn;
    for (int side = 0; side < 2; ++side) {
        gauss_on_interval(cfg.n_r_inner, side == 0 ? 1.0 - de : 1.0, side == 0 ? 1.0 : 1.0 + de, xn, wn);
        for (size_t i = 0; i < xn.size(); ++i)
            out.inner += wn[i] * (s_r(q, eta, xn[i], rule) - s1) / (1.0 - xn[i]);
    }
    // annulus on each side over dyadic subblocks from de out to delta
    for (int side = 0; side < 2; ++side) {
        double lo = de, hi = cfg.delta;
        int nblocks = std::max(1, static_cast<int>(std::ceil(std::log2(hi / lo))));
        for (int k = 0; k < nblocks; ++k) {
            double a = lo * std::ldexp(1.0, k);
            double b = std::min(hi, lo * std::ldexp(1.0, k + 1));
            gauss_on_interval(cfg.n_r_inner, side == 0 ? 1.0 - b : 1.0 + a, side == 0 ? 1.0 - a : 1.0 + b, xn, wn);
            for (size_t i = 0; i < xn.size(); ++i)
                out.annulus += wn[i] * s_r(q, eta, xn[i], rule) / (1.0 - xn[i]);
            if (b >= hi) break;
        }
    }
    for (const auto& [lo, hi] : detail::pv_outer_blocks(cfg.delta, lo_clip, r_cut)) {
        gauss_on_interval(cfg.n_r_outer, lo, hi, xn, wn);
        for (size_t i = 0; i < xn.size(); ++i)
            out.outer += wn[i] * s_r(q, eta, xn[i], rule) / (1.0 - xn[i]);
    }
    return out;
}

// Both printed combinations of the shell decomposition. q2_paper is the
// plain sum s_1 + P; q2_plemelj is -i pi s_1 + P, the combination an
// outgoing-resolvent regularization converges to under this artifact's
// Fourier convention. Both are carried everywhere; the oracle targets the
// second.
inline DispersionSample q2_hat(const RadialFourierProfile& q, const Vec& eta, const PVConfig& cfg) {
    SphericalQuadrature rule = make_dispersion_rule(eta.n, cfg, eta.norm());
    DispersionSample s;
    s.eta = eta;
    s.s1_value = s_r(q, eta, 1.0, rule);
    PVResult pv = pv_eval(q, eta, cfg);
    s.pv_value = pv.value;
    s.q2_paper = s.s1_value + s.pv_value;
    s.q2_plemelj = cdouble(0.0, -M_PI) * s.s1_value + s.pv_value;
    s.residuals["pv_tail_estimate"] = pv.tail_estimate;
    s.residuals["pv_tail_fraction"] = pv.tail_fraction;
    s.residuals["pv_tail_warning"] = pv.tail_warning ? 1.0 : 0.0;
    return s;
}

struct OracleResult {
    cdouble value{0.0, 0.0};
    bool warning = false;               // extrapolation residuals not contracting
    std::vector<double> eps;
    std::vector<cdouble> ladder_values; // I(eps) per rung
};

namespace detail {

// Polynomial extrapolation of the ladder to eps = 0 (Neville at x = 0).
// Returns the full diagonal so callers can judge contraction.
inline std::vector<cdouble> neville_diagonal(const std::vector<double>& x, const std::vector<cdouble>& y) {
    size_t n = x.size();
    std::vector<cdouble> t = y;
    std::vector<cdouble> diag;
    diag.push_back(t[0]);
    for (size_t k = 1; k < n; ++k) {
        for (size_t i = 0; i + k < n; ++i)
            t[i] = (x[i + k] * t[i] - x[i] * t[i + 1]) / (x[i + k] - x[i]);
        diag.push_back(t[0]);
    }
    return diag;
}

} // namespace detail

// Independent evaluation of the full frequency-side double dispersion
// integral with an explicit +i eps regularization of the resolvent
// denominator, extrapolated to eps -> 0. Co-area decomposition in the shell
// parameter: the volume integral becomes
//   int_0^r_cut M(r) (|eta|/2) / ((|eta|/2)^2 (1 - r^2) + i eps) dr,
// with M(r) the plain product integral over the r-sphere. The integrand
// peaks at r = 1 with width eps/(2 (|eta|/2)^2); panels are graded down to
// that width before Gauss rules are applied.
inline OracleResult q2_resolvent_oracle(const RadialFourierProfile& q, const Vec& eta, const PVConfig& cfg) {
    validate_pv(cfg);
    if (cfg.eps_ladder.size() < 3) throw config_error("oracle: eps ladder needs at least 3 rungs");
    double E = eta.norm();
    if (E <= 0.0) throw std::invalid_argument("q2_resolvent_oracle: eta must be nonzero");
    SphericalQuadrature rule = make_dispersion_rule(eta.n, cfg, E);
    double A = 0.25 * E * E;

    double r_cut = cfg.r_max;
    if (q.fourier_support_radius)
        r_cut = std::min(cfg.r_max, s_r_support_bounds(q, eta).second);

    auto M = [&](double r) {
        return detail::ewald_product_integral(
            [&](const Vec& xi, const Vec& cxi) { return eval_fourier(q, xi) * eval_fourier(q, cxi); },
            eta, r, rule);
    };

    OracleResult out;
    out.eps = cfg.eps_ladder;
    std::vector<double> xn, wn;
    for (double eps : cfg.eps_ladder) {
        double w = eps / (2.0 * A);
        int J = std::max(4, static_cast<int>(std::ceil(std::log2(cfg.delta / w)))) + 2;

        // coarse dyadic blocks away from 1, graded panels into the peak
        std::vector<double> edges;
        edges.push_back(0.0);
        {
            std::vector<double> below;
            for (int k = 0;; ++k) {
                double hi = 1.0 - cfg.delta * std::ldexp(1.0, k);
                if (hi <= 0.0) break;
                below.push_back(hi);
            }
            for (auto it = below.rbegin(); it != below.rend(); ++it) edges.push_back(*it);
        }
        for (int j = 1; j <= J; ++j) edges.push_back(1.0 - cfg.delta * std::ldexp(1.0, -j));
        edges.push_back(1.0);
        for (int j = J; j >= 1; --j) edges.push_back(1.0 + cfg.delta * std::ldexp(1.0, -j));
        for (int k = 0;; ++k) {
            double e = 1.0 + cfg.delta * std::ldexp(1.0, k);
            if (e >= r_cut) break;
            edges.push_back(e);
        }
        edges.push_back(r_cut);

        cdouble I(0.0, 0.0);
        for (size_t p = 0; p + 1 < edges.size(); ++p) {
            if (!(edges[p + 1] > edges[p])) continue;
            gauss_on_interval(cfg.n_r_inner, edges[p], edges[p + 1], xn, wn);
            for (size_t i = 0; i < xn.size(); ++i) {
                double r = xn[i];
                cdouble den(A * (1.0 - r * r), eps);
                I += wn[i] * M(r) * (0.5 * E) / den;
            }
        }
        out.ladder_values.push_back(I);
    }

    std::vector<cdouble> diag = detail::neville_diagonal(out.eps, out.ladder_values);
    out.value = diag.back();
    double floor = 1e-14 * std::abs(out.value);
    for (size_t k = 2; k < diag.size(); ++k) {
        double d_prev = std::abs(diag[k - 1] - diag[k - 2]);
        double d_cur = std::abs(diag[k] - diag[k - 1]);
        if (d_cur > std::max(2.0 * d_prev, floor)) out.warning = true;
    }
    return out;
}

struct Q2TildeResult {
    DispersionSample sample;
    double chi = 0.0;
    cdouble tilde_paper{0.0, 0.0};
    cdouble tilde_plemelj{0.0, 0.0};
};

// The cutoff-localized operator: chi(eta) times both combinations. Low
// frequencies are suppressed entirely (chi = 0 for |eta| <= C0).
inline Q2TildeResult q2_tilde_hat(const RadialFourierProfile& q, const Vec& eta, const PVConfig& cfg, double C0) {
    Q2TildeResult out;
    out.sample = q2_hat(q, eta, cfg);
    out.chi = cutoff_chi(eta, C0);
    out.tilde_paper = out.chi * out.sample.q2_paper;
    out.tilde_plemelj = out.chi * out.sample.q2_plemelj;
    return out;
}

} // namespace backdisp
