#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gauss.hpp"
#include "profiles.hpp"
#include "vec.hpp"

namespace backdisp {

struct NormResult {
    double value = 0.0;    // +inf when divergent
    bool divergent = false;
};

namespace detail {

// Dyadic-block ratio test shared by the norm integrals. A tail with block
// integrals b_k over [2^k, 2^{k+1}] diverges iff the ratios stop decaying;
// polynomial thresholds give ratios 2^{2(beta - beta_sup)}, so the cut at
// 1 - 5e-7 separates beta from beta_sup at the 1e-6 scale. Ratios are only
// trusted past k = 12 where the (1+rho^2) vs rho^2 deviation is below the
// threshold's margin.
constexpr double kRatioThreshold = 1.0 - 5e-7;
constexpr int kRatioMinOctave = 12;
constexpr int kRatioRun = 4;

} // namespace detail

// Sobolev norm of the potential computed on the Fourier side:
//   delta = 0: ( |S^{n-1}| int (1+rho^2)^beta |profile|^2 rho^{n-1} drho )^{1/2}
//   delta = 1: adds |profile'|^2 to the integrand, the radial form of the
//              coordinate-weighted norms sum_i ||x_i q||^2 (for radial q the
//              direction factors (xi_i/rho)^2 sum to one).
inline NormResult weighted_sobolev_norm(const RadialFourierProfile& p, double beta, int delta) {
    if (delta != 0 && delta != 1) throw std::invalid_argument("weighted_sobolev_norm: delta must be 0 or 1");
    auto weight = [&](double rho) {
        double w = std::norm(p.profile(rho));
        if (delta == 1) w += std::norm(p.profile_derivative(rho));
        return w;
    };
    auto integrand = [&](double rho) {
        return std::pow(1.0 + rho * rho, beta) * weight(rho) * std::pow(rho, p.dim - 1);
    };

    std::vector<double> xn, wn;
    gauss_on_interval(64, 0.0, 1.0, xn, wn);
    double head = 0.0;
    for (size_t i = 0; i < xn.size(); ++i) {
        double v = integrand(xn[i]);
        if (!std::isfinite(v))
            throw std::domain_error("weighted_sobolev_norm: non-integrable singularity near rho = 0");
        head += wn[i] * v;
    }

    const int kmax = 40;
    double total = head;
    double prev_block = -1.0;
    int high_ratio_run = 0;
    double last = 0.0, second_last = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        gauss_on_interval(48, std::ldexp(1.0, k), std::ldexp(1.0, k + 1), xn, wn);
        double blk = 0.0;
        for (size_t i = 0; i < xn.size(); ++i) blk += wn[i] * integrand(xn[i]);
        total += blk;
        if (k >= detail::kRatioMinOctave && prev_block > 0.0) {
            double ratio = blk / prev_block;
            high_ratio_run = (ratio >= detail::kRatioThreshold) ? high_ratio_run + 1 : 0;
            if (high_ratio_run >= detail::kRatioRun)
                return {std::numeric_limits<double>::infinity(), true};
        }
        second_last = last;
        last = blk;
        prev_block = blk;
        if (blk == 0.0 && k > 2) break;
    }
    // geometric closure of the truncated tail
    if (last > 0.0 && second_last > 0.0) {
        double r = last / second_last;
        if (r >= 1.0) return {std::numeric_limits<double>::infinity(), true};
        total += last * r / (1.0 - r);
    }
    return {std::sqrt(unit_sphere_area(p.dim) * total), false};
}

// Radial Fourier data given by samples; radii strictly increasing.
struct RadialSamples {
    std::vector<double> radii;
    std::vector<cdouble> values;
};

// Weighted L1 norm of Fourier data: |S^{n-1}| int <rho>^alpha |f(rho)| rho^{n-1} drho,
// integrated by the trapezoid rule on the sample grid (the caller controls
// resolution through the grid). Divergence is detected from octave-block
// growth, so the grid should extend past 2^{12} for a trustworthy flag.
inline NormResult l1_alpha_norm(const RadialSamples& f, double alpha, int n) {
    size_t N = f.radii.size();
    if (N != f.values.size() || N < 2) throw std::invalid_argument("l1_alpha_norm: need matching radii/values, at least 2");
    for (size_t i = 0; i + 1 < N; ++i)
        if (!(f.radii[i] < f.radii[i + 1]))
            throw std::invalid_argument("l1_alpha_norm: radii must be strictly increasing");
    if (f.radii.front() < 0.0) throw std::invalid_argument("l1_alpha_norm: radii must be nonnegative");

    auto g = [&](size_t i) {
        double rho = f.radii[i];
        return std::pow(1.0 + rho * rho, 0.5 * alpha) * std::abs(f.values[i]) * std::pow(rho, n - 1);
    };

    double total = 0.0;
    std::vector<double> octave_sum;
    std::vector<int> octave_idx;
    auto octave_of = [](double rho) { return static_cast<int>(std::floor(std::log2(rho))); };
    for (size_t i = 0; i + 1 < N; ++i) {
        double piece = 0.5 * (g(i) + g(i + 1)) * (f.radii[i + 1] - f.radii[i]);
        total += piece;
        double mid = 0.5 * (f.radii[i] + f.radii[i + 1]);
        if (mid > 0.0) {
            int k = octave_of(mid);
            if (octave_idx.empty() || octave_idx.back() != k) {
                octave_idx.push_back(k);
                octave_sum.push_back(0.0);
            }
            octave_sum.back() += piece;
        }
    }

    // growth test on the top complete octaves
    int run = 0;
    for (size_t i = 1; i + 1 < octave_sum.size(); ++i) { // last octave may be partial
        if (octave_idx[i] < detail::kRatioMinOctave - 2) continue;
        if (octave_sum[i - 1] > 0.0 && octave_sum[i] / octave_sum[i - 1] >= detail::kRatioThreshold) {
            if (++run >= detail::kRatioRun) return {std::numeric_limits<double>::infinity(), true};
        } else {
            run = 0;
        }
    }
    return {unit_sphere_area(n) * total, false};
}

// Upper bound for the sup-norm scale through the L1 route. The inequality
// carries an unspecified constant; it is reported with C = 1, so values are
// comparable across profiles but not sharp.
inline NormResult holder_upper_bound(const RadialSamples& f, double alpha, int n) {
    if (alpha < 0.0) throw std::invalid_argument("holder_upper_bound: alpha must be nonnegative");
    return l1_alpha_norm(f, alpha, n);
}

struct DecayFit {
    double exponent = 0.0;   // magnitude ~ radius^{-exponent}
    double intercept = 0.0;  // log magnitude at log radius = 0
    double r2 = 0.0;
    double range_lo = 0.0;
    double range_hi = 0.0;
    int dropped_zeros = 0;
};

// Least-squares power-law fit on log-log axes. Zero magnitudes carry no
// information for the fit and are dropped (counted); at least 8 positive
// samples must remain.
inline DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& samples) {
    std::vector<double> lx, ly;
    int dropped = 0;
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        if (!(s.first > 0.0) || s.first <= prev)
            throw std::invalid_argument("fit_decay_exponent: radii must be positive and increasing");
        prev = s.first;
        if (s.second > 0.0) {
            lx.push_back(std::log(s.first));
            ly.push_back(std::log(s.second));
        } else {
            ++dropped;
        }
    }
    if (lx.size() < 8) throw std::invalid_argument("fit_decay_exponent: fewer than 8 positive samples");

    size_t m = lx.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < m; ++i) { mx += lx[i]; my += ly[i]; }
    mx /= m; my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < m; ++i) {
        double dx = lx[i] - mx, dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    double slope = (sxx > 0.0) ? sxy / sxx : 0.0;
    double ssres = 0.0;
    for (size_t i = 0; i < m; ++i) {
        double e = (ly[i] - my) - slope * (lx[i] - mx);
        ssres += e * e;
    }
    DecayFit fit;
    fit.exponent = -slope;
    fit.intercept = my - slope * mx;
    fit.r2 = (syy > 1e-30) ? std::max(0.0, 1.0 - ssres / syy) : 1.0;
    fit.range_lo = std::exp(lx.front());
    fit.range_hi = std::exp(lx.back());
    fit.dropped_zeros = dropped;
    return fit;
}

// Heuristic Sobolev membership cap for radial data decaying like rho^{-d}:
// square-integrability of (1+rho^2)^{alpha} rho^{n-1} |f|^2 needs alpha < d - n/2.
inline double membership_threshold(double d, int n) {
    if (!std::isfinite(d)) throw std::invalid_argument("membership_threshold: decay exponent must be finite");
    return d - 0.5 * n;
}

} // namespace backdisp
