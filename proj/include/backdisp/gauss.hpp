#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace backdisp {

struct GaussRule {
    std::vector<double> x;   // nodes on (-1, 1), ascending
    std::vector<double> w;   // positive weights, sum 2
};

namespace detail {

inline GaussRule compute_gauss_legendre(int m) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    GaussRule r;
    r.x.resize(m);
    r.w.resize(m);
    // Newton on P_m from the Chebyshev-like initial guess; symmetric pairs
    // are filled together so the rule is exactly symmetric in floating point.
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                // one final polish, then accept
                p0 = 1.0; p1 = t;
                for (int k = 2; k <= m; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m * (t * p1 - p0) / (t * t - 1.0);
                break;
            }
        }
        double wt = 2.0 / ((1.0 - t * t) * dp * dp);
        r.x[i] = -t;
        r.x[m - 1 - i] = t;
        r.w[i] = wt;
        r.w[m - 1 - i] = wt;
    }
    if (m % 2 == 1) r.x[m / 2] = 0.0;
    return r;
}

} // namespace detail

// Cached Gauss-Legendre rule on (-1, 1). Thread-safe; rules are immutable
// once inserted, so the returned reference stays valid for program lifetime.
inline const GaussRule& gauss_legendre(int m) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, detail::compute_gauss_legendre(m)).first;
    return it->second;
}

// Gauss nodes mapped onto [a, b]; weights carry the Jacobian (b-a)/2.
inline void gauss_on_interval(int m, double a, double b,
                              std::vector<double>& nodes, std::vector<double>& weights) {
    const GaussRule& g = gauss_legendre(m);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    nodes.resize(g.x.size());
    weights.resize(g.x.size());
    for (size_t i = 0; i < g.x.size(); ++i) {
        nodes[i] = mid + half * g.x[i];
        weights[i] = half * g.w[i];
    }
}

} // namespace backdisp
