#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "config.hpp"
#include "dispersion.hpp"
#include "measures.hpp"
#include "norms.hpp"
#include "parallel.hpp"
#include "profiles.hpp"
#include "report.hpp"

namespace backdisp {

namespace detail {

inline Vec random_direction(SampleRng& rng, int n) {
    double phi = 2.0 * M_PI * rng.uniform();
    if (n == 2) return Vec(std::cos(phi), std::sin(phi));
    double u = rng.uniform(-1.0, 1.0);
    double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    return Vec(s * std::cos(phi), s * std::sin(phi), u);
}

inline std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return std::string(buf);
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t m = v.size() / 2;
    if (v.empty()) return 0.0;
    return (v.size() % 2 == 1) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct CheckSink {
    RunReport& rep;

    void add(const std::string& name, double metric, double threshold, bool pass,
             const std::string& extra = "") {
        rep.rows.push_back({name, fmt_double(metric), fmt_double(threshold), pass ? "1" : "0"});
        std::string d = "metric=" + fmt_short(metric) + " threshold=" + fmt_short(threshold);
        if (!extra.empty()) d += " " + extra;
        rep.verdicts.push_back({name, pass, d});
    }

    void skip(const std::string& name, const std::string& why) {
        rep.rows.push_back({name, "0", "0", "1"});
        rep.verdicts.push_back({name, true, "skipped: " + why});
    }
};

} // namespace detail

// ---------------------------------------------------------------------------
// verify: the identity and bound checks, each reported as metric vs threshold.
// ---------------------------------------------------------------------------

inline RunReport run_verify(const RunSettings& s) {
    auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.config_echo = s.raw;
    rep.columns = {"check", "metric", "threshold", "pass"};
    detail::CheckSink sink{rep};
    const int n = s.dimension;

    // sphere rules: total mass, an even moment, an odd moment
    {
        double worst = 0.0;
        double area = unit_sphere_area(n);
        for (int which = 0; which < 2; ++which) {
            SphericalQuadrature q = which == 0 ? sphere_quadrature(n, 8)
                                               : polar_graded_quadrature(n, 8, 10);
            double mass = 0.0, even = 0.0, odd = 0.0;
            for (size_t i = 0; i < q.size(); ++i) {
                mass += q.weights[i];
                even += q.weights[i] * q.nodes[i][0] * q.nodes[i][0];
                odd += q.weights[i] * q.nodes[i][0];
            }
            worst = std::max(worst, std::abs(mass - area) / area);
            worst = std::max(worst, std::abs(even - area / n) / (area / n));
            worst = std::max(worst, std::abs(odd) / area);
        }
        sink.add("sphere-rule-exactness", worst, 1e-12, worst <= 1e-12);
    }

    // Ewald spheres and their dual surfaces: defining relations at the nodes
    {
        double worst = 0.0;
        SphericalQuadrature q = sphere_quadrature(n, 12);
        for (int k = 0; k < 8; ++k) {
            SampleRng rng(s.seed, 1000 + static_cast<uint64_t>(k));
            Vec dir = detail::random_direction(rng, n);
            double E = rng.log_uniform(0.5, 32.0);
            double r = rng.log_uniform(0.1, 4.0);
            Vec eta = E * dir;
            SphereDescriptor g = ewald_sphere(eta, r);
            worst = std::max(worst, (g.center - 0.5 * eta).norm() / E);
            worst = std::max(worst, std::abs(g.radius - 0.5 * r * E) / (0.5 * r * E));
            for (size_t i = 0; i < q.size(); ++i) {
                Vec y = g.center + g.radius * q.nodes[i];
                worst = std::max(worst, std::abs((2.0 * y - eta).norm() - r * E) / (r * E));
            }
            cdouble mass = integrate_sphere([](const Vec&) { return 1.0; }, g, q);
            double exact = unit_sphere_area(n) * std::pow(g.radius, n - 1);
            worst = std::max(worst, std::abs(mass.real() - exact) / exact);

            // dual surface: every point eta of it must see xi on its Ewald sphere
            Vec xi = rng.log_uniform(0.3, 8.0) * detail::random_direction(rng, n);
            double rd = (k % 2 == 0) ? rng.uniform(0.15, 0.85) : rng.uniform(1.2, 4.0);
            SurfaceDescriptor nr = nr_surface(xi, rd);
            for (size_t i = 0; i < q.size(); ++i) {
                Vec e2 = nr.sphere.center + nr.sphere.radius * q.nodes[i];
                double lhs = (xi - 0.5 * e2).norm();
                double rhs = 0.5 * rd * e2.norm();
                worst = std::max(worst, std::abs(lhs - rhs) / rhs);
            }
            SurfaceDescriptor hp = nr_surface(xi, 1.0);
            auto frame = orthonormal_complement(hp.normal);
            for (double t : {0.5 * xi.norm(), 2.0 * xi.norm()}) {
                Vec e2 = xi + t * frame[0];
                double lhs = (xi - 0.5 * e2).norm();
                double rhs = 0.5 * e2.norm();
                worst = std::max(worst, std::abs(lhs - rhs) / rhs);
            }
        }
        sink.add("ewald-dual-geometry", worst, 1e-10, worst <= 1e-10);
    }

    // disc integrals in the hyperplane orthogonal to xi
    {
        SampleRng rng(s.seed, 2000);
        Vec xi = 2.3 * detail::random_direction(rng, n);
        double R = xi.norm();
        SphericalQuadrature rule;  // 2-d ambient: only the radial order matters
        rule.order = 16;
        if (n == 3) rule = sphere_quadrature(2, 16);
        cdouble one = integrate_hyperplane_disc([](const Vec&) { return 1.0; }, xi, rule);
        double exact = (n == 3) ? M_PI * R * R : 2.0 * R;
        double worst = std::abs(one.real() - exact) / exact;
        cdouble lin = integrate_hyperplane_disc([&](const Vec& v) { return v.dot(xi); }, xi, rule);
        worst = std::max(worst, std::abs(lin) / (exact * R));
        cdouble gau = integrate_hyperplane_disc([](const Vec& v) { return std::exp(-v.norm2()); }, xi, rule);
        double gexact = (n == 3) ? M_PI * (1.0 - std::exp(-R * R)) : std::sqrt(M_PI) * std::erf(R);
        worst = std::max(worst, std::abs(gau.real() - gexact) / gexact);
        sink.add("hyperplane-disc-integrals", worst, 1e-8, worst <= 1e-8);
    }

    // order of integration across the two-parameter sphere family
    if (n == 3) {
        const double L = 2.9;
        auto f = [L](const Vec& eta, const Vec& xi) {
            double e2 = eta.norm2(), x2 = xi.norm2();
            double ce = 1.0 - e2 / (L * L), cx = 1.0 - x2 / (L * L);
            if (ce <= 0.0 || cx <= 0.0) return 0.0;
            double bump = detail::ipow(ce, 8) * detail::ipow(cx, 8);
            return e2 * x2 * std::exp(-2.0 * (e2 + x2)) * bump;
        };
        FubiniOptions opt;
        opt.support_radius = L;
        opt.outer_points = 32;
        opt.inner_order = 16;
        opt.inner_levels = 14;
        opt.threads = s.threads;
        opt.axisymmetric_inner = true;
        double r1 = fubini_residual(f, 0.5, 1.0, opt);
        double r2 = fubini_residual(f, 0.5, 0.25, opt);
        double worst = std::max(r1, r2);
        sink.add("fubini-change-of-order", worst, 5e-3, worst <= 5e-3,
                 "pairs (1/2,1) and (1/2,1/4)");
    } else {
        sink.skip("fubini-change-of-order", "outer box integral is dimension-3 only");
    }

    // great-subsphere averaging identity
    if (n == 3) {
        SphericalQuadrature q = sphere_quadrature(3, 12);
        double worst = santalo_residual([](const Vec&) { return 1.0; }, q);
        worst = std::max(worst, santalo_residual([](const Vec& t) { return t[0] * t[0]; }, q));
        worst = std::max(worst, santalo_residual(
            [](const Vec& t) { return std::exp(0.7 * t[1]) * std::cos(t[0]); }, q));
        sink.add("subsphere-average-identity", worst, 1e-6, worst <= 1e-6);
    } else {
        sink.skip("subsphere-average-identity", "orthogonal subsphere degenerates below dimension 3");
    }

    // line density of sphere surface measure: radial integrals and total mass.
    // h is even-analytic in t so h(|z|) is smooth across z = 0 and the
    // reference surface quadrature converges spectrally even when the sphere
    // passes near the origin.
    {
        auto h = [](double t) { return std::exp(-0.3 * t * t) * (1.0 + 0.25 * std::cos(0.7 * t * t)); };
        SphericalQuadrature q = sphere_quadrature(n, 24);
        double worst_int = 0.0, worst_mass = 0.0;
        int count = s.verify_samples;
        for (int k = 0; k < count; ++k) {
            SampleRng rng(s.seed, 3000 + static_cast<uint64_t>(k));
            double xr = (k == 0) ? 0.0 : (k == 1 ? 1e-12 : rng.log_uniform(0.15, 3.0));
            Vec x = xr * detail::random_direction(rng, n);
            x.n = n;
            double b = rng.uniform(0.2, 2.0);
            cdouble got = leckband_integrate(h, x, b, n) * s.leckband_scale_hook;
            SphereDescriptor sph{x, b, n};
            cdouble ref = integrate_sphere([&](const Vec& z) { return h(z.norm()); }, sph, q);
            worst_int = std::max(worst_int, std::abs(got - ref) / std::abs(ref));
            cdouble mass = leckband_integrate([](double) { return 1.0; }, x, b, n) * s.leckband_scale_hook;
            double mexact = unit_sphere_area(n) * std::pow(b, n - 1);
            worst_mass = std::max(worst_mass, std::abs(mass.real() - mexact) / mexact);
        }
        sink.add("line-density-vs-surface", worst_int, 1e-6, worst_int <= 1e-6);
        sink.add("line-density-mass", worst_mass, 1e-10, worst_mass <= 1e-10);
    }

    // distance-power kernels over spheres: refinement stability and scaling
    {
        double a = (n == 3) ? 1.5 : 0.7;
        double b = (n == 3) ? 1.0 : 1.5;
        double worst = 0.0, biggest = 0.0;
        int count = s.verify_samples;
        for (int k = 0; k < count; ++k) {
            SampleRng rng(s.seed, 4000 + static_cast<uint64_t>(k));
            double rho = rng.log_uniform(1e-2, 1e3);
            Vec c = rng.log_uniform(0.1, 10.0) * detail::random_direction(rng, n);
            c.n = n;
            SphereDescriptor sph{c, rho, n};
            double d;
            switch (k % 4) {
                case 0: d = rho; break;
                case 1: d = 0.5 * rho; break;
                case 2: d = 2.0 * rho; break;
                default: d = rho + 1e3; break;
            }
            Vec x = c + d * detail::random_direction(rng, n);
            double v1 = kernel_integral_ab(x, sph, a, b, 12);
            double v2 = kernel_integral_ab(x, sph, a, b, 24);
            if (!std::isfinite(v1) || !std::isfinite(v2)) {
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            biggest = std::max(biggest, v2);
            worst = std::max(worst, std::abs(v1 - v2) / std::max(v2, 1e-300));
        }
        sink.add("sphere-kernel-refinement", worst, 1e-2, worst <= 1e-2,
                 "largest value " + detail::fmt_short(biggest));

        double lambda = (n == 3) ? 0.5 : 0.4;
        double ratio_dev = 0.0;
        double base = 0.0;
        for (int j = 0; j < 3; ++j) {
            double rho = std::pow(10.0, -2.0 + 2.0 * j);
            Vec c = Vec::zero(n);
            SphereDescriptor sph{c, rho, n};
            Vec x = Vec::zero(n);
            x[0] = rho;  // on the sphere: the uniform-position case
            double v = kernel_integral_lambda(x, sph, lambda, n) / std::pow(rho, 2.0 * lambda);
            if (j == 0) base = v;
            else ratio_dev = std::max(ratio_dev, std::abs(v - base) / base);
        }
        sink.add("kernel-lambda-scaling", ratio_dev, 1e-10, ratio_dev <= 1e-10);
    }

    // pointwise oscillation bound |e^{i xi t} - 1| <= 2 |xi|^a |t|^a on |xi t| <= 1
    {
        double worst_ratio = 0.0;
        int count = std::max(2000, s.verify_samples);
        for (int k = 0; k < count; ++k) {
            SampleRng rng(s.seed, 5000 + static_cast<uint64_t>(k));
            double alpha = 0.25 * (1 + k % 3);
            double xi = rng.log_uniform(1e-3, 1e3) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            double u = rng.uniform();
            if (u == 0.0) u = 0.5;
            double t = u / std::abs(xi) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
            double lhs = std::abs(std::exp(cdouble(0.0, xi * t)) - cdouble(1.0, 0.0));
            double rhs = 2.0 * std::pow(std::abs(xi), alpha) * std::pow(std::abs(t), alpha);
            worst_ratio = std::max(worst_ratio, lhs / rhs);
        }
        sink.add("oscillation-bound", worst_ratio, 1.0 + 1e-12, worst_ratio <= 1.0 + 1e-12);
    }

    // weighted norm closed form, divergence flag, decay-fit recovery
    {
        double worst = 0.0;
        if (n == 3) {
            NormResult r = weighted_sobolev_norm(power_profile(3.0, 3), 1.0, 0);
            worst = std::abs(r.value - M_PI) / M_PI;
            sink.add("weighted-norm-closed-form", worst, 1e-9, worst <= 1e-9 && !r.divergent);
        } else {
            sink.skip("weighted-norm-closed-form", "closed form pinned in dimension 3");
        }
        NormResult div = weighted_sobolev_norm(power_profile(0.5 * n + 1.5, n), 1.5, 0);
        NormResult fin = weighted_sobolev_norm(power_profile(0.5 * n + 1.5, n), 1.5 - 1e-3, 0);
        bool flags_ok = div.divergent && !fin.divergent;
        sink.add("norm-divergence-flag", flags_ok ? 0.0 : 1.0, 0.5, flags_ok);

        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < 12; ++i) {
            double rr = std::exp2(2.0 + 0.5 * i);
            pts.emplace_back(rr, 3.7 * std::pow(rr, -2.25));
        }
        DecayFit fit = fit_decay_exponent(pts);
        double err = std::abs(fit.exponent - 2.25);
        sink.add("decay-fit-recovery", err, 1e-10, err <= 1e-10 && fit.r2 > 1.0 - 1e-12);
    }

    // principal value vs resolvent regularization, and the window-split identity
    {
        RadialFourierProfile q = make_profile(s.profile_spec, n);
        Vec eta = 4.0 * s.direction;
        DispersionSample ds = q2_hat(q, eta, s.pv);
        OracleResult orc = q2_resolvent_oracle(q, eta, s.pv);
        double rel = std::abs(orc.value - ds.q2_plemelj) / std::max(std::abs(ds.q2_plemelj), 1e-300);
        sink.add("resolvent-vs-principal-value", rel, 2e-2, rel <= 2e-2,
                 orc.warning ? "extrapolation warning" : "");

        PVResult pv = pv_eval(q, eta, s.pv);
        PVWindowSplit split = pv_window_diagnostic(q, eta, s.pv);
        double dev = std::abs(split.sum() - pv.value) / std::max(std::abs(pv.value), 1e-300);
        sink.add("pv-window-split", dev, 1e-6, dev <= 1e-6);
    }

    // band-limited profiles: zero set of the shell operator is exact
    {
        RadialFourierProfile q = bandlimited_profile(1.0, 4, n);
        Vec eta = 2.5 * s.direction;
        auto [rl, rh] = s_r_support_bounds(q, eta);
        (void)rl;
        SphericalQuadrature rule = make_dispersion_rule(n, s.pv, eta.norm());
        cdouble outside = s_r(q, eta, 1.01 * rh, rule);
        DispersionSample ds = q2_hat(q, eta, s.pv);
        double worst = std::abs(outside) + std::abs(ds.q2_paper) + std::abs(ds.q2_plemelj);
        sink.add("bandlimited-support-zeros", worst, 0.0, worst == 0.0);
    }

    // quadratic homogeneity and rotation invariance of the shell operator
    {
        RadialFourierProfile q = gaussian_profile(0.3, n);
        cdouble c(0.8, -0.45);
        Vec eta = 3.0 * s.direction;
        DispersionSample base = q2_hat(q, eta, s.pv);
        DispersionSample scaled = q2_hat(scaled_profile(q, c), eta, s.pv);
        double worst = std::abs(scaled.q2_paper - c * c * base.q2_paper) /
                       std::max(std::abs(c * c * base.q2_paper), 1e-300);
        sink.add("quadratic-homogeneity", worst, 1e-13, worst <= 1e-13);

        SampleRng rng(s.seed, 6000);
        Vec dir2 = detail::random_direction(rng, n);
        DispersionSample rot = q2_hat(q, 3.0 * dir2, s.pv);
        double dev = std::abs(rot.q2_paper - base.q2_paper) /
                     std::max(std::abs(base.q2_paper), 1e-300);
        sink.add("rotation-invariance", dev, 1e-10, dev <= 1e-10);
    }

    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// q2: frequency scan of the shell operator for the configured potential.
// ---------------------------------------------------------------------------

inline RunReport run_q2_scan(const RunSettings& s) {
    auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.config_echo = s.raw;
    rep.columns = {"index", "eta_norm", "chi", "s1_re", "s1_im", "pv_re", "pv_im",
                   "q2_paper_re", "q2_paper_im", "q2_plemelj_re", "q2_plemelj_im",
                   "tilde_paper_re", "tilde_paper_im", "tilde_plemelj_re", "tilde_plemelj_im",
                   "pv_tail_fraction", "tail_flag"};
    RadialFourierProfile q = make_profile(s.profile_spec, s.dimension);
    std::vector<double> grid = geometric_grid(s.eta_log2_min, s.eta_log2_max, s.eta_per_octave);

    std::vector<Q2TildeResult> slots(grid.size());
    parallel_for(grid.size(), s.threads, [&](size_t i) {
        slots[i] = q2_tilde_hat(q, grid[i] * s.direction, s.pv, s.cutoff_c0);
    });

    int flagged = 0;
    for (size_t i = 0; i < grid.size(); ++i) {
        const Q2TildeResult& r = slots[i];
        double tail = r.sample.residuals.count("pv_tail_fraction")
                          ? r.sample.residuals.at("pv_tail_fraction")
                          : 0.0;
        bool warn = r.sample.residuals.count("pv_tail_warning") &&
                    r.sample.residuals.at("pv_tail_warning") > 0.5;
        if (warn) {
            ++flagged;
            rep.notes.push_back("tail flag at eta_norm=" + detail::fmt_short(grid[i]));
        }
        rep.rows.push_back({std::to_string(i), fmt_double(grid[i]), fmt_double(r.chi),
                            fmt_double(r.sample.s1_value.real()), fmt_double(r.sample.s1_value.imag()),
                            fmt_double(r.sample.pv_value.real()), fmt_double(r.sample.pv_value.imag()),
                            fmt_double(r.sample.q2_paper.real()), fmt_double(r.sample.q2_paper.imag()),
                            fmt_double(r.sample.q2_plemelj.real()), fmt_double(r.sample.q2_plemelj.imag()),
                            fmt_double(r.tilde_paper.real()), fmt_double(r.tilde_paper.imag()),
                            fmt_double(r.tilde_plemelj.real()), fmt_double(r.tilde_plemelj.imag()),
                            fmt_double(tail), warn ? "1" : "0"});
    }
    rep.verdicts.push_back({"q2-scan", true,
                            "rows=" + std::to_string(grid.size()) +
                                " tail_flags=" + std::to_string(flagged)});
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// oracle: principal-value evaluation against the resolvent extrapolation.
// ---------------------------------------------------------------------------

inline RunReport run_oracle_compare(const RunSettings& s) {
    auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.config_echo = s.raw;
    rep.columns = {"index", "eta_norm", "plemelj_re", "plemelj_im", "oracle_re", "oracle_im",
                   "rel_err_plemelj", "rel_err_paper", "oracle_warning"};
    RadialFourierProfile q = make_profile(s.profile_spec, s.dimension);

    std::vector<double> grid(static_cast<size_t>(s.oracle_count));
    for (int i = 0; i < s.oracle_count; ++i) {
        double f = (s.oracle_count == 1) ? 0.0
                                         : static_cast<double>(i) / (s.oracle_count - 1);
        grid[static_cast<size_t>(i)] = std::exp2(s.oracle_log2_min + f * (s.oracle_log2_max - s.oracle_log2_min));
    }

    struct Slot {
        DispersionSample ds;
        OracleResult orc;
    };
    std::vector<Slot> slots(grid.size());
    parallel_for(grid.size(), s.threads, [&](size_t i) {
        Vec eta = grid[i] * s.direction;
        slots[i].ds = q2_hat(q, eta, s.pv);
        slots[i].orc = q2_resolvent_oracle(q, eta, s.pv);
    });

    std::vector<double> rels;
    bool any_warning = false;
    for (size_t i = 0; i < grid.size(); ++i) {
        const Slot& sl = slots[i];
        double denom = std::max(std::abs(sl.ds.q2_plemelj), 1e-300);
        double rel = std::abs(sl.orc.value - sl.ds.q2_plemelj) / denom;
        double rel_paper = std::abs(sl.orc.value - sl.ds.q2_paper) /
                           std::max(std::abs(sl.ds.q2_paper), 1e-300);
        rels.push_back(rel);
        any_warning = any_warning || sl.orc.warning;
        rep.rows.push_back({std::to_string(i), fmt_double(grid[i]),
                            fmt_double(sl.ds.q2_plemelj.real()), fmt_double(sl.ds.q2_plemelj.imag()),
                            fmt_double(sl.orc.value.real()), fmt_double(sl.orc.value.imag()),
                            fmt_double(rel), fmt_double(rel_paper), sl.orc.warning ? "1" : "0"});
    }
    double med = detail::median_of(rels);
    double worst = rels.empty() ? 0.0 : *std::max_element(rels.begin(), rels.end());
    bool pass = med <= s.oracle_median_tol;
    rep.verdicts.push_back({"oracle-agreement", pass,
                            "median=" + detail::fmt_short(med) + " max=" + detail::fmt_short(worst) +
                                (any_warning ? " extrapolation warnings present" : "")});
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// epsilon-scan: decay-exponent fits across the smoothness grid, compared
// against the predicted gain min(beta - (n-4)/2, 1).
// ---------------------------------------------------------------------------

inline RunReport run_epsilon_scan(const RunSettings& s) {
    auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.config_echo = s.raw;
    rep.columns = {"beta", "s", "fit_exponent", "r2", "alpha_hat", "epsilon_pred",
                   "target", "margin", "flag"};
    const int n = s.dimension;
    std::vector<double> grid = geometric_grid(s.scan_log2_min, s.scan_log2_max, s.scan_per_octave);

    bool all_ok = true;
    int computed = 0;
    std::vector<std::pair<double, double>> alpha_by_beta;
    for (double beta : s.beta_grid) {
        double floor_beta = std::min(0.0, 0.5 * (n - 4));
        if (beta < floor_beta) {
            rep.rows.push_back({fmt_double(beta), "0", "0", "0", "0", "0", "0", "0", "below-range"});
            rep.notes.push_back("beta=" + detail::fmt_short(beta) + " below the theorem range, skipped");
            continue;
        }
        double sexp = beta + 0.5 * n;
        RadialFourierProfile q = power_profile(sexp, n);

        std::vector<double> mags(grid.size());
        parallel_for(grid.size(), s.threads, [&](size_t i) {
            DispersionSample ds = q2_hat(q, grid[i] * s.direction, s.pv);
            mags[i] = std::abs(ds.q2_plemelj);
        });
        std::vector<std::pair<double, double>> pts;
        for (size_t i = 0; i < grid.size(); ++i) pts.emplace_back(grid[i], mags[i]);
        DecayFit fit = fit_decay_exponent(pts);

        double alpha_hat = membership_threshold(fit.exponent, n);
        double eps_pred = std::min(beta - 0.5 * (n - 4), 1.0);
        double target = beta + eps_pred;
        double margin = alpha_hat - target;
        bool r2_ok = fit.r2 >= s.scan_min_r2;
        bool margin_ok = std::abs(margin) <= s.scan_margin_tol;
        // At the saturation knee the gain is borderline and the decay carries
        // a logarithmic correction that a pure power fit reads as a smaller
        // exponent; the knee row is reported but only feeds the slope check.
        bool knee_row = std::abs(beta - 0.5 * (n - 2)) <= 1e-9;
        std::string flag = knee_row ? "knee" : (r2_ok ? (margin_ok ? "ok" : "margin") : "low-r2");
        if (!knee_row && (!r2_ok || !margin_ok)) all_ok = false;
        ++computed;
        alpha_by_beta.emplace_back(beta, alpha_hat);
        rep.rows.push_back({fmt_double(beta), fmt_double(sexp), fmt_double(fit.exponent),
                            fmt_double(fit.r2), fmt_double(alpha_hat), fmt_double(eps_pred),
                            fmt_double(target), fmt_double(margin), flag});
    }

    std::string kink;
    {
        // piecewise slopes of measured alpha against beta on the two sides of
        // the saturation point beta = (n-2)/2
        double knee = 0.5 * (n - 2);
        std::vector<std::pair<double, double>> lo, hi;
        for (auto& [b, a] : alpha_by_beta)
            (b <= knee + 1e-12 ? lo : hi).emplace_back(b, a);
        if (lo.size() >= 2 && hi.size() >= 2) {
            auto slope = [](const std::vector<std::pair<double, double>>& v) {
                return (v.back().second - v.front().second) / (v.back().first - v.front().first);
            };
            kink = "slope_below=" + detail::fmt_short(slope(lo)) +
                   " slope_above=" + detail::fmt_short(slope(hi));
        }
    }
    rep.verdicts.push_back({"epsilon-scan", all_ok,
                            "betas=" + std::to_string(computed) + (kink.empty() ? "" : " " + kink)});
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline RunReport run_campaign(const RunSettings& s) {
    if (s.campaign == "verify") return run_verify(s);
    if (s.campaign == "q2") return run_q2_scan(s);
    if (s.campaign == "oracle") return run_oracle_compare(s);
    if (s.campaign == "epsilon-scan") return run_epsilon_scan(s);
    throw config_error("unknown campaign: " + s.campaign);
}

} // namespace backdisp
