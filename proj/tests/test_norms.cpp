#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "backdisp/norms.hpp"
#include "backdisp/profiles.hpp"

using namespace backdisp;

namespace {

RadialSamples power_samples(double amp, double decay, double lo_oct, double hi_oct, int per_oct) {
    RadialSamples f;
    int total = static_cast<int>((hi_oct - lo_oct) * per_oct);
    for (int j = 0; j <= total; ++j) {
        double rho = std::exp2(lo_oct + static_cast<double>(j) / per_oct);
        f.radii.push_back(rho);
        f.values.push_back(cdouble(amp * std::pow(rho, -decay), 0.0));
    }
    return f;
}

} // namespace

TEST_CASE("weighted norm reproduces the pi closed form") {
    // |S^2| int rho^2/(1+rho^2)^2 drho = 4*pi * (pi/4), so the norm is pi
    NormResult r = weighted_sobolev_norm(power_profile(3.0, 3), 1.0, 0);
    REQUIRE_FALSE(r.divergent);
    CHECK(r.value == Catch::Approx(M_PI).epsilon(1e-9));
}

TEST_CASE("coordinate-weighted norm adds the derivative energy in quadrature") {
    RadialFourierProfile p = gaussian_profile(0.35, 3);
    RadialFourierProfile dp;
    dp.dim = p.dim;
    dp.profile = p.profile_derivative;
    dp.profile_derivative = [](double) { return cdouble(0.0, 0.0); };
    dp.label = "derivative-as-profile";

    double beta = 0.75;
    NormResult with = weighted_sobolev_norm(p, beta, 1);
    NormResult base = weighted_sobolev_norm(p, beta, 0);
    NormResult dnorm = weighted_sobolev_norm(dp, beta, 0);
    REQUIRE_FALSE(with.divergent);
    double lhs = with.value * with.value;
    double rhs = base.value * base.value + dnorm.value * dnorm.value;
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));

    CHECK_THROWS_AS(weighted_sobolev_norm(p, beta, 2), std::invalid_argument);
}

TEST_CASE("divergence flag flips exactly at the integrability edge") {
    // profile decay 3 in dimension 3: integrand ~ rho^{2 beta - 4}, edge at beta = 3/2
    RadialFourierProfile p = power_profile(3.0, 3);
    CHECK(weighted_sobolev_norm(p, 1.5, 0).divergent);
    CHECK(weighted_sobolev_norm(p, 1.5 + 1e-3, 0).divergent);
    NormResult fin = weighted_sobolev_norm(p, 1.5 - 1e-3, 0);
    CHECK_FALSE(fin.divergent);
    CHECK(std::isfinite(fin.value));
    CHECK(std::isinf(weighted_sobolev_norm(p, 1.5, 0).value));
}

TEST_CASE("norm is absolutely homogeneous in the profile amplitude") {
    RadialFourierProfile p = gaussian_profile(0.2, 3);
    cdouble c(1.3, -2.4);
    NormResult a = weighted_sobolev_norm(p, 0.6, 1);
    NormResult b = weighted_sobolev_norm(scaled_profile(p, c), 0.6, 1);
    CHECK(b.value == Catch::Approx(std::abs(c) * a.value).epsilon(1e-13));
}

TEST_CASE("compactly supported transforms have every weighted norm finite") {
    RadialFourierProfile p = bandlimited_profile(1.0, 4, 3);
    NormResult r = weighted_sobolev_norm(p, 50.0, 0);
    CHECK_FALSE(r.divergent);
    CHECK(std::isfinite(r.value));
    CHECK(r.value > 0.0);
}

TEST_CASE("sampled L1 norm: homogeneity, positivity, input validation") {
    RadialSamples f = power_samples(2.0, 3.0, 0.0, 14.0, 8);
    NormResult base = l1_alpha_norm(f, 0.5, 3);
    REQUIRE_FALSE(base.divergent);
    CHECK(base.value > 0.0);

    RadialSamples g = f;
    cdouble c(0.0, -4.0);
    for (auto& v : g.values) v *= c;
    NormResult scaled = l1_alpha_norm(g, 0.5, 3);
    CHECK(scaled.value == Catch::Approx(4.0 * base.value).epsilon(1e-14));

    RadialSamples bad = f;
    bad.values.pop_back();
    CHECK_THROWS_AS(l1_alpha_norm(bad, 0.5, 3), std::invalid_argument);
    RadialSamples tiny;
    tiny.radii = {1.0};
    tiny.values = {cdouble(1.0, 0.0)};
    CHECK_THROWS_AS(l1_alpha_norm(tiny, 0.5, 3), std::invalid_argument);
    RadialSamples unsorted = f;
    std::swap(unsorted.radii[3], unsorted.radii[4]);
    CHECK_THROWS_AS(l1_alpha_norm(unsorted, 0.5, 3), std::invalid_argument);
    RadialSamples negative = f;
    negative.radii[0] = -0.5;
    CHECK_THROWS_AS(l1_alpha_norm(negative, 0.5, 3), std::invalid_argument);
}

TEST_CASE("sampled L1 norm flags octave growth as divergence") {
    // decay exactly cancels the weight and volume factors, octave sums grow like 2^k
    RadialSamples f = power_samples(1.0, 2.5, 0.0, 17.0, 16);
    NormResult r = l1_alpha_norm(f, 0.5, 3);
    CHECK(r.divergent);
    CHECK(std::isinf(r.value));

    // decay 3.5 still leaves the log-divergent integrand 1/rho; two orders
    // faster decay makes the octave sums halve and the flag stays off
    RadialSamples m = power_samples(1.0, 3.5, 0.0, 17.0, 16);
    CHECK(l1_alpha_norm(m, 0.5, 3).divergent);
    RadialSamples g = power_samples(1.0, 4.5, 0.0, 17.0, 16);
    CHECK_FALSE(l1_alpha_norm(g, 0.5, 3).divergent);
}

TEST_CASE("holder-scale bound routes through the weighted L1 norm") {
    RadialSamples f = power_samples(1.0, 4.0, 0.0, 14.0, 8);
    NormResult h = holder_upper_bound(f, 0.75, 3);
    NormResult l = l1_alpha_norm(f, 0.75, 3);
    CHECK(h.value == l.value);
    CHECK(h.divergent == l.divergent);
    CHECK_THROWS_AS(holder_upper_bound(f, -0.1, 3), std::invalid_argument);
}

TEST_CASE("decay fit recovers a pure power law and accounts for dropped zeros") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 12; ++i) {
        double r = std::exp2(1.0 + 0.5 * i);
        pts.emplace_back(r, 0.8 * std::pow(r, -1.75));
    }
    // interleave exact zeros, which carry no log-log information
    pts.insert(pts.begin() + 2, {pts[1].first * 1.01, 0.0});
    pts.insert(pts.begin() + 7, {pts[6].first * 1.01, 0.0});

    DecayFit fit = fit_decay_exponent(pts);
    CHECK(fit.exponent == Catch::Approx(1.75).margin(1e-12));
    CHECK(fit.intercept == Catch::Approx(std::log(0.8)).margin(1e-11));
    CHECK(fit.r2 > 1.0 - 1e-12);
    CHECK(fit.r2 <= 1.0);
    CHECK(fit.dropped_zeros == 2);
    CHECK(fit.range_lo == Catch::Approx(2.0));
    CHECK(fit.range_hi == Catch::Approx(std::exp2(6.5)));
}

TEST_CASE("decay fit input validation") {
    std::vector<std::pair<double, double>> few;
    for (int i = 0; i < 10; ++i) few.emplace_back(1.0 + i, i < 3 ? 0.0 : 1.0 / (1.0 + i));
    CHECK_THROWS_AS(fit_decay_exponent(few), std::invalid_argument); // only 7 positive

    std::vector<std::pair<double, double>> unsorted = {{1.0, 1.0}, {3.0, 0.5}, {2.0, 0.7},
                                                       {4.0, 0.4}, {5.0, 0.3}, {6.0, 0.2},
                                                       {7.0, 0.15}, {8.0, 0.1}};
    CHECK_THROWS_AS(fit_decay_exponent(unsorted), std::invalid_argument);

    std::vector<std::pair<double, double>> nonpos = {{0.0, 1.0}, {1.0, 0.5}};
    CHECK_THROWS_AS(fit_decay_exponent(nonpos), std::invalid_argument);
}

TEST_CASE("decay fit reports imperfect fits with r2 below one") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 16; ++i) {
        double r = std::exp2(1.0 + 0.5 * i);
        double wiggle = 1.0 + 0.3 * ((i % 2 == 0) ? 1.0 : -1.0);
        pts.emplace_back(r, wiggle * std::pow(r, -2.0));
    }
    DecayFit fit = fit_decay_exponent(pts);
    CHECK(fit.r2 < 1.0);
    CHECK(fit.r2 > 0.9);
    CHECK(fit.exponent == Catch::Approx(2.0).margin(0.1));
}

TEST_CASE("membership cap is the decay exponent minus half the dimension") {
    CHECK(membership_threshold(2.25, 3) == Catch::Approx(0.75));
    CHECK(membership_threshold(1.0, 2) == Catch::Approx(0.0));
    CHECK_THROWS_AS(membership_threshold(std::numeric_limits<double>::infinity(), 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(membership_threshold(std::nan(""), 3), std::invalid_argument);
}
