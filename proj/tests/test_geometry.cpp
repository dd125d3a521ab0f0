#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "backdisp/geometry.hpp"
#include "backdisp/quadrature.hpp"
#include "backdisp/vec.hpp"

using namespace backdisp;

TEST_CASE("circle rule integrates trigonometric polynomials exactly") {
    SphericalQuadrature q = sphere_quadrature(2, 10);
    double mass = 0.0, c2 = 0.0, c7 = 0.0;
    for (size_t i = 0; i < q.size(); ++i) {
        double phi = std::atan2(q.nodes[i][1], q.nodes[i][0]);
        mass += q.weights[i];
        c2 += q.weights[i] * std::cos(2.0 * phi);
        c7 += q.weights[i] * std::cos(7.0 * phi);
    }
    CHECK(mass == Catch::Approx(2.0 * M_PI).epsilon(1e-14));
    CHECK(std::abs(c2) < 1e-13);
    CHECK(std::abs(c7) < 1e-13);
}

TEST_CASE("product rule on the 2-sphere reproduces monomial moments") {
    SphericalQuadrature q = sphere_quadrature(3, 8);
    // closed moments: int x^2 = 4pi/3, int x^2 y^2 = 4pi/15, odd powers vanish
    double mass = 0.0, m2 = 0.0, m22 = 0.0, modd = 0.0;
    for (size_t i = 0; i < q.size(); ++i) {
        const Vec& u = q.nodes[i];
        mass += q.weights[i];
        m2 += q.weights[i] * u[0] * u[0];
        m22 += q.weights[i] * u[0] * u[0] * u[1] * u[1];
        modd += q.weights[i] * u[2] * u[0] * u[0];
    }
    CHECK(mass == Catch::Approx(4.0 * M_PI).epsilon(1e-14));
    CHECK(m2 == Catch::Approx(4.0 * M_PI / 3.0).epsilon(1e-13));
    CHECK(m22 == Catch::Approx(4.0 * M_PI / 15.0).epsilon(1e-13));
    CHECK(std::abs(modd) < 1e-13);
}

TEST_CASE("graded rule resolves integrands concentrated at the pole") {
    // f(u) = exp(-400 (1-u)) lives in a cap of width 1/400 at the north pole;
    // 1-d reference: 2 pi int_{-1}^{1} f du = (pi/100)(1 - e^{-800})
    double exact = 2.0 * M_PI * (1.0 - std::exp(-800.0)) / 400.0;
    auto eval = [](const SphericalQuadrature& q) {
        double s = 0.0;
        for (size_t i = 0; i < q.size(); ++i)
            s += q.weights[i] * std::exp(-400.0 * (1.0 - q.nodes[i][2]));
        return s;
    };
    SphericalQuadrature flat = sphere_quadrature(3, 16);
    SphericalQuadrature graded = polar_graded_quadrature(3, 16, 16);
    double err_flat = std::abs(eval(flat) - exact) / exact;
    double err_graded = std::abs(eval(graded) - exact) / exact;
    CHECK(err_graded < 1e-10);
    CHECK(err_graded < err_flat * 1e-3);
}

TEST_CASE("graded rule keeps total mass and smooth integrals") {
    for (int dim : {2, 3}) {
        SphericalQuadrature q = polar_graded_quadrature(dim, 12, 14);
        double mass = 0.0, smooth = 0.0;
        for (size_t i = 0; i < q.size(); ++i) {
            mass += q.weights[i];
            smooth += q.weights[i] * std::exp(0.5 * q.nodes[i][0]);
        }
        CHECK(mass == Catch::Approx(unit_sphere_area(dim)).epsilon(1e-13));
        // reference from the plain rule, which is spectrally exact here
        SphericalQuadrature ref = sphere_quadrature(dim, 40);
        double smooth_ref = 0.0;
        for (size_t i = 0; i < ref.size(); ++i)
            smooth_ref += ref.weights[i] * std::exp(0.5 * ref.nodes[i][0]);
        CHECK(smooth == Catch::Approx(smooth_ref).epsilon(1e-12));
    }
}

TEST_CASE("oriented copies rotate nodes but preserve the measure") {
    SphericalQuadrature q = sphere_quadrature(3, 10);
    Vec axis = Vec(1.0, -2.0, 0.5).unit();
    SphericalQuadrature o = oriented(q, axis);
    REQUIRE(o.size() == q.size());
    double wsum = 0.0;
    for (size_t i = 0; i < o.size(); ++i) {
        wsum += o.weights[i];
        CHECK(o.nodes[i].norm() == Catch::Approx(1.0).epsilon(1e-13));
        // polar angle against the new axis equals the original against e_z
        CHECK(o.nodes[i].dot(axis) == Catch::Approx(q.nodes[i][2]).margin(1e-13));
    }
    CHECK(wsum == Catch::Approx(4.0 * M_PI).epsilon(1e-14));
}

TEST_CASE("rotation_to_axis handles the antipodal and aligned branches") {
    Vec pole(0.0, 0.0, 1.0);
    CHECK((rotation_to_axis(pole).apply(pole) - pole).norm() < 1e-15);
    Vec anti(0.0, 0.0, -1.0);
    CHECK((rotation_to_axis(anti).apply(pole) - anti).norm() < 1e-15);
    Vec skew = Vec(0.3, -0.9, 0.9).unit();
    Rotation R = rotation_to_axis(skew);
    CHECK((R.apply(pole) - skew).norm() < 1e-14);
    // orthogonality: inner products survive
    Vec u = Vec(1.0, 2.0, 3.0), v = Vec(-2.0, 0.4, 1.1);
    CHECK(R.apply(u).dot(R.apply(v)) == Catch::Approx(u.dot(v)).epsilon(1e-13));
}

TEST_CASE("orthonormal_complement produces a right frame and is deterministic") {
    Vec axis = Vec(0.2, 0.4, -0.6);
    auto f1 = orthonormal_complement(axis);
    auto f2 = orthonormal_complement(axis);
    CHECK((f1[0] - f2[0]).norm() == 0.0);
    CHECK(std::abs(f1[0].dot(f1[1])) < 1e-15);
    CHECK(std::abs(f1[0].dot(axis.unit())) < 1e-15);
    CHECK(std::abs(f1[1].dot(axis.unit())) < 1e-15);
    CHECK(f1[0].norm() == Catch::Approx(1.0));
    CHECK(f1[1].norm() == Catch::Approx(1.0));
    // fallback branch: axis along the first coordinate direction
    auto g = orthonormal_complement(Vec(1.0, 1e-12, 0.0));
    CHECK(std::abs(g[0].dot(Vec(1.0, 1e-12, 0.0).unit())) < 1e-10);
}

TEST_CASE("ewald sphere carries the midpoint center and proportional radius") {
    Vec eta(1.0, -2.0, 2.0);
    SphereDescriptor g = ewald_sphere(eta, 0.75);
    CHECK((g.center - 0.5 * eta).norm() < 1e-15);
    CHECK(g.radius == Catch::Approx(0.75 * 1.5));
    CHECK_THROWS_AS(ewald_sphere(Vec::zero(3), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ewald_sphere(eta, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ewald_sphere(eta, -2.0), std::invalid_argument);
}

TEST_CASE("dual surface swaps roles with the ewald family") {
    Vec xi(0.8, 0.1, -0.4);
    SphericalQuadrature q = sphere_quadrature(3, 10);

    for (double r : {0.4, 2.5}) {
        SurfaceDescriptor nr = nr_surface(xi, r);
        REQUIRE(nr.kind == SurfaceDescriptor::Kind::sphere);
        for (size_t i = 0; i < q.size(); ++i) {
            Vec eta = nr.sphere.center + nr.sphere.radius * q.nodes[i];
            // eta on the dual surface <=> xi on the ewald sphere of eta
            double lhs = (xi - 0.5 * eta).norm();
            CHECK(lhs == Catch::Approx(0.5 * r * eta.norm()).epsilon(1e-12));
        }
    }

    SurfaceDescriptor hp = nr_surface(xi, 1.0);
    REQUIRE(hp.kind == SurfaceDescriptor::Kind::hyperplane);
    CHECK((hp.normal - xi.unit()).norm() < 1e-15);
    CHECK(hp.offset == Catch::Approx(xi.norm()));
    auto frame = orthonormal_complement(hp.normal);
    for (double t : {0.3, 1.7}) {
        Vec eta = xi + (t * xi.norm()) * frame[1];
        CHECK((xi - 0.5 * eta).norm() == Catch::Approx(0.5 * eta.norm()).epsilon(1e-12));
    }
}

TEST_CASE("integrate_sphere matches the zonal closed form for a gaussian") {
    // int_{S_rho(c)} e^{-|z|^2} dsigma = 2 pi rho/d * e^{-(d^2+rho^2)} sinh(2 d rho),
    // d = |c|; reduces to 4 pi rho^2 e^{-rho^2} as d -> 0
    Vec c(0.7, -0.3, 0.2);
    double d = c.norm(), rho = 1.4;
    SphereDescriptor s{c, rho, 3};
    cdouble got = integrate_sphere([](const Vec& z) { return std::exp(-z.norm2()); }, s,
                                   sphere_quadrature(3, 40));
    double exact = 2.0 * M_PI * rho / d * std::exp(-(d * d + rho * rho)) * std::sinh(2.0 * d * rho);
    CHECK(got.real() == Catch::Approx(exact).epsilon(1e-12));
    CHECK(std::abs(got.imag()) < 1e-14);

    SphericalQuadrature wrong_dim = sphere_quadrature(2, 10);
    CHECK_THROWS_AS(integrate_sphere([](const Vec&) { return 1.0; }, s, wrong_dim),
                    std::invalid_argument);
}

TEST_CASE("disc through the origin: area, odd moments, radial gaussian") {
    Vec xi(0.0, 0.0, 2.0);
    SphericalQuadrature circ = sphere_quadrature(2, 16);

    cdouble area = integrate_hyperplane_disc([](const Vec&) { return 1.0; }, xi, circ);
    CHECK(area.real() == Catch::Approx(4.0 * M_PI).epsilon(1e-13));

    cdouble odd = integrate_hyperplane_disc([&](const Vec& v) { return v.dot(Vec(1.0, 0.0, 0.0)); },
                                            xi, circ);
    CHECK(std::abs(odd) < 1e-13);

    cdouble g = integrate_hyperplane_disc([](const Vec& v) { return std::exp(-v.norm2()); }, xi, circ);
    double gexact = M_PI * (1.0 - std::exp(-4.0));
    CHECK(g.real() == Catch::Approx(gexact).epsilon(1e-8));

    // every disc point lies in the hyperplane through the origin
    double worst = 0.0;
    integrate_hyperplane_disc([&](const Vec& v) {
        worst = std::max(worst, std::abs(v.dot(xi)));
        return 0.0;
    }, xi, circ);
    CHECK(worst < 1e-13);

    CHECK_THROWS_AS(integrate_hyperplane_disc([](const Vec&) { return 1.0; }, Vec::zero(3), circ),
                    std::invalid_argument);
}

TEST_CASE("disc degenerates to a symmetric segment in the plane") {
    Vec xi(1.2, -0.9);
    double R = xi.norm();
    SphericalQuadrature dummy;
    dummy.order = 20;
    cdouble len = integrate_hyperplane_disc([](const Vec&) { return 1.0; }, xi, dummy);
    CHECK(len.real() == Catch::Approx(2.0 * R).epsilon(1e-13));
    cdouble g = integrate_hyperplane_disc([](const Vec& v) { return std::exp(-v.norm2()); }, xi, dummy);
    CHECK(g.real() == Catch::Approx(std::sqrt(M_PI) * std::erf(R)).epsilon(1e-10));
}
