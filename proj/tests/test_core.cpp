#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "robsim/field_io.hpp"
#include "robsim/operators.hpp"
#include "support/oracle.hpp"

using namespace robsim;

TEST_CASE("domain spec invariants") {
    CHECK_THROWS_AS(DomainSpec(1.0, 1.0, 3, 8, 8), ValidationError);
    CHECK_THROWS_AS(DomainSpec(-1.0, 1.0, 8, 8, 8), ValidationError);
    DomainSpec d(2.0, 1.0, 8, 4, 4);
    CHECK(d.dx() == doctest::Approx(0.25));
    CHECK(d.dz() == doctest::Approx(0.25));
}

TEST_CASE("vertical average: constants and linear fields") {
    DomainSpec d(1.0, 1.0, 6, 5, 8);
    ScalarField3D f(d, "f");
    f.fill(3.25);
    ScalarField2D m = vertical_average(f);
    for (double v : m.data()) CHECK(v == doctest::Approx(3.25).epsilon(1e-15));

    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) f.at(i, j, k) = d.zc(k);
    m = vertical_average(f);
    for (double v : m.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("vertical average of z^2 matches the direct midpoint sum") {
    DomainSpec d(1.0, 1.0, 4, 4, 8);
    ScalarField3D f(d, "f");
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) f.at(i, j, k) = d.zc(k) * d.zc(k);

    // independent oracle: sum((k+1/2)/8)^2 / 8 over the 8 layers
    double expect = 0.0;
    for (int k = 0; k < 8; ++k) expect += std::pow((k + 0.5) / 8.0, 2) / 8.0;
    CHECK(expect == doctest::Approx(170.0 / 512.0).epsilon(1e-15)); // = 0.33203125

    ScalarField2D m = vertical_average(f);
    for (double v : m.data()) CHECK(v == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("vertical average is linear") {
    DomainSpec d(1.0, 1.0, 5, 6, 7);
    const ScalarField3D f = oracle::random_field3d(d, 11);
    const ScalarField3D g = oracle::random_field3d(d, 12);
    ScalarField3D comb(d, "c");
    for (std::size_t n = 0; n < comb.size(); ++n)
        comb.data()[n] = 2.5 * f.data()[n] - 0.75 * g.data()[n];
    const ScalarField2D mf = vertical_average(f);
    const ScalarField2D mg = vertical_average(g);
    const ScalarField2D mc = vertical_average(comb);
    for (std::size_t n = 0; n < mc.size(); ++n)
        CHECK(mc.data()[n] ==
              doctest::Approx(2.5 * mf.data()[n] - 0.75 * mg.data()[n]).epsilon(1e-13));
}

TEST_CASE("domain average") {
    DomainSpec d(1.0, 1.0, 4, 4, 6);
    ScalarField3D f(d, "f");
    f.fill(-2.0);
    CHECK(domain_average(f) == doctest::Approx(-2.0).epsilon(1e-15));

    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) f.at(i, j, k) = d.zc(k) - 0.5;
    CHECK(std::abs(domain_average(f)) < 1e-15);

    const ScalarField3D r = oracle::random_field3d(d, 5);
    double s = 0.0;
    for (double v : r.data()) s += v;
    CHECK(domain_average(r) == doctest::Approx(s / double(r.size())).epsilon(1e-14));
}

TEST_CASE("norms: zero, constant, and the sine profile") {
    DomainSpec d(2.0, 1.5, 8, 8, 8);
    ScalarField3D f(d, "f");
    FieldNorms n = norms(f);
    CHECK(n.l2 == 0.0);
    CHECK(n.linf == 0.0);
    CHECK(n.h1_semi == 0.0);

    f.fill(1.5);
    n = norms(f);
    CHECK(n.l2 == doctest::Approx(1.5 * std::sqrt(d.volume())).epsilon(1e-14));
    CHECK(n.linf == doctest::Approx(1.5));

    DomainSpec fine(2.0, 1.5, 4, 4, 64);
    ScalarField3D s(fine, "s", BoundaryKind::dirichlet_zero);
    for (int k = 0; k < fine.nz; ++k)
        for (int j = 0; j < fine.ny; ++j)
            for (int i = 0; i < fine.nx; ++i)
                s.at(i, j, k) = std::sin(M_PI * fine.zc(k));
    const double analytic = fine.area_h() / 2.0; // integral of sin^2 over (0,1)
    const double got = norms(s).l2;
    CHECK(got * got == doctest::Approx(analytic).epsilon(4.0 / (64.0 * 64.0)));
}

TEST_CASE("norms are absolutely homogeneous") {
    DomainSpec d(1.0, 1.0, 6, 6, 6);
    const ScalarField3D f = oracle::random_field3d(d, 21, BoundaryKind::dirichlet_zero);
    ScalarField3D g = f;
    for (double& v : g.data()) v *= -3.5;
    const FieldNorms nf = norms(f);
    const FieldNorms ng = norms(g);
    CHECK(ng.l2 == doctest::Approx(3.5 * nf.l2).epsilon(1e-13));
    CHECK(ng.linf == doctest::Approx(3.5 * nf.linf).epsilon(1e-13));
    CHECK(ng.h1_semi == doctest::Approx(3.5 * nf.h1_semi).epsilon(1e-13));
}

TEST_CASE("divergence and gradient basics") {
    DomainSpec d(1.0, 2.0, 8, 6, 4);
    VelocityField v(d);
    CHECK(max_abs_divergence(v) == 0.0);

    ScalarField2D p(d, "p");
    p.fill(7.0);
    VelocityField g = gradient_h(p);
    CHECK(g.max_abs() == 0.0);
}

TEST_CASE("gradient/divergence adjointness to machine precision") {
    DomainSpec d(1.3, 0.9, 10, 8, 4);
    const ScalarField2D p = oracle::random_field2d(d, 31);
    const VelocityField v = oracle::random_velocity(d, 32); // zero boundary faces
    const double lhs = inner_product(gradient_h(p), v);

    double rhs = 0.0;
    const ScalarField2D dv = divergence_h(v);
    rhs = inner_product(p, dv);

    double scale = 0.0;
    for (double x : p.data()) scale = std::max(scale, std::abs(x));
    scale *= v.max_abs() / std::min(d.dx(), d.dy());
    CHECK(std::abs(lhs + rhs) <= 1e-12 * std::max(scale, 1.0));
}

TEST_CASE("divergence-free streamfunction sample") {
    DomainSpec d(1.0, 1.0, 12, 10, 4);
    const VelocityField v = oracle::random_divfree_velocity(d, 77);
    CHECK(max_abs_divergence(v) <= 1e-12 * v.max_abs() / std::min(d.dx(), d.dy()));
}

TEST_CASE("velocity h1 seminorm includes the wall shear") {
    DomainSpec d(1.0, 1.0, 4, 4, 4);
    VelocityField v(d);
    // single interior u1 face; the quadratic form must match a hand count
    v.u1(2, 1) = 1.0;
    const double dx = d.dx(), dy = d.dy(), area = d.cell_area_h();
    // d/dx: two cell-centered differences of magnitude 1/dx
    // d/dy: nodes (2,1) and (2,2) give 1/dy each (interior)
    double expect = (2.0 / (dx * dx) + 2.0 / (dy * dy)) * area;
    CHECK(h1_semi_sq(v) == doctest::Approx(expect).epsilon(1e-13));

    VelocityField w(d);
    w.u1(2, 0) = 1.0; // wall-adjacent: one interior node diff + the wall term
    expect = (2.0 / (dx * dx)) * area + (1.0 / (dy * dy)) * area +
             (2.0 / dy) * (2.0 / dy) * 0.5 * area;
    CHECK(h1_semi_sq(w) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("ROBFIELD snapshots round trip bitwise") {
    DomainSpec d(1.0, 1.0, 6, 5, 4);
    const VelocityField v = oracle::random_velocity(d, 41);
    const std::string path = "io_test_vel.rob";
    write_velocity_snapshot(path, v, 1.25);
    auto [v2, t] = read_velocity_snapshot(path, d);
    CHECK(t == 1.25);
    CHECK(oracle::max_abs_diff(v.u1_data(), v2.u1_data()) == 0.0);
    CHECK(oracle::max_abs_diff(v.u2_data(), v2.u2_data()) == 0.0);

    const ScalarField3D f = oracle::random_field3d(d, 42);
    write_scalar_snapshot("io_test_scalar.rob", f, 0.5);
    auto [f2, t2] = read_scalar_snapshot("io_test_scalar.rob", d);
    CHECK(t2 == 0.5);
    CHECK(oracle::max_abs_diff(f.data(), f2.data()) == 0.0);
    std::remove(path.c_str());
    std::remove("io_test_scalar.rob");
}

TEST_CASE("ROBFIELD header is the documented line") {
    DomainSpec d(1.0, 1.0, 4, 4, 4);
    ScalarField3D f(d, "Z", BoundaryKind::dirichlet_zero);
    write_scalar_snapshot("io_test_hdr.rob", f, 2.0);
    std::ifstream is("io_test_hdr.rob", std::ios::binary);
    std::string header;
    std::getline(is, header);
    CHECK(header == "ROBFIELD v1 name=Z nx=4 ny=4 nz=4 time=2");
    std::remove("io_test_hdr.rob");
}

TEST_CASE("ROBFIELD rejects malformed input") {
    std::istringstream bad("GARBAGE header\n");
    CHECK_THROWS_AS(read_record(bad), ParseError);
    std::istringstream truncated("ROBFIELD v1 name=x nx=2 ny=2 nz=1 time=0\nxx");
    CHECK_THROWS_AS(read_record(truncated), ParseError);
}
