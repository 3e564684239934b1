#include <doctest.h>

#include <cmath>

#include "robsim/elliptic.hpp"
#include "robsim/operators.hpp"
#include "robsim/transforms.hpp"
#include "support/oracle.hpp"

using namespace robsim;

TEST_CASE("forcing potential: normalization and gradient") {
    DomainSpec d(1.0, 1.0, 16, 16, 8);
    std::array<double, 3> g = {0.0, 0.0, 0.0};
    ScalarField3D F = eval_forcing_potential(d, g);
    CHECK(std::abs(domain_average(F)) <= 1e-13);
    // raw potential minus mean at a probe cell
    const double mean = forcing_potential_mean(d, g);
    CHECK(F.at(3, 5, 2) ==
          doctest::Approx(d.xc(3) * d.xc(3) + d.yc(5) * d.yc(5) - mean).epsilon(1e-14));

    // horizontal differences of cell values reproduce the analytic gradient
    // exactly (the potential is quadratic)
    g = {0.7, -0.3, 0.2};
    F = eval_forcing_potential(d, g);
    for (int j : {0, 7, 15})
        for (int i : {1, 8, 15}) {
            const double got = (F.at(i, j, 3) - F.at(i - 1, j, 3)) / d.dx();
            CHECK(got == doctest::Approx(g[0] + 2.0 * d.xf(i)).epsilon(1e-12));
        }
    for (int j : {1, 8, 15}) {
        const double got = (F.at(4, j, 3) - F.at(4, j - 1, 3)) / d.dy();
        CHECK(got == doctest::Approx(g[1] + 2.0 * d.yf(j)).epsilon(1e-12));
    }
}

TEST_CASE("forcing potential is invariant under constant shifts of the raw potential") {
    DomainSpec d(1.0, 1.0, 8, 8, 8);
    const std::array<double, 3> g = {0.4, 0.0, -1.0};
    ScalarField3D F = eval_forcing_potential(d, g);
    // shift the raw potential by a constant and renormalize by hand
    const double mean = forcing_potential_mean(d, g);
    ScalarField3D shifted(d, "F2");
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                const double raw = g[0] * d.xc(i) + g[1] * d.yc(j) + g[2] * d.zc(k) +
                                   d.xc(i) * d.xc(i) + d.yc(j) * d.yc(j) + 5.0;
                shifted.at(i, j, k) = raw - (mean + 5.0);
            }
    CHECK(oracle::max_abs_diff(F.data(), shifted.data()) <= 1e-13);
}

TEST_CASE("theta <-> Theta round trip and special cases") {
    DomainSpec d(1.0, 1.0, 8, 8, 8);
    PhysicsParams p;
    p.a = 0.0;
    const ScalarField3D F = eval_forcing_potential(d, p.g);
    const ScalarField3D theta = oracle::random_field3d(d, 7);
    ScalarField3D Theta = theta_to_Theta(theta, p, F);
    CHECK(oracle::max_abs_diff(Theta.data(), theta.data()) == 0.0);

    p.a = 1.0;
    ScalarField3D zero(d, "theta");
    Theta = theta_to_Theta(zero, p, F);
    double C = 0.0;
    for (int k = 0; k < d.nz; ++k) C += 2.0 * d.zc(k) * d.zc(k) * d.dz();
    CHECK(C == doctest::Approx(2.0 * 170.0 / 512.0).epsilon(1e-15));
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                CHECK(Theta.at(i, j, k) ==
                      doctest::Approx(-F.at(i, j, k) + 2.0 * d.zc(k) * d.zc(k) - C)
                          .epsilon(1e-13));

    p.a = -0.7;
    p.g = {0.2, 0.1, 0.9};
    const ScalarField3D F2 = eval_forcing_potential(d, p.g);
    const ScalarField3D rt = Theta_to_theta(theta_to_Theta(theta, p, F2), p, F2);
    CHECK(oracle::max_abs_diff(rt.data(), theta.data()) <= 1e-13);
}

TEST_CASE("Theta <-> Z: constants, alpha = 0, and the average identity") {
    DomainSpec d(1.0, 1.0, 8, 8, 8);
    ScalarField3D hat(d, "hat"); // zero boundary extension
    ScalarField3D Theta(d, "Theta");
    Theta.fill(2.0);
    const double alpha = 0.4;
    ScalarField3D Z = Theta_to_Z(Theta, alpha, hat);
    for (double v : Z.data()) CHECK(v == doctest::Approx((1.0 + alpha) * 2.0).epsilon(1e-14));

    const ScalarField3D r = oracle::random_field3d(d, 13);
    hat = oracle::random_field3d(d, 14);
    Z = Theta_to_Z(r, 0.0, hat);
    for (std::size_t n = 0; n < Z.size(); ++n)
        CHECK(Z.data()[n] == doctest::Approx(r.data()[n] - hat.data()[n]).epsilon(1e-14));

    Z = Theta_to_Z(r, alpha, hat);
    CHECK(domain_average(Z) ==
          doctest::Approx((1.0 + alpha) * domain_average(r) - domain_average(hat))
              .epsilon(1e-12));
    const ScalarField3D back = Z_to_Theta(Z, alpha, hat);
    CHECK(oracle::max_abs_diff(back.data(), r.data()) <= 1e-13);
}

TEST_CASE("Z_to_Theta rejects alpha = -1") {
    DomainSpec d(1.0, 1.0, 4, 4, 4);
    ScalarField3D Z(d, "Z", BoundaryKind::dirichlet_zero), hat(d, "hat");
    CHECK_THROWS_AS(Z_to_Theta(Z, -1.0, hat), InvalidAlpha);
}

TEST_CASE("round trips stay exact on a batch of random fields") {
    DomainSpec d(1.0, 1.0, 8, 8, 8);
    PhysicsParams p;
    p.a = 0.8;
    p.alpha = 0.4;
    p.g = {0.3, -0.2, 1.0};
    const ScalarField3D F = eval_forcing_potential(d, p.g);
    const ScalarField3D hat = oracle::random_field3d(d, 99);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const ScalarField3D theta = oracle::random_field3d(d, 1000 + seed);
        const ScalarField3D Theta = theta_to_Theta(theta, p, F);
        const ScalarField3D theta_rt = Theta_to_theta(Theta, p, F);
        CHECK(oracle::max_abs_diff(theta_rt.data(), theta.data()) <= 1e-13);
        const ScalarField3D Z = Theta_to_Z(Theta, p.alpha, hat);
        const ScalarField3D Theta_rt = Z_to_Theta(Z, p.alpha, hat);
        CHECK(oracle::max_abs_diff(Theta_rt.data(), Theta.data()) <= 1e-13);
    }
}

TEST_CASE("effective boundary data") {
    DomainSpec d(1.0, 1.0, 8, 8, 8);
    PhysicsParams p;
    auto tb = [](double x, double y, double z) { return std::sin(x + y) + z; };

    p.a = 0.0;
    SpaceFn eff = effective_boundary_data(d, tb, p);
    CHECK(eff(0.3, 0.7, 1.0) == tb(0.3, 0.7, 1.0));

    p.a = 1.0;
    p.g = {0.0, 0.0, 0.0};
    SpaceFn eff0 = effective_boundary_data(d, [](double, double, double) { return 0.0; }, p);
    const double Fbar = forcing_potential_mean(d, p.g);
    const double C = 2.0 * vertical_moment_z2(d);
    const double x = 0.25, y = 0.0, z = 0.625; // a y-wall centroid
    CHECK(eff0(x, y, z) ==
          doctest::Approx(-(x * x + y * y - Fbar) + 2.0 * z * z - C).epsilon(1e-13));

    // top/bottom difference at the same horizontal point is 2a when g = 0
    // apart from the F terms (identical for both faces)
    p.a = 0.7;
    SpaceFn effc = effective_boundary_data(d, [](double, double, double) { return 3.0; }, p);
    CHECK(effc(0.5, 0.5, 1.0) - effc(0.5, 0.5, 0.0) == doctest::Approx(2.0 * p.a).epsilon(1e-13));
}

TEST_CASE("nonlocal boundary relation holds for consistent fields and flags corruption") {
    DomainSpec d(1.0, 1.0, 8, 8, 8);
    PhysicsParams p;
    p.a = 0.5;
    p.alpha = 0.4;
    p.g = {0.1, 0.0, -0.5};
    auto tb = [](double x, double y, double z) { return 0.3 * std::sin(x) + 0.2 * y * z; };
    const ScalarField3D F = eval_forcing_potential(d, p.g);
    const ScalarField3D hat =
        harmonic_extension(d, effective_boundary_data(d, tb, p));
    const ScalarField3D Z = oracle::random_field3d(d, 7, BoundaryKind::dirichlet_zero);

    CHECK(nonlocal_bc_residual(Z, hat, tb, p, F) <= 1e-12);

    // the extrapolated form reads face values out of the interior data: it is
    // O(h^2) for a smooth consistent Z and flags an extension built from the
    // wrong boundary data
    ScalarField3D smoothZ(d, "Z", BoundaryKind::dirichlet_zero);
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                smoothZ.at(i, j, k) = std::sin(M_PI * d.xc(i)) * std::sin(M_PI * d.yc(j)) *
                                      std::sin(M_PI * d.zc(k));
    const double h = std::max({d.dx(), d.dy(), d.dz()});
    CHECK(nonlocal_bc_residual_extrapolated(smoothZ, hat, tb, p, F) <= 20.0 * h * h);

    ScalarField3D wrong = hat;
    for (double& v : wrong.data()) v = 2.0 * v + 0.05;
    CHECK(nonlocal_bc_residual_extrapolated(smoothZ, wrong, tb, p, F) > 1e-2);
}
