#include "robsim/transforms.hpp"

#include <cmath>

#include "robsim/operators.hpp"

namespace robsim {

namespace {
double raw_potential(const std::array<double, 3>& g, double x, double y, double z) {
    return g[0] * x + g[1] * y + g[2] * z + x * x + y * y;
}
} // namespace

double forcing_potential_mean(const DomainSpec& dom, const std::array<double, 3>& g) {
    double s = 0.0;
    for (int k = 0; k < dom.nz; ++k)
        for (int j = 0; j < dom.ny; ++j)
            for (int i = 0; i < dom.nx; ++i)
                s += raw_potential(g, dom.xc(i), dom.yc(j), dom.zc(k));
    return s / double(dom.cells3d());
}

ScalarField3D eval_forcing_potential(const DomainSpec& dom, const std::array<double, 3>& g) {
    ScalarField3D F(dom, "F");
    const double mean = forcing_potential_mean(dom, g);
    for (int k = 0; k < dom.nz; ++k)
        for (int j = 0; j < dom.ny; ++j)
            for (int i = 0; i < dom.nx; ++i)
                F.at(i, j, k) = raw_potential(g, dom.xc(i), dom.yc(j), dom.zc(k)) - mean;
    return F;
}

double vertical_moment_z2(const DomainSpec& dom) {
    double s = 0.0;
    for (int k = 0; k < dom.nz; ++k) {
        const double z = dom.zc(k);
        s += z * z;
    }
    return s / dom.nz;
}

ScalarField3D theta_to_Theta(const ScalarField3D& theta, const PhysicsParams& p,
                             const ScalarField3D& F) {
    const DomainSpec& dom = theta.domain();
    const double C = 2.0 * p.a * vertical_moment_z2(dom);
    ScalarField3D out(dom, "Theta");
    for (int k = 0; k < dom.nz; ++k) {
        const double z = dom.zc(k);
        const double shift = 2.0 * p.a * z * z - C;
        for (int j = 0; j < dom.ny; ++j)
            for (int i = 0; i < dom.nx; ++i)
                out.at(i, j, k) = theta.at(i, j, k) - p.a * F.at(i, j, k) + shift;
    }
    return out;
}

ScalarField3D Theta_to_theta(const ScalarField3D& Theta, const PhysicsParams& p,
                             const ScalarField3D& F) {
    const DomainSpec& dom = Theta.domain();
    const double C = 2.0 * p.a * vertical_moment_z2(dom);
    ScalarField3D out(dom, "theta");
    for (int k = 0; k < dom.nz; ++k) {
        const double z = dom.zc(k);
        const double shift = 2.0 * p.a * z * z - C;
        for (int j = 0; j < dom.ny; ++j)
            for (int i = 0; i < dom.nx; ++i)
                out.at(i, j, k) = Theta.at(i, j, k) + p.a * F.at(i, j, k) - shift;
    }
    return out;
}

ScalarField3D Theta_to_Z(const ScalarField3D& Theta, double alpha,
                         const ScalarField3D& theta_b_hat) {
    const DomainSpec& dom = Theta.domain();
    const double avg = domain_average(Theta);
    ScalarField3D Z(dom, "Z", BoundaryKind::dirichlet_zero);
    for (std::size_t n = 0; n < Z.size(); ++n)
        Z.data()[n] = Theta.data()[n] + alpha * avg - theta_b_hat.data()[n];
    return Z;
}

ScalarField3D Z_to_Theta(const ScalarField3D& Z, double alpha,
                         const ScalarField3D& theta_b_hat) {
    if (alpha == -1.0) throw InvalidAlpha("inverse undefined at alpha = -1");
    const DomainSpec& dom = Z.domain();
    const double c = alpha / (1.0 + alpha);
    const double avg_zt = domain_average(Z) + domain_average(theta_b_hat);
    ScalarField3D Theta(dom, "Theta");
    for (std::size_t n = 0; n < Theta.size(); ++n)
        Theta.data()[n] = Z.data()[n] + theta_b_hat.data()[n] - c * avg_zt;
    return Theta;
}

SpaceFn effective_boundary_data(const DomainSpec& dom, const SpaceFn& theta_b,
                                const PhysicsParams& p) {
    const double a = p.a;
    if (a == 0.0) return theta_b;
    const double Fbar = forcing_potential_mean(dom, p.g);
    const double C = 2.0 * a * vertical_moment_z2(dom);
    const std::array<double, 3> g = p.g;
    return [theta_b, a, Fbar, C, g](double x, double y, double z) {
        const double F = raw_potential(g, x, y, z) - Fbar;
        return theta_b(x, y, z) - a * F + 2.0 * a * z * z - C;
    };
}

namespace {

// walk every boundary face; fn(i1,j1,k1, i2,j2,k2, x,y,z) gets the two
// interior cells nearest the face (for extrapolation) and the face centroid
template <typename Fn>
void for_each_boundary_face(const DomainSpec& dom, const Fn& fn) {
    for (int k = 0; k < dom.nz; ++k)
        for (int j = 0; j < dom.ny; ++j) {
            fn(0, j, k, 1, j, k, 0.0, dom.yc(j), dom.zc(k));
            fn(dom.nx - 1, j, k, dom.nx - 2, j, k, dom.Lx, dom.yc(j), dom.zc(k));
        }
    for (int k = 0; k < dom.nz; ++k)
        for (int i = 0; i < dom.nx; ++i) {
            fn(i, 0, k, i, 1, k, dom.xc(i), 0.0, dom.zc(k));
            fn(i, dom.ny - 1, k, i, dom.ny - 2, k, dom.xc(i), dom.Ly, dom.zc(k));
        }
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) {
            fn(i, j, 0, i, j, 1, dom.xc(i), dom.yc(j), 0.0);
            fn(i, j, dom.nz - 1, i, j, dom.nz - 2, dom.xc(i), dom.yc(j), 1.0);
        }
}

double bc_residual_impl(const ScalarField3D& Z, const ScalarField3D& theta_b_hat,
                        const SpaceFn& theta_b, const PhysicsParams& p,
                        const ScalarField3D& F, bool extrapolate) {
    const DomainSpec& dom = Z.domain();
    const double alpha = p.alpha;
    const double c = alpha / (1.0 + alpha);
    const double avg_zt = domain_average(Z) + domain_average(theta_b_hat);
    const double C = 2.0 * p.a * vertical_moment_z2(dom);
    const double Fbar = forcing_potential_mean(dom, p.g);
    const SpaceFn eff = effective_boundary_data(dom, theta_b, p);

    const ScalarField3D theta = Theta_to_theta(Z_to_Theta(Z, alpha, theta_b_hat), p, F);
    const double avg_theta = domain_average(theta);

    double worst = 0.0;
    for_each_boundary_face(dom, [&](int i1, int j1, int k1, int i2, int j2, int k2, double x,
                                    double y, double z) {
        double z_face, hat_face;
        if (extrapolate) {
            z_face = 1.5 * Z.at(i1, j1, k1) - 0.5 * Z.at(i2, j2, k2);
            hat_face = 1.5 * theta_b_hat.at(i1, j1, k1) - 0.5 * theta_b_hat.at(i2, j2, k2);
        } else {
            const double zin = Z.at(i1, j1, k1);
            z_face = 0.5 * (zin + Z.ghost(zin));
            hat_face = eff(x, y, z);
        }
        const double Theta_face = z_face + hat_face - c * avg_zt;
        const double Fc = p.g[0] * x + p.g[1] * y + p.g[2] * z + x * x + y * y - Fbar;
        const double theta_face = Theta_face + p.a * Fc - 2.0 * p.a * z * z + C;
        worst = std::max(worst, std::abs(theta_face + alpha * avg_theta - theta_b(x, y, z)));
    });
    return worst;
}

} // namespace

double nonlocal_bc_residual(const ScalarField3D& Z, const ScalarField3D& theta_b_hat,
                            const SpaceFn& theta_b, const PhysicsParams& p,
                            const ScalarField3D& F) {
    return bc_residual_impl(Z, theta_b_hat, theta_b, p, F, false);
}

double nonlocal_bc_residual_extrapolated(const ScalarField3D& Z,
                                         const ScalarField3D& theta_b_hat,
                                         const SpaceFn& theta_b, const PhysicsParams& p,
                                         const ScalarField3D& F) {
    return bc_residual_impl(Z, theta_b_hat, theta_b, p, F, true);
}

} // namespace robsim
