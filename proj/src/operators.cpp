#include "robsim/operators.hpp"

#include <algorithm>
#include <cmath>

namespace robsim {

double VelocityField::max_abs() const {
    double m = 0.0;
    for (double v : u1_) m = std::max(m, std::abs(v));
    for (double v : u2_) m = std::max(m, std::abs(v));
    return m;
}

ScalarField2D vertical_average(const ScalarField3D& f) {
    const DomainSpec& d = f.domain();
    ScalarField2D out(d, f.name());
    const double w = 1.0 / d.nz; // dz * sum over layers, vertical extent 1
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                out.at(i, j) += w * f.at(i, j, k);
    return out;
}

double domain_average(const ScalarField3D& f) {
    double s = 0.0;
    for (double v : f.data()) s += v;
    return s / double(f.size());
}

double domain_average(const ScalarField2D& f) {
    double s = 0.0;
    for (double v : f.data()) s += v;
    return s / double(f.size());
}

FieldNorms norms(const ScalarField3D& f) {
    const DomainSpec& d = f.domain();
    const double vol = d.cell_volume();
    FieldNorms n;
    double s2 = 0.0;
    for (double v : f.data()) {
        s2 += v * v;
        n.linf = std::max(n.linf, std::abs(v));
    }
    n.l2 = std::sqrt(s2 * vol);
    n.h1_semi = std::sqrt(h1_semi_sq(f));
    return n;
}

double h1_semi_sq(const ScalarField3D& f) {
    const DomainSpec& d = f.domain();
    const double dx = d.dx(), dy = d.dy(), dz = d.dz();
    const double vol = d.cell_volume();
    const bool dir0 = (f.bc() == BoundaryKind::dirichlet_zero);
    double s = 0.0;

    // interior face differences, full-cell weight
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 1; i < d.nx; ++i) {
                double g = (f.at(i, j, k) - f.at(i - 1, j, k)) / dx;
                s += g * g * vol;
            }
    for (int k = 0; k < d.nz; ++k)
        for (int j = 1; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                double g = (f.at(i, j, k) - f.at(i, j - 1, k)) / dy;
                s += g * g * vol;
            }
    for (int k = 1; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                double g = (f.at(i, j, k) - f.at(i, j, k - 1)) / dz;
                s += g * g * vol;
            }

    if (dir0) {
        // one-sided wall gradients (value at half spacing), half-cell weight
        for (int k = 0; k < d.nz; ++k)
            for (int j = 0; j < d.ny; ++j) {
                double gl = f.at(0, j, k) / (0.5 * dx);
                double gr = f.at(d.nx - 1, j, k) / (0.5 * dx);
                s += (gl * gl + gr * gr) * 0.5 * vol;
            }
        for (int k = 0; k < d.nz; ++k)
            for (int i = 0; i < d.nx; ++i) {
                double gl = f.at(i, 0, k) / (0.5 * dy);
                double gr = f.at(i, d.ny - 1, k) / (0.5 * dy);
                s += (gl * gl + gr * gr) * 0.5 * vol;
            }
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                double gl = f.at(i, j, 0) / (0.5 * dz);
                double gr = f.at(i, j, d.nz - 1) / (0.5 * dz);
                s += (gl * gl + gr * gr) * 0.5 * vol;
            }
    }
    return s;
}

FieldNorms norms(const ScalarField2D& f) {
    const DomainSpec& d = f.domain();
    const double area = d.cell_area_h();
    const double dx = d.dx(), dy = d.dy();
    FieldNorms n;
    double s2 = 0.0;
    for (double v : f.data()) {
        s2 += v * v;
        n.linf = std::max(n.linf, std::abs(v));
    }
    n.l2 = std::sqrt(s2 * area);

    double h = 0.0;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 1; i < d.nx; ++i) {
            double g = (f.at(i, j) - f.at(i - 1, j)) / dx;
            h += g * g * area;
        }
    for (int j = 1; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            double g = (f.at(i, j) - f.at(i, j - 1)) / dy;
            h += g * g * area;
        }
    n.h1_semi = std::sqrt(h);
    return n;
}

double l2_norm(const VelocityField& v) {
    const double area = v.domain().cell_area_h();
    double s = 0.0;
    for (double x : v.u1_data()) s += x * x;
    for (double x : v.u2_data()) s += x * x;
    return std::sqrt(s * area);
}

double h1_semi_sq(const VelocityField& v) {
    const DomainSpec& d = v.domain();
    const double dx = d.dx(), dy = d.dy();
    const double area = d.cell_area_h();
    double s = 0.0;

    // u1: d/dx at cell centers, d/dy at nodes (odd ghosts at y-walls)
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            double g = (v.u1(i + 1, j) - v.u1(i, j)) / dx;
            s += g * g * area;
        }
    for (int j = 1; j < d.ny; ++j)
        for (int i = 0; i <= d.nx; ++i) {
            double g = (v.u1(i, j) - v.u1(i, j - 1)) / dy;
            s += g * g * area;
        }
    for (int i = 0; i <= d.nx; ++i) {
        double gb = v.u1(i, 0) / (0.5 * dy);
        double gt = v.u1(i, d.ny - 1) / (0.5 * dy);
        s += (gb * gb + gt * gt) * 0.5 * area;
    }

    // u2: d/dy at cell centers, d/dx at nodes (odd ghosts at x-walls)
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            double g = (v.u2(i, j + 1) - v.u2(i, j)) / dy;
            s += g * g * area;
        }
    for (int j = 0; j <= d.ny; ++j)
        for (int i = 1; i < d.nx; ++i) {
            double g = (v.u2(i, j) - v.u2(i - 1, j)) / dx;
            s += g * g * area;
        }
    for (int j = 0; j <= d.ny; ++j) {
        double gl = v.u2(0, j) / (0.5 * dx);
        double gr = v.u2(d.nx - 1, j) / (0.5 * dx);
        s += (gl * gl + gr * gr) * 0.5 * area;
    }
    return s;
}

FieldNorms norms(const VelocityField& v) {
    FieldNorms n;
    n.l2 = l2_norm(v);
    n.h1_semi = std::sqrt(h1_semi_sq(v));
    n.linf = v.max_abs();
    return n;
}

ScalarField2D divergence_h(const VelocityField& v) {
    const DomainSpec& d = v.domain();
    const double dx = d.dx(), dy = d.dy();
    ScalarField2D out(d, "div");
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i)
            out.at(i, j) = (v.u1(i + 1, j) - v.u1(i, j)) / dx +
                           (v.u2(i, j + 1) - v.u2(i, j)) / dy;
    return out;
}

double max_abs_divergence(const VelocityField& v) {
    const DomainSpec& d = v.domain();
    const double dx = d.dx(), dy = d.dy();
    double m = 0.0;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            double div = (v.u1(i + 1, j) - v.u1(i, j)) / dx +
                         (v.u2(i, j + 1) - v.u2(i, j)) / dy;
            m = std::max(m, std::abs(div));
        }
    return m;
}

VelocityField gradient_h(const ScalarField2D& p) {
    const DomainSpec& d = p.domain();
    const double dx = d.dx(), dy = d.dy();
    VelocityField g(d);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 1; i < d.nx; ++i)
            g.u1(i, j) = (p.at(i, j) - p.at(i - 1, j)) / dx;
    for (int j = 1; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i)
            g.u2(i, j) = (p.at(i, j) - p.at(i, j - 1)) / dy;
    return g;
}

double inner_product(const VelocityField& a, const VelocityField& b) {
    const double area = a.domain().cell_area_h();
    double s = 0.0;
    const auto& a1 = a.u1_data();
    const auto& b1 = b.u1_data();
    for (std::size_t n = 0; n < a1.size(); ++n) s += a1[n] * b1[n];
    const auto& a2 = a.u2_data();
    const auto& b2 = b.u2_data();
    for (std::size_t n = 0; n < a2.size(); ++n) s += a2[n] * b2[n];
    return s * area;
}

double inner_product(const ScalarField2D& a, const ScalarField2D& b) {
    const double area = a.domain().cell_area_h();
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += a.data()[n] * b.data()[n];
    return s * area;
}

} // namespace robsim
