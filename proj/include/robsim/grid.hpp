#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "robsim/errors.hpp"

namespace robsim {

/// Uniform staggered (MAC) grid over the box (0,Lx) x (0,Ly) x (0,1).
/// Horizontal velocity components live on face centers, scalars on cell
/// centers. The vertical extent is fixed at 1.
struct DomainSpec {
    double Lx = 1.0;
    double Ly = 1.0;
    int nx = 64;
    int ny = 64;
    int nz = 8;

    DomainSpec() = default;
    DomainSpec(double Lx, double Ly, int nx, int ny, int nz)
        : Lx(Lx), Ly(Ly), nx(nx), ny(ny), nz(nz) {
        if (nx < 4 || ny < 4 || nz < 4)
            throw ValidationError("domain", "cell counts must be >= 4");
        if (!(Lx > 0.0) || !(Ly > 0.0))
            throw ValidationError("domain", "extents must be positive");
    }

    double dx() const { return Lx / nx; }
    double dy() const { return Ly / ny; }
    double dz() const { return 1.0 / nz; }
    double cell_volume() const { return dx() * dy() * dz(); }
    double cell_area_h() const { return dx() * dy(); }
    double volume() const { return Lx * Ly; }       // |Omega| (vertical extent 1)
    double area_h() const { return Lx * Ly; }       // |Omega_h|

    // cell-center coordinates
    double xc(int i) const { return (i + 0.5) * dx(); }
    double yc(int j) const { return (j + 0.5) * dy(); }
    double zc(int k) const { return (k + 0.5) * dz(); }
    // face coordinates
    double xf(int i) const { return i * dx(); }
    double yf(int j) const { return j * dy(); }
    double zf(int k) const { return k * dz(); }

    std::size_t cells3d() const { return std::size_t(nx) * ny * nz; }
    std::size_t cells2d() const { return std::size_t(nx) * ny; }

    bool operator==(const DomainSpec&) const = default;
};

/// How ghost values are synthesized when an operator reaches across the
/// boundary of a cell-centered field.
///   none           - no boundary constraint; boundary-aware operators use
///                    interior data only.
///   dirichlet_zero - homogeneous Dirichlet trace: ghost = -interior, so the
///                    face value is exactly zero (Z-type fields).
enum class BoundaryKind { none, dirichlet_zero };

/// Cell-centered scalar on the full 3-D box, index order i fastest:
/// idx = (k*ny + j)*nx + i.
class ScalarField3D {
public:
    ScalarField3D() = default;
    ScalarField3D(const DomainSpec& dom, std::string name,
                  BoundaryKind bc = BoundaryKind::none)
        : dom_(dom), name_(std::move(name)), bc_(bc), v_(dom.cells3d(), 0.0) {}

    const DomainSpec& domain() const { return dom_; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    BoundaryKind bc() const { return bc_; }
    void set_bc(BoundaryKind b) { bc_ = b; }

    double& at(int i, int j, int k) { return v_[idx(i, j, k)]; }
    double at(int i, int j, int k) const { return v_[idx(i, j, k)]; }
    std::size_t idx(int i, int j, int k) const {
        return (std::size_t(k) * dom_.ny + j) * dom_.nx + i;
    }

    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }
    std::size_t size() const { return v_.size(); }

    void fill(double c) { v_.assign(v_.size(), c); }

    /// Ghost value just outside the given cell across direction dir
    /// (0:x, 1:y, 2:z); `cell` is the interior value adjacent to the wall.
    double ghost(double cell) const {
        return bc_ == BoundaryKind::dirichlet_zero ? -cell : cell;
    }

private:
    DomainSpec dom_;
    std::string name_;
    BoundaryKind bc_ = BoundaryKind::none;
    std::vector<double> v_;
};

/// Cell-centered scalar on the horizontal box, idx = j*nx + i.
class ScalarField2D {
public:
    ScalarField2D() = default;
    ScalarField2D(const DomainSpec& dom, std::string name = {})
        : dom_(dom), name_(std::move(name)), v_(dom.cells2d(), 0.0) {}

    const DomainSpec& domain() const { return dom_; }
    const std::string& name() const { return name_; }

    double& at(int i, int j) { return v_[std::size_t(j) * dom_.nx + i]; }
    double at(int i, int j) const { return v_[std::size_t(j) * dom_.nx + i]; }

    std::vector<double>& data() { return v_; }
    const std::vector<double>& data() const { return v_; }
    std::size_t size() const { return v_.size(); }

    void fill(double c) { v_.assign(v_.size(), c); }

private:
    DomainSpec dom_;
    std::string name_;
    std::vector<double> v_;
};

/// Staggered horizontal velocity. u1 sits on x-normal faces ((nx+1) x ny),
/// u2 on y-normal faces (nx x (ny+1)). Normal components on the walls
/// (i = 0, nx for u1; j = 0, ny for u2) are pinned to zero; tangential
/// no-slip enters stencils through odd ghost reflection.
class VelocityField {
public:
    VelocityField() = default;
    explicit VelocityField(const DomainSpec& dom)
        : dom_(dom),
          u1_(std::size_t(dom.nx + 1) * dom.ny, 0.0),
          u2_(std::size_t(dom.nx) * (dom.ny + 1), 0.0) {}

    const DomainSpec& domain() const { return dom_; }

    double& u1(int i, int j) { return u1_[std::size_t(j) * (dom_.nx + 1) + i]; }
    double u1(int i, int j) const { return u1_[std::size_t(j) * (dom_.nx + 1) + i]; }
    double& u2(int i, int j) { return u2_[std::size_t(j) * dom_.nx + i]; }
    double u2(int i, int j) const { return u2_[std::size_t(j) * dom_.nx + i]; }

    std::vector<double>& u1_data() { return u1_; }
    const std::vector<double>& u1_data() const { return u1_; }
    std::vector<double>& u2_data() { return u2_; }
    const std::vector<double>& u2_data() const { return u2_; }

    void fill(double c) {
        u1_.assign(u1_.size(), c);
        u2_.assign(u2_.size(), c);
        enforce_noslip();
    }

    /// Zero the wall-normal boundary faces.
    void enforce_noslip() {
        for (int j = 0; j < dom_.ny; ++j) {
            u1(0, j) = 0.0;
            u1(dom_.nx, j) = 0.0;
        }
        for (int i = 0; i < dom_.nx; ++i) {
            u2(i, 0) = 0.0;
            u2(i, dom_.ny) = 0.0;
        }
    }

    double max_abs() const;

private:
    DomainSpec dom_;
    std::vector<double> u1_, u2_;
};

} // namespace robsim
