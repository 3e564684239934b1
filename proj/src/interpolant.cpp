#include "robsim/interpolant.hpp"

#include <cmath>
#include <cstdio>

#include "robsim/operators.hpp"

namespace robsim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

InterpolantSpec InterpolantSpec::parse(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw ParseError("interpolant spec must be volume:<delta> or spectral:<delta>, got '" +
                         s + "'");
    const std::string head = s.substr(0, colon);
    InterpolantSpec spec;
    if (head == "volume")
        spec.kind = Kind::volume;
    else if (head == "spectral")
        spec.kind = Kind::spectral;
    else
        throw ParseError("unknown interpolant kind '" + head + "'");
    try {
        spec.delta = std::stod(s.substr(colon + 1));
    } catch (const std::exception&) {
        throw ParseError("bad interpolant scale in '" + s + "'");
    }
    if (!(spec.delta > 0.0)) throw ParseError("interpolant scale must be > 0");
    return spec;
}

std::string InterpolantSpec::to_string() const {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", delta);
    return std::string(kind == Kind::volume ? "volume:" : "spectral:") + buf;
}

int InterpolantSpec::coarse_nx(const DomainSpec& dom) const {
    return int(std::ceil(dom.Lx / delta - 1e-12));
}
int InterpolantSpec::coarse_ny(const DomainSpec& dom) const {
    return int(std::ceil(dom.Ly / delta - 1e-12));
}

Interpolant::Interpolant(const InterpolantSpec& spec, const DomainSpec& dom)
    : spec_(spec), dom_(dom), mx_(spec.coarse_nx(dom)), my_(spec.coarse_ny(dom)) {
    if (!(spec.delta > 0.0) || spec.delta > std::min(dom.Lx, dom.Ly))
        throw SpecMismatch("interpolant scale " + std::to_string(spec.delta) +
                           " outside (0, min(Lx,Ly)]");
    if (mx_ < 1 || my_ < 1 || mx_ > dom.nx || my_ > dom.ny)
        throw SpecMismatch("coarse resolution out of range");
    if (spec.kind == InterpolantSpec::Kind::spectral && (mx_ >= dom.nx || my_ >= dom.ny))
        throw SpecMismatch("spectral cutoff must stay below the grid Nyquist mode");
    if (spec.kind == InterpolantSpec::Kind::volume &&
        (dom.nx % mx_ != 0 || dom.ny % my_ != 0))
        throw SpecMismatch("coarse cells must evenly tile the fine grid (" +
                           std::to_string(mx_) + "x" + std::to_string(my_) + " vs " +
                           std::to_string(dom.nx) + "x" + std::to_string(dom.ny) + ")");
}

void Interpolant::centers_from_faces(const VelocityField& v, std::vector<double>& c1,
                                     std::vector<double>& c2) const {
    c1.assign(dom_.cells2d(), 0.0);
    c2.assign(dom_.cells2d(), 0.0);
    for (int j = 0; j < dom_.ny; ++j)
        for (int i = 0; i < dom_.nx; ++i) {
            c1[std::size_t(j) * dom_.nx + i] = 0.5 * (v.u1(i, j) + v.u1(i + 1, j));
            c2[std::size_t(j) * dom_.nx + i] = 0.5 * (v.u2(i, j) + v.u2(i, j + 1));
        }
}

VelocityField Interpolant::faces_from_centers(const std::vector<double>& c1,
                                              const std::vector<double>& c2) const {
    VelocityField v(dom_);
    for (int j = 0; j < dom_.ny; ++j)
        for (int i = 1; i < dom_.nx; ++i)
            v.u1(i, j) = 0.5 * (c1[std::size_t(j) * dom_.nx + i - 1] +
                                c1[std::size_t(j) * dom_.nx + i]);
    for (int j = 1; j < dom_.ny; ++j)
        for (int i = 0; i < dom_.nx; ++i)
            v.u2(i, j) = 0.5 * (c2[std::size_t(j - 1) * dom_.nx + i] +
                                c2[std::size_t(j) * dom_.nx + i]);
    return v;
}

CoarseVelocity Interpolant::restrict(const VelocityField& v) const {
    std::vector<double> c1, c2;
    centers_from_faces(v, c1, c2);
    CoarseVelocity out;
    if (spec_.kind == InterpolantSpec::Kind::volume) {
        const int px = dom_.nx / mx_, py = dom_.ny / my_;
        out.c1.assign(std::size_t(mx_) * my_, 0.0);
        out.c2.assign(std::size_t(mx_) * my_, 0.0);
        const double w = 1.0 / double(px * py);
        for (int J = 0; J < my_; ++J)
            for (int I = 0; I < mx_; ++I) {
                double s1 = 0.0, s2 = 0.0;
                for (int j = J * py; j < (J + 1) * py; ++j)
                    for (int i = I * px; i < (I + 1) * px; ++i) {
                        s1 += c1[std::size_t(j) * dom_.nx + i];
                        s2 += c2[std::size_t(j) * dom_.nx + i];
                    }
                out.c1[std::size_t(J) * mx_ + I] = s1 * w;
                out.c2[std::size_t(J) * mx_ + I] = s2 * w;
            }
    } else {
        // sine coefficients a(kx,ky), 1-based modes, cell-centered samples
        out.c1.assign(std::size_t(mx_) * my_, 0.0);
        out.c2.assign(std::size_t(mx_) * my_, 0.0);
        const double w = 4.0 / double(dom_.nx * dom_.ny);
        for (int ky = 1; ky <= my_; ++ky)
            for (int kx = 1; kx <= mx_; ++kx) {
                double a1 = 0.0, a2 = 0.0;
                for (int j = 0; j < dom_.ny; ++j) {
                    const double sy = std::sin(ky * kPi * (j + 0.5) / dom_.ny);
                    for (int i = 0; i < dom_.nx; ++i) {
                        const double s = std::sin(kx * kPi * (i + 0.5) / dom_.nx) * sy;
                        a1 += c1[std::size_t(j) * dom_.nx + i] * s;
                        a2 += c2[std::size_t(j) * dom_.nx + i] * s;
                    }
                }
                out.c1[std::size_t(ky - 1) * mx_ + (kx - 1)] = w * a1;
                out.c2[std::size_t(ky - 1) * mx_ + (kx - 1)] = w * a2;
            }
    }
    return out;
}

VelocityField Interpolant::prolong(const CoarseVelocity& c) const {
    if (c.c1.size() != std::size_t(mx_) * my_ || c.c2.size() != std::size_t(mx_) * my_)
        throw SpecMismatch("coarse observation size does not match interpolant");
    std::vector<double> c1(dom_.cells2d()), c2(dom_.cells2d());
    if (spec_.kind == InterpolantSpec::Kind::volume) {
        const int px = dom_.nx / mx_, py = dom_.ny / my_;
        for (int j = 0; j < dom_.ny; ++j)
            for (int i = 0; i < dom_.nx; ++i) {
                const std::size_t b = std::size_t(j / py) * mx_ + (i / px);
                c1[std::size_t(j) * dom_.nx + i] = c.c1[b];
                c2[std::size_t(j) * dom_.nx + i] = c.c2[b];
            }
    } else {
        for (int j = 0; j < dom_.ny; ++j)
            for (int i = 0; i < dom_.nx; ++i) {
                double s1 = 0.0, s2 = 0.0;
                for (int ky = 1; ky <= my_; ++ky) {
                    const double sy = std::sin(ky * kPi * (j + 0.5) / dom_.ny);
                    for (int kx = 1; kx <= mx_; ++kx) {
                        const double s = std::sin(kx * kPi * (i + 0.5) / dom_.nx) * sy;
                        s1 += c.c1[std::size_t(ky - 1) * mx_ + (kx - 1)] * s;
                        s2 += c.c2[std::size_t(ky - 1) * mx_ + (kx - 1)] * s;
                    }
                }
                c1[std::size_t(j) * dom_.nx + i] = s1;
                c2[std::size_t(j) * dom_.nx + i] = s2;
            }
    }
    return faces_from_centers(c1, c2);
}

VelocityField Interpolant::apply(const VelocityField& v) const {
    if (!(v.domain() == dom_)) throw SpecMismatch("velocity grid does not match interpolant");
    return prolong(restrict(v));
}

void Interpolant::project_centers(std::vector<double>& c1, std::vector<double>& c2) const {
    if (spec_.kind != InterpolantSpec::Kind::volume)
        throw SpecMismatch("center projection is defined for the volume kind");
    const int px = dom_.nx / mx_, py = dom_.ny / my_;
    const double w = 1.0 / double(px * py);
    for (int J = 0; J < my_; ++J)
        for (int I = 0; I < mx_; ++I) {
            double s1 = 0.0, s2 = 0.0;
            for (int j = J * py; j < (J + 1) * py; ++j)
                for (int i = I * px; i < (I + 1) * px; ++i) {
                    s1 += c1[std::size_t(j) * dom_.nx + i];
                    s2 += c2[std::size_t(j) * dom_.nx + i];
                }
            s1 *= w;
            s2 *= w;
            for (int j = J * py; j < (J + 1) * py; ++j)
                for (int i = I * px; i < (I + 1) * px; ++i) {
                    c1[std::size_t(j) * dom_.nx + i] = s1;
                    c2[std::size_t(j) * dom_.nx + i] = s2;
                }
        }
}

InterpolationError measure_interpolation_error(const Interpolant& interp,
                                               const VelocityField& v) {
    const VelocityField iv = interp.apply(v);
    VelocityField diff = iv;
    for (std::size_t n = 0; n < diff.u1_data().size(); ++n)
        diff.u1_data()[n] -= v.u1_data()[n];
    for (std::size_t n = 0; n < diff.u2_data().size(); ++n)
        diff.u2_data()[n] -= v.u2_data()[n];
    InterpolationError e;
    e.abs_err = l2_norm(diff);
    const double w12 = std::sqrt(l2_norm(v) * l2_norm(v) + h1_semi_sq(v));
    e.rel_to_h1 = w12 > 0.0 ? e.abs_err / w12 : 0.0;
    return e;
}

} // namespace robsim
