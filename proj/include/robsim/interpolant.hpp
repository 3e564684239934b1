#pragma once

#include <string>
#include <vector>

#include "robsim/grid.hpp"

namespace robsim {

/// Coarse observation operator description. Config/CLI form:
/// "volume:<delta>" or "spectral:<delta>".
struct InterpolantSpec {
    enum class Kind { volume, spectral } kind = Kind::volume;
    double delta = 0.25;

    static InterpolantSpec parse(const std::string& s);
    std::string to_string() const;

    int coarse_nx(const DomainSpec& dom) const; // ceil(Lx/delta), or mode cutoff
    int coarse_ny(const DomainSpec& dom) const;

    bool operator==(const InterpolantSpec&) const = default;
};

/// Coarse representation of one velocity observation: block means (volume
/// kind) or sine coefficients (spectral kind), mx*my values per component.
struct CoarseVelocity {
    std::vector<double> c1, c2;
};

/// I_delta: linear bounded coarse-observation operator on velocity fields.
/// Volume kind averages cell-centered components over delta-cells and
/// broadcasts back piecewise-constant; spectral kind truncates a discrete
/// sine expansion. Both resample to faces by linear interpolation and keep
/// the wall faces at zero.
class Interpolant {
public:
    Interpolant(const InterpolantSpec& spec, const DomainSpec& dom);

    const InterpolantSpec& spec() const { return spec_; }
    const DomainSpec& domain() const { return dom_; }
    int mx() const { return mx_; }
    int my() const { return my_; }

    VelocityField apply(const VelocityField& v) const; // prolong(restrict(v))
    CoarseVelocity restrict(const VelocityField& v) const;
    VelocityField prolong(const CoarseVelocity& c) const;

    /// The idempotent cell-centered projection underlying the volume kind
    /// (block mean, broadcast back). Exposed for the projection property.
    void project_centers(std::vector<double>& c1, std::vector<double>& c2) const;

private:
    void centers_from_faces(const VelocityField& v, std::vector<double>& c1,
                            std::vector<double>& c2) const;
    VelocityField faces_from_centers(const std::vector<double>& c1,
                                     const std::vector<double>& c2) const;

    InterpolantSpec spec_;
    DomainSpec dom_;
    int mx_ = 0, my_ = 0;
};

struct InterpolationError {
    double abs_err = 0;    // ||I v - v||_L2
    double rel_to_h1 = 0;  // ratio to ||v||_W12
};

InterpolationError measure_interpolation_error(const Interpolant& interp,
                                               const VelocityField& v);

} // namespace robsim
