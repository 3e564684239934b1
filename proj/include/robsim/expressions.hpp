#pragma once

#include <functional>
#include <string>

#include "robsim/grid.hpp"

namespace robsim {

using SpaceFn = std::function<double(double, double, double)>;

/// Built-in scalar expression set for config files. A spec is a ';'-separated
/// sum of terms:
///   constant:<c>
///   linear:<c0>,<cx>,<cy>,<cz>          c0 + cx*x + cy*y + cz*z
///   sinprod:<A>,<kx>,<ky>,<kz>          A * sin(kx pi x/Lx) * sin(ky pi y/Ly)
///                                         * sin(kz pi z); a zero mode drops
///                                         its factor
/// "zero" is an alias for constant:0.
SpaceFn make_scalar_expression(const std::string& spec, const DomainSpec& dom);

/// Velocity expression set:
///   zero
///   stream:<A>,<m>,<n>   velocity from the streamfunction
///                        A sin(m pi x/Lx) sin(n pi y/Ly), differenced at
///                        grid nodes so the result is discretely
///                        divergence-free and no-slip on wall faces
/// Terms may be summed with ';'.
VelocityField make_velocity_expression(const std::string& spec, const DomainSpec& dom);

ScalarField3D sample_at_centers(const SpaceFn& f, const DomainSpec& dom,
                                const std::string& name = "f",
                                BoundaryKind bc = BoundaryKind::none);

} // namespace robsim
