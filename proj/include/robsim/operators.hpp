#pragma once

#include "robsim/grid.hpp"

namespace robsim {

struct FieldNorms {
    double l2 = 0.0;
    double linf = 0.0;
    double h1_semi = 0.0;
};

/// Midpoint-rule average over the nz cell layers; exact for fields linear
/// in the vertical coordinate.
ScalarField2D vertical_average(const ScalarField3D& f);

/// Mean of all cell values (uniform grid, |Omega| normalization).
double domain_average(const ScalarField3D& f);
double domain_average(const ScalarField2D& f);

/// l2 = sqrt(sum f^2 * cell volume), linf = max |f|, h1_semi from one-sided
/// differences honoring the field's boundary kind. For dirichlet_zero the
/// wall-face gradient (value/(h/2)) enters with half-cell weight, which makes
/// h1_semi^2 equal the quadratic form of the Dirichlet Laplacian stencil.
FieldNorms norms(const ScalarField3D& f);
FieldNorms norms(const ScalarField2D& f);

/// Velocity norms on the staggered layout; h1_semi uses odd ghost reflection
/// at tangential walls (no-slip) so h1_semi^2 matches the diffusion stencil's
/// quadratic form.
FieldNorms norms(const VelocityField& v);

double l2_norm(const VelocityField& v);
double h1_semi_sq(const VelocityField& v);
double h1_semi_sq(const ScalarField3D& f);

/// Discrete horizontal divergence at cell centers.
ScalarField2D divergence_h(const VelocityField& v);
double max_abs_divergence(const VelocityField& v);

/// Discrete horizontal gradient at faces; boundary faces get 0 (the adjoint
/// identity <grad p, v> = -<p, div v> holds for v with zero boundary faces).
VelocityField gradient_h(const ScalarField2D& p);

/// Face-weighted inner products, all faces with full cell area.
double inner_product(const VelocityField& a, const VelocityField& b);
double inner_product(const ScalarField2D& a, const ScalarField2D& b);

} // namespace robsim
