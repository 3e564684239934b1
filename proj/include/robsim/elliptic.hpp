#pragma once

#include <functional>
#include <memory>

#include "robsim/grid.hpp"

namespace robsim {

struct EllipticOptions {
    double tol = 1e-10;       // relative residual tolerance
    int max_iter = 20000;
    enum class Method { automatic, direct, iterative } method = Method::automatic;

    void validate() const {
        if (!(tol > 0.0) || !(tol < 1e-6))
            throw ValidationError("elliptic.tol", "must satisfy 0 < tol < 1e-6");
        if (max_iter < 1) throw ValidationError("elliptic.max_iter", "must be >= 1");
    }
};

struct SolveStats {
    double residual = 0.0; // recomputed from the returned solution
    int iterations = 0;    // 0 for the direct path
    bool direct = false;
};

/// Constant-coefficient 7-point operator on a box of unknowns,
///   A x = shift*x - sum_d c_d * (neighbor couplings),
/// with the end-of-axis behavior encoded per direction:
///   node    - Dirichlet value stored on the first point outside the box
///             (the unknown nearest the wall couples to a known value)
///   reflect - cell-centered Dirichlet trace via odd ghost (diag gets an
///             extra c_d at the ends)
///   neumann - zero-flux ghost (diag loses a c_d at the ends)
/// This one struct covers every solve in the project; boundary data enters
/// only through the right-hand side.
struct StencilOperator {
    enum class EndBC { node, reflect, neumann };
    int m[3] = {1, 1, 1};
    double couple[3] = {0.0, 0.0, 0.0};
    EndBC bc[3] = {EndBC::neumann, EndBC::neumann, EndBC::neumann};
    double shift = 0.0;

    std::size_t size() const { return std::size_t(m[0]) * m[1] * m[2]; }
    double diag(int i, int j, int k) const;
    void apply(const double* x, double* y) const;
    /// ||b - A x||_2 / max(||b||_2, floor)
    double rel_residual(const double* x, const double* b) const;
};

/// Shared linear-solver core: banded Cholesky when the unknown count is
/// small enough to serve as an oracle-grade direct solve, SSOR-preconditioned
/// conjugate gradients above. `singular_neumann` enables the zero-mean
/// handling for the pure-Neumann Poisson operator.
class StencilSolver {
public:
    StencilSolver(StencilOperator op, EllipticOptions opts, bool singular_neumann = false);

    /// Solve A x = b; throws NonConvergence when the tolerance is not met.
    /// `x0` seeds the iterative path (the tolerance still refers to ||b||);
    /// the direct path ignores it.
    std::vector<double> solve(const std::vector<double>& b, SolveStats* stats = nullptr,
                              const std::vector<double>* x0 = nullptr) const;

    const StencilOperator& op() const { return op_; }
    bool is_direct() const { return direct_; }

private:
    void factor_banded();
    std::vector<double> solve_direct(const std::vector<double>& b) const;
    std::vector<double> solve_cg(const std::vector<double>& b, int* iters,
                                 const std::vector<double>* x0) const;

    StencilOperator op_;
    EllipticOptions opts_;
    bool singular_ = false;
    bool direct_ = false;
    int bandwidth_ = 0;
    std::size_t n_ = 0;
    std::vector<double> diag_; // cached operator diagonal
    // banded Cholesky factor, row-major (n x (bandwidth+1)), L lower part
    std::vector<double> band_;
};

/// Pressure Poisson: lap_h p = rhs with homogeneous Neumann walls; the
/// returned field has zero mean. Throws IncompatibleRHS when |mean(rhs)|
/// exceeds tol * max|rhs|.
class PoissonNeumann2D {
public:
    PoissonNeumann2D(const DomainSpec& dom, EllipticOptions opts = {});
    ScalarField2D solve(const ScalarField2D& rhs, SolveStats* stats = nullptr) const;

private:
    DomainSpec dom_;
    EllipticOptions opts_;
    std::unique_ptr<StencilSolver> core_;
};

/// (I - gamma*lap) z = rhs with z = 0 on the whole boundary (cell-centered,
/// odd-ghost trace).
class HelmholtzDirichlet3D {
public:
    HelmholtzDirichlet3D(const DomainSpec& dom, double gamma, EllipticOptions opts = {});
    ScalarField3D solve(const ScalarField3D& rhs, SolveStats* stats = nullptr,
                        const ScalarField3D* guess = nullptr) const;
    double gamma() const { return gamma_; }

private:
    DomainSpec dom_;
    double gamma_;
    EllipticOptions opts_;
    std::unique_ptr<StencilSolver> core_;
};

/// The rank-one-perturbed solve generated by the nonlocal mean term:
///   A z - (alpha/(1+alpha)) * avg(z) * 1 = rhs,  A = (I - gamma*lap), z|bdry = 0.
/// Solved by Sherman-Morrison: q = A^-1 1 is precomputed, each call costs one
/// base solve plus the closed-form correction.
class NonlocalHelmholtz3D {
public:
    NonlocalHelmholtz3D(const DomainSpec& dom, double gamma, double alpha,
                        EllipticOptions opts = {});
    ScalarField3D solve(const ScalarField3D& rhs, SolveStats* stats = nullptr,
                        const ScalarField3D* guess = nullptr) const;
    double alpha() const { return alpha_; }

private:
    DomainSpec dom_;
    double gamma_;
    double alpha_;
    EllipticOptions opts_;
    HelmholtzDirichlet3D base_;
    ScalarField3D q_;      // A^-1 1
    double avg_q_ = 0.0;
    double denom_ = 1.0;   // 1 - c*avg(q), Sherman-Morrison denominator
};

/// Per-component (I - gamma*lap_h) on the staggered velocity locations with
/// homogeneous Dirichlet at the walls (normal components pinned on wall
/// faces, tangential via odd ghosts).
class FaceHelmholtz2D {
public:
    FaceHelmholtz2D(const DomainSpec& dom, double gamma, EllipticOptions opts = {});
    VelocityField solve(const VelocityField& rhs, SolveStats* stats_u1 = nullptr,
                        SolveStats* stats_u2 = nullptr) const;

private:
    DomainSpec dom_;
    double gamma_;
    EllipticOptions opts_;
    std::unique_ptr<StencilSolver> core_u1_, core_u2_;
};

/// Discrete harmonic extension: lap f = 0 in the interior, trace matching
/// boundary_fn at face centroids (cell-centered ghost convention). The
/// interior discrete-Laplacian residual satisfies the solver tolerance.
ScalarField3D harmonic_extension(const DomainSpec& dom,
                                 const std::function<double(double, double, double)>& boundary_fn,
                                 EllipticOptions opts = {}, SolveStats* stats = nullptr);

// Convenience one-shot forms.
ScalarField2D solve_poisson_h(const ScalarField2D& rhs, EllipticOptions opts = {},
                              SolveStats* stats = nullptr);
ScalarField3D solve_helmholtz_dirichlet_3d(double gamma, const ScalarField3D& rhs,
                                           EllipticOptions opts = {},
                                           SolveStats* stats = nullptr);
ScalarField3D solve_nonlocal_helmholtz(double gamma, double alpha, const ScalarField3D& rhs,
                                       EllipticOptions opts = {}, SolveStats* stats = nullptr);

} // namespace robsim
