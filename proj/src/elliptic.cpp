#include "robsim/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "robsim/field_io.hpp"
#include "robsim/operators.hpp"

namespace robsim {

namespace {

// dofs at or below this count get the banded direct factorization (16^3)
constexpr std::size_t kDirectDofLimit = 4096;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void remove_mean(std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m += v;
    m /= double(a.size());
    for (double& v : a) v -= m;
}

} // namespace

double StencilOperator::diag(int i, int j, int k) const {
    double d = shift;
    const int idx[3] = {i, j, k};
    for (int dir = 0; dir < 3; ++dir) {
        if (m[dir] == 1 && couple[dir] == 0.0) continue;
        double w = 2.0;
        const bool lo = (idx[dir] == 0), hi = (idx[dir] == m[dir] - 1);
        auto end_adjust = [&](bool at_end) {
            if (!at_end) return 0.0;
            switch (bc[dir]) {
                case EndBC::node: return 0.0;     // neighbor is a known node value
                case EndBC::reflect: return 1.0;  // odd ghost adds one coupling
                case EndBC::neumann: return -1.0; // even ghost removes one
            }
            return 0.0;
        };
        w += end_adjust(lo) + end_adjust(hi);
        d += couple[dir] * w;
    }
    return d;
}

void StencilOperator::apply(const double* x, double* y) const {
    const int mx = m[0], my = m[1], mz = m[2];
    const double cx = couple[0], cy = couple[1], cz = couple[2];
    for (int k = 0; k < mz; ++k)
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < mx; ++i) {
                const std::size_t c = (std::size_t(k) * my + j) * mx + i;
                double v = diag(i, j, k) * x[c];
                if (i > 0) v -= cx * x[c - 1];
                if (i < mx - 1) v -= cx * x[c + 1];
                if (j > 0) v -= cy * x[c - mx];
                if (j < my - 1) v -= cy * x[c + mx];
                if (k > 0) v -= cz * x[c - std::size_t(mx) * my];
                if (k < mz - 1) v -= cz * x[c + std::size_t(mx) * my];
                y[c] = v;
            }
}

double StencilOperator::rel_residual(const double* x, const double* b) const {
    std::vector<double> ax(size());
    apply(x, ax.data());
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        double r = b[i] - ax[i];
        rn += r * r;
        bn += b[i] * b[i];
    }
    return std::sqrt(rn) / std::max(std::sqrt(bn), 1e-300);
}

StencilSolver::StencilSolver(StencilOperator op, EllipticOptions opts, bool singular_neumann)
    : op_(op), opts_(opts), singular_(singular_neumann) {
    opts_.validate();
    n_ = op_.size();
    bandwidth_ = op_.m[0] * (op_.m[2] > 1 ? op_.m[1] : 1);
    diag_.resize(n_);
    for (int k = 0; k < op_.m[2]; ++k)
        for (int j = 0; j < op_.m[1]; ++j)
            for (int i = 0; i < op_.m[0]; ++i)
                diag_[(std::size_t(k) * op_.m[1] + j) * op_.m[0] + i] = op_.diag(i, j, k);
    const bool want_direct =
        opts_.method == EllipticOptions::Method::direct ||
        (opts_.method == EllipticOptions::Method::automatic && n_ <= kDirectDofLimit);
    direct_ = want_direct;
    if (direct_) factor_banded();
}

void StencilSolver::factor_banded() {
    // Banded Cholesky of A (first unknown dropped for the singular Neumann
    // operator; its value is pinned to 0 and the mean removed afterwards).
    const std::size_t skip = singular_ ? 1 : 0;
    const std::size_t n = n_ - skip;
    const int bw = bandwidth_;
    band_.assign(n * std::size_t(bw + 1), 0.0);
    const int mx = op_.m[0], my = op_.m[1];
    auto entry = [&](std::size_t r, int off) -> double& { return band_[r * (bw + 1) + off]; };

    // assemble lower band: band(r, 0) = diag, band(r, d) = A(r, r-d)
    for (std::size_t c = skip; c < n_; ++c) {
        const int i = int(c % mx);
        const int j = int((c / mx) % my);
        const int k = int(c / (std::size_t(mx) * my));
        const std::size_t r = c - skip;
        entry(r, 0) = op_.diag(i, j, k);
        if (i > 0 && c - 1 >= skip) entry(r, 1) = -op_.couple[0];
        if (j > 0 && c >= std::size_t(mx) + skip) entry(r, mx) = -op_.couple[1];
        if (k > 0 && c >= std::size_t(mx) * my + skip)
            entry(r, mx * my) = -op_.couple[2];
    }

    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t p0 = r > std::size_t(bw) ? r - bw : 0;
        for (std::size_t p = p0; p < r; ++p) {
            // subtract L(r, :p) . L(p, :p) from A(r, p)
            const int off_rp = int(r - p);
            double sum = entry(r, off_rp);
            const std::size_t q0 = std::max(p0, p > std::size_t(bw) ? p - bw : 0);
            for (std::size_t q = q0; q < p; ++q)
                sum -= entry(r, int(r - q)) * entry(p, int(p - q));
            entry(r, off_rp) = sum / entry(p, 0);
        }
        double dsum = entry(r, 0);
        for (std::size_t q = p0; q < r; ++q) {
            double l = entry(r, int(r - q));
            dsum -= l * l;
        }
        if (!(dsum > 0.0))
            throw NonConvergence("banded Cholesky: non-positive pivot", dsum, 0);
        entry(r, 0) = std::sqrt(dsum);
    }
}

std::vector<double> StencilSolver::solve_direct(const std::vector<double>& b) const {
    const std::size_t skip = singular_ ? 1 : 0;
    const std::size_t n = n_ - skip;
    const int bw = bandwidth_;
    auto entry = [&](std::size_t r, int off) { return band_[r * (bw + 1) + off]; };

    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        double s = b[r + skip];
        const std::size_t q0 = r > std::size_t(bw) ? r - bw : 0;
        for (std::size_t q = q0; q < r; ++q) s -= entry(r, int(r - q)) * y[q];
        y[r] = s / entry(r, 0);
    }
    std::vector<double> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = y[ri];
        const std::size_t qmax = std::min(n, ri + bw + 1);
        for (std::size_t q = ri + 1; q < qmax; ++q) s -= entry(q, int(q - ri)) * x[q];
        x[ri] = s / entry(ri, 0);
    }
    std::vector<double> full(n_, 0.0);
    std::copy(x.begin(), x.end(), full.begin() + skip);
    return full;
}

std::vector<double> StencilSolver::solve_cg(const std::vector<double>& b, int* iters,
                                            const std::vector<double>* x0) const {
    const std::size_t n = n_;
    std::vector<double> x(n, 0.0), r = b, z(n), p(n), ap(n);
    if (singular_) remove_mean(r);
    const double bnorm = norm2(r);
    if (bnorm == 0.0) {
        if (iters) *iters = 0;
        return x;
    }
    const double target = opts_.tol * bnorm;

    const int mx = op_.m[0], my = op_.m[1], mz = op_.m[2];
    const double cx = op_.couple[0], cy = op_.couple[1], cz = op_.couple[2];
    const std::size_t sy = mx, sz = std::size_t(mx) * my;
    const double* dg = diag_.data();

    // matrix apply against the cached diagonal; the x-interior runs branch free
    auto apply_fast = [&](const double* xin, double* yout) {
        for (int k = 0; k < mz; ++k)
            for (int j = 0; j < my; ++j) {
                const std::size_t row = (std::size_t(k) * my + j) * mx;
                const bool jm = j > 0, jp = j < my - 1, km = k > 0, kp = k < mz - 1;
                auto cell = [&](int i, std::size_t c) {
                    double v = dg[c] * xin[c];
                    if (i > 0) v -= cx * xin[c - 1];
                    if (i < mx - 1) v -= cx * xin[c + 1];
                    if (jm) v -= cy * xin[c - sy];
                    if (jp) v -= cy * xin[c + sy];
                    if (km) v -= cz * xin[c - sz];
                    if (kp) v -= cz * xin[c + sz];
                    yout[c] = v;
                };
                cell(0, row);
                if (jm && jp && km && kp) {
                    for (int i = 1; i < mx - 1; ++i) {
                        const std::size_t c = row + i;
                        yout[c] = dg[c] * xin[c] - cx * (xin[c - 1] + xin[c + 1]) -
                                  cy * (xin[c - sy] + xin[c + sy]) -
                                  cz * (xin[c - sz] + xin[c + sz]);
                    }
                } else {
                    for (int i = 1; i < mx - 1; ++i) {
                        const std::size_t c = row + i;
                        double v = dg[c] * xin[c] - cx * (xin[c - 1] + xin[c + 1]);
                        if (jm) v -= cy * xin[c - sy];
                        if (jp) v -= cy * xin[c + sy];
                        if (km) v -= cz * xin[c - sz];
                        if (kp) v -= cz * xin[c + sz];
                        yout[c] = v;
                    }
                }
                if (mx > 1) cell(mx - 1, row + mx - 1);
            }
    };

    // SSOR(1) preconditioner: forward Gauss-Seidel sweep, diagonal scale,
    // backward sweep. Sequential by construction, hence deterministic.
    auto precond = [&](const std::vector<double>& rin, std::vector<double>& zout) {
        for (int k = 0; k < mz; ++k)
            for (int j = 0; j < my; ++j) {
                const std::size_t row = (std::size_t(k) * my + j) * mx;
                const bool jm = j > 0, km = k > 0;
                {
                    double s = rin[row];
                    if (jm) s += cy * zout[row - sy];
                    if (km) s += cz * zout[row - sz];
                    zout[row] = s / dg[row];
                }
                if (jm && km) {
                    for (int i = 1; i < mx; ++i) {
                        const std::size_t c = row + i;
                        zout[c] = (rin[c] + cx * zout[c - 1] + cy * zout[c - sy] +
                                   cz * zout[c - sz]) / dg[c];
                    }
                } else {
                    for (int i = 1; i < mx; ++i) {
                        const std::size_t c = row + i;
                        double s = rin[c] + cx * zout[c - 1];
                        if (jm) s += cy * zout[c - sy];
                        if (km) s += cz * zout[c - sz];
                        zout[c] = s / dg[c];
                    }
                }
            }
        for (int k = mz - 1; k >= 0; --k)
            for (int j = my - 1; j >= 0; --j) {
                const std::size_t row = (std::size_t(k) * my + j) * mx;
                const bool jp = j < my - 1, kp = k < mz - 1;
                {
                    const std::size_t c = row + mx - 1;
                    double s = zout[c] * dg[c];
                    if (jp) s += cy * zout[c + sy];
                    if (kp) s += cz * zout[c + sz];
                    zout[c] = s / dg[c];
                }
                if (jp && kp) {
                    for (int i = mx - 2; i >= 0; --i) {
                        const std::size_t c = row + i;
                        zout[c] = (zout[c] * dg[c] + cx * zout[c + 1] + cy * zout[c + sy] +
                                   cz * zout[c + sz]) / dg[c];
                    }
                } else {
                    for (int i = mx - 2; i >= 0; --i) {
                        const std::size_t c = row + i;
                        double s = zout[c] * dg[c] + cx * zout[c + 1];
                        if (jp) s += cy * zout[c + sy];
                        if (kp) s += cz * zout[c + sz];
                        zout[c] = s / dg[c];
                    }
                }
            }
    };

    if (x0 && x0->size() == n) {
        x = *x0;
        if (singular_) remove_mean(x);
        apply_fast(x.data(), ap.data());
        for (std::size_t i = 0; i < n; ++i) r[i] -= ap[i];
        if (singular_) remove_mean(r);
        if (norm2(r) <= target) {
            if (iters) *iters = 0;
            return x;
        }
    }

    precond(r, z);
    if (singular_) remove_mean(z);
    p = z;
    double rz = dot(r, z);
    int it = 0;
    for (; it < opts_.max_iter; ++it) {
        apply_fast(p.data(), ap.data());
        const double pap = dot(p, ap);
        if (pap <= 0.0) break;
        const double a = rz / pap;
        for (std::size_t i = 0; i < n; ++i) x[i] += a * p[i];
        for (std::size_t i = 0; i < n; ++i) r[i] -= a * ap[i];
        if (singular_) remove_mean(r);
        if (norm2(r) <= target) {
            ++it;
            break;
        }
        precond(r, z);
        if (singular_) remove_mean(z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (iters) *iters = it;
    return x;
}

std::vector<double> StencilSolver::solve(const std::vector<double>& b, SolveStats* stats,
                                         const std::vector<double>* x0) const {
    std::vector<double> rhs = b;
    if (singular_) remove_mean(rhs);
    int iters = 0;
    std::vector<double> x = direct_ ? solve_direct(rhs) : solve_cg(rhs, &iters, x0);
    if (singular_) remove_mean(x);
    const double res = op_.rel_residual(x.data(), rhs.data());
    if (stats) {
        stats->residual = res;
        stats->iterations = iters;
        stats->direct = direct_;
    }
    // the direct factorization is good to rounding; only a genuinely
    // ill-posed system or an exhausted CG can land here
    if (res > std::max(opts_.tol, 1e-13) && norm2(rhs) > 0.0)
        throw NonConvergence("elliptic solve: residual above tolerance", res, iters);
    return x;
}

// ---------------------------------------------------------------------------
// Pressure Poisson
// ---------------------------------------------------------------------------

PoissonNeumann2D::PoissonNeumann2D(const DomainSpec& dom, EllipticOptions opts)
    : dom_(dom), opts_(opts) {
    StencilOperator op;
    op.m[0] = dom.nx;
    op.m[1] = dom.ny;
    op.m[2] = 1;
    op.couple[0] = 1.0 / (dom.dx() * dom.dx());
    op.couple[1] = 1.0 / (dom.dy() * dom.dy());
    op.bc[0] = StencilOperator::EndBC::neumann;
    op.bc[1] = StencilOperator::EndBC::neumann;
    op.shift = 0.0; // A = -lap_h, positive semidefinite
    core_ = std::make_unique<StencilSolver>(op, opts, /*singular_neumann=*/true);
}

ScalarField2D PoissonNeumann2D::solve(const ScalarField2D& rhs, SolveStats* stats) const {
    double mean = domain_average(rhs);
    double scale = 0.0;
    for (double v : rhs.data()) scale = std::max(scale, std::abs(v));
    if (std::abs(mean) > opts_.tol * std::max(scale, 1e-300) && scale > 0.0)
        throw IncompatibleRHS("pressure Poisson right-hand side has nonzero mean: " +
                              format_double(mean));
    // A = -lap, so solve A p = -rhs
    std::vector<double> b(rhs.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = -rhs.data()[i];
    std::vector<double> x = core_->solve(b, stats);
    ScalarField2D p(dom_, "p");
    p.data() = std::move(x);
    return p;
}

// ---------------------------------------------------------------------------
// Dirichlet Helmholtz, 3-D cell-centered
// ---------------------------------------------------------------------------

namespace {
StencilOperator helmholtz3d_op(const DomainSpec& dom, double gamma) {
    StencilOperator op;
    op.m[0] = dom.nx;
    op.m[1] = dom.ny;
    op.m[2] = dom.nz;
    op.couple[0] = gamma / (dom.dx() * dom.dx());
    op.couple[1] = gamma / (dom.dy() * dom.dy());
    op.couple[2] = gamma / (dom.dz() * dom.dz());
    op.bc[0] = op.bc[1] = op.bc[2] = StencilOperator::EndBC::reflect;
    op.shift = 1.0;
    return op;
}
} // namespace

HelmholtzDirichlet3D::HelmholtzDirichlet3D(const DomainSpec& dom, double gamma,
                                           EllipticOptions opts)
    : dom_(dom), gamma_(gamma), opts_(opts) {
    if (gamma < 0.0) throw ValidationError("helmholtz.gamma", "must be >= 0");
    if (gamma_ > 0.0)
        core_ = std::make_unique<StencilSolver>(helmholtz3d_op(dom, gamma), opts);
}

ScalarField3D HelmholtzDirichlet3D::solve(const ScalarField3D& rhs, SolveStats* stats,
                                          const ScalarField3D* guess) const {
    if (gamma_ == 0.0) {
        if (stats) *stats = {0.0, 0, true};
        ScalarField3D z = rhs;
        z.set_bc(BoundaryKind::dirichlet_zero);
        return z;
    }
    ScalarField3D z(dom_, rhs.name(), BoundaryKind::dirichlet_zero);
    z.data() = core_->solve(rhs.data(), stats, guess ? &guess->data() : nullptr);
    return z;
}

// ---------------------------------------------------------------------------
// Rank-one corrected (nonlocal) Helmholtz
// ---------------------------------------------------------------------------

NonlocalHelmholtz3D::NonlocalHelmholtz3D(const DomainSpec& dom, double gamma, double alpha,
                                         EllipticOptions opts)
    : dom_(dom), gamma_(gamma), alpha_(alpha), opts_(opts), base_(dom, gamma, opts),
      q_(dom, "q", BoundaryKind::dirichlet_zero) {
    if (alpha < 0.0 || alpha >= 1.0)
        throw InvalidAlpha("nonlocal solve requires 0 <= alpha < 1, got " +
                           format_double(alpha));
    if (alpha_ == 0.0) return; // correction vanishes
    ScalarField3D ones(dom, "1");
    ones.fill(1.0);
    q_ = base_.solve(ones);
    avg_q_ = domain_average(q_);
    const double c = alpha_ / (1.0 + alpha_);
    denom_ = 1.0 - c * avg_q_;
    if (std::abs(denom_) < 1e-12)
        throw SingularCorrection("rank-one correction denominator " + format_double(denom_));
}

ScalarField3D NonlocalHelmholtz3D::solve(const ScalarField3D& rhs, SolveStats* stats,
                                         const ScalarField3D* guess) const {
    ScalarField3D w = base_.solve(rhs, stats, guess);
    if (alpha_ == 0.0) return w;
    const double c = alpha_ / (1.0 + alpha_);
    const double scale = c * domain_average(w) / denom_;
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] += scale * q_.data()[i];
    if (stats) {
        // residual of the full perturbed system, recomputed from the output
        const double avg_z = domain_average(w);
        std::vector<double> az(w.size());
        helmholtz3d_op(dom_, gamma_).apply(w.data().data(), az.data());
        double rn = 0.0, bn = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            double r = rhs.data()[i] - (az[i] - c * avg_z);
            rn += r * r;
            bn += rhs.data()[i] * rhs.data()[i];
        }
        stats->residual = std::sqrt(rn) / std::max(std::sqrt(bn), 1e-300);
    }
    return w;
}

// ---------------------------------------------------------------------------
// Per-component face Helmholtz (velocity diffusion)
// ---------------------------------------------------------------------------

FaceHelmholtz2D::FaceHelmholtz2D(const DomainSpec& dom, double gamma, EllipticOptions opts)
    : dom_(dom), gamma_(gamma), opts_(opts) {
    if (gamma < 0.0) throw ValidationError("helmholtz.gamma", "must be >= 0");
    if (gamma_ == 0.0) return;
    const double cx = gamma / (dom.dx() * dom.dx());
    const double cy = gamma / (dom.dy() * dom.dy());
    {
        StencilOperator op; // u1 interior faces: (nx-1) x ny
        op.m[0] = dom.nx - 1;
        op.m[1] = dom.ny;
        op.couple[0] = cx;
        op.couple[1] = cy;
        op.bc[0] = StencilOperator::EndBC::node;    // wall faces hold u1 = 0
        op.bc[1] = StencilOperator::EndBC::reflect; // tangential no-slip
        op.shift = 1.0;
        core_u1_ = std::make_unique<StencilSolver>(op, opts);
    }
    {
        StencilOperator op; // u2 interior faces: nx x (ny-1)
        op.m[0] = dom.nx;
        op.m[1] = dom.ny - 1;
        op.couple[0] = cx;
        op.couple[1] = cy;
        op.bc[0] = StencilOperator::EndBC::reflect;
        op.bc[1] = StencilOperator::EndBC::node;
        op.shift = 1.0;
        core_u2_ = std::make_unique<StencilSolver>(op, opts);
    }
}

VelocityField FaceHelmholtz2D::solve(const VelocityField& rhs, SolveStats* stats_u1,
                                     SolveStats* stats_u2) const {
    VelocityField out = rhs;
    out.enforce_noslip();
    if (gamma_ == 0.0) {
        if (stats_u1) *stats_u1 = {0.0, 0, true};
        if (stats_u2) *stats_u2 = {0.0, 0, true};
        return out;
    }
    {
        std::vector<double> b(std::size_t(dom_.nx - 1) * dom_.ny);
        for (int j = 0; j < dom_.ny; ++j)
            for (int i = 1; i < dom_.nx; ++i)
                b[std::size_t(j) * (dom_.nx - 1) + (i - 1)] = rhs.u1(i, j);
        std::vector<double> x = core_u1_->solve(b, stats_u1);
        for (int j = 0; j < dom_.ny; ++j)
            for (int i = 1; i < dom_.nx; ++i)
                out.u1(i, j) = x[std::size_t(j) * (dom_.nx - 1) + (i - 1)];
    }
    {
        std::vector<double> b(std::size_t(dom_.nx) * (dom_.ny - 1));
        for (int j = 1; j < dom_.ny; ++j)
            for (int i = 0; i < dom_.nx; ++i)
                b[std::size_t(j - 1) * dom_.nx + i] = rhs.u2(i, j);
        std::vector<double> x = core_u2_->solve(b, stats_u2);
        for (int j = 1; j < dom_.ny; ++j)
            for (int i = 0; i < dom_.nx; ++i)
                out.u2(i, j) = x[std::size_t(j - 1) * dom_.nx + i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Harmonic extension of boundary data
// ---------------------------------------------------------------------------

ScalarField3D harmonic_extension(const DomainSpec& dom,
                                 const std::function<double(double, double, double)>& boundary_fn,
                                 EllipticOptions opts, SolveStats* stats) {
    StencilOperator op;
    op.m[0] = dom.nx;
    op.m[1] = dom.ny;
    op.m[2] = dom.nz;
    op.couple[0] = 1.0 / (dom.dx() * dom.dx());
    op.couple[1] = 1.0 / (dom.dy() * dom.dy());
    op.couple[2] = 1.0 / (dom.dz() * dom.dz());
    op.bc[0] = op.bc[1] = op.bc[2] = StencilOperator::EndBC::reflect;
    op.shift = 0.0; // A = -lap with inhomogeneous trace folded into the rhs

    // ghost = 2*f(face) - interior contributes 2*c*f per wall-adjacent cell
    std::vector<double> b(dom.cells3d(), 0.0);
    auto idx = [&](int i, int j, int k) { return (std::size_t(k) * dom.ny + j) * dom.nx + i; };
    for (int k = 0; k < dom.nz; ++k)
        for (int j = 0; j < dom.ny; ++j) {
            b[idx(0, j, k)] += 2.0 * op.couple[0] * boundary_fn(0.0, dom.yc(j), dom.zc(k));
            b[idx(dom.nx - 1, j, k)] +=
                2.0 * op.couple[0] * boundary_fn(dom.Lx, dom.yc(j), dom.zc(k));
        }
    for (int k = 0; k < dom.nz; ++k)
        for (int i = 0; i < dom.nx; ++i) {
            b[idx(i, 0, k)] += 2.0 * op.couple[1] * boundary_fn(dom.xc(i), 0.0, dom.zc(k));
            b[idx(i, dom.ny - 1, k)] +=
                2.0 * op.couple[1] * boundary_fn(dom.xc(i), dom.Ly, dom.zc(k));
        }
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) {
            b[idx(i, j, 0)] += 2.0 * op.couple[2] * boundary_fn(dom.xc(i), dom.yc(j), 0.0);
            b[idx(i, j, dom.nz - 1)] +=
                2.0 * op.couple[2] * boundary_fn(dom.xc(i), dom.yc(j), 1.0);
        }

    StencilSolver core(op, opts);
    ScalarField3D f(dom, "theta_b_hat");
    f.data() = core.solve(b, stats);
    return f;
}

// ---------------------------------------------------------------------------
// One-shot wrappers
// ---------------------------------------------------------------------------

ScalarField2D solve_poisson_h(const ScalarField2D& rhs, EllipticOptions opts,
                              SolveStats* stats) {
    return PoissonNeumann2D(rhs.domain(), opts).solve(rhs, stats);
}

ScalarField3D solve_helmholtz_dirichlet_3d(double gamma, const ScalarField3D& rhs,
                                           EllipticOptions opts, SolveStats* stats) {
    return HelmholtzDirichlet3D(rhs.domain(), gamma, opts).solve(rhs, stats);
}

ScalarField3D solve_nonlocal_helmholtz(double gamma, double alpha, const ScalarField3D& rhs,
                                       EllipticOptions opts, SolveStats* stats) {
    return NonlocalHelmholtz3D(rhs.domain(), gamma, alpha, opts).solve(rhs, stats);
}

} // namespace robsim
