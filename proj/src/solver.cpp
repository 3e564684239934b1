#include "robsim/solver.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "robsim/field_io.hpp"
#include "robsim/operators.hpp"

namespace robsim {

RobSolver::RobSolver(const DomainSpec& dom, const PhysicsParams& p, const SpaceFn& theta_b,
                     double dt, EllipticOptions opts)
    : dom_(dom), p_(p), theta_b_(theta_b),
      theta_b_eff_(effective_boundary_data(dom, theta_b, p)), dt_(dt), opts_(opts),
      F_(eval_forcing_potential(dom, p.g)),
      theta_b_hat_(harmonic_extension(dom, theta_b_eff_, opts)), gradF_(dom),
      temp_solver_(dom, p.kappa * dt, std::max(p.alpha, 0.0), opts),
      visc_solver_(dom, p.mu * dt, opts), pressure_solver_(dom, opts) {
    if (!(dt > 0.0)) throw ValidationError("time.dt", "must be > 0");
    if (p.alpha < 0.0)
        throw InvalidAlpha("time stepping requires alpha >= 0, got " + format_double(p.alpha));
    // grad F at faces from the k=0 layer; the vertical part of F is constant
    // per layer and drops out of horizontal differences
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 1; i < dom.nx; ++i)
            gradF_.u1(i, j) = (F_.at(i, j, 0) - F_.at(i - 1, j, 0)) / dom.dx();
    for (int j = 1; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            gradF_.u2(i, j) = (F_.at(i, j, 0) - F_.at(i, j - 1, 0)) / dom.dy();
}

State RobSolver::make_state(const VelocityField& v0, const ScalarField3D& theta0) const {
    State s;
    s.t = 0.0;
    s.v = v0;
    s.v.enforce_noslip();
    s.Z = Theta_to_Z(theta_to_Theta(theta0, p_, F_), p_.alpha, theta_b_hat_);
    return s;
}

ScalarField3D RobSolver::reconstruct_Theta(const ScalarField3D& Z) const {
    return Z_to_Theta(Z, p_.alpha, theta_b_hat_);
}

ScalarField3D RobSolver::reconstruct_theta(const ScalarField3D& Z) const {
    return Theta_to_theta(reconstruct_Theta(Z), p_, F_);
}

VelocityField RobSolver::buoyancy_force(const ScalarField3D& Z) const {
    const ScalarField2D m = vertical_average(reconstruct_Theta(Z));
    VelocityField f(dom_);
    for (int j = 0; j < dom_.ny; ++j)
        for (int i = 1; i < dom_.nx; ++i)
            f.u1(i, j) = -0.5 * (m.at(i - 1, j) + m.at(i, j)) * gradF_.u1(i, j);
    for (int j = 1; j < dom_.ny; ++j)
        for (int i = 0; i < dom_.nx; ++i)
            f.u2(i, j) = -0.5 * (m.at(i, j - 1) + m.at(i, j)) * gradF_.u2(i, j);
    return f;
}

VelocityField RobSolver::advect_velocity(const VelocityField& v) const {
    const int nx = dom_.nx, ny = dom_.ny;
    const double dx = dom_.dx(), dy = dom_.dy();
    VelocityField adv(dom_);

    // u1 faces: d(uu)/dx via cell-center squares, d(vu)/dy via node fluxes
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double ue = 0.5 * (v.u1(i, j) + v.u1(i + 1, j));
            const double uw = 0.5 * (v.u1(i - 1, j) + v.u1(i, j));
            double term = (ue * ue - uw * uw) / dx;

            auto node_flux = [&](int jn) {
                // node (i, jn); odd ghosts give zero tangential wall velocity
                const double un = (jn == 0)    ? 0.0
                                  : (jn == ny) ? 0.0
                                               : 0.5 * (v.u1(i, jn - 1) + v.u1(i, jn));
                const double vn = 0.5 * (v.u2(i - 1, jn) + v.u2(i, jn));
                return vn * un;
            };
            term += (node_flux(j + 1) - node_flux(j)) / dy;
            adv.u1(i, j) = term;
        }

    // u2 faces: d(vv)/dy and d(uv)/dx
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double vn = 0.5 * (v.u2(i, j) + v.u2(i, j + 1));
            const double vs = 0.5 * (v.u2(i, j - 1) + v.u2(i, j));
            double term = (vn * vn - vs * vs) / dy;

            auto node_flux = [&](int in) {
                const double vv = (in == 0)    ? 0.0
                                  : (in == nx) ? 0.0
                                               : 0.5 * (v.u2(in - 1, j) + v.u2(in, j));
                const double uu = 0.5 * (v.u1(in, j - 1) + v.u1(in, j));
                return uu * vv;
            };
            term += (node_flux(i + 1) - node_flux(i)) / dx;
            adv.u2(i, j) = term;
        }
    return adv;
}

ScalarField3D RobSolver::advect_scalar(const VelocityField& v, const ScalarField3D& s) const {
    const int nx = dom_.nx, ny = dom_.ny, nz = dom_.nz;
    const double dx = dom_.dx(), dy = dom_.dy();
    ScalarField3D out(dom_, "adv");
    // horizontal centered fluxes only; wall fluxes vanish with the no-slip
    // faces and there is no vertical advection
    std::vector<double> fx(std::size_t(nx + 1) * ny), fy(std::size_t(nx) * (ny + 1));
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            fx[std::size_t(j) * (nx + 1) + 0] = 0.0;
            fx[std::size_t(j) * (nx + 1) + nx] = 0.0;
            for (int i = 1; i < nx; ++i)
                fx[std::size_t(j) * (nx + 1) + i] =
                    v.u1(i, j) * 0.5 * (s.at(i - 1, j, k) + s.at(i, j, k));
        }
        for (int i = 0; i < nx; ++i) {
            fy[i] = 0.0;
            fy[std::size_t(ny) * nx + i] = 0.0;
        }
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                fy[std::size_t(j) * nx + i] =
                    v.u2(i, j) * 0.5 * (s.at(i, j - 1, k) + s.at(i, j, k));
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                out.at(i, j, k) =
                    (fx[std::size_t(j) * (nx + 1) + i + 1] - fx[std::size_t(j) * (nx + 1) + i]) / dx +
                    (fy[std::size_t(j + 1) * nx + i] - fy[std::size_t(j) * nx + i]) / dy;
    }
    return out;
}

void RobSolver::check_cfl(const VelocityField& v) const {
    const double cou = v.max_abs() * dt_ / std::min(dom_.dx(), dom_.dy());
    if (cou > 1.0)
        throw CFLViolation("Courant number " + format_double(cou) + " exceeds 1 at dt = " +
                           format_double(dt_));
}

ScalarField3D RobSolver::step_temperature(const State& s, const VelocityField& v_adv) const {
    check_cfl(v_adv);
    const double c = p_.alpha / (1.0 + p_.alpha);

    ScalarField3D total(dom_, "ZplusB");
    for (std::size_t n = 0; n < total.size(); ++n)
        total.data()[n] = s.Z.data()[n] + theta_b_hat_.data()[n];
    const ScalarField3D adv = advect_scalar(v_adv, total);

    const double avg_z = domain_average(s.Z);
    ScalarField3D rhs(dom_, "rhs");
    for (std::size_t n = 0; n < rhs.size(); ++n)
        rhs.data()[n] = s.Z.data()[n] - c * avg_z - dt_ * adv.data()[n];

    // previous Z seeds the iterative solve; the tolerance is unchanged
    ScalarField3D Z = temp_solver_.solve(rhs, nullptr, &s.Z);
    Z.set_name("Z");
    return Z;
}

VelocityField RobSolver::step_velocity(const State& s, const ScalarField3D& Z_new,
                                       const VelocityField* extra_force) const {
    check_cfl(s.v);
    const VelocityField adv = advect_velocity(s.v);
    const VelocityField buoy = buoyancy_force(Z_new);

    VelocityField star = s.v;
    for (int j = 0; j < dom_.ny; ++j)
        for (int i = 1; i < dom_.nx; ++i) {
            double f = -adv.u1(i, j) + buoy.u1(i, j);
            if (extra_force) f += extra_force->u1(i, j);
            star.u1(i, j) += dt_ * f;
        }
    for (int j = 1; j < dom_.ny; ++j)
        for (int i = 0; i < dom_.nx; ++i) {
            double f = -adv.u2(i, j) + buoy.u2(i, j);
            if (extra_force) f += extra_force->u2(i, j);
            star.u2(i, j) += dt_ * f;
        }

    VelocityField diffused = visc_solver_.solve(star);

    ScalarField2D rhs = divergence_h(diffused);
    for (double& v : rhs.data()) v /= dt_;
    const ScalarField2D pr = pressure_solver_.solve(rhs);

    const VelocityField gp = gradient_h(pr);
    for (int j = 0; j < dom_.ny; ++j)
        for (int i = 1; i < dom_.nx; ++i)
            diffused.u1(i, j) -= dt_ * gp.u1(i, j);
    for (int j = 1; j < dom_.ny; ++j)
        for (int i = 0; i < dom_.nx; ++i)
            diffused.u2(i, j) -= dt_ * gp.u2(i, j);
    diffused.enforce_noslip();
    return diffused;
}

State RobSolver::step(const State& s, const VelocityField* extra_force) const {
    State next;
    next.Z = step_temperature(s, s.v);
    next.v = step_velocity(s, next.Z, extra_force);
    next.t = s.t + dt_;
    return next;
}

SeriesRow RobSolver::sample(const State& s) const {
    SeriesRow r;
    r.t = s.t;
    const double ul2 = l2_norm(s.v);
    r.ke = 0.5 * ul2 * ul2;
    r.u_l2 = ul2;
    const double uh1 = h1_semi_sq(s.v);
    r.u_w12 = std::sqrt(ul2 * ul2 + uh1);
    r.vel_diss = p_.mu * uh1;
    r.buoy_work = inner_product(buoyancy_force(s.Z), s.v);

    const double c = p_.alpha / (1.0 + p_.alpha);
    double z2 = 0.0;
    for (double v : s.Z.data()) z2 += v * v;
    z2 /= double(s.Z.size());
    const double avg_z = domain_average(s.Z);
    r.thermal = 0.5 * (z2 - c * avg_z * avg_z);
    r.z_diss = p_.kappa * h1_semi_sq(s.Z) / dom_.volume();

    // avg(theta_b_hat v . grad Z) in the flux form matched to the advection
    // stencil (interior faces only; wall fluxes vanish)
    {
        const double dx = dom_.dx(), dy = dom_.dy();
        double acc = 0.0;
        for (int k = 0; k < dom_.nz; ++k) {
            for (int j = 0; j < dom_.ny; ++j)
                for (int i = 1; i < dom_.nx; ++i)
                    acc += s.v.u1(i, j) *
                           0.5 * (theta_b_hat_.at(i - 1, j, k) + theta_b_hat_.at(i, j, k)) *
                           (s.Z.at(i, j, k) - s.Z.at(i - 1, j, k)) / dx;
            for (int j = 1; j < dom_.ny; ++j)
                for (int i = 0; i < dom_.nx; ++i)
                    acc += s.v.u2(i, j) *
                           0.5 * (theta_b_hat_.at(i, j - 1, k) + theta_b_hat_.at(i, j, k)) *
                           (s.Z.at(i, j, k) - s.Z.at(i, j - 1, k)) / dy;
        }
        r.thermal_rhs = acc * dom_.cell_volume() / dom_.volume();
    }

    const ScalarField3D Theta = reconstruct_Theta(s.Z);
    double tmax = Theta.data()[0], tmin = Theta.data()[0];
    for (double v : Theta.data()) {
        tmax = std::max(tmax, v);
        tmin = std::min(tmin, v);
    }
    r.theta_max = tmax;
    r.theta_min = tmin;
    const FieldNorms tn = norms(Theta);
    r.theta_l2 = tn.l2;
    r.theta_w12 = std::sqrt(tn.l2 * tn.l2 + tn.h1_semi * tn.h1_semi);
    r.theta_inf = tn.linf;
    r.bc_residual = nonlocal_bc_residual(s.Z, theta_b_hat_, theta_b_, p_, F_);
    r.max_div = max_abs_divergence(s.v);
    r.courant = s.v.max_abs() * dt_ / std::min(dom_.dx(), dom_.dy());
    return r;
}

RunResult simulate(const RobSolver& solver, State initial, const StepControl& ctl,
                   const SnapshotSink& sink) {
    const double dt = solver.dt();
    if (ctl.t_end < 0.0) throw ValidationError("time.t_end", "must be >= 0");
    const long long nsteps = std::llround(ctl.t_end / dt);
    if (std::abs(nsteps * dt - ctl.t_end) > 1e-9 * std::max(1.0, ctl.t_end))
        throw ValidationError("time.t_end", "must be an integer number of steps");

    const long long every_series =
        ctl.series_every <= 0.0 ? 1 : std::max(1LL, std::llround(ctl.series_every / dt));
    const long long every_snap =
        ctl.snapshot_every <= 0.0 ? 0 : std::max(1LL, std::llround(ctl.snapshot_every / dt));

    RunResult out;
    State s = std::move(initial);
    int snap_index = 0;
    out.series.push_back(solver.sample(s));
    if (sink) sink(s, snap_index++);

    for (long long n = 1; n <= nsteps; ++n) {
        try {
            s = solver.step(s);
        } catch (const Error&) {
            // dump the last good state before aborting
            if (sink) sink(s, snap_index);
            throw;
        }
        s.t = double(n) * dt;
        const bool last = (n == nsteps);
        if (n % every_series == 0 || last) out.series.push_back(solver.sample(s));
        if (sink && ((every_snap > 0 && n % every_snap == 0) || last)) sink(s, snap_index++);
    }
    out.final_state = std::move(s);
    return out;
}

static const char* kSeriesHeader =
    "t,ke,thermal,vel_diss,buoy_work,z_diss,thermal_rhs,theta_max,theta_min,"
    "u_l2,u_w12,theta_l2,theta_w12,theta_inf,bc_residual,max_div,courant";

void write_series_csv(const std::string& path, const std::vector<SeriesRow>& series) {
    std::ostringstream os;
    os << kSeriesHeader << "\n";
    for (const SeriesRow& r : series) {
        const double cols[] = {r.t,         r.ke,        r.thermal,  r.vel_diss, r.buoy_work,
                               r.z_diss,    r.thermal_rhs, r.theta_max, r.theta_min, r.u_l2,
                               r.u_w12,     r.theta_l2,  r.theta_w12, r.theta_inf, r.bc_residual,
                               r.max_div,   r.courant};
        for (std::size_t i = 0; i < std::size(cols); ++i)
            os << (i ? "," : "") << format_double(cols[i]);
        os << "\n";
    }
    atomic_write_file(path, os.str());
}

std::vector<SeriesRow> read_series_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty series file " + path);
    if (line != kSeriesHeader) throw ParseError("unexpected series header in " + path);
    std::vector<SeriesRow> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() != 17) throw ParseError("bad series row in " + path, lineno);
        SeriesRow r;
        r.t = vals[0];
        r.ke = vals[1];
        r.thermal = vals[2];
        r.vel_diss = vals[3];
        r.buoy_work = vals[4];
        r.z_diss = vals[5];
        r.thermal_rhs = vals[6];
        r.theta_max = vals[7];
        r.theta_min = vals[8];
        r.u_l2 = vals[9];
        r.u_w12 = vals[10];
        r.theta_l2 = vals[11];
        r.theta_w12 = vals[12];
        r.theta_inf = vals[13];
        r.bc_residual = vals[14];
        r.max_div = vals[15];
        r.courant = vals[16];
        out.push_back(r);
    }
    return out;
}

} // namespace robsim
