#pragma once

#include <functional>
#include <vector>

#include "robsim/elliptic.hpp"
#include "robsim/transforms.hpp"

namespace robsim {

/// Evolving state: horizontal velocity and the homogeneous-trace temperature
/// variable. Pressure is transient (zero-mean gauge) and recomputed each step.
struct State {
    double t = 0.0;
    VelocityField v;
    ScalarField3D Z;
};

struct StepControl {
    double dt = 1e-3;
    double cfl = 0.5; // Courant target; steps abort only above 1
    double t_end = 1.0;
    double series_every = 0.0;   // 0 = every step
    double snapshot_every = 0.0; // 0 = initial + final only
};

/// One diagnostics sample. Integral quantities use the same quadratures and
/// ghost conventions as the stepping stencils, so the balance residuals
/// measure time-discretization error only.
struct SeriesRow {
    double t = 0;
    double ke = 0;          // 0.5 ||v||^2_L2(horizontal box)
    double thermal = 0;     // 0.5 [avg(Z^2) - a/(1+a) avg(Z)^2]
    double vel_diss = 0;    // mu ||grad v||^2
    double buoy_work = 0;   // <applied buoyancy force, v>
    double z_diss = 0;      // kappa avg|grad Z|^2
    double thermal_rhs = 0; // avg(theta_b_hat v . grad Z)
    double theta_max = 0, theta_min = 0;
    double u_l2 = 0, u_w12 = 0;
    double theta_l2 = 0, theta_w12 = 0, theta_inf = 0;
    double bc_residual = 0; // nonlocal boundary relation, max over faces
    double max_div = 0;
    double courant = 0;
};

/// Time integrator for the transformed system: projection method for the
/// horizontal momentum equation with buoyancy -<Theta> grad F, and a
/// semi-implicit advance of the Z equation through the rank-one nonlocal
/// solve. Explicit centered (energy-neutral) advection, implicit diffusion,
/// first-order splitting with the temperature advanced first.
class RobSolver {
public:
    RobSolver(const DomainSpec& dom, const PhysicsParams& p, const SpaceFn& theta_b,
              double dt, EllipticOptions opts = {});

    const DomainSpec& domain() const { return dom_; }
    const PhysicsParams& params() const { return p_; }
    double dt() const { return dt_; }
    const ScalarField3D& forcing_potential() const { return F_; }
    const ScalarField3D& theta_b_hat() const { return theta_b_hat_; }
    const SpaceFn& theta_b() const { return theta_b_; }

    /// Build the evolving state from physical initial data (velocity and
    /// temperature deviation). Incompatible data merely produce a transient.
    State make_state(const VelocityField& v0, const ScalarField3D& theta0) const;

    ScalarField3D reconstruct_Theta(const ScalarField3D& Z) const;
    ScalarField3D reconstruct_theta(const ScalarField3D& Z) const;

    /// -<Theta> grad_h F at the interior faces.
    VelocityField buoyancy_force(const ScalarField3D& Z) const;

    /// Explicit flux divergence of (Z + theta_b_hat) by the layer-wise
    /// velocity, then the implicit nonlocal Helmholtz solve.
    ScalarField3D step_temperature(const State& s, const VelocityField& v_for_advection) const;

    /// Explicit advection, buoyancy + extra force, implicit diffusion,
    /// pressure projection. The result is discretely divergence free and
    /// exactly no-slip.
    VelocityField step_velocity(const State& s, const ScalarField3D& Z_new,
                                const VelocityField* extra_force) const;

    State step(const State& s, const VelocityField* extra_force = nullptr) const;

    SeriesRow sample(const State& s) const;

    // centered advection operators (exposed for the conservation tests)
    VelocityField advect_velocity(const VelocityField& v) const;
    ScalarField3D advect_scalar(const VelocityField& v, const ScalarField3D& s) const;

private:
    void check_cfl(const VelocityField& v) const;

    DomainSpec dom_;
    PhysicsParams p_;
    SpaceFn theta_b_;
    SpaceFn theta_b_eff_;
    double dt_;
    EllipticOptions opts_;
    ScalarField3D F_;
    ScalarField3D theta_b_hat_;
    VelocityField gradF_; // horizontal gradient of F at faces (layer independent)
    NonlocalHelmholtz3D temp_solver_;
    FaceHelmholtz2D visc_solver_;
    PoissonNeumann2D pressure_solver_;
};

struct RunResult {
    std::vector<SeriesRow> series;
    State final_state;
};

using SnapshotSink = std::function<void(const State&, int index)>;

/// Advance to t_end (which must be an integer number of steps), sampling the
/// series at the configured cadence and handing snapshot states to the sink.
RunResult simulate(const RobSolver& solver, State initial, const StepControl& ctl,
                   const SnapshotSink& sink = {});

void write_series_csv(const std::string& path, const std::vector<SeriesRow>& series);
std::vector<SeriesRow> read_series_csv(const std::string& path);

} // namespace robsim
