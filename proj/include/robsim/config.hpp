#pragma once

#include <string>

#include "robsim/assimilation.hpp"
#include "robsim/solver.hpp"

namespace robsim {

/// Resolved run configuration. Parsed from line-oriented `dotted.key = value`
/// files ('#' comments); unknown keys and duplicates are hard errors, every
/// key has a typed default, and dump() re-parses to an identical config.
struct RunConfig {
    std::string mode = "standard"; // standard | longtime

    double domain_Lx = 1.0, domain_Ly = 1.0;
    int domain_nx = 64, domain_ny = 64, domain_nz = 8;

    double physics_mu = 1e-2, physics_kappa = 1e-2, physics_alpha = 0.4, physics_a = 0.0;
    double physics_gx = 0.0, physics_gy = 0.0, physics_gz = 0.0;
    std::string physics_theta_b = "constant:0";

    double time_dt = 2e-3, time_t_end = 1.0, time_cfl = 0.5;

    std::string init_velocity = "zero";
    std::string init_theta = "constant:0";
    std::string init_restart_velocity; // optional snapshot paths; empty = use
    std::string init_restart_theta;    // the expressions above

    double nudging_lambda = 0.0;
    std::string nudging_interp = "volume:0.25";
    double nudging_spinup = 20.0;
    std::string nudging_init_velocity = "zero";
    std::string nudging_init_theta = "constant:0";

    double output_series_every = 0.0;
    double output_snapshot_every = 0.0;

    double tune_lambda0 = 4.0, tune_delta0 = 0.25, tune_probe_t = 2.0;
    double tune_transient = 1.0, tune_decay_target = 0.5;
    int tune_max_doublings = 6, tune_max_halvings = 3;

    double elliptic_tol = 1e-10;
    int elliptic_max_iter = 20000;

    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_string(const std::string& text);

    /// Set one key from its text form (used for CLI flag overrides).
    void set(const std::string& key, const std::string& value);

    /// Cross-field validation; throws ValidationError.
    void validate() const;

    /// Canonical text form; reparses to an identical config.
    std::string dump() const;

    DomainSpec domain() const;
    PhysicsParams physics() const;
    StepControl step_control() const;
    EllipticOptions elliptic() const;
    NudgingParams nudging() const;
    TuneOptions tune() const;

    /// Initial data (expressions or restart snapshots) for the main run and
    /// for the nudged copy of a twin experiment.
    VelocityField initial_velocity(const DomainSpec& dom) const;
    ScalarField3D initial_theta(const DomainSpec& dom) const;
    VelocityField nudged_initial_velocity(const DomainSpec& dom) const;
    ScalarField3D nudged_initial_theta(const DomainSpec& dom) const;
};

/// Worker count pinned by the ROBSIM_THREADS environment variable (default 1);
/// throws ValidationError for non-positive or malformed values.
int worker_count_from_env();

} // namespace robsim
