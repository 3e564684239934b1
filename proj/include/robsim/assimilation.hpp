#pragma once

#include "robsim/interpolant.hpp"
#include "robsim/solver.hpp"

namespace robsim {

struct NudgingParams {
    double lambda = 0.0; // feedback coefficient, >= 0
    InterpolantSpec spec;

    void validate() const {
        if (lambda < 0.0) throw ValidationError("nudging.lambda", "must be >= 0");
    }
};

struct ObservationRecord {
    double t = 0.0;
    CoarseVelocity obs;
};

/// Timestamped coarse velocity observations, all sharing one interpolant
/// spec. `from_file` distinguishes externally supplied streams from
/// twin-generated ones.
struct ObservationStream {
    InterpolantSpec spec;
    int mx = 0, my = 0; // coarse resolution of every record
    std::vector<ObservationRecord> records;
    bool from_file = false;
};

/// -Lambda (I_delta[v_tilde] - obs) at the faces; zero when the coarse view
/// of v_tilde matches the observation.
VelocityField nudging_force(const Interpolant& interp, const VelocityField& v_tilde,
                            const CoarseVelocity& obs, double lambda);

/// One step of the forced system: identical to RobSolver::step with the
/// nudging force as the extra velocity forcing. Only the velocity is nudged;
/// the temperature equation is untouched.
State nudged_step(const RobSolver& solver, const Interpolant& interp, const State& s,
                  const CoarseVelocity& obs, double lambda);

/// Quadratic synchronization functional:
///   E = ||v_tilde - v||^2_L2 + [avg(dZ^2) - alpha/(1+alpha) avg(dZ)^2],
/// nonnegative, zero exactly when the states coincide.
double lyapunov(const State& ref, const State& nudged, double alpha);

struct TwinSample {
    double t = 0.0;
    double vel_err = 0.0;   // ||v_tilde - v||_L2
    double theta_err = 0.0; // ||Theta_tilde - Theta||_L2
    double lyap = 0.0;
};

struct TwinResult {
    std::vector<TwinSample> series;
    State ref_final;
    State nudged_final;
};

struct TwinControl {
    double spinup = 20.0; // reference pre-run before errors are recorded
    double t_end = 20.0;
    double series_every = 0.0; // 0 = every step
};

/// Advance reference and nudged systems in lockstep; at each step the nudged
/// copy is forced toward the reference's coarse velocity observation taken at
/// the step start. Optional sinks receive snapshot states of both systems
/// every `snapshot_every` (0 = initial + final).
TwinResult twin_experiment(const RobSolver& solver, const State& ref_initial,
                           const State& nudged_initial, const NudgingParams& nudging,
                           const TwinControl& ctl, const SnapshotSink& ref_sink = {},
                           const SnapshotSink& nudged_sink = {}, double snapshot_every = 0.0);

/// Reference spin-up helper: advance `spinup` time units and reset the clock.
State spin_up(const RobSolver& solver, State s, double spinup);

struct DecayEstimate {
    double beta_hat = 0.0;
    double r_squared = 1.0;
    int samples_used = 0;
};

/// Least-squares slope of log E over [t_min, saturation), ignoring samples
/// at or below `floor`. Requires at least 10 usable samples.
DecayEstimate estimate_decay_rate(const std::vector<std::pair<double, double>>& series,
                                  double floor = 1e-24, double t_min = 0.0);

// Observation file format:
//   ROBOBS v1 kind=<volume|spectral> delta=<float> mx=<int> my=<int>
// then repeated [t=<float> line, ROBFIELD u1, ROBFIELD u2] with the coarse
// representation in the field records.
ObservationStream ingest_observations(const std::string& path);
void write_observations(const std::string& path, const ObservationStream& stream);

/// Apply the interpolant to the velocity snapshots of a trajectory directory
/// at the given cadence (0 = every snapshot) and write the stream. The grid
/// comes from the trajectory's resolved config (extents are not stored in
/// snapshots).
ObservationStream export_observations(const std::string& traj_dir, const DomainSpec& dom,
                                      const InterpolantSpec& spec, double every,
                                      const std::string& out_path);

struct AssimilationSample {
    double t = 0.0;
    double obs_mismatch = 0.0; // ||I_delta[v_tilde] - held observation||_L2
};

struct AssimilationResult {
    std::vector<AssimilationSample> series;
    State final_state;
};

/// Run the forced system against an external stream, holding the latest
/// observation between observation times (zero-order hold). The true state is
/// unknown, so only the innovation against the held observation is reported.
AssimilationResult assimilate_from_stream(const RobSolver& solver, State initial,
                                          const ObservationStream& stream, double lambda,
                                          const StepControl& ctl,
                                          const SnapshotSink& sink = {});

struct TuneOptions {
    double lambda0 = 4.0;
    double delta0 = 0.25;
    double probe_t = 2.0;
    double transient = 1.0;    // grace window before monotonicity is required
    double decay_target = 0.5; // require E(end) <= target * E(transient)
    int max_doublings = 6;
    int max_halvings = 3;
};

struct TuneProbe {
    double lambda = 0, delta = 0;
    bool monotone = false;
    double decay_ratio = 0; // E(end)/E(transient)
};

struct TuneResult {
    bool ok = false;
    double lambda = 0, delta = 0;
    std::vector<TuneProbe> probes;
};

/// Bracketing search: double lambda (up to a stability cap) and halve delta
/// until the probe-window Lyapunov series decays monotonically. The
/// theoretical constants are non-constructive, so they are found empirically.
TuneResult tune_nudging(const RobSolver& solver, const State& ref_initial,
                        const State& nudged_initial, const TuneOptions& opts);

} // namespace robsim
