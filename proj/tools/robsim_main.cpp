#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "robsim/assimilation.hpp"
#include "robsim/config.hpp"
#include "robsim/diagnostics.hpp"
#include "robsim/field_io.hpp"

namespace fs = std::filesystem;
using namespace robsim;

namespace {

int exit_code_for(const Error& e) {
    const std::string& n = e.name();
    if (n == "ParseError" || n == "ValidationError" || n == "SpecMismatch" ||
        n == "NonMonotoneTime")
        return 2;
    if (n == "IoError") return 4;
    return 3; // numerical failure
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string snap_name(const std::string& dir, const char* stem, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%06d.rob", stem, index);
    return dir + "/" + buf;
}

SnapshotSink make_sink(const std::string& dir) {
    return [dir](const State& s, int index) {
        write_velocity_snapshot(snap_name(dir, "vel", index), s.v, s.t);
        write_scalar_snapshot(snap_name(dir, "Z", index), s.Z, s.t);
    };
}

RobSolver build_solver(const RunConfig& cfg) {
    const DomainSpec dom = cfg.domain();
    return RobSolver(dom, cfg.physics(), make_scalar_expression(cfg.physics_theta_b, dom),
                     cfg.time_dt, cfg.elliptic());
}

void write_resolved_config(const RunConfig& cfg, const std::string& dir) {
    atomic_write_file(dir + "/config.resolved", cfg.dump());
}

void write_twin_series(const std::string& path, const std::vector<TwinSample>& series) {
    std::ostringstream os;
    os << "t,vel_err,theta_err,lyapunov\n";
    for (const TwinSample& s : series)
        os << format_double(s.t) << "," << format_double(s.vel_err) << ","
           << format_double(s.theta_err) << "," << format_double(s.lyap) << "\n";
    atomic_write_file(path, os.str());
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    RunConfig cfg = RunConfig::parse_file(config_path);
    ensure_dir(out_dir);
    write_resolved_config(cfg, out_dir);
    RobSolver solver = build_solver(cfg);
    const DomainSpec dom = cfg.domain();
    State s0 = solver.make_state(cfg.initial_velocity(dom), cfg.initial_theta(dom));
    RunResult res = simulate(solver, std::move(s0), cfg.step_control(), make_sink(out_dir));
    write_series_csv(out_dir + "/series.csv", res.series);
    std::cout << "simulate: t_end=" << format_double(res.final_state.t)
              << " ke=" << format_double(res.series.back().ke)
              << " samples=" << res.series.size() << "\n";
    return 0;
}

int cmd_twin(const std::string& config_path, double lambda_flag, bool lambda_set,
             const std::string& interp_flag, const std::string& out_dir) {
    RunConfig cfg = RunConfig::parse_file(config_path);
    if (lambda_set) cfg.set("nudging.lambda", format_double(lambda_flag));
    if (!interp_flag.empty()) cfg.set("nudging.interp", interp_flag);
    cfg.validate();
    ensure_dir(out_dir);
    ensure_dir(out_dir + "/ref");
    ensure_dir(out_dir + "/nudged");
    write_resolved_config(cfg, out_dir);
    // the per-system trajectories are usable as --traj inputs on their own
    write_resolved_config(cfg, out_dir + "/ref");
    write_resolved_config(cfg, out_dir + "/nudged");

    RobSolver solver = build_solver(cfg);
    const DomainSpec dom = cfg.domain();
    State ref0 = solver.make_state(cfg.initial_velocity(dom), cfg.initial_theta(dom));
    State nudged0 = solver.make_state(cfg.nudged_initial_velocity(dom),
                                      cfg.nudged_initial_theta(dom));

    TwinControl ctl;
    ctl.spinup = cfg.nudging_spinup;
    ctl.t_end = cfg.time_t_end;
    ctl.series_every = cfg.output_series_every;
    TwinResult res =
        twin_experiment(solver, ref0, nudged0, cfg.nudging(), ctl, make_sink(out_dir + "/ref"),
                        make_sink(out_dir + "/nudged"), cfg.output_snapshot_every);
    write_twin_series(out_dir + "/twin_series.csv", res.series);

    std::cout << "twin: t_end=" << format_double(res.series.back().t)
              << " vel_err=" << format_double(res.series.back().vel_err)
              << " theta_err=" << format_double(res.series.back().theta_err)
              << " E=" << format_double(res.series.back().lyap) << "\n";
    try {
        std::vector<std::pair<double, double>> e;
        for (const TwinSample& s : res.series) e.emplace_back(s.t, s.lyap);
        DecayEstimate est = estimate_decay_rate(e, 1e-24, 1.0);
        std::cout << "twin: beta_hat=" << format_double(est.beta_hat)
                  << " r2=" << format_double(est.r_squared) << " n=" << est.samples_used
                  << "\n";
    } catch (const InsufficientData&) {
        std::cout << "twin: decay fit skipped (insufficient samples above floor)\n";
    }
    return 0;
}

int cmd_observe(const std::string& traj_dir, const std::string& interp_spec, double every,
                const std::string& out_file) {
    RunConfig cfg = RunConfig::parse_file(traj_dir + "/config.resolved");
    ObservationStream stream = export_observations(
        traj_dir, cfg.domain(), InterpolantSpec::parse(interp_spec), every, out_file);
    std::cout << "observe: records=" << stream.records.size() << " mx=" << stream.mx
              << " my=" << stream.my << "\n";
    return 0;
}

int cmd_assimilate(const std::string& config_path, const std::string& obs_path,
                   double lambda_flag, bool lambda_set, const std::string& out_dir) {
    RunConfig cfg = RunConfig::parse_file(config_path);
    if (lambda_set) cfg.set("nudging.lambda", format_double(lambda_flag));
    cfg.validate();

    ObservationStream stream = ingest_observations(obs_path);
    const InterpolantSpec want = InterpolantSpec::parse(cfg.nudging_interp);
    if (!(stream.spec == want))
        throw SpecMismatch("observation stream is " + stream.spec.to_string() +
                           " but the config expects " + want.to_string());

    ensure_dir(out_dir);
    write_resolved_config(cfg, out_dir);
    RobSolver solver = build_solver(cfg);
    const DomainSpec dom = cfg.domain();
    State s0 = solver.make_state(cfg.initial_velocity(dom), cfg.initial_theta(dom));
    AssimilationResult res = assimilate_from_stream(solver, std::move(s0), stream,
                                                    cfg.nudging_lambda, cfg.step_control(),
                                                    make_sink(out_dir));
    std::ostringstream os;
    os << "t,obs_mismatch\n";
    for (const AssimilationSample& s : res.series)
        os << format_double(s.t) << "," << format_double(s.obs_mismatch) << "\n";
    atomic_write_file(out_dir + "/assim_series.csv", os.str());
    std::cout << "assimilate: t_end=" << format_double(res.final_state.t)
              << " obs_mismatch=" << format_double(res.series.back().obs_mismatch) << "\n";
    return 0;
}

int cmd_diagnose(const std::string& traj_dir, const std::string& out_file) {
    RunConfig cfg = RunConfig::parse_file(traj_dir + "/config.resolved");
    std::vector<SeriesRow> series = read_series_csv(traj_dir + "/series.csv");
    write_report_csv(out_file, series);

    double worst_bc = 0.0, worst_div = 0.0;
    for (const SeriesRow& r : series) {
        worst_bc = std::max(worst_bc, r.bc_residual);
        worst_div = std::max(worst_div, r.max_div);
    }
    std::cout << "diagnose: samples=" << series.size()
              << " max_bc_residual=" << format_double(worst_bc)
              << " max_div=" << format_double(worst_div) << "\n";

    const double alpha = cfg.physics_alpha;
    if (alpha > 0.0 && alpha < 1.0) {
        const DomainSpec dom = cfg.domain();
        const PhysicsParams p = cfg.physics();
        const SpaceFn tb = make_scalar_expression(cfg.physics_theta_b, dom);
        const double sup = boundary_sup(dom, effective_boundary_data(dom, tb, p));
        MaxPrincipleReport rep = max_principle_check(series, alpha, sup);
        std::cout << "diagnose: max_principle=" << (rep.pass ? "pass" : "FAIL")
                  << " bound=" << format_double(rep.bound)
                  << " worst_margin=" << format_double(rep.worst_margin) << " at t="
                  << format_double(rep.worst_t) << "\n";
    } else {
        std::cout << "diagnose: max_principle skipped (alpha outside (0,1))\n";
    }
    return 0;
}

int cmd_tune(const std::string& config_path, const std::string& out_file) {
    RunConfig cfg = RunConfig::parse_file(config_path);
    RobSolver solver = build_solver(cfg);
    const DomainSpec dom = cfg.domain();
    State ref0 = solver.make_state(cfg.initial_velocity(dom), cfg.initial_theta(dom));
    ref0 = spin_up(solver, std::move(ref0), cfg.nudging_spinup);
    State nudged0 = solver.make_state(cfg.nudged_initial_velocity(dom),
                                      cfg.nudged_initial_theta(dom));
    TuneResult res = tune_nudging(solver, ref0, nudged0, cfg.tune());

    std::ostringstream os;
    os << "# nudging parameters found by the bracketing search\n";
    for (const TuneProbe& p : res.probes)
        os << "# probe lambda=" << format_double(p.lambda) << " delta=" << format_double(p.delta)
           << " monotone=" << (p.monotone ? "yes" : "no")
           << " decay_ratio=" << format_double(p.decay_ratio) << "\n";
    if (!res.ok) {
        os << "# search failed\n";
        atomic_write_file(out_file, os.str());
        throw NonConvergence("no (lambda, delta) pair produced monotone decay in the probe "
                             "window; see " + out_file,
                             0.0, int(res.probes.size()));
    }
    os << "nudging.lambda = " << format_double(res.lambda) << "\n";
    os << "nudging.interp = volume:" << format_double(res.delta) << "\n";
    atomic_write_file(out_file, os.str());
    std::cout << "tune: lambda=" << format_double(res.lambda)
              << " delta=" << format_double(res.delta) << " probes=" << res.probes.size()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotating Oberbeck-Boussinesq simulator with nudging data assimilation"};
    app.require_subcommand(1);

    std::string config_path, out_path, traj_dir, interp_spec, obs_path;
    double lambda = 0.0, every = 0.0;

    auto* sim = app.add_subcommand("simulate", "run the solver from a config");
    sim->add_option("--config", config_path)->required();
    sim->add_option("--out", out_path)->required();

    auto* twin = app.add_subcommand("twin", "reference + nudged run in lockstep");
    twin->add_option("--config", config_path)->required();
    auto* twin_lambda = twin->add_option("--lambda", lambda, "override nudging.lambda");
    twin->add_option("--interp", interp_spec, "override nudging.interp");
    twin->add_option("--out", out_path)->required();

    auto* obs = app.add_subcommand("observe", "extract coarse observations from a trajectory");
    obs->add_option("--traj", traj_dir)->required();
    obs->add_option("--interp", interp_spec)->required();
    obs->add_option("--every", every, "observation cadence (0 = every snapshot)");
    obs->add_option("--out", out_path)->required();

    auto* assim = app.add_subcommand("assimilate", "nudge against an observation file");
    assim->add_option("--config", config_path)->required();
    assim->add_option("--obs", obs_path)->required();
    auto* assim_lambda = assim->add_option("--lambda", lambda, "override nudging.lambda");
    assim->add_option("--out", out_path)->required();

    auto* diag = app.add_subcommand("diagnose", "balance residuals and bounds for a trajectory");
    diag->add_option("--traj", traj_dir)->required();
    diag->add_option("--out", out_path)->required();

    auto* tune = app.add_subcommand("tune", "bracketing search for (lambda, delta)");
    tune->add_option("--config", config_path)->required();
    tune->add_option("--out", out_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        worker_count_from_env(); // validates ROBSIM_THREADS
        if (sim->parsed()) return cmd_simulate(config_path, out_path);
        if (twin->parsed())
            return cmd_twin(config_path, lambda, twin_lambda->count() > 0, interp_spec,
                            out_path);
        if (obs->parsed()) return cmd_observe(traj_dir, interp_spec, every, out_path);
        if (assim->parsed())
            return cmd_assimilate(config_path, obs_path, lambda, assim_lambda->count() > 0,
                                  out_path);
        if (diag->parsed()) return cmd_diagnose(traj_dir, out_path);
        if (tune->parsed()) return cmd_tune(config_path, out_path);
    } catch (const Error& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
