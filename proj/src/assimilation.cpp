#include "robsim/assimilation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "robsim/field_io.hpp"
#include "robsim/operators.hpp"

namespace robsim {

VelocityField nudging_force(const Interpolant& interp, const VelocityField& v_tilde,
                            const CoarseVelocity& obs, double lambda) {
    CoarseVelocity d = interp.restrict(v_tilde);
    if (d.c1.size() != obs.c1.size() || d.c2.size() != obs.c2.size())
        throw SpecMismatch("observation does not match interpolant resolution");
    for (std::size_t n = 0; n < d.c1.size(); ++n) d.c1[n] -= obs.c1[n];
    for (std::size_t n = 0; n < d.c2.size(); ++n) d.c2[n] -= obs.c2[n];
    VelocityField f = interp.prolong(d);
    for (double& x : f.u1_data()) x *= -lambda;
    for (double& x : f.u2_data()) x *= -lambda;
    return f;
}

State nudged_step(const RobSolver& solver, const Interpolant& interp, const State& s,
                  const CoarseVelocity& obs, double lambda) {
    if (lambda == 0.0) return solver.step(s);
    const VelocityField f = nudging_force(interp, s.v, obs, lambda);
    return solver.step(s, &f);
}

double lyapunov(const State& ref, const State& nudged, double alpha) {
    VelocityField dv = nudged.v;
    for (std::size_t n = 0; n < dv.u1_data().size(); ++n)
        dv.u1_data()[n] -= ref.v.u1_data()[n];
    for (std::size_t n = 0; n < dv.u2_data().size(); ++n)
        dv.u2_data()[n] -= ref.v.u2_data()[n];
    const double vl2 = l2_norm(dv);

    const double c = alpha / (1.0 + alpha);
    double s2 = 0.0, s1 = 0.0;
    const std::size_t n = ref.Z.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = nudged.Z.data()[i] - ref.Z.data()[i];
        s2 += d * d;
        s1 += d;
    }
    s2 /= double(n);
    s1 /= double(n);
    return vl2 * vl2 + (s2 - c * s1 * s1);
}

State spin_up(const RobSolver& solver, State s, double spinup) {
    const double dt = solver.dt();
    const long long n = std::llround(spinup / dt);
    if (std::abs(n * dt - spinup) > 1e-9 * std::max(1.0, spinup))
        throw ValidationError("nudging.spinup", "must be an integer number of steps");
    for (long long k = 0; k < n; ++k) s = solver.step(s);
    s.t = 0.0;
    return s;
}

namespace {

TwinSample twin_sample(const RobSolver& solver, const State& ref, const State& nudged) {
    TwinSample out;
    out.t = ref.t;
    VelocityField dv = nudged.v;
    for (std::size_t n = 0; n < dv.u1_data().size(); ++n)
        dv.u1_data()[n] -= ref.v.u1_data()[n];
    for (std::size_t n = 0; n < dv.u2_data().size(); ++n)
        dv.u2_data()[n] -= ref.v.u2_data()[n];
    out.vel_err = l2_norm(dv);

    ScalarField3D dTheta = solver.reconstruct_Theta(nudged.Z);
    const ScalarField3D ref_Theta = solver.reconstruct_Theta(ref.Z);
    for (std::size_t n = 0; n < dTheta.size(); ++n) dTheta.data()[n] -= ref_Theta.data()[n];
    out.theta_err = norms(dTheta).l2;
    out.lyap = lyapunov(ref, nudged, solver.params().alpha);
    return out;
}

} // namespace

TwinResult twin_experiment(const RobSolver& solver, const State& ref_initial,
                           const State& nudged_initial, const NudgingParams& nudging,
                           const TwinControl& ctl, const SnapshotSink& ref_sink,
                           const SnapshotSink& nudged_sink, double snapshot_every) {
    nudging.validate();
    const double dt = solver.dt();
    const long long nsteps = std::llround(ctl.t_end / dt);
    if (std::abs(nsteps * dt - ctl.t_end) > 1e-9 * std::max(1.0, ctl.t_end))
        throw ValidationError("time.t_end", "must be an integer number of steps");
    const long long every_series =
        ctl.series_every <= 0.0 ? 1 : std::max(1LL, std::llround(ctl.series_every / dt));
    const long long every_snap =
        snapshot_every <= 0.0 ? 0 : std::max(1LL, std::llround(snapshot_every / dt));

    const Interpolant interp(nudging.spec, solver.domain());

    State ref = spin_up(solver, ref_initial, ctl.spinup);
    State nudged = nudged_initial;
    nudged.t = 0.0;

    TwinResult out;
    out.series.push_back(twin_sample(solver, ref, nudged));
    int snap = 0;
    if (ref_sink) ref_sink(ref, snap);
    if (nudged_sink) nudged_sink(nudged, snap);
    ++snap;

    for (long long n = 1; n <= nsteps; ++n) {
        // observe the reference at the step start, then advance in lockstep
        const CoarseVelocity obs = interp.restrict(ref.v);
        State nudged_next = nudged_step(solver, interp, nudged, obs, nudging.lambda);
        ref = solver.step(ref);
        ref.t = double(n) * dt;
        nudged = std::move(nudged_next);
        nudged.t = ref.t;

        const bool last = (n == nsteps);
        if (n % every_series == 0 || last)
            out.series.push_back(twin_sample(solver, ref, nudged));
        if ((every_snap > 0 && n % every_snap == 0) || last) {
            if (ref_sink) ref_sink(ref, snap);
            if (nudged_sink) nudged_sink(nudged, snap);
            ++snap;
        }
    }
    out.ref_final = std::move(ref);
    out.nudged_final = std::move(nudged);
    return out;
}

DecayEstimate estimate_decay_rate(const std::vector<std::pair<double, double>>& series,
                                  double floor, double t_min) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, e] : series) {
        if (t < t_min) continue;
        if (!(e > floor)) break; // saturation: ignore from the first floored sample on
        pts.emplace_back(t, std::log(e));
    }
    if (pts.size() < 10)
        throw InsufficientData("decay fit needs >= 10 samples above the floor, have " +
                               std::to_string(pts.size()));
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    const double n = double(pts.size());
    for (const auto& [t, y] : pts) {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        syy += y * y;
    }
    const double denom = n * stt - st * st;
    DecayEstimate est;
    est.samples_used = int(pts.size());
    if (denom == 0.0) return est;
    const double slope = (n * sty - st * sy) / denom;
    est.beta_hat = -slope;
    const double ss_tot = syy - sy * sy / n;
    const double intercept = (sy - slope * st) / n;
    double ss_res = 0.0;
    for (const auto& [t, y] : pts) {
        const double r = y - (intercept + slope * t);
        ss_res += r * r;
    }
    est.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return est;
}

// ---------------------------------------------------------------------------
// Observation streams
// ---------------------------------------------------------------------------

void write_observations(const std::string& path, const ObservationStream& stream) {
    std::ostringstream os(std::ios::binary);
    const char* kind = stream.spec.kind == InterpolantSpec::Kind::volume ? "volume" : "spectral";
    os << "ROBOBS v1 kind=" << kind << " delta=" << format_double(stream.spec.delta)
       << " mx=" << stream.mx << " my=" << stream.my << "\n";
    for (const ObservationRecord& rec : stream.records) {
        if (rec.obs.c1.size() != std::size_t(stream.mx) * stream.my ||
            rec.obs.c2.size() != std::size_t(stream.mx) * stream.my)
            throw SpecMismatch("observation record resolution differs from stream header");
        os << "t=" << format_double(rec.t) << "\n";
        write_record(os, {"u1", stream.mx, stream.my, 1, rec.t, rec.obs.c1});
        write_record(os, {"u2", stream.mx, stream.my, 1, rec.t, rec.obs.c2});
    }
    atomic_write_file(path, os.str());
}

ObservationStream ingest_observations(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    std::string header;
    if (!std::getline(is, header) || header.rfind("ROBOBS v1 ", 0) != 0)
        throw ParseError("not a ROBOBS v1 file: " + path);

    auto field = [&](const std::string& key) {
        auto pos = header.find(" " + key + "=");
        if (pos == std::string::npos) throw ParseError("ROBOBS header missing " + key);
        pos += key.size() + 2;
        auto end = header.find(' ', pos);
        return header.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    };

    ObservationStream stream;
    stream.from_file = true;
    const std::string kind = field("kind");
    if (kind == "volume")
        stream.spec.kind = InterpolantSpec::Kind::volume;
    else if (kind == "spectral")
        stream.spec.kind = InterpolantSpec::Kind::spectral;
    else
        throw ParseError("unknown observation kind '" + kind + "'");
    stream.spec.delta = std::stod(field("delta"));
    stream.mx = std::stoi(field("mx"));
    stream.my = std::stoi(field("my"));
    const int mx = stream.mx, my = stream.my;
    if (mx < 1 || my < 1) throw ParseError("bad coarse resolution in " + path);

    double last_t = 0.0;
    bool first = true;
    while (is.good() && is.peek() != std::char_traits<char>::eof()) {
        std::string tline;
        if (!std::getline(is, tline)) break;
        if (tline.empty()) continue;
        if (tline.rfind("t=", 0) != 0) throw ParseError("expected time line, got '" + tline + "'");
        ObservationRecord rec;
        rec.t = std::stod(tline.substr(2));
        if (!first && !(rec.t > last_t))
            throw NonMonotoneTime("observation times must be strictly increasing at t = " +
                                  format_double(rec.t));
        first = false;
        last_t = rec.t;
        FieldRecord r1 = read_record(is);
        FieldRecord r2 = read_record(is);
        if (r1.nx != mx || r1.ny != my || r2.nx != mx || r2.ny != my)
            throw SpecMismatch("observation record resolution differs from header");
        rec.obs.c1 = std::move(r1.values);
        rec.obs.c2 = std::move(r2.values);
        stream.records.push_back(std::move(rec));
    }
    return stream;
}

ObservationStream export_observations(const std::string& traj_dir, const DomainSpec& dom,
                                      const InterpolantSpec& spec, double every,
                                      const std::string& out_path) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(traj_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("vel_", 0) == 0 && entry.is_regular_file())
            files.push_back(entry.path().string());
    }
    if (files.empty()) throw IoError("no velocity snapshots under " + traj_dir);
    std::sort(files.begin(), files.end());

    const Interpolant interp(spec, dom);
    ObservationStream stream;
    stream.spec = spec;
    stream.mx = interp.mx();
    stream.my = interp.my();

    bool have_next = false;
    double next_t = 0.0;
    for (const std::string& f : files) {
        auto [v, t] = read_velocity_snapshot(f, dom);
        if (every > 0.0) {
            if (!have_next) {
                next_t = t;
                have_next = true;
            }
            if (t + 1e-9 < next_t) continue;
            next_t += every;
        }
        ObservationRecord rec;
        rec.t = t;
        rec.obs = interp.restrict(v);
        stream.records.push_back(std::move(rec));
    }
    write_observations(out_path, stream);
    return stream;
}

AssimilationResult assimilate_from_stream(const RobSolver& solver, State initial,
                                          const ObservationStream& stream, double lambda,
                                          const StepControl& ctl, const SnapshotSink& sink) {
    if (stream.records.empty()) throw InsufficientData("observation stream is empty");
    const Interpolant interp(stream.spec, solver.domain());
    const double dt = solver.dt();
    const long long nsteps = std::llround(ctl.t_end / dt);
    if (std::abs(nsteps * dt - ctl.t_end) > 1e-9 * std::max(1.0, ctl.t_end))
        throw ValidationError("time.t_end", "must be an integer number of steps");
    const long long every_series =
        ctl.series_every <= 0.0 ? 1 : std::max(1LL, std::llround(ctl.series_every / dt));
    const long long every_snap =
        ctl.snapshot_every <= 0.0 ? 0 : std::max(1LL, std::llround(ctl.snapshot_every / dt));

    // zero-order hold: use the latest observation at or before the step start
    std::size_t cursor = 0;
    auto held = [&](double t) -> const CoarseVelocity* {
        while (cursor + 1 < stream.records.size() &&
               stream.records[cursor + 1].t <= t + 1e-12)
            ++cursor;
        if (stream.records[cursor].t <= t + 1e-12) return &stream.records[cursor].obs;
        return nullptr; // before the first observation
    };

    auto mismatch = [&](const State& s) {
        const CoarseVelocity* obs = held(s.t);
        if (!obs) return 0.0;
        CoarseVelocity d = interp.restrict(s.v);
        for (std::size_t n = 0; n < d.c1.size(); ++n) d.c1[n] -= obs->c1[n];
        for (std::size_t n = 0; n < d.c2.size(); ++n) d.c2[n] -= obs->c2[n];
        return l2_norm(interp.prolong(d));
    };

    AssimilationResult out;
    State s = std::move(initial);
    s.t = 0.0;
    out.series.push_back({s.t, mismatch(s)});
    int snap = 0;
    if (sink) sink(s, snap++);

    for (long long n = 1; n <= nsteps; ++n) {
        const CoarseVelocity* obs = held(s.t);
        if (lambda == 0.0 || !obs) {
            s = solver.step(s);
        } else {
            s = nudged_step(solver, interp, s, *obs, lambda);
        }
        s.t = double(n) * dt;
        const bool last = (n == nsteps);
        if (n % every_series == 0 || last) out.series.push_back({s.t, mismatch(s)});
        if (sink && ((every_snap > 0 && n % every_snap == 0) || last)) sink(s, snap++);
    }
    out.final_state = std::move(s);
    return out;
}

TuneResult tune_nudging(const RobSolver& solver, const State& ref_initial,
                        const State& nudged_initial, const TuneOptions& opts) {
    TuneResult result;
    // explicit forcing caps the usable lambda at ~1/(2 dt)
    const double lambda_cap = 0.5 / solver.dt();

    State ref0 = ref_initial; // caller performs any spin-up; probes share it
    ref0.t = 0.0;
    double delta = opts.delta0;
    for (int h = 0; h <= opts.max_halvings; ++h, delta *= 0.5) {
        // the coarse cells must still tile the grid
        InterpolantSpec spec{InterpolantSpec::Kind::volume, delta};
        try {
            Interpolant tiling_check(spec, solver.domain());
            (void)tiling_check;
        } catch (const SpecMismatch&) {
            continue;
        }
        double lambda = opts.lambda0;
        for (int d = 0; d <= opts.max_doublings && lambda <= lambda_cap; ++d, lambda *= 2.0) {
            NudgingParams np{lambda, spec};
            TwinControl ctl;
            ctl.spinup = 0.0;
            ctl.t_end = opts.probe_t;
            ctl.series_every = 0.0;
            TwinResult probe = twin_experiment(solver, ref0, nudged_initial, np, ctl);

            TuneProbe p;
            p.lambda = lambda;
            p.delta = delta;
            p.monotone = true;
            double e_transient = -1.0;
            for (std::size_t i = 1; i < probe.series.size(); ++i) {
                const auto& prev = probe.series[i - 1];
                const auto& cur = probe.series[i];
                if (cur.t < opts.transient) continue;
                if (e_transient < 0.0) e_transient = prev.lyap;
                if (cur.lyap > prev.lyap * (1.0 + 1e-12) && cur.lyap > 1e-24)
                    p.monotone = false;
            }
            const double e_end = probe.series.back().lyap;
            p.decay_ratio = e_transient > 0.0 ? e_end / e_transient : 0.0;
            result.probes.push_back(p);
            if (p.monotone && p.decay_ratio <= opts.decay_target) {
                result.ok = true;
                result.lambda = lambda;
                result.delta = delta;
                return result;
            }
        }
    }
    return result;
}

} // namespace robsim
