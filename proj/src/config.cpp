#include "robsim/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "robsim/field_io.hpp"

namespace robsim {

namespace {

enum class Type { string_t, double_t, int_t };

struct KeyDef {
    const char* key;
    Type type;
    void* (*get)(RunConfig&);
};

// schema in dump order
// clang-format off
#define KEYDEF(name, member, type) \
    {name, type, [](RunConfig& c) -> void* { return &c.member; }}
const KeyDef kSchema[] = {
    KEYDEF("mode", mode, Type::string_t),
    KEYDEF("domain.Lx", domain_Lx, Type::double_t),
    KEYDEF("domain.Ly", domain_Ly, Type::double_t),
    KEYDEF("domain.nx", domain_nx, Type::int_t),
    KEYDEF("domain.ny", domain_ny, Type::int_t),
    KEYDEF("domain.nz", domain_nz, Type::int_t),
    KEYDEF("physics.mu", physics_mu, Type::double_t),
    KEYDEF("physics.kappa", physics_kappa, Type::double_t),
    KEYDEF("physics.alpha", physics_alpha, Type::double_t),
    KEYDEF("physics.a", physics_a, Type::double_t),
    KEYDEF("physics.gx", physics_gx, Type::double_t),
    KEYDEF("physics.gy", physics_gy, Type::double_t),
    KEYDEF("physics.gz", physics_gz, Type::double_t),
    KEYDEF("physics.theta_b", physics_theta_b, Type::string_t),
    KEYDEF("time.dt", time_dt, Type::double_t),
    KEYDEF("time.t_end", time_t_end, Type::double_t),
    KEYDEF("time.cfl", time_cfl, Type::double_t),
    KEYDEF("init.velocity", init_velocity, Type::string_t),
    KEYDEF("init.theta", init_theta, Type::string_t),
    KEYDEF("init.restart_velocity", init_restart_velocity, Type::string_t),
    KEYDEF("init.restart_theta", init_restart_theta, Type::string_t),
    KEYDEF("nudging.lambda", nudging_lambda, Type::double_t),
    KEYDEF("nudging.interp", nudging_interp, Type::string_t),
    KEYDEF("nudging.spinup", nudging_spinup, Type::double_t),
    KEYDEF("nudging.init_velocity", nudging_init_velocity, Type::string_t),
    KEYDEF("nudging.init_theta", nudging_init_theta, Type::string_t),
    KEYDEF("output.series_every", output_series_every, Type::double_t),
    KEYDEF("output.snapshot_every", output_snapshot_every, Type::double_t),
    KEYDEF("tune.lambda0", tune_lambda0, Type::double_t),
    KEYDEF("tune.delta0", tune_delta0, Type::double_t),
    KEYDEF("tune.probe_t", tune_probe_t, Type::double_t),
    KEYDEF("tune.transient", tune_transient, Type::double_t),
    KEYDEF("tune.decay_target", tune_decay_target, Type::double_t),
    KEYDEF("tune.max_doublings", tune_max_doublings, Type::int_t),
    KEYDEF("tune.max_halvings", tune_max_halvings, Type::int_t),
    KEYDEF("elliptic.tol", elliptic_tol, Type::double_t),
    KEYDEF("elliptic.max_iter", elliptic_max_iter, Type::int_t),
};
#undef KEYDEF
// clang-format on

const KeyDef* find_key(const std::string& key) {
    for (const KeyDef& def : kSchema)
        if (key == def.key) return &def;
    return nullptr;
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const KeyDef* def = find_key(key);
    if (!def) throw ValidationError(key, "unknown key");
    void* dst = def->get(*this);
    switch (def->type) {
        case Type::string_t:
            *static_cast<std::string*>(dst) = value;
            break;
        case Type::double_t: {
            try {
                std::size_t used = 0;
                double v = std::stod(value, &used);
                if (trim(value.substr(used)) != "") throw std::invalid_argument(value);
                *static_cast<double*>(dst) = v;
            } catch (const std::exception&) {
                throw ValidationError(key, "not a number: '" + value + "'");
            }
            break;
        }
        case Type::int_t: {
            try {
                std::size_t used = 0;
                int v = std::stoi(value, &used);
                if (trim(value.substr(used)) != "") throw std::invalid_argument(value);
                *static_cast<int*>(dst) = v;
            } catch (const std::exception&) {
                throw ValidationError(key, "not an integer: '" + value + "'");
            }
            break;
        }
    }
}

RunConfig RunConfig::parse_string(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, int> seen;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value', got '" + line + "'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("missing key", lineno);
        if (seen.count(key))
            throw ParseError("duplicate key '" + key + "' (first at line " +
                                 std::to_string(seen[key]) + ")",
                             lineno);
        seen[key] = lineno;
        cfg.set(key, value);
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
}

void RunConfig::validate() const {
    if (mode != "standard" && mode != "longtime")
        throw ValidationError("mode", "must be 'standard' or 'longtime'");
    domain(); // range checks in the constructor
    physics().validate(mode == "longtime");
    if (!(time_dt > 0.0)) throw ValidationError("time.dt", "must be > 0");
    if (time_t_end < 0.0) throw ValidationError("time.t_end", "must be >= 0");
    {
        const long long n = std::llround(time_t_end / time_dt);
        if (std::abs(double(n) * time_dt - time_t_end) > 1e-9 * std::max(1.0, time_t_end))
            throw ValidationError("time.t_end", "must be an integer number of steps");
    }
    if (!(time_cfl > 0.0 && time_cfl <= 0.5))
        throw ValidationError("time.cfl", "target must lie in (0, 0.5]");
    if (nudging_lambda < 0.0) throw ValidationError("nudging.lambda", "must be >= 0");
    if (nudging_spinup < 0.0) throw ValidationError("nudging.spinup", "must be >= 0");
    try {
        // the coarse cells must tile this grid; enforced before any run starts
        Interpolant check(InterpolantSpec::parse(nudging_interp), domain());
        (void)check;
    } catch (const SpecMismatch& e) {
        throw ValidationError("nudging.interp", e.what());
    }
    if (output_series_every < 0.0)
        throw ValidationError("output.series_every", "must be >= 0");
    if (output_snapshot_every < 0.0)
        throw ValidationError("output.snapshot_every", "must be >= 0");
    elliptic().validate();
    if (!(tune_probe_t > 0.0)) throw ValidationError("tune.probe_t", "must be > 0");
    if (tune_max_doublings < 0 || tune_max_halvings < 0)
        throw ValidationError("tune.max_doublings", "search limits must be >= 0");
}

std::string RunConfig::dump() const {
    std::ostringstream os;
    RunConfig& self = const_cast<RunConfig&>(*this);
    for (const KeyDef& def : kSchema) {
        os << def.key << " = ";
        void* src = def.get(self);
        switch (def.type) {
            case Type::string_t: os << *static_cast<std::string*>(src); break;
            case Type::double_t: os << format_double(*static_cast<double*>(src)); break;
            case Type::int_t: os << *static_cast<int*>(src); break;
        }
        os << "\n";
    }
    return os.str();
}

DomainSpec RunConfig::domain() const {
    return DomainSpec(domain_Lx, domain_Ly, domain_nx, domain_ny, domain_nz);
}

PhysicsParams RunConfig::physics() const {
    PhysicsParams p;
    p.mu = physics_mu;
    p.kappa = physics_kappa;
    p.alpha = physics_alpha;
    p.a = physics_a;
    p.g = {physics_gx, physics_gy, physics_gz};
    return p;
}

StepControl RunConfig::step_control() const {
    StepControl ctl;
    ctl.dt = time_dt;
    ctl.cfl = time_cfl;
    ctl.t_end = time_t_end;
    ctl.series_every = output_series_every;
    ctl.snapshot_every = output_snapshot_every;
    return ctl;
}

EllipticOptions RunConfig::elliptic() const {
    EllipticOptions o;
    o.tol = elliptic_tol;
    o.max_iter = elliptic_max_iter;
    return o;
}

NudgingParams RunConfig::nudging() const {
    NudgingParams np;
    np.lambda = nudging_lambda;
    np.spec = InterpolantSpec::parse(nudging_interp);
    return np;
}

TuneOptions RunConfig::tune() const {
    TuneOptions t;
    t.lambda0 = tune_lambda0;
    t.delta0 = tune_delta0;
    t.probe_t = tune_probe_t;
    t.transient = tune_transient;
    t.decay_target = tune_decay_target;
    t.max_doublings = tune_max_doublings;
    t.max_halvings = tune_max_halvings;
    return t;
}

VelocityField RunConfig::initial_velocity(const DomainSpec& dom) const {
    if (!init_restart_velocity.empty())
        return read_velocity_snapshot(init_restart_velocity, dom).first;
    return make_velocity_expression(init_velocity, dom);
}

ScalarField3D RunConfig::initial_theta(const DomainSpec& dom) const {
    if (!init_restart_theta.empty()) {
        ScalarField3D f = read_scalar_snapshot(init_restart_theta, dom).first;
        f.set_name("theta");
        return f;
    }
    return sample_at_centers(make_scalar_expression(init_theta, dom), dom, "theta");
}

VelocityField RunConfig::nudged_initial_velocity(const DomainSpec& dom) const {
    return make_velocity_expression(nudging_init_velocity, dom);
}

ScalarField3D RunConfig::nudged_initial_theta(const DomainSpec& dom) const {
    return sample_at_centers(make_scalar_expression(nudging_init_theta, dom), dom, "theta");
}

int worker_count_from_env() {
    const char* env = std::getenv("ROBSIM_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (!end || *end != '\0' || v < 1)
        throw ValidationError("ROBSIM_THREADS", "must be a positive integer, got '" +
                                                    std::string(env) + "'");
    return int(v);
}

} // namespace robsim
