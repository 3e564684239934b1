#include "robsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "robsim/field_io.hpp"

namespace robsim {

namespace {

std::vector<double> balance_residual(const std::vector<SeriesRow>& series,
                                     double (*energy)(const SeriesRow&),
                                     double (*diss)(const SeriesRow&),
                                     double (*rhs)(const SeriesRow&)) {
    const std::size_t n = series.size();
    if (n < 3) throw InsufficientData("balance residual needs >= 3 consecutive samples");
    std::vector<double> out(n);
    auto ddt = [&](std::size_t i) {
        if (i == 0)
            return (energy(series[1]) - energy(series[0])) / (series[1].t - series[0].t);
        if (i == n - 1)
            return (energy(series[n - 1]) - energy(series[n - 2])) /
                   (series[n - 1].t - series[n - 2].t);
        return (energy(series[i + 1]) - energy(series[i - 1])) /
               (series[i + 1].t - series[i - 1].t);
    };
    for (std::size_t i = 0; i < n; ++i)
        out[i] = ddt(i) + diss(series[i]) - rhs(series[i]);
    return out;
}

} // namespace

std::vector<double> kinetic_energy_residual(const std::vector<SeriesRow>& series) {
    return balance_residual(
        series, [](const SeriesRow& r) { return r.ke; },
        [](const SeriesRow& r) { return r.vel_diss; },
        [](const SeriesRow& r) { return r.buoy_work; });
}

std::vector<double> thermal_energy_residual(const std::vector<SeriesRow>& series) {
    return balance_residual(
        series, [](const SeriesRow& r) { return r.thermal; },
        [](const SeriesRow& r) { return r.z_diss; },
        [](const SeriesRow& r) { return r.thermal_rhs; });
}

double boundary_sup(const DomainSpec& dom, const SpaceFn& f) {
    double s = 0.0;
    for (int k = 0; k < dom.nz; ++k)
        for (int j = 0; j < dom.ny; ++j) {
            s = std::max(s, std::abs(f(0.0, dom.yc(j), dom.zc(k))));
            s = std::max(s, std::abs(f(dom.Lx, dom.yc(j), dom.zc(k))));
        }
    for (int k = 0; k < dom.nz; ++k)
        for (int i = 0; i < dom.nx; ++i) {
            s = std::max(s, std::abs(f(dom.xc(i), 0.0, dom.zc(k))));
            s = std::max(s, std::abs(f(dom.xc(i), dom.Ly, dom.zc(k))));
        }
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) {
            s = std::max(s, std::abs(f(dom.xc(i), dom.yc(j), 0.0)));
            s = std::max(s, std::abs(f(dom.xc(i), dom.yc(j), 1.0)));
        }
    return s;
}

MaxPrincipleReport max_principle_check(const std::vector<SeriesRow>& series, double alpha,
                                       double theta_b_sup) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidAlpha("maximum-principle bound requires 0 < alpha < 1, got " +
                           format_double(alpha));
    if (series.empty()) throw InsufficientData("empty trajectory");

    const double theta0_inf =
        std::max(std::abs(series.front().theta_max), std::abs(series.front().theta_min));
    MaxPrincipleReport rep;
    rep.bound = std::max(theta0_inf, theta_b_sup / (1.0 - alpha));
    const double slack = 1e-8 * std::max(1.0, rep.bound);
    rep.worst_margin = std::numeric_limits<double>::infinity();
    rep.pass = true;
    for (const SeriesRow& r : series) {
        const double m =
            std::min(rep.bound + slack - r.theta_max, r.theta_min + rep.bound + slack);
        if (m < rep.worst_margin) {
            rep.worst_margin = m;
            rep.worst_t = r.t;
        }
        if (m < 0.0) rep.pass = false;
    }
    return rep;
}

AbsorbingSetReport absorbing_set_report(const std::vector<std::vector<SeriesRow>>& trajectories,
                                        double window_fraction, double tolerance) {
    if (trajectories.size() < 2)
        throw InsufficientData("absorbing-set comparison needs >= 2 trajectories");
    AbsorbingSetReport rep;
    for (const auto& series : trajectories) {
        const std::size_t n = series.size();
        const std::size_t start = std::size_t(double(n) * (1.0 - window_fraction));
        if (n < 8 || start + 2 > n)
            throw InsufficientData("tail window too short for a supremum estimate");
        AbsorbingSetReport::Entry e;
        for (std::size_t i = start; i < n; ++i) {
            e.sup_crit = std::max(e.sup_crit, series[i].u_w12 + series[i].theta_inf);
            e.sup_full = std::max(e.sup_full, series[i].u_w12 +
                                                  std::max(series[i].theta_w12,
                                                           series[i].theta_inf));
        }
        rep.per_trajectory.push_back(e);
    }
    double lo = rep.per_trajectory[0].sup_crit, hi = lo;
    for (const auto& e : rep.per_trajectory) {
        lo = std::min(lo, e.sup_crit);
        hi = std::max(hi, e.sup_crit);
    }
    rep.spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    rep.pass = rep.spread <= tolerance;
    return rep;
}

void write_report_csv(const std::string& path, const std::vector<SeriesRow>& series) {
    const std::vector<double> res_a6 = thermal_energy_residual(series);
    const std::vector<double> res_a7 = kinetic_energy_residual(series);
    std::ostringstream os;
    os << "t,ke,thermal,res_a6,res_a7,theta_max,theta_min,u_h1,theta_h1,theta_inf\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const SeriesRow& r = series[i];
        const double cols[] = {r.t,        r.ke,        r.thermal,   res_a6[i],  res_a7[i],
                               r.theta_max, r.theta_min, r.u_w12,     r.theta_w12, r.theta_inf};
        for (std::size_t c = 0; c < std::size(cols); ++c)
            os << (c ? "," : "") << format_double(cols[c]);
        os << "\n";
    }
    atomic_write_file(path, os.str());
}

} // namespace robsim
