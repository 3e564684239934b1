#pragma once

#include "robsim/expressions.hpp"
#include "robsim/solver.hpp"

namespace robsim {

/// Residual of the kinetic-energy balance on the sampling cadence:
/// d/dt ke + vel_diss - buoy_work, with central time differences and
/// one-sided endpoints. Needs at least 3 samples.
std::vector<double> kinetic_energy_residual(const std::vector<SeriesRow>& series);

/// Residual of the thermal balance: d/dt thermal + z_diss - thermal_rhs.
std::vector<double> thermal_energy_residual(const std::vector<SeriesRow>& series);

struct MaxPrincipleReport {
    bool pass = false;
    double bound = 0.0;        // max(||Theta_0||_inf, sup|theta_b| / (1 - alpha))
    double worst_margin = 0.0; // min over samples of slack remaining
    double worst_t = 0.0;
};

/// Check every sample's Theta extrema against the global-in-time bound with
/// slack 1e-8 * scale. Requires 0 < alpha < 1.
MaxPrincipleReport max_principle_check(const std::vector<SeriesRow>& series, double alpha,
                                       double theta_b_sup);

/// Sup of |f| over all boundary-face centroids.
double boundary_sup(const DomainSpec& dom, const SpaceFn& f);

struct AbsorbingSetReport {
    struct Entry {
        double sup_crit = 0.0; // tail sup of u_w12 + theta_inf
        double sup_full = 0.0; // tail sup of u_w12 + max(theta_w12, theta_inf)
    };
    std::vector<Entry> per_trajectory;
    double spread = 0.0; // pairwise relative spread of sup_crit
    bool pass = false;
};

/// Tail-window suprema (finite-horizon limsup proxy) across trajectories that
/// share physics but differ in initial data; pass when the pairwise relative
/// spread stays within `tolerance`.
AbsorbingSetReport absorbing_set_report(const std::vector<std::vector<SeriesRow>>& trajectories,
                                        double window_fraction = 0.25, double tolerance = 0.10);

/// report.csv with header
/// t,ke,thermal,res_a6,res_a7,theta_max,theta_min,u_h1,theta_h1,theta_inf
void write_report_csv(const std::string& path, const std::vector<SeriesRow>& series);

} // namespace robsim
