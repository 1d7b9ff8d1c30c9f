#pragma once

#include <functional>
#include <vector>

#include "qbattery/density_matrix.hpp"
#include "qbattery/energetics.hpp"
#include "qbattery/integrate.hpp"
#include "qbattery/model.hpp"

namespace qbattery {

struct EvolveOptions {
    OdeOptions ode;
    double validate_tol = 1e-9;     // per-sample Hermiticity/trace/positivity gate
    bool keep_joint_states = true;  // battery-reduced states are always kept
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<DensityMatrix> joint_states;
    std::vector<DensityMatrix> battery_states;
    std::vector<EnergyReport> reports;
    std::vector<double> min_eigenvalues;  // joint spectrum floor per sample
    OdeStats stats;
};

/// Integrate drho/dt = L rho from rho0, sampling at `sample_times` (each in
/// [0, t_max]; t_max is appended when absent). Every sampled state must pass
/// the density-matrix invariants or NumericalError is thrown.
EvolutionResult evolve_master_equation(const ModelParams& p, const DensityMatrix& rho0,
                                       double t_max, std::vector<double> sample_times,
                                       const EvolveOptions& opts = {});

struct ChargingOptions {
    double t_max = 0.0;        // horizon; required > 0
    double coarse_dt = 0.0;    // bracketing grid step; 0 = t_max / 2048
    double time_tol = 0.0;     // bisection tolerance; 0 = 1e-9 * t_max
    OdeOptions ode;
};

/// First time T with E[rho_B(T)] >= (1 - epsilon) E[rho_B(inf)], where the
/// asymptotic energy comes from the null-space steady state. Brackets on a
/// coarse grid, refines by bisection (re-integrating from the last
/// checkpoint). Throws NumericalError if T is not reached by t_max.
double charging_time(const ModelParams& p, double epsilon, const DensityMatrix& rho0,
                     const ChargingOptions& opts);

/// Bracket-and-bisect core of charging_time, exposed for testing against
/// closed-form energy curves. Returns the first t in (0, t_max] with
/// energy_at(t) >= threshold, or t = 0 when energy_at(0) already qualifies.
double first_threshold_time(const std::function<double(double)>& energy_at, double threshold,
                            double t_max, double coarse_dt, double time_tol);

}  // namespace qbattery
