#pragma once

#include <vector>

#include "qbattery/density_matrix.hpp"
#include "qbattery/model.hpp"

namespace qbattery {

/// Closed-form stationary solution of the population-inversion strategy
/// (Omega0 = 0): product state with geometric battery populations.
struct SteadyAnalytic {
    double sigma_z = 0.0;             // stationary <sigma_z> of the charger
    double R = 0.0;                   // population ratio p_{n+1}/p_n (may be inf)
    std::vector<double> populations;  // battery populations, length d
    double energy = 0.0;
    double ergotropy = 0.0;
};

struct SteadyOptions {
    double residual_tol = 1e-9;  // gate on ||L vec(rho)||_2
    double gap_tol = 1e-8;       // uniqueness gate relative to ||L||
    long positivity_repairs = 0; // out: clipped eigenvalue count (diagnostic)
    double residual = 0.0;       // out: achieved ||L vec(rho)||_2
};

/// Stationary state from the null space of the vectorized generator. The
/// null vector is found by replacing one dependent row of L with the trace
/// functional and LU-solving; uniqueness is gated by an inverse-iteration
/// estimate of the second-smallest spectral magnitude of L against
/// gap_tol * ||L||. Result is Hermitized, positivity-clipped, normalized and
/// residual-checked. Throws NumericalError on degeneracy or residual failure.
DensityMatrix steady_state_numeric(const ModelParams& p, SteadyOptions* opts = nullptr);

/// <sigma_z> = (2f - Gamma) / (Gamma + 2 Gamma nbar (1-eta_c) - 2f + 2f^2/(eta Gamma)).
/// Requires Omega0 = 0 (the formula holds only for this strategy).
double steady_sigma_z(const ModelParams& p);

/// f* = (Gamma/2) [1 + sqrt(1 + 4 nbar (1-eta_c) eta)], the gain maximising
/// the stationary inversion. Requires Omega0 = 0.
double optimal_feedback_gain(const ModelParams& p);

/// Populations p_n proportional to R^n, E from the geometric-sum closed form
/// and ergotropy 2E - omega0(d-1) for R > 1 (zero otherwise). The R -> 1
/// limit E = omega0 (d-1)/2 is substituted for |R - 1| < 1e-9.
SteadyAnalytic steady_battery_analytic(const ModelParams& p);

}  // namespace qbattery
