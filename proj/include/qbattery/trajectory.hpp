#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qbattery/density_matrix.hpp"
#include "qbattery/energetics.hpp"
#include "qbattery/model.hpp"

namespace qbattery {

/// Discretization and ensemble controls for the stochastic master equation.
struct SimulationParams {
    double dt = 0.0;
    double t_max = 0.0;
    double tau = 0.0;           // feedback loop delay; integer multiple of dt
    int n_traj = 500;
    std::uint64_t seed = 424243;
    int sample_stride = 1;      // record samples every this many steps

    long n_steps() const { return std::llround(t_max / dt); }
    long delay_steps() const { return std::llround(tau / dt); }

    /// Throws std::invalid_argument naming the offending field(s).
    void validate(const ModelParams& p) const;
};

/// One conditional run at full resolution.
struct TrajectoryRecord {
    std::vector<double> times;              // sample times (t = 0 included)
    std::vector<double> record;             // r per step (empty if not kept)
    std::vector<double> noise;              // dw per step (empty if not kept)
    std::vector<double> battery_energy;     // per sample
    std::vector<double> battery_ergotropy;  // per sample
    std::vector<ComplexMatrix> battery_states;
    DensityMatrix final_state;              // joint state at t_max
    double min_eigenvalue = 0.0;            // over all sampled joint states
};

/// Ensemble statistics. Energetics are evaluated on the ensemble-averaged
/// state (mean of the conditional states), never averaged per trajectory;
/// the per-trajectory series are kept only for dispersion fans.
struct EnsembleResult {
    std::vector<double> times;
    std::vector<ComplexMatrix> mean_battery;
    std::vector<EnergyReport> mean_reports;     // energetics of the mean state
    std::vector<double> energy_dispersion;      // std-dev across trajectories
    std::vector<double> energy_stderr;          // of the mean energy
    std::vector<double> ergotropy_stderr;       // jackknife, mean-state ergotropy
    std::vector<std::vector<double>> per_traj_energy;     // [traj][sample]
    std::vector<std::vector<double>> per_traj_ergotropy;  // [traj][sample]
    double min_eigenvalue = 0.0;
};

struct TrajectoryOptions {
    bool keep_step_record = true;
    double positivity_tol = 1e-9;  // NumericalError below -tol at any sample
};

/// Precomputed one-step update for the conditional evolution: a completely
/// positive, trace-renormalizing scheme whose order-dt expansion matches the
/// feedback master equation.
///
/// Dissipative half (Rouchon-style):
///   M0  = I - [ (Gm/2) P_e + (Gp/2) P_g ] dt + sqrt(eta Gamma) sigma_- Dy,
///   Dy  = sqrt(eta Gamma) <sigma_x> dt + dw,
///   rho1 = M0 rho M0^+ + (Gm - eta Gamma) dt sigma_- rho sigma_+
///                      + Gp dt sigma_+ rho sigma_-,
/// with Gm = Gamma (1 + nbar (1 - eta_c)) the total decay rate and
/// Gp = Gamma nbar (1 - eta_c) the absorption rate.
///
/// Unitary half, applied after the measurement update: U = exp(-i H dt) to
/// second order with H = delta_B N + H_int + Omega sigma_y and
/// Omega = Omega0 - f r. The O(sqrt(dt)) noise inside r makes the
/// second-order term carry the f^2/(eta Gamma) diffusion at order dt.
class TrajectoryEngine {
public:
    /// Per-thread scratch buffers; the engine itself is immutable and safe
    /// to share across trajectory workers.
    struct Workspace {
        ComplexMatrix u, t1, t2;
    };

    TrajectoryEngine(const ModelParams& p, const SimulationParams& s);

    /// Advance rho by one step. `r_feedback` is the delayed record driving
    /// the feedback (nullopt during the pre-delay window). Returns this
    /// step's measurement record r.
    double step(ComplexMatrix& rho, std::optional<double> r_feedback, double dw,
                Workspace& ws) const;
    double step(ComplexMatrix& rho, std::optional<double> r_feedback, double dw) const;

    /// r for the step starting at `rho` with noise increment dw:
    /// r dt = Tr[rho sigma_x] dt + dw / sqrt(eta Gamma). Zero-measurement
    /// models (eta Gamma = 0) carry no record and return 0.
    double measurement_record(const ComplexMatrix& rho, double dw) const;

    const ModelParams& params() const { return params_; }
    const SimulationParams& sim() const { return sim_; }

private:
    ModelParams params_;
    SimulationParams sim_;
    int d_;
    double dt_;
    double gamma_minus_, gamma_plus_, gamma_meas_, sqrt_meas_;
    ComplexMatrix u_const_, u_lin_;  // U = u_const + Omega u_lin + Omega^2 u_quad I
    Complex u_quad_;
};

/// Spec-shaped single step; builds an engine internally. Prefer
/// TrajectoryEngine in loops.
std::pair<DensityMatrix, double> sme_step(const ModelParams& p, const SimulationParams& s,
                                          const DensityMatrix& rho, double r_delayed,
                                          double dw);

TrajectoryRecord run_trajectory(const ModelParams& p, const SimulationParams& s,
                                const DensityMatrix& rho0, std::uint64_t stream_seed,
                                const TrajectoryOptions& opts = {});

/// n_traj trajectories with counter-derived stream seeds, reduced with
/// fixed-order pairwise summation. threads = 0 uses all hardware threads.
EnsembleResult run_ensemble(const ModelParams& p, const SimulationParams& s,
                            const DensityMatrix& rho0, int threads = 0,
                            const TrajectoryOptions& opts = {});

}  // namespace qbattery
