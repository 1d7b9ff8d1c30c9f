#include "qbattery/trajectory.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "qbattery/ops.hpp"
#include "qbattery/parallel.hpp"
#include "qbattery/rng.hpp"

namespace qbattery {

void SimulationParams::validate(const ModelParams& p) const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (!(dt > 0.0)) fail("sim.dt must be > 0");
    if (!(t_max > 0.0)) fail("sim.t_max must be > 0");
    if (p.Gamma * dt > 1e-2 + 1e-12) {
        std::ostringstream msg;
        msg << "sim.dt too coarse: Gamma * sim.dt = " << p.Gamma * dt << " exceeds 1e-2";
        fail(msg.str());
    }
    if (tau < 0.0) fail("sim.tau must be >= 0");
    if (t_max < tau) fail("sim.t_max must be >= sim.tau");
    const double steps = tau / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
        std::ostringstream msg;
        msg << "sim.tau = " << tau << " is not an integer multiple of sim.dt = " << dt;
        fail(msg.str());
    }
    if (tau > 0.0 && dt > tau / 10.0 + 1e-12) {
        std::ostringstream msg;
        msg << "delay runs require sim.dt <= sim.tau / 10 (got sim.dt = " << dt
            << ", sim.tau = " << tau << ")";
        fail(msg.str());
    }
    if (n_traj < 1) fail("sim.n_traj must be >= 1");
    if (sample_stride < 1) fail("sim.sample_stride must be >= 1");
    if (n_steps() < 1) fail("sim.t_max must cover at least one step");
}

namespace {

double charger_sx(const ComplexMatrix& rho, int d) {
    // Tr[rho (sigma_x (x) I)] = 2 Re Tr[rho_ge].
    return 2.0 * rho.block(0, d, d, d).trace().real();
}

}  // namespace

TrajectoryEngine::TrajectoryEngine(const ModelParams& p, const SimulationParams& s)
    : params_(p), sim_(s), d_(p.d), dt_(s.dt) {
    p.validate();
    s.validate(p);

    gamma_minus_ = p.Gamma * (1.0 + p.nbar * (1.0 - p.eta_c));
    gamma_plus_ = p.Gamma * p.nbar * (1.0 - p.eta_c);
    gamma_meas_ = p.eta() * p.Gamma;
    sqrt_meas_ = std::sqrt(gamma_meas_);

    JointOps ops(p);
    ComplexMatrix h_base = p.delta_B * ops.number + ops.h_int;
    const ComplexMatrix id = ComplexMatrix::Identity(ops.dim, ops.dim);
    const Complex mi(0.0, -1.0);
    u_const_ = id + (mi * dt_) * h_base - (0.5 * dt_ * dt_) * (h_base * h_base);
    u_lin_ = (mi * dt_) * ops.sy - (0.5 * dt_ * dt_) * (h_base * ops.sy + ops.sy * h_base);
    u_quad_ = Complex(-0.5 * dt_ * dt_, 0.0);
}

double TrajectoryEngine::measurement_record(const ComplexMatrix& rho, double dw) const {
    if (gamma_meas_ <= 0.0) return 0.0;  // no detector, no record
    return charger_sx(rho, d_) + dw / (sqrt_meas_ * dt_);
}

double TrajectoryEngine::step(ComplexMatrix& rho, std::optional<double> r_feedback, double dw,
                              Workspace& ws) const {
    const int d = d_;
    const double dt = dt_;
    const double sx = charger_sx(rho, d);
    const double r_now = gamma_meas_ > 0.0 ? sx + dw / (sqrt_meas_ * dt) : 0.0;

    // Dissipative (measurement) half in 2x2 charger blocks.
    const double dy = sqrt_meas_ * sx * dt + dw;
    const double alpha = 1.0 - 0.5 * gamma_plus_ * dt;   // |g> block decay
    const double gamma = 1.0 - 0.5 * gamma_minus_ * dt;  // |e> block decay
    const double beta = sqrt_meas_ * dy;
    const double recycle = std::max(0.0, gamma_minus_ - gamma_meas_) * dt;

    if (ws.t1.rows() != 2 * d) {
        ws.t1.resize(2 * d, 2 * d);
        ws.t2.resize(2 * d, 2 * d);
    }
    auto gg = rho.block(0, 0, d, d);
    auto ge = rho.block(0, d, d, d);
    auto eg = rho.block(d, 0, d, d);
    auto ee = rho.block(d, d, d, d);
    ws.t1.block(0, 0, d, d) = (alpha * alpha) * gg + (alpha * beta) * (ge + eg) +
                              (beta * beta + recycle) * ee;
    ws.t1.block(0, d, d, d) = gamma * (alpha * ge + beta * ee);
    ws.t1.block(d, 0, d, d) = gamma * (alpha * eg + beta * ee);
    ws.t1.block(d, d, d, d) = (gamma * gamma) * ee + (gamma_plus_ * dt) * gg;

    // Feedback drive from the delayed record, applied after the measurement
    // update. Pre-delay window: no record yet, plain Omega0.
    const double omega = params_.Omega0 - (r_feedback ? params_.f * (*r_feedback) : 0.0);
    ws.u = u_const_;
    if (omega != 0.0) {
        ws.u.noalias() += omega * u_lin_;
        ws.u.diagonal().array() += (omega * omega) * u_quad_;
    }
    ws.t2.noalias() = ws.u * ws.t1;
    rho.noalias() = ws.t2 * ws.u.adjoint();
    rho *= 1.0 / rho.trace().real();
    return r_now;
}

double TrajectoryEngine::step(ComplexMatrix& rho, std::optional<double> r_feedback,
                              double dw) const {
    Workspace ws;
    return step(rho, r_feedback, dw, ws);
}

std::pair<DensityMatrix, double> sme_step(const ModelParams& p, const SimulationParams& s,
                                          const DensityMatrix& rho, double r_delayed,
                                          double dw) {
    TrajectoryEngine eng(p, s);
    ComplexMatrix state = rho.matrix();
    const double r_now = eng.step(state, r_delayed, dw);
    return {DensityMatrix(std::move(state), rho.dims(), Unchecked{}), r_now};
}

namespace {

struct SamplePoint {
    double energy = 0.0;
    double ergotropy_value = 0.0;
    ComplexMatrix battery;
    double min_eig = 0.0;
};

SamplePoint sample_state(const ComplexMatrix& rho, int d, double omega0, double t,
                         double positivity_tol) {
    SamplePoint out;
    out.battery = rho.block(0, 0, d, d) + rho.block(d, d, d, d);  // Tr over the charger
    out.battery = hermitize(out.battery);
    out.energy = battery_energy(out.battery, omega0);
    out.ergotropy_value = ergotropy(out.battery, omega0);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(rho), Eigen::EigenvaluesOnly);
    out.min_eig = es.eigenvalues().minCoeff();
    if (out.min_eig < -positivity_tol) {
        std::ostringstream msg;
        msg << "trajectory: conditional state lost positivity at t = " << t
            << " (min eigenvalue " << out.min_eig << ")";
        throw NumericalError(msg.str());
    }
    return out;
}

TrajectoryRecord run_trajectory_with_engine(const TrajectoryEngine& eng,
                                            const DensityMatrix& rho0,
                                            std::uint64_t stream_seed,
                                            const TrajectoryOptions& opts) {
    const ModelParams& p = eng.params();
    const SimulationParams& s = eng.sim();
    const int d = p.d;
    const long n = s.n_steps();
    const long delay = s.delay_steps();
    const double sqrt_dt = std::sqrt(s.dt);

    NormalStream rng(stream_seed);
    ComplexMatrix rho = rho0.matrix();
    TrajectoryEngine::Workspace ws;
    std::vector<double> ring(static_cast<std::size_t>(delay) + 1, 0.0);

    TrajectoryRecord rec;
    if (opts.keep_step_record) {
        rec.record.reserve(static_cast<std::size_t>(n));
        rec.noise.reserve(static_cast<std::size_t>(n));
    }

    auto push_sample = [&](double t) {
        SamplePoint pt = sample_state(rho, d, p.omega0, t, opts.positivity_tol);
        rec.times.push_back(t);
        rec.battery_energy.push_back(pt.energy);
        rec.battery_ergotropy.push_back(pt.ergotropy_value);
        rec.battery_states.push_back(std::move(pt.battery));
        rec.min_eigenvalue = std::min(rec.min_eigenvalue, pt.min_eig);
    };

    rec.min_eigenvalue = 1.0;
    push_sample(0.0);

    for (long i = 0; i < n; ++i) {
        const double dw = sqrt_dt * rng.next();
        const double r_now = eng.measurement_record(rho, dw);
        ring[static_cast<std::size_t>(i % (delay + 1))] = r_now;
        std::optional<double> r_fb;
        if (p.f != 0.0 && i >= delay)
            r_fb = ring[static_cast<std::size_t>((i - delay) % (delay + 1))];
        eng.step(rho, r_fb, dw, ws);
        if (opts.keep_step_record) {
            rec.record.push_back(r_now);
            rec.noise.push_back(dw);
        }
        if ((i + 1) % s.sample_stride == 0 || i + 1 == n)
            push_sample(double(i + 1) * s.dt);
    }

    rec.final_state = DensityMatrix(rho, {2, d}, Unchecked{});
    return rec;
}

}  // namespace

TrajectoryRecord run_trajectory(const ModelParams& p, const SimulationParams& s,
                                const DensityMatrix& rho0, std::uint64_t stream_seed,
                                const TrajectoryOptions& opts) {
    TrajectoryEngine eng(p, s);
    return run_trajectory_with_engine(eng, rho0, stream_seed, opts);
}

namespace {

ComplexMatrix pairwise_sum_battery(const std::vector<TrajectoryRecord>& recs, std::size_t j,
                                   std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return recs[lo].battery_states[j];
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum_battery(recs, j, lo, mid) + pairwise_sum_battery(recs, j, mid, hi);
}

}  // namespace

EnsembleResult run_ensemble(const ModelParams& p, const SimulationParams& s,
                            const DensityMatrix& rho0, int threads,
                            const TrajectoryOptions& opts) {
    p.validate();
    s.validate(p);
    const TrajectoryEngine eng(p, s);
    const int n = s.n_traj;

    std::vector<TrajectoryRecord> recs(static_cast<std::size_t>(n));
    TrajectoryOptions traj_opts = opts;
    traj_opts.keep_step_record = false;
    parallel_for(n, threads, [&](int i) {
        recs[static_cast<std::size_t>(i)] = run_trajectory_with_engine(
            eng, rho0, trajectory_stream_seed(s.seed, static_cast<std::uint64_t>(i)),
            traj_opts);
    });

    const std::size_t n_samples = recs[0].times.size();
    EnsembleResult out;
    out.times = recs[0].times;
    out.mean_battery.resize(n_samples);
    out.mean_reports.resize(n_samples);
    out.energy_dispersion.assign(n_samples, 0.0);
    out.energy_stderr.assign(n_samples, 0.0);
    out.ergotropy_stderr.assign(n_samples, 0.0);
    out.per_traj_energy.reserve(static_cast<std::size_t>(n));
    out.per_traj_ergotropy.reserve(static_cast<std::size_t>(n));
    out.min_eigenvalue = 1.0;
    for (const auto& rec : recs) {
        out.per_traj_energy.push_back(rec.battery_energy);
        out.per_traj_ergotropy.push_back(rec.battery_ergotropy);
        out.min_eigenvalue = std::min(out.min_eigenvalue, rec.min_eigenvalue);
    }

    parallel_for(static_cast<int>(n_samples), threads, [&](int ji) {
        const std::size_t j = static_cast<std::size_t>(ji);
        ComplexMatrix total = pairwise_sum_battery(recs, j, 0, static_cast<std::size_t>(n));
        ComplexMatrix mean = hermitize(total / double(n));
        out.mean_reports[j] = ergotropy_split(mean, p.omega0);

        // Spread of the conditional battery energies across the ensemble.
        double acc = 0.0, acc2 = 0.0;
        for (const auto& rec : recs) {
            const double e = rec.battery_energy[j];
            acc += e;
            acc2 += e * e;
        }
        if (n > 1) {
            const double mean_e = acc / double(n);
            const double var = std::max(0.0, (acc2 - double(n) * mean_e * mean_e) / double(n - 1));
            out.energy_dispersion[j] = std::sqrt(var);
            out.energy_stderr[j] = out.energy_dispersion[j] / std::sqrt(double(n));

            // Jackknife spread of the mean-state ergotropy (nonlinear in rho).
            double jk_acc = 0.0, jk_acc2 = 0.0;
            for (const auto& rec : recs) {
                ComplexMatrix loo = (total - rec.battery_states[j]) / double(n - 1);
                const double e = ergotropy(hermitize(loo), p.omega0);
                jk_acc += e;
                jk_acc2 += e * e;
            }
            const double jk_mean = jk_acc / double(n);
            const double jk_var =
                std::max(0.0, jk_acc2 / double(n) - jk_mean * jk_mean);
            out.ergotropy_stderr[j] = std::sqrt(double(n - 1) * jk_var);
        }
        out.mean_battery[j] = std::move(mean);
    });

    return out;
}

}  // namespace qbattery
