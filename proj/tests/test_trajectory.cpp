#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qbattery/evolve.hpp"
#include "qbattery/ops.hpp"
#include "qbattery/rng.hpp"
#include "qbattery/trajectory.hpp"
#include "test_support.hpp"

using namespace qbattery;

namespace {

ModelParams feedback_params(int d, double eta) {
    ModelParams p;
    p.d = d;
    p.f = p.Gamma;
    p.eta_c = p.eta_d = std::sqrt(eta);
    return p;
}

SimulationParams sim_params(const ModelParams& p, double t_max, int stride) {
    SimulationParams s;
    s.dt = 1e-3 / p.Gamma;
    s.t_max = t_max;
    s.sample_stride = stride;
    return s;
}

}  // namespace

TEST_CASE("simulation parameter validation names the offending fields") {
    ModelParams p = feedback_params(4, 0.5);
    SimulationParams s = sim_params(p, 1.0, 100);

    SimulationParams coarse = s;
    coarse.dt = 0.5;  // Gamma dt too large
    CHECK_THROWS_WITH_AS(coarse.validate(p),
                         doctest::Contains("sim.dt too coarse"), std::invalid_argument);

    SimulationParams bad_tau = s;
    bad_tau.tau = 2.5 * s.dt;
    try {
        bad_tau.validate(p);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("sim.tau") != std::string::npos);
        CHECK(msg.find("sim.dt") != std::string::npos);
    }

    SimulationParams coarse_delay = s;
    coarse_delay.tau = 5.0 * s.dt;  // delay shorter than 10 steps
    CHECK_THROWS_AS(coarse_delay.validate(p), std::invalid_argument);

    SimulationParams short_horizon = s;
    short_horizon.tau = 0.5;
    short_horizon.t_max = 0.2;
    CHECK_THROWS_AS(short_horizon.validate(p), std::invalid_argument);
}

TEST_CASE("ground joint state is a dark state of the undriven step") {
    ModelParams p;
    p.d = 4;
    p.f = 0.0;
    SimulationParams s = sim_params(p, 1.0, 100);
    DensityMatrix rho0 = ground_joint_state(p.d);

    for (double dw : {-0.05, 0.0, 0.03}) {
        auto [next, r] = sme_step(p, s, rho0, 0.0, dw);
        CHECK(approx_equal(next.matrix(), rho0.matrix(), 1e-13));
        (void)r;
    }
}

TEST_CASE("step preserves trace exactly and positivity within tolerance") {
    ModelParams p = feedback_params(5, 0.4);
    SimulationParams s = sim_params(p, 1.0, 100);
    TrajectoryEngine eng(p, s);
    TrajectoryEngine::Workspace ws;

    std::mt19937_64 gen(41);
    NormalStream noise(99);
    ComplexMatrix rho = test::random_density(2 * p.d, gen);
    for (int i = 0; i < 200; ++i) {
        const double dw = std::sqrt(s.dt) * noise.next();
        const double r = eng.measurement_record(rho, dw);
        eng.step(rho, r, dw, ws);
        CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(rho), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
}

TEST_CASE("one-step expansion matches the Markovian generator at order dt") {
    // Two-point noise (dw = +-sqrt(dt)) realizes the Ito moments; averaging
    // the step over it and comparing (E[rho'] - rho)/dt against L rho must
    // leave an O(dt) defect. This pins the scheme to the ensemble equation.
    ModelParams p;
    p.d = 3;
    p.f = 0.8;
    p.Omega0 = 0.35;
    p.eta_c = 0.85;
    p.eta_d = 0.75;
    p.nbar = 0.4;
    p.delta_B = 0.15;
    const MasterGenerator gen_ref(p);

    std::mt19937_64 gen(17);
    ComplexMatrix rho = test::random_density(2 * p.d, gen);

    auto defect = [&](double dt) {
        SimulationParams s;
        s.dt = dt;
        s.t_max = dt;
        TrajectoryEngine eng(p, s);
        TrajectoryEngine::Workspace ws;
        ComplexMatrix mean = ComplexMatrix::Zero(2 * p.d, 2 * p.d);
        for (double sign : {1.0, -1.0}) {
            ComplexMatrix r = rho;
            const double dw = sign * std::sqrt(dt);
            const double rec = eng.measurement_record(r, dw);
            eng.step(r, rec, dw, ws);
            mean += 0.5 * r;
        }
        ComplexMatrix derivative = (mean - rho) / dt;
        return (derivative - gen_ref.apply(rho)).cwiseAbs().maxCoeff();
    };

    const double d1 = defect(1e-3);
    const double d2 = defect(5e-4);
    const double d3 = defect(2.5e-4);
    CHECK(d1 < 0.05);
    // First-order weak convergence: defect shrinks linearly with dt.
    CHECK(d2 < 0.65 * d1);
    CHECK(d3 < 0.65 * d2);
}

TEST_CASE("trajectories are deterministic given a stream seed") {
    ModelParams p = feedback_params(4, 0.6);
    SimulationParams s = sim_params(p, 0.5, 50);
    DensityMatrix rho0 = ground_joint_state(p.d);

    TrajectoryRecord a = run_trajectory(p, s, rho0, 777);
    TrajectoryRecord b = run_trajectory(p, s, rho0, 777);
    CHECK(a.record == b.record);
    CHECK(a.noise == b.noise);
    CHECK(a.battery_energy == b.battery_energy);
    CHECK(approx_equal(a.final_state.matrix(), b.final_state.matrix(), 0.0));

    TrajectoryRecord c = run_trajectory(p, s, rho0, 778);
    CHECK(a.record != c.record);
}

TEST_CASE("measurement record identity holds step by step") {
    ModelParams p = feedback_params(3, 0.5);
    SimulationParams s = sim_params(p, 0.3, 30);
    DensityMatrix rho0 = ground_joint_state(p.d);
    TrajectoryRecord rec = run_trajectory(p, s, rho0, 2024);

    // Replay the run: the stored r must equal <sigma_x> + dw/(sqrt(eta Gamma) dt)
    // bit for bit, and the delayed (here tau = 0: current) record drives the step.
    TrajectoryEngine eng(p, s);
    TrajectoryEngine::Workspace ws;
    ComplexMatrix rho = rho0.matrix();
    const double sqrt_meas = std::sqrt(p.eta() * p.Gamma);
    for (std::size_t i = 0; i < rec.noise.size(); ++i) {
        const double sx = 2.0 * rho.block(0, p.d, p.d, p.d).trace().real();
        const double expected_r = sx + rec.noise[i] / (sqrt_meas * s.dt);
        CHECK(rec.record[i] == expected_r);
        eng.step(rho, rec.record[i], rec.noise[i], ws);
    }
    CHECK(approx_equal(rho, rec.final_state.matrix(), 0.0));
}

TEST_CASE("record mean estimates the qubit coherence") {
    // From a fixed state with <sigma_x> != 0, the one-step record averages to
    // <sigma_x> within statistical error.
    ModelParams p = feedback_params(2, 0.7);
    SimulationParams s = sim_params(p, 1.0, 100);
    TrajectoryEngine eng(p, s);

    ComplexMatrix plus_state(2, 2);
    plus_state << 0.5, 0.5, 0.5, 0.5;  // <sigma_x> = 1 on the charger
    ComplexMatrix rho = tensor_product(plus_state, basis_state(2, 0).matrix());

    NormalStream noise(4242);
    const int n = 100000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dw = std::sqrt(s.dt) * noise.next();
        const double r = eng.measurement_record(rho, dw);
        acc += r;
        acc2 += r * r;
    }
    const double mean = acc / n;
    const double stderr_mean = std::sqrt((acc2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) < 3.0 * stderr_mean);
}

TEST_CASE("martingale: noise increments do not anticipate the past") {
    ModelParams p = feedback_params(2, 0.5);
    SimulationParams s = sim_params(p, 0.2, 20);
    s.n_traj = 400;
    DensityMatrix rho0 = ground_joint_state(p.d);

    // E[dw_k * E_battery(t_j<k)] = 0 within error: correlate the last noise
    // increment with the first-sample energy across trajectories.
    double acc = 0.0, acc2 = 0.0;
    TrajectoryOptions opts;
    for (int i = 0; i < s.n_traj; ++i) {
        TrajectoryRecord rec =
            run_trajectory(p, s, rho0, trajectory_stream_seed(s.seed, uint64_t(i)), opts);
        const double x = rec.noise.back() * rec.battery_energy.front();
        acc += x;
        acc2 += x * x;
    }
    const double mean = acc / s.n_traj;
    const double stderr_mean =
        std::sqrt(std::max(0.0, acc2 / s.n_traj - mean * mean) / s.n_traj);
    CHECK(std::abs(mean) < 3.0 * std::max(stderr_mean, 1e-12));
}

TEST_CASE("ensemble with one trajectory reproduces the single record") {
    ModelParams p = feedback_params(3, 0.5);
    SimulationParams s = sim_params(p, 0.4, 40);
    s.n_traj = 1;
    DensityMatrix rho0 = ground_joint_state(p.d);

    EnsembleResult ens = run_ensemble(p, s, rho0, 1);
    TrajectoryOptions opts;
    opts.keep_step_record = false;
    TrajectoryRecord single =
        run_trajectory(p, s, rho0, trajectory_stream_seed(s.seed, 0), opts);

    REQUIRE(ens.times == single.times);
    for (std::size_t j = 0; j < ens.times.size(); ++j) {
        CHECK(ens.per_traj_energy[0][j] == single.battery_energy[j]);
        CHECK(ens.mean_reports[j].energy ==
              doctest::Approx(single.battery_energy[j]).epsilon(1e-12));
        CHECK(ens.energy_dispersion[j] == 0.0);
        CHECK(ens.energy_stderr[j] == 0.0);
    }
}

TEST_CASE("ensemble mean follows the master equation (weak convergence)") {
    // Small system, tau = 0: the ensemble mean at t_max approaches the
    // Eq.-of-motion solution; halving dt with coupled increments changes the
    // mean by less than the Monte Carlo error.
    ModelParams p = feedback_params(3, 0.7);
    SimulationParams coarse = sim_params(p, 2.0, 200);
    coarse.n_traj = 500;

    EnsembleResult ens = run_ensemble(p, coarse, ground_joint_state(p.d), 0);
    EvolutionResult me = evolve_master_equation(p, ground_joint_state(p.d), 2.0, {2.0});
    const double diff =
        std::abs(ens.mean_reports.back().energy - me.reports.back().energy);
    CHECK(diff < 3.0 * std::max(ens.energy_stderr.back(), 1e-4));

    // Richardson-style check with Brownian-bridge-coupled increments.
    SimulationParams fine = coarse;
    fine.dt = coarse.dt / 2.0;
    fine.sample_stride = 400;
    TrajectoryEngine eng_c(p, coarse);
    TrajectoryEngine eng_f(p, fine);
    TrajectoryEngine::Workspace ws;
    const long n_steps = coarse.n_steps();
    double acc_diff = 0.0, acc_e = 0.0, acc_e2 = 0.0;
    ComplexMatrix sum_c = ComplexMatrix::Zero(2 * p.d, 2 * p.d);
    ComplexMatrix sum_f = sum_c;
    for (int i = 0; i < coarse.n_traj; ++i) {
        NormalStream noise(trajectory_stream_seed(coarse.seed, uint64_t(i)));
        ComplexMatrix rho_c = ground_joint_state(p.d).matrix();
        ComplexMatrix rho_f = rho_c;
        for (long k = 0; k < n_steps; ++k) {
            const double dw1 = std::sqrt(fine.dt) * noise.next();
            const double dw2 = std::sqrt(fine.dt) * noise.next();
            const double r_f1 = eng_f.measurement_record(rho_f, dw1);
            eng_f.step(rho_f, r_f1, dw1, ws);
            const double r_f2 = eng_f.measurement_record(rho_f, dw2);
            eng_f.step(rho_f, r_f2, dw2, ws);
            const double dw = dw1 + dw2;
            const double r_c = eng_c.measurement_record(rho_c, dw);
            eng_c.step(rho_c, r_c, dw, ws);
        }
        auto battery_e = [&](const ComplexMatrix& rho) {
            return battery_energy(
                ComplexMatrix(rho.block(0, 0, p.d, p.d) + rho.block(p.d, p.d, p.d, p.d)),
                p.omega0);
        };
        const double e_c = battery_e(rho_c);
        const double e_f = battery_e(rho_f);
        acc_diff += e_f - e_c;
        acc_e += e_c;
        acc_e2 += e_c * e_c;
        sum_c += rho_c;
        sum_f += rho_f;
    }
    const int n = coarse.n_traj;
    const double mean_e = acc_e / n;
    const double mc_stderr = std::sqrt((acc_e2 / n - mean_e * mean_e) / n);
    CHECK(std::abs(acc_diff / n) < std::max(mc_stderr, 1e-6));

    // Markovian-limit agreement: the distance of the mean state to the
    // generator solution is Monte Carlo noise plus an O(dt) bias. Under
    // common noise the dt-halving shift isolates the bias, which must sit
    // far below the noise floor: refining dt cannot move the ensemble away
    // from the Eq.-of-motion solution by more than the error bars.
    EvolutionResult me_full =
        evolve_master_equation(p, ground_joint_state(p.d), 2.0, {2.0},
                               []() { EvolveOptions o; o.keep_joint_states = true; return o; }());
    const ComplexMatrix me_state = me_full.joint_states.back().matrix();
    const double dist_c = trace_distance(hermitize(sum_c / n), me_state);
    const double dt_shift = trace_distance(hermitize(sum_f / n), hermitize(sum_c / n));
    CHECK(dt_shift < 0.2 * dist_c);
}

TEST_CASE("delay ring buffer waits out the dead time") {
    // With tau > 0 the first tau/dt steps must run without feedback: a run
    // whose horizon ends inside the dead time matches the f = 0 run exactly.
    ModelParams p = feedback_params(3, 0.8);
    SimulationParams s = sim_params(p, 0.1, 10);
    s.tau = 0.05;  // 50 steps of delay, horizon 100 steps

    ModelParams p_nofb = p;
    p_nofb.f = 0.0;
    SimulationParams s_short = s;
    s_short.tau = 0.0;
    s_short.t_max = 0.05;  // exactly the dead-time window

    TrajectoryRecord with_delay = run_trajectory(p, s, ground_joint_state(p.d), 31337);
    TrajectoryRecord without_fb =
        run_trajectory(p_nofb, s_short, ground_joint_state(p.d), 31337);

    // Same noise stream, same dynamics during the dead time.
    const std::size_t overlap = without_fb.battery_energy.size();
    for (std::size_t j = 0; j < overlap; ++j)
        CHECK(with_delay.battery_energy[j] == doctest::Approx(without_fb.battery_energy[j]));
}
