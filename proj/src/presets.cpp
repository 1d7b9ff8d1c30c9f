#include "qbattery/presets.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>

#include <json.hpp>

#include "qbattery/csv.hpp"
#include "qbattery/energetics.hpp"
#include "qbattery/evolve.hpp"
#include "qbattery/ops.hpp"
#include "qbattery/parallel.hpp"
#include "qbattery/steady_state.hpp"
#include "qbattery/trajectory.hpp"
#include "qbattery/version.hpp"

namespace qbattery {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

json model_json(const ModelParams& p) {
    return json{{"omega0", p.omega0}, {"delta_B", p.delta_B}, {"g", p.g},
                {"d", p.d},           {"Gamma", p.Gamma},     {"Omega0", p.Omega0},
                {"f", p.f},           {"eta_c", p.eta_c},     {"eta_d", p.eta_d},
                {"nbar", p.nbar}};
}

json sim_json(const SimulationParams& s) {
    return json{{"dt", s.dt},
                {"tau", s.tau},
                {"n_traj", s.n_traj},
                {"seed", s.seed},
                {"sample_stride", s.sample_stride}};
}

void finish_file(const fs::path& file, const json& echo, std::uint64_t seed,
                 const Timer& timer, const RunDiagnostics& diag, RunOutput& out) {
    RunManifest manifest;
    manifest.config_echo = echo.dump(2);
    manifest.seed = seed;
    manifest.version = kVersion;
    manifest.wall_seconds = timer.seconds();
    manifest.diagnostics = diag;
    write_manifest(file, manifest);
    out.files.push_back(file);
}

void merge_diag(RunDiagnostics& into, const SteadyOptions& solve) {
    into.steady_residual = std::max(into.steady_residual, solve.residual);
    into.positivity_repairs += solve.positivity_repairs;
}

struct SteadyPoint {
    EnergyReport report;
    SteadyOptions solve;
};

SteadyPoint steady_numeric_point(const ModelParams& p) {
    SteadyPoint pt;
    DensityMatrix rho = steady_state_numeric(p, &pt.solve);
    pt.report = ergotropy_split(partial_trace(rho.matrix(), {2, p.d}, 1), p.omega0);
    return pt;
}

std::vector<double> linspace(double from, double to, int count) {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] = from + (to - from) * double(i) / double(count - 1);
    return v;
}

// ---------------------------------------------------------------------------
// fig2: asymptotic E and ergotropy vs f/Gamma (population-inversion strategy).

RunOutput preset_fig2(const fs::path& out_dir, std::uint64_t seed, int /*threads*/) {
    Timer timer;
    RunOutput out;
    ModelParams base;  // d, Gamma, omega0 from the shared defaults
    base.Omega0 = 0.0;

    CsvWriter csv(out_dir / "fig2.csv",
                  {"f_over_gamma", "eta", "E_over_Emax", "ergotropy_over_Emax"});
    for (double eta : {0.3, 1.0}) {
        for (int k = 0; k <= 80; ++k) {
            ModelParams p = base;
            p.eta_c = p.eta_d = std::sqrt(eta);
            p.f = 0.025 * double(k) * p.Gamma;
            SteadyAnalytic ss = steady_battery_analytic(p);
            csv.row({p.f / p.Gamma, eta, ss.energy / p.e_max(), ss.ergotropy / p.e_max()});
        }
    }
    csv.close();
    finish_file(csv.path(), json{{"preset", "fig2"}, {"model", model_json(base)}}, seed, timer,
                out.diagnostics, out);
    return out;
}

// ---------------------------------------------------------------------------
// fig3: coherent strategy; numeric steady states over an Omega0 sweep for
// f = 0 and two negative feedback gains.

RunOutput preset_fig3(const fs::path& out_dir, std::uint64_t seed, int threads) {
    Timer timer;
    RunOutput out;
    ModelParams base;
    base.g = 1.0;
    base.Gamma = 10.0 * base.g;
    base.eta_c = base.eta_d = std::sqrt(0.3);

    const std::vector<double> f_over_gamma = {0.0, -0.2, -0.45};
    const std::vector<double> omega_grid = linspace(0.0, 4.0 * base.g, 81);

    struct Row {
        double omega0, f_rel;
        EnergyReport rep;
        SteadyOptions solve;
    };
    std::vector<Row> rows(f_over_gamma.size() * omega_grid.size());
    parallel_for(static_cast<int>(rows.size()), threads, [&](int idx) {
        const std::size_t i = static_cast<std::size_t>(idx);
        const double f_rel = f_over_gamma[i / omega_grid.size()];
        const double omega0 = omega_grid[i % omega_grid.size()];
        ModelParams p = base;
        p.f = f_rel * p.Gamma;
        p.Omega0 = omega0;
        SteadyPoint pt = steady_numeric_point(p);
        rows[i] = Row{omega0, f_rel, pt.report, pt.solve};
    });

    CsvWriter csv(out_dir / "fig3.csv",
                  {"Omega0_over_g", "f_over_gamma", "E_over_Emax", "ergotropy_over_Emax",
                   "incoherent_over_Emax", "coherent_over_Emax"});
    const double emax = base.e_max();
    for (const Row& r : rows) {
        csv.row({r.omega0 / base.g, r.f_rel, r.rep.energy / emax, r.rep.ergotropy / emax,
                 r.rep.ergotropy_incoherent / emax, r.rep.ergotropy_coherent / emax});
        merge_diag(out.diagnostics, r.solve);
    }
    csv.close();
    finish_file(csv.path(), json{{"preset", "fig3"}, {"model", model_json(base)}}, seed, timer,
                out.diagnostics, out);
    return out;
}

// ---------------------------------------------------------------------------
// Shared writer for the dynamics presets (fig4 / fig6): ensemble file,
// 40-trajectory fan file, and the Markovian master-equation curve.

void write_dynamics_files(const std::string& stem, const fs::path& out_dir,
                          const ModelParams& p, const SimulationParams& s,
                          const EnsembleResult& ens, const EvolutionResult& master,
                          std::uint64_t seed, const Timer& timer, RunOutput& out) {
    const double emax = p.e_max();
    const json echo{{"preset", stem}, {"model", model_json(p)}, {"sim", sim_json(s)}};

    CsvWriter ens_csv(out_dir / (stem + "_ensemble.csv"),
                      {"g_t", "gamma_t", "E_over_Emax", "ergotropy_over_Emax",
                       "E_stderr_over_Emax", "ergotropy_stderr_over_Emax",
                       "E_dispersion_over_Emax"});
    for (std::size_t j = 0; j < ens.times.size(); ++j) {
        const double t = ens.times[j];
        ens_csv.row({p.g * t, p.Gamma * t, ens.mean_reports[j].energy / emax,
                     ens.mean_reports[j].ergotropy / emax, ens.energy_stderr[j] / emax,
                     ens.ergotropy_stderr[j] / emax, ens.energy_dispersion[j] / emax});
    }
    ens_csv.close();
    finish_file(ens_csv.path(), echo, seed, timer, out.diagnostics, out);

    const long long n_fan = std::min<long long>(40, static_cast<long long>(ens.per_traj_energy.size()));
    CsvWriter fan_csv(out_dir / (stem + "_trajectories.csv"),
                      {"trajectory", "g_t", "gamma_t", "E_over_Emax", "ergotropy_over_Emax"});
    for (long long i = 0; i < n_fan; ++i) {
        for (std::size_t j = 0; j < ens.times.size(); ++j) {
            const double t = ens.times[j];
            fan_csv.row({i, p.g * t, p.Gamma * t,
                         ens.per_traj_energy[static_cast<std::size_t>(i)][j] / emax,
                         ens.per_traj_ergotropy[static_cast<std::size_t>(i)][j] / emax});
        }
    }
    fan_csv.close();
    finish_file(fan_csv.path(), echo, seed, timer, out.diagnostics, out);

    CsvWriter me_csv(out_dir / (stem + "_master.csv"),
                     {"g_t", "gamma_t", "E_over_Emax", "ergotropy_over_Emax"});
    for (std::size_t j = 0; j < master.times.size(); ++j) {
        const double t = master.times[j];
        me_csv.row({p.g * t, p.Gamma * t, master.reports[j].energy / emax,
                    master.reports[j].ergotropy / emax});
    }
    me_csv.close();
    finish_file(me_csv.path(), echo, seed, timer, out.diagnostics, out);
}

RunOutput dynamics_preset(const std::string& stem, const ModelParams& p,
                          const SimulationParams& s, const fs::path& out_dir,
                          std::uint64_t seed, int threads) {
    Timer timer;
    RunOutput out;
    SimulationParams sim = s;
    sim.seed = seed;

    const DensityMatrix rho0 = ground_joint_state(p.d);
    EnsembleResult ens = run_ensemble(p, sim, rho0, threads);
    out.diagnostics.min_eigenvalue = std::min(out.diagnostics.min_eigenvalue,
                                              ens.min_eigenvalue);
    out.diagnostics.trajectories += sim.n_traj;

    // Markovian comparison curve at the same sample times (tau = 0 limit).
    EvolveOptions eopts;
    eopts.keep_joint_states = false;
    EvolutionResult master =
        evolve_master_equation(p, rho0, ens.times.back(), ens.times, eopts);
    out.diagnostics.ode_steps += master.stats.n_accepted;

    write_dynamics_files(stem, out_dir, p, sim, ens, master, seed, timer, out);
    return out;
}

RunOutput preset_fig4(const fs::path& out_dir, std::uint64_t seed, int threads) {
    ModelParams p;
    p.g = 1.0;
    p.Gamma = p.g;
    p.f = p.Gamma;
    p.eta_c = p.eta_d = std::sqrt(0.3);

    SimulationParams s;
    s.dt = 1e-3 / p.Gamma;
    s.t_max = 40.0 / p.g;
    s.sample_stride = 2000;  // 20 samples up to g t = 40
    return dynamics_preset("fig4", p, s, out_dir, seed, threads);
}

RunOutput preset_fig6(const fs::path& out_dir, std::uint64_t seed, int threads) {
    ModelParams p;
    p.g = 1.0;
    p.Gamma = 5.0 * p.g;
    p.f = p.Gamma;
    p.d = 10;
    p.eta_c = p.eta_d = std::sqrt(0.7);

    // Stationarity at these parameters needs Gamma t ~ 300 (the transfer
    // bottleneck is g^2/Gamma in the Gamma >> g regime).
    SimulationParams s;
    s.dt = 2e-3 / p.Gamma;
    s.tau = 0.1 / p.Gamma;  // Gamma tau = 0.1
    s.t_max = 300.0 / p.Gamma;
    s.sample_stride = 500;  // samples every Gamma t = 1
    return dynamics_preset("fig6", p, s, out_dir, seed, threads);
}

// ---------------------------------------------------------------------------
// fig5: charging time vs Gamma/g for three efficiencies.

RunOutput preset_fig5(const fs::path& out_dir, std::uint64_t seed, int threads) {
    Timer timer;
    RunOutput out;
    const std::vector<double> etas = {0.3, 0.7, 1.0};
    const std::vector<double> gamma_over_g = {0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
    const double epsilon = 1e-2;

    struct Row {
        double gamma_rel, eta, T;
    };
    std::vector<Row> rows(etas.size() * gamma_over_g.size());
    ModelParams base;
    base.g = 1.0;
    parallel_for(static_cast<int>(rows.size()), threads, [&](int idx) {
        const std::size_t i = static_cast<std::size_t>(idx);
        const double eta = etas[i / gamma_over_g.size()];
        const double gamma_rel = gamma_over_g[i % gamma_over_g.size()];
        ModelParams p = base;
        p.Gamma = gamma_rel * p.g;
        p.f = p.Gamma;
        p.eta_c = p.eta_d = std::sqrt(eta);
        ChargingOptions copts;
        copts.t_max = 20000.0 / p.g;
        copts.coarse_dt = 0.5 / p.g;
        const double T = charging_time(p, epsilon, ground_joint_state(p.d), copts);
        rows[i] = Row{gamma_rel, eta, T};
    });

    CsvWriter csv(out_dir / "fig5.csv", {"gamma_over_g", "eta", "T_g", "T_gamma"});
    for (const Row& r : rows)
        csv.row({r.gamma_rel, r.eta, base.g * r.T, r.gamma_rel * base.g * r.T});
    csv.close();
    finish_file(csv.path(),
                json{{"preset", "fig5"}, {"model", model_json(base)}, {"epsilon", epsilon}},
                seed, timer, out.diagnostics, out);
    return out;
}

// ---------------------------------------------------------------------------
// fig7: steady charge vs feedback delay for two efficiencies, plus the
// time-resolved dispersion data.

RunOutput preset_fig7(const fs::path& out_dir, std::uint64_t seed, int threads) {
    Timer timer;
    RunOutput out;
    ModelParams base;
    base.g = 1.0;
    base.Gamma = 5.0 * base.g;
    base.f = base.Gamma;
    base.d = 10;

    const std::vector<double> etas = {0.7, 1.0};
    const std::vector<double> gamma_taus = {0.0, 0.1, 0.25, 0.5};

    CsvWriter summary(out_dir / "fig7.csv",
                      {"gamma_tau", "eta", "E_over_Emax", "ergotropy_over_Emax",
                       "E_stderr_over_Emax", "ergotropy_stderr_over_Emax",
                       "E_dispersion_over_Emax"});
    CsvWriter series(out_dir / "fig7_timeseries.csv",
                     {"gamma_tau", "eta", "g_t", "gamma_t", "E_over_Emax",
                      "ergotropy_over_Emax", "E_stderr_over_Emax",
                      "ergotropy_stderr_over_Emax", "E_dispersion_over_Emax"});

    const double emax = base.e_max();
    for (double eta : etas) {
        for (double gamma_tau : gamma_taus) {
            ModelParams p = base;
            p.eta_c = p.eta_d = std::sqrt(eta);
            SimulationParams s;
            s.seed = seed;
            s.dt = 2e-3 / p.Gamma;
            s.tau = gamma_tau / p.Gamma;
            s.t_max = 300.0 / p.Gamma;
            s.sample_stride = 2500;  // samples every Gamma t = 5
            EnsembleResult ens = run_ensemble(p, s, ground_joint_state(p.d), threads);
            out.diagnostics.min_eigenvalue =
                std::min(out.diagnostics.min_eigenvalue, ens.min_eigenvalue);
            out.diagnostics.trajectories += s.n_traj;

            const std::size_t last = ens.times.size() - 1;
            summary.row({gamma_tau, eta, ens.mean_reports[last].energy / emax,
                         ens.mean_reports[last].ergotropy / emax,
                         ens.energy_stderr[last] / emax, ens.ergotropy_stderr[last] / emax,
                         ens.energy_dispersion[last] / emax});
            for (std::size_t j = 0; j < ens.times.size(); ++j) {
                const double t = ens.times[j];
                series.row({gamma_tau, eta, p.g * t, p.Gamma * t,
                            ens.mean_reports[j].energy / emax,
                            ens.mean_reports[j].ergotropy / emax, ens.energy_stderr[j] / emax,
                            ens.ergotropy_stderr[j] / emax, ens.energy_dispersion[j] / emax});
            }
        }
    }
    summary.close();
    series.close();
    const json echo{{"preset", "fig7"}, {"model", model_json(base)}};
    finish_file(summary.path(), echo, seed, timer, out.diagnostics, out);
    finish_file(series.path(), echo, seed, timer, out.diagnostics, out);
    return out;
}

// ---------------------------------------------------------------------------
// fig8: charging dynamics for three battery dimensions (absolute units).

RunOutput preset_fig8(const fs::path& out_dir, std::uint64_t seed, int threads) {
    Timer timer;
    RunOutput out;
    ModelParams base;
    base.g = 1.0;
    base.Gamma = base.g;
    base.f = base.g;
    base.eta_c = base.eta_d = std::sqrt(0.5);

    const std::vector<int> dims = {10, 15, 20};
    const std::vector<double> samples = linspace(0.2, 40.0, 200);

    struct Curve {
        int d;
        EvolutionResult result;
    };
    std::vector<Curve> curves(dims.size());
    parallel_for(static_cast<int>(dims.size()), threads, [&](int i) {
        ModelParams p = base;
        p.d = dims[static_cast<std::size_t>(i)];
        EvolveOptions eopts;
        eopts.keep_joint_states = false;
        curves[static_cast<std::size_t>(i)] =
            Curve{p.d, evolve_master_equation(p, ground_joint_state(p.d), 40.0 / p.g, samples,
                                              eopts)};
    });

    CsvWriter csv(out_dir / "fig8.csv", {"d", "g_t", "gamma_t", "E", "ergotropy"});
    for (const Curve& c : curves) {
        out.diagnostics.ode_steps += c.result.stats.n_accepted;
        for (std::size_t j = 0; j < c.result.times.size(); ++j) {
            const double t = c.result.times[j];
            csv.row({static_cast<long long>(c.d), base.g * t, base.Gamma * t,
                     c.result.reports[j].energy, c.result.reports[j].ergotropy});
        }
    }
    csv.close();
    finish_file(csv.path(), json{{"preset", "fig8"}, {"model", model_json(base)}}, seed, timer,
                out.diagnostics, out);
    return out;
}

// ---------------------------------------------------------------------------
// fig9: steady charge vs thermal occupation under the optimal gain.

RunOutput preset_fig9(const fs::path& out_dir, std::uint64_t seed, int /*threads*/) {
    Timer timer;
    RunOutput out;
    ModelParams base;
    base.eta_c = base.eta_d = 0.7;

    CsvWriter csv(out_dir / "fig9.csv",
                  {"nbar", "f_over_gamma", "E_over_Emax", "ergotropy_over_Emax"});
    for (int k = 0; k <= 30; ++k) {
        ModelParams p = base;
        p.nbar = 0.1 * double(k);
        p.f = optimal_feedback_gain(p);
        SteadyAnalytic ss = steady_battery_analytic(p);
        csv.row({p.nbar, p.f / p.Gamma, ss.energy / p.e_max(), ss.ergotropy / p.e_max()});
    }
    csv.close();
    finish_file(csv.path(), json{{"preset", "fig9"}, {"model", model_json(base)}}, seed, timer,
                out.diagnostics, out);
    return out;
}

// ---------------------------------------------------------------------------
// fig10: charging dynamics with detuning and thermal noise.

RunOutput preset_fig10(const fs::path& out_dir, std::uint64_t seed, int threads) {
    Timer timer;
    RunOutput out;
    ModelParams base;
    base.g = 1.0;
    base.Gamma = 2.0 * base.g;
    base.eta_c = base.eta_d = 0.7;

    struct Case {
        const char* label;
        double delta_B, nbar;
    };
    const std::vector<Case> cases = {{"resonant", 0.0, 0.0},
                                     {"detuned", base.g, 0.0},
                                     {"thermal", 0.0, 2.0}};
    const std::vector<double> samples = linspace(0.2, 30.0, 150);

    std::vector<EvolutionResult> results(cases.size());
    std::vector<ModelParams> params(cases.size());
    parallel_for(static_cast<int>(cases.size()), threads, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        ModelParams p = base;
        p.delta_B = cases[idx].delta_B;
        p.nbar = cases[idx].nbar;
        p.f = optimal_feedback_gain(p);
        EvolveOptions eopts;
        eopts.keep_joint_states = false;
        params[idx] = p;
        results[idx] =
            evolve_master_equation(p, ground_joint_state(p.d), 30.0 / p.g, samples, eopts);
    });

    CsvWriter csv(out_dir / "fig10.csv",
                  {"label", "delta_B_over_g", "nbar", "g_t", "gamma_t", "E_over_Emax",
                   "ergotropy_over_Emax"});
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const double emax = params[c].e_max();
        out.diagnostics.ode_steps += results[c].stats.n_accepted;
        for (std::size_t j = 0; j < results[c].times.size(); ++j) {
            const double t = results[c].times[j];
            csv.row({std::string(cases[c].label), cases[c].delta_B / base.g, cases[c].nbar,
                     base.g * t, base.Gamma * t, results[c].reports[j].energy / emax,
                     results[c].reports[j].ergotropy / emax});
        }
    }
    csv.close();
    finish_file(csv.path(), json{{"preset", "fig10"}, {"model", model_json(base)}}, seed,
                timer, out.diagnostics, out);
    return out;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"};
}

RunOutput run_preset(const std::string& name, const fs::path& out_dir, std::uint64_t seed,
                     int threads) {
    std::filesystem::create_directories(out_dir);
    if (name == "fig2") return preset_fig2(out_dir, seed, threads);
    if (name == "fig3") return preset_fig3(out_dir, seed, threads);
    if (name == "fig4") return preset_fig4(out_dir, seed, threads);
    if (name == "fig5") return preset_fig5(out_dir, seed, threads);
    if (name == "fig6") return preset_fig6(out_dir, seed, threads);
    if (name == "fig7") return preset_fig7(out_dir, seed, threads);
    if (name == "fig8") return preset_fig8(out_dir, seed, threads);
    if (name == "fig9") return preset_fig9(out_dir, seed, threads);
    if (name == "fig10") return preset_fig10(out_dir, seed, threads);
    throw ConfigError("unknown preset '" + name + "'");
}

RunOutput run_experiment(const ExperimentConfig& cfg, int threads) {
    Timer timer;
    RunOutput out;
    const json echo = json::parse(config_echo(cfg));
    const fs::path out_path = cfg.out;
    const double emax = cfg.model.e_max();

    switch (cfg.mode) {
        case RunMode::SteadyAnalytic: {
            SteadyAnalytic ss = steady_battery_analytic(cfg.model);
            CsvWriter csv(out_path, {"sigma_z", "R", "E", "ergotropy", "E_over_Emax",
                                     "ergotropy_over_Emax"});
            csv.row({ss.sigma_z, ss.R, ss.energy, ss.ergotropy, ss.energy / emax,
                     ss.ergotropy / emax});
            csv.close();
            finish_file(csv.path(), echo, cfg.sim.seed, timer, out.diagnostics, out);
            break;
        }
        case RunMode::SteadyNumeric: {
            SteadyPoint pt = steady_numeric_point(cfg.model);
            merge_diag(out.diagnostics, pt.solve);
            CsvWriter csv(out_path,
                          {"E", "ergotropy", "ergotropy_incoherent", "ergotropy_coherent",
                           "E_over_Emax", "ergotropy_over_Emax"});
            csv.row({pt.report.energy, pt.report.ergotropy, pt.report.ergotropy_incoherent,
                     pt.report.ergotropy_coherent, pt.report.energy / emax,
                     pt.report.ergotropy / emax});
            csv.close();
            finish_file(csv.path(), echo, cfg.sim.seed, timer, out.diagnostics, out);
            break;
        }
        case RunMode::Evolve: {
            const std::vector<double> samples =
                linspace(cfg.t_max / cfg.n_samples, cfg.t_max, cfg.n_samples);
            EvolveOptions eopts;
            eopts.keep_joint_states = false;
            EvolutionResult res = evolve_master_equation(
                cfg.model, ground_joint_state(cfg.model.d), cfg.t_max, samples, eopts);
            out.diagnostics.ode_steps += res.stats.n_accepted;
            for (double m : res.min_eigenvalues)
                out.diagnostics.min_eigenvalue = std::min(out.diagnostics.min_eigenvalue, m);
            std::vector<std::string> header{"t", "g_t", "gamma_t"};
            if (cfg.normalize) {
                header.insert(header.end(), {"E_over_Emax", "ergotropy_over_Emax",
                                             "incoherent_over_Emax", "coherent_over_Emax"});
            } else {
                header.insert(header.end(), {"E", "ergotropy", "ergotropy_incoherent",
                                             "ergotropy_coherent"});
            }
            CsvWriter csv(out_path, header);
            const double scale = cfg.normalize ? emax : 1.0;
            for (std::size_t j = 0; j < res.times.size(); ++j) {
                const double t = res.times[j];
                csv.row({t, cfg.model.g * t, cfg.model.Gamma * t,
                         res.reports[j].energy / scale, res.reports[j].ergotropy / scale,
                         res.reports[j].ergotropy_incoherent / scale,
                         res.reports[j].ergotropy_coherent / scale});
            }
            csv.close();
            finish_file(csv.path(), echo, cfg.sim.seed, timer, out.diagnostics, out);
            break;
        }
        case RunMode::Trajectories: {
            EnsembleResult ens =
                run_ensemble(cfg.model, cfg.sim, ground_joint_state(cfg.model.d), threads);
            out.diagnostics.min_eigenvalue =
                std::min(out.diagnostics.min_eigenvalue, ens.min_eigenvalue);
            out.diagnostics.trajectories += cfg.sim.n_traj;
            const double scale = cfg.normalize ? emax : 1.0;
            std::vector<std::string> header{"t", "g_t", "gamma_t"};
            if (cfg.normalize) {
                header.insert(header.end(),
                              {"E_over_Emax", "ergotropy_over_Emax", "E_stderr_over_Emax",
                               "ergotropy_stderr_over_Emax", "E_dispersion_over_Emax"});
            } else {
                header.insert(header.end(), {"E", "ergotropy", "E_stderr", "ergotropy_stderr",
                                             "E_dispersion"});
            }
            CsvWriter csv(out_path, header);
            for (std::size_t j = 0; j < ens.times.size(); ++j) {
                const double t = ens.times[j];
                csv.row({t, cfg.model.g * t, cfg.model.Gamma * t,
                         ens.mean_reports[j].energy / scale,
                         ens.mean_reports[j].ergotropy / scale, ens.energy_stderr[j] / scale,
                         ens.ergotropy_stderr[j] / scale, ens.energy_dispersion[j] / scale});
            }
            csv.close();
            finish_file(csv.path(), echo, cfg.sim.seed, timer, out.diagnostics, out);
            break;
        }
        case RunMode::Sweep: {
            const SweepSpec& sweep = *cfg.sweep;
            struct Row {
                double value;
                EnergyReport rep;
                SteadyOptions solve;
            };
            std::vector<Row> rows(sweep.values.size());
            parallel_for(static_cast<int>(rows.size()), threads, [&](int i) {
                const auto idx = static_cast<std::size_t>(i);
                ModelParams p = apply_sweep_value(cfg.model, sweep.parameter,
                                                  sweep.values[idx]);
                SteadyPoint pt = steady_numeric_point(p);
                rows[idx] = Row{sweep.values[idx], pt.report, pt.solve};
            });
            const double scale = cfg.normalize ? emax : 1.0;
            std::vector<std::string> header{"parameter", "value"};
            if (cfg.normalize) {
                header.insert(header.end(), {"E_over_Emax", "ergotropy_over_Emax",
                                             "incoherent_over_Emax", "coherent_over_Emax"});
            } else {
                header.insert(header.end(), {"E", "ergotropy", "ergotropy_incoherent",
                                             "ergotropy_coherent"});
            }
            CsvWriter csv(out_path, header);
            for (const Row& r : rows) {
                merge_diag(out.diagnostics, r.solve);
                csv.row({sweep.parameter, r.value, r.rep.energy / scale,
                         r.rep.ergotropy / scale, r.rep.ergotropy_incoherent / scale,
                         r.rep.ergotropy_coherent / scale});
            }
            csv.close();
            finish_file(csv.path(), echo, cfg.sim.seed, timer, out.diagnostics, out);
            break;
        }
        case RunMode::ChargingTime: {
            ChargingOptions copts;
            copts.t_max = cfg.t_max;
            const double T = charging_time(cfg.model, cfg.epsilon,
                                           ground_joint_state(cfg.model.d), copts);
            CsvWriter csv(out_path, {"epsilon", "T", "T_g", "T_gamma"});
            csv.row({cfg.epsilon, T, cfg.model.g * T, cfg.model.Gamma * T});
            csv.close();
            finish_file(csv.path(), echo, cfg.sim.seed, timer, out.diagnostics, out);
            break;
        }
    }
    return out;
}

}  // namespace qbattery
