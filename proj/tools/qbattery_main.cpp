#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qbattery/config.hpp"
#include "qbattery/presets.hpp"
#include "qbattery/version.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

int threads_from_env() {
    if (const char* env = std::getenv("QBATTERY_THREADS")) {
        try {
            return std::max(0, std::stoi(env));
        } catch (...) {
            return 0;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qbattery - feedback-controlled quantum battery simulator"};
    app.set_version_flag("--version", qbattery::kVersion);

    std::string preset_name;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = -1;  // -1: fall back to env, 0: auto
    app.add_option("--preset", preset_name, "Run a figure-data preset (fig2..fig10)");
    app.add_option("--out", out_dir, "Output directory for presets");
    app.add_option("--seed", seed, "Master seed override");
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");

    struct ModeCmd {
        CLI::App* cmd;
        qbattery::RunMode mode;
        std::string config_path;
    };
    std::vector<ModeCmd> modes;
    modes.reserve(6);  // CLI11 keeps pointers into the slots; no reallocation
    for (auto mode : {qbattery::RunMode::SteadyAnalytic, qbattery::RunMode::SteadyNumeric,
                      qbattery::RunMode::Evolve, qbattery::RunMode::Trajectories,
                      qbattery::RunMode::Sweep, qbattery::RunMode::ChargingTime}) {
        auto* cmd = app.add_subcommand(qbattery::to_string(mode),
                                       "Run mode " + qbattery::to_string(mode));
        modes.push_back({cmd, mode, {}});
        auto& slot = modes.back();
        cmd->add_option("--config", slot.config_path, "Experiment config (JSON)")->required();
        cmd->add_option("--out", out_dir, "Output directory (overrides config 'out' path)");
        cmd->add_option("--seed", seed, "Master seed override");
        cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
    }

    CLI11_PARSE(app, argc, argv);
    if (threads < 0) threads = threads_from_env();

    try {
        if (!preset_name.empty()) {
            auto out = qbattery::run_preset(preset_name, out_dir,
                                            seed.value_or(qbattery::SimulationParams{}.seed),
                                            threads);
            for (const auto& f : out.files) std::cout << "wrote " << f.string() << '\n';
            return 0;
        }
        for (auto& slot : modes) {
            if (!slot.cmd->parsed()) continue;
            qbattery::ExperimentConfig cfg = qbattery::parse_config_file(slot.config_path);
            if (cfg.mode != slot.mode)
                throw qbattery::ConfigError("config mode '" + qbattery::to_string(cfg.mode) +
                                            "' does not match subcommand '" +
                                            qbattery::to_string(slot.mode) + "'");
            if (seed) cfg.sim.seed = *seed;
            if (slot.cmd->count("--out") || app.count("--out")) {
                std::filesystem::path p(cfg.out);
                cfg.out = (std::filesystem::path(out_dir) / p.filename()).string();
            }
            auto out = qbattery::run_experiment(cfg, threads);
            for (const auto& f : out.files) std::cout << "wrote " << f.string() << '\n';
            return 0;
        }
        std::cerr << "nothing to do: give a subcommand or --preset (see --help)\n";
        return kExitConfigError;
    } catch (const qbattery::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const qbattery::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
