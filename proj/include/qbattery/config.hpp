#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qbattery/model.hpp"
#include "qbattery/trajectory.hpp"

namespace qbattery {

enum class RunMode {
    SteadyAnalytic,
    SteadyNumeric,
    Evolve,
    Trajectories,
    Sweep,
    ChargingTime,
};

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

struct SweepSpec {
    std::string parameter;  // one of: f, Omega0, Gamma, g, eta, nbar, delta_B
    std::vector<double> values;
};

/// Fully resolved experiment description (defaults filled in, validated).
struct ExperimentConfig {
    RunMode mode = RunMode::SteadyAnalytic;
    ModelParams model;
    SimulationParams sim;
    std::optional<SweepSpec> sweep;
    double epsilon = 1e-2;          // charging-time fractional error
    double t_max = 0.0;             // horizon for evolve / charging-time
    int n_samples = 100;            // evolve sample count over [0, t_max]
    std::string out = "out.csv";
    bool normalize = true;          // report E/E_max instead of absolute
    bool eta_split_applied = false; // eta_c = eta_d = sqrt(eta) defaulting used
};

/// Parse and validate a JSON config document. Unknown keys are rejected
/// (never ignored); violations carry field-path messages. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// The resolved config as a JSON string (the manifest's config echo).
std::string config_echo(const ExperimentConfig& cfg);

/// Apply one sweep-axis value to a copy of the model parameters.
ModelParams apply_sweep_value(const ModelParams& base, const std::string& parameter,
                              double value);

}  // namespace qbattery
