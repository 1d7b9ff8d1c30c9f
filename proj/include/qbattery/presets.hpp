#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qbattery/config.hpp"
#include "qbattery/manifest.hpp"

namespace qbattery {

/// Outcome of a preset or single-experiment run.
struct RunOutput {
    std::vector<std::filesystem::path> files;  // CSVs written (manifests alongside)
    RunDiagnostics diagnostics;
};

/// Names of the built-in figure-data presets (fig2 ... fig10).
std::vector<std::string> preset_names();

/// Regenerate one figure's data into out_dir. Every CSV gets a manifest
/// sidecar. Throws ConfigError for unknown names.
RunOutput run_preset(const std::string& name, const std::filesystem::path& out_dir,
                     std::uint64_t seed, int threads);

/// Execute a parsed experiment configuration (one CLI subcommand).
RunOutput run_experiment(const ExperimentConfig& cfg, int threads);

}  // namespace qbattery
