#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace qbattery {

/// Convergence and invariant diagnostics accumulated over a run.
struct RunDiagnostics {
    double steady_residual = 0.0;   // worst ||L vec(rho)|| over null-space solves
    long positivity_repairs = 0;    // clipped eigenvalues across all solves
    double min_eigenvalue = 1.0;    // worst sampled spectrum floor
    long ode_steps = 0;             // accepted integrator steps
    long long trajectories = 0;     // stochastic trajectories run
};

/// Sidecar metadata emitted with every output file. The config echo plus the
/// seed reproduce the output byte-identically.
struct RunManifest {
    std::string config_echo;  // resolved config (JSON text)
    std::uint64_t seed = 0;
    std::string version;
    double wall_seconds = 0.0;
    RunDiagnostics diagnostics;
};

/// Writes `<output>.manifest.json` next to the output file.
std::filesystem::path write_manifest(const std::filesystem::path& output_path,
                                     const RunManifest& manifest);

}  // namespace qbattery
