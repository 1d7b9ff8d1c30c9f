#include "qbattery/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace qbattery {

std::filesystem::path write_manifest(const std::filesystem::path& output_path,
                                     const RunManifest& manifest) {
    using nlohmann::json;
    json diag{{"steady_residual", manifest.diagnostics.steady_residual},
              {"positivity_repairs", manifest.diagnostics.positivity_repairs},
              {"min_eigenvalue", manifest.diagnostics.min_eigenvalue},
              {"ode_steps", manifest.diagnostics.ode_steps},
              {"trajectories", manifest.diagnostics.trajectories}};
    json doc{{"config", json::parse(manifest.config_echo)},
             {"seed", manifest.seed},
             {"version", manifest.version},
             {"wall_seconds", manifest.wall_seconds},
             {"diagnostics", diag}};

    std::filesystem::path path = output_path;
    path += ".manifest.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_manifest: cannot open " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write_manifest: write failed for " + path.string());
    return path;
}

}  // namespace qbattery
