#include "qbattery/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qbattery {

using nlohmann::json;

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::SteadyAnalytic: return "steady-analytic";
        case RunMode::SteadyNumeric: return "steady-numeric";
        case RunMode::Evolve: return "evolve";
        case RunMode::Trajectories: return "trajectories";
        case RunMode::Sweep: return "sweep";
        case RunMode::ChargingTime: return "charging-time";
    }
    return "?";
}

RunMode run_mode_from_string(const std::string& s) {
    if (s == "steady-analytic") return RunMode::SteadyAnalytic;
    if (s == "steady-numeric") return RunMode::SteadyNumeric;
    if (s == "evolve") return RunMode::Evolve;
    if (s == "trajectories") return RunMode::Trajectories;
    if (s == "sweep") return RunMode::Sweep;
    if (s == "charging-time") return RunMode::ChargingTime;
    throw ConfigError("mode: unknown value '" + s + "'");
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& prefix) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ConfigError("unknown key " + (prefix.empty() ? key : prefix + "." + key));
    }
}

double get_number(const json& obj, const std::string& key, const std::string& path,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(path + " must be a number");
    return obj[key].get<double>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config document: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");

    reject_unknown_keys(doc, {"mode", "model", "sim", "sweep", "epsilon", "t_max",
                              "n_samples", "out", "normalize"},
                        "");

    ExperimentConfig cfg;
    if (!doc.contains("mode") || !doc["mode"].is_string())
        throw ConfigError("mode is required and must be a string");
    cfg.mode = run_mode_from_string(doc["mode"].get<std::string>());

    if (doc.contains("model")) {
        const json& m = doc["model"];
        if (!m.is_object()) throw ConfigError("model must be an object");
        reject_unknown_keys(m, {"omega0", "delta_B", "g", "d", "Gamma", "Omega0", "f", "eta",
                                "eta_c", "eta_d", "nbar"},
                            "model");
        cfg.model.omega0 = get_number(m, "omega0", "model.omega0", cfg.model.omega0);
        cfg.model.delta_B = get_number(m, "delta_B", "model.delta_B", cfg.model.delta_B);
        cfg.model.g = get_number(m, "g", "model.g", cfg.model.g);
        if (m.contains("d")) {
            if (!m["d"].is_number_integer()) throw ConfigError("model.d must be an integer");
            cfg.model.d = m["d"].get<int>();
        }
        cfg.model.Gamma = get_number(m, "Gamma", "model.Gamma", cfg.model.Gamma);
        cfg.model.Omega0 = get_number(m, "Omega0", "model.Omega0", cfg.model.Omega0);
        cfg.model.f = get_number(m, "f", "model.f", cfg.model.f);
        cfg.model.nbar = get_number(m, "nbar", "model.nbar", cfg.model.nbar);

        const bool has_eta = m.contains("eta");
        const bool has_split = m.contains("eta_c") || m.contains("eta_d");
        if (has_eta && has_split)
            throw ConfigError("model.eta conflicts with model.eta_c/model.eta_d; give one form");
        if (has_eta) {
            const double eta = get_number(m, "eta", "model.eta", 1.0);
            if (eta < 0.0 || eta > 1.0) throw ConfigError("model.eta must lie in [0, 1]");
            cfg.model.eta_c = cfg.model.eta_d = std::sqrt(eta);
            cfg.eta_split_applied = true;
        } else {
            cfg.model.eta_c = get_number(m, "eta_c", "model.eta_c", cfg.model.eta_c);
            cfg.model.eta_d = get_number(m, "eta_d", "model.eta_d", cfg.model.eta_d);
        }
    }

    try {
        cfg.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }

    cfg.t_max = get_number(doc, "t_max", "t_max", 0.0);
    cfg.epsilon = get_number(doc, "epsilon", "epsilon", cfg.epsilon);
    if (doc.contains("n_samples")) {
        if (!doc["n_samples"].is_number_integer())
            throw ConfigError("n_samples must be an integer");
        cfg.n_samples = doc["n_samples"].get<int>();
        if (cfg.n_samples < 1) throw ConfigError("n_samples must be >= 1");
    }
    if (doc.contains("out")) {
        if (!doc["out"].is_string()) throw ConfigError("out must be a string");
        cfg.out = doc["out"].get<std::string>();
    }
    if (doc.contains("normalize")) {
        if (!doc["normalize"].is_boolean()) throw ConfigError("normalize must be a boolean");
        cfg.normalize = doc["normalize"].get<bool>();
    }

    // Simulation defaults: Gamma * dt = 1e-3 unless given explicitly.
    cfg.sim.t_max = cfg.t_max;
    if (doc.contains("sim")) {
        const json& s = doc["sim"];
        if (!s.is_object()) throw ConfigError("sim must be an object");
        reject_unknown_keys(s, {"dt", "tau", "n_traj", "seed", "sample_stride"}, "sim");
        cfg.sim.dt = get_number(s, "dt", "sim.dt", 0.0);
        cfg.sim.tau = get_number(s, "tau", "sim.tau", 0.0);
        if (s.contains("n_traj")) {
            if (!s["n_traj"].is_number_integer())
                throw ConfigError("sim.n_traj must be an integer");
            cfg.sim.n_traj = s["n_traj"].get<int>();
        }
        if (s.contains("seed")) {
            if (!s["seed"].is_number_unsigned() && !s["seed"].is_number_integer())
                throw ConfigError("sim.seed must be an integer");
            cfg.sim.seed = s["seed"].get<std::uint64_t>();
        }
        if (s.contains("sample_stride")) {
            if (!s["sample_stride"].is_number_integer())
                throw ConfigError("sim.sample_stride must be an integer");
            cfg.sim.sample_stride = s["sample_stride"].get<int>();
        }
    }
    if (cfg.sim.dt == 0.0 && cfg.model.Gamma > 0.0) cfg.sim.dt = 1e-3 / cfg.model.Gamma;

    if (doc.contains("sweep")) {
        const json& sw = doc["sweep"];
        if (!sw.is_object()) throw ConfigError("sweep must be an object");
        reject_unknown_keys(sw, {"parameter", "values", "from", "to", "count"}, "sweep");
        SweepSpec spec;
        if (!sw.contains("parameter") || !sw["parameter"].is_string())
            throw ConfigError("sweep.parameter is required and must be a string");
        spec.parameter = sw["parameter"].get<std::string>();
        if (sw.contains("values")) {
            if (!sw["values"].is_array() || sw["values"].empty())
                throw ConfigError("sweep.values must be a non-empty array");
            for (const auto& v : sw["values"]) {
                if (!v.is_number()) throw ConfigError("sweep.values entries must be numbers");
                spec.values.push_back(v.get<double>());
            }
        } else {
            const double from = get_number(sw, "from", "sweep.from", 0.0);
            const double to = get_number(sw, "to", "sweep.to", 0.0);
            if (!sw.contains("count") || !sw["count"].is_number_integer())
                throw ConfigError("sweep.count is required with from/to and must be an integer");
            const int count = sw["count"].get<int>();
            if (count < 2) throw ConfigError("sweep.count must be >= 2");
            for (int i = 0; i < count; ++i)
                spec.values.push_back(from + (to - from) * double(i) / double(count - 1));
        }
        for (double v : spec.values)
            if (!std::isfinite(v)) throw ConfigError("sweep.values must be finite");
        // Check the axis name now so failures surface before any run starts.
        apply_sweep_value(cfg.model, spec.parameter, spec.values.front());
        cfg.sweep = std::move(spec);
    }

    // Mode-specific requirements.
    switch (cfg.mode) {
        case RunMode::Evolve:
        case RunMode::ChargingTime:
            if (!(cfg.t_max > 0.0))
                throw ConfigError("t_max must be > 0 for mode " + to_string(cfg.mode));
            break;
        case RunMode::Trajectories:
            if (!(cfg.t_max > 0.0))
                throw ConfigError("t_max must be > 0 for mode trajectories");
            try {
                cfg.sim.validate(cfg.model);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            break;
        case RunMode::Sweep:
            if (!cfg.sweep) throw ConfigError("sweep block is required for mode sweep");
            break;
        case RunMode::SteadyAnalytic:
        case RunMode::SteadyNumeric:
            break;
    }
    if (!(cfg.epsilon > 0.0) || !(cfg.epsilon < 1.0))
        throw ConfigError("epsilon must lie in (0, 1)");

    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_echo(const ExperimentConfig& cfg) {
    json m{{"omega0", cfg.model.omega0}, {"delta_B", cfg.model.delta_B},
           {"g", cfg.model.g},           {"d", cfg.model.d},
           {"Gamma", cfg.model.Gamma},   {"Omega0", cfg.model.Omega0},
           {"f", cfg.model.f},           {"eta_c", cfg.model.eta_c},
           {"eta_d", cfg.model.eta_d},   {"nbar", cfg.model.nbar}};
    json s{{"dt", cfg.sim.dt},
           {"tau", cfg.sim.tau},
           {"n_traj", cfg.sim.n_traj},
           {"seed", cfg.sim.seed},
           {"sample_stride", cfg.sim.sample_stride}};
    json doc{{"mode", to_string(cfg.mode)},
             {"model", m},
             {"sim", s},
             {"epsilon", cfg.epsilon},
             {"t_max", cfg.t_max},
             {"n_samples", cfg.n_samples},
             {"out", cfg.out},
             {"normalize", cfg.normalize},
             {"eta_split_applied", cfg.eta_split_applied}};
    if (cfg.sweep) {
        doc["sweep"] = json{{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
    }
    return doc.dump(2);
}

ModelParams apply_sweep_value(const ModelParams& base, const std::string& parameter,
                              double value) {
    ModelParams p = base;
    if (parameter == "f")
        p.f = value;
    else if (parameter == "Omega0")
        p.Omega0 = value;
    else if (parameter == "Gamma")
        p.Gamma = value;
    else if (parameter == "g")
        p.g = value;
    else if (parameter == "nbar")
        p.nbar = value;
    else if (parameter == "delta_B")
        p.delta_B = value;
    else if (parameter == "eta") {
        if (value < 0.0 || value > 1.0) throw ConfigError("sweep eta values must lie in [0, 1]");
        p.eta_c = p.eta_d = std::sqrt(value);
    } else {
        throw ConfigError("sweep.parameter: unknown axis '" + parameter + "'");
    }
    return p;
}

}  // namespace qbattery
