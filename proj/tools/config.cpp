#include "config.hpp"

#include "kldwave/accel.hpp"
#include "kldwave/errors.hpp"

#include <algorithm>
#include <cmath>

namespace kldwave::cli {

namespace {

Json generator_defaults() {
    const GeneratorConfig g;
    return Json{{"n_tx", g.n_tx},
                {"n_rx", g.n_rx},
                {"snapshots", g.snapshots},
                {"power_budget", g.power_budget},
                {"snr_db", g.snr_db},
                {"rho_target", g.rho_target},
                {"clutter_ratio0", g.clutter_ratio0},
                {"clutter_ratio1", g.clutter_ratio1},
                {"clutter_rho_max", g.clutter_rho_max},
                {"same_clutter", g.same_clutter}};
}

Json solver_defaults() {
    const SolverOptions s;
    return Json{{"epsilon", s.epsilon},       {"max_iters", s.max_iters}, {"delta", s.delta},
                {"delta_rel", s.delta_rel},   {"mu_tol", s.mu_tol},       {"power_iter_k", s.power_iter_k},
                {"power_iter_tol", s.power_iter_tol}, {"max_backtracks", kDefaultMaxBacktracks}};
}

Json detection_defaults() { return Json{{"alpha", 1e-3}, {"n_cal", 200000}, {"n_mc", 10000}}; }

Json size(int n_tx, int n_rx, int t) { return Json{{"n_tx", n_tx}, {"n_rx", n_rx}, {"snapshots", t}}; }

const Json& at(const Json& j, const std::string& key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError("missing config key '" + key + "'");
    return *it;
}

bool same_kind(const Json& a, const Json& b) {
    if (a.is_number_float()) return b.is_number();
    if (a.is_number()) return b.is_number_integer() || b.is_number_unsigned();
    return a.type() == b.type();
}

}  // namespace

Json default_config(std::string_view command) {
    Json c{{"seed", 0}, {"out", "out"}, {"parallel", 1}};
    if (command == "optimize") {
        c["algorithm"] = "amm";
        c["scenario_file"] = "";
        c["init"] = "random";
        c["init_file"] = "";
        c["generator"] = generator_defaults();
        c["solver"] = solver_defaults();
    } else if (command == "benchmark") {
        c["algorithms"] = Json::array({"fp", "mm", "amm"});
        c["sizes"] = Json::array({size(8, 8, 16), size(16, 16, 32)});
        // Adds the full-scale 32 x 32, T = 50 problem.
        c["paper_scale"] = false;
        c["repetitions"] = 3;
        c["generator"] = generator_defaults();
        c["solver"] = solver_defaults();
    } else if (command == "pareto") {
        c["isac_file"] = "";
        c["generator"] = generator_defaults();
        // Low sensing SNR keeps the detection probability away from 1 across the sweep.
        c["generator"]["snr_db"] = -5.0;
        c["comm"] = Json{{"n_c", 4}, {"snr_db", 10.0}};
        c["rho_grid"] = Json::array();
        c["rho_points"] = 11;
        c["variant"] = "mm";
        c["accelerate"] = true;
        c["warm_start"] = true;
        c["solver"] = solver_defaults();
        c["detection"] = detection_defaults();
    } else if (command == "random-access") {
        const RaGeneratorConfig g;
        c["scenario_file"] = "";
        c["generator"] = Json{{"n_devices", g.n_devices}, {"n_tx", g.n_tx},     {"n_rx", g.n_rx},
                              {"snapshots", g.snapshots}, {"power_budget", g.power_budget},
                              {"snr_db", g.snr_db},       {"prior", g.prior}, {"rho_max", g.rho_max}};
        c["snr_grid"] = Json::array({8.0});
        c["t_grid"] = Json::array({4, 8, 12});
        c["accelerate"] = true;
        c["genie"] = false;
        c["solver"] = solver_defaults();
        c["detection"] = detection_defaults();
    } else if (command == "validate") {
        c["scenario_file"] = "";
        c["run_checks"] = true;
        c["checks"] = Json::array();
    } else {
        throw ConfigError("unknown command '" + std::string(command) + "'");
    }
    return c;
}

void merge_config(Json& base, const Json& overrides, const std::string& path) {
    if (!overrides.is_object()) throw ConfigError("config" + (path.empty() ? "" : " '" + path + "'") + " must be an object");
    for (const auto& [key, value] : overrides.items()) {
        const std::string full = path.empty() ? key : path + "." + key;
        const auto it = base.find(key);
        if (it == base.end()) throw ConfigError("unknown config key '" + full + "'");
        if (!same_kind(*it, value)) {
            throw ConfigError("config key '" + full + "' expects " + std::string(it->type_name()) + ", got " +
                              value.type_name());
        }
        if (it->is_object()) {
            merge_config(*it, value, full);
        } else if (it->is_number_float()) {
            *it = value.get<double>();
        } else {
            *it = value;
        }
    }
}

void apply_set(Json& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    // Build the nested override {"a": {"b": value}} and merge it.
    Json patch = value;
    std::string rest = key;
    for (auto dot = rest.rfind('.'); dot != std::string::npos; dot = rest.rfind('.')) {
        patch = Json{{rest.substr(dot + 1), patch}};
        rest.resize(dot);
    }
    merge_config(config, Json{{rest, patch}});
}

Json resolve_config(const Invocation& inv) {
    Json c = default_config(inv.command);
    if (!inv.config_path.empty()) {
        Json file = read_json_file(inv.config_path);
        if (file.is_object() && file.contains("command") && file.contains("config")) {
            if (file["command"] != inv.command) {
                throw ConfigError("manifest was written by '" + file["command"].get<std::string>() + "'");
            }
            file = file["config"];
        }
        merge_config(c, file);
    }
    for (const std::string& s : inv.sets) apply_set(c, s);
    if (inv.out) c["out"] = *inv.out;
    if (inv.seed) c["seed"] = *inv.seed;
    if (inv.parallel) c["parallel"] = *inv.parallel;
    get_int(c, "parallel", 1);
    if (get_string(c, "out").empty()) throw ConfigError("out must not be empty");
    return c;
}

double get_number(const Json& j, const std::string& key) {
    const Json& v = at(j, key);
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("config key '" + key + "' must be finite");
    return x;
}

int get_int(const Json& j, const std::string& key, int min_value) {
    const Json& v = at(j, key);
    if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
    const auto x = v.get<long long>();
    if (x < min_value || x > 1'000'000'000) {
        throw ConfigError("config key '" + key + "' must be at least " + std::to_string(min_value));
    }
    return static_cast<int>(x);
}

bool get_bool(const Json& j, const std::string& key) {
    const Json& v = at(j, key);
    if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be true or false");
    return v.get<bool>();
}

std::string get_string(const Json& j, const std::string& key) {
    const Json& v = at(j, key);
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> get_numbers(const Json& j, const std::string& key) {
    const Json& v = at(j, key);
    if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
    std::vector<double> out;
    for (const Json& e : v) {
        if (!e.is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

GeneratorConfig generator_from(const Json& j) {
    GeneratorConfig g;
    g.n_tx = get_int(j, "n_tx", 1);
    g.n_rx = get_int(j, "n_rx", 1);
    g.snapshots = get_int(j, "snapshots", 1);
    g.power_budget = get_number(j, "power_budget");
    g.snr_db = get_number(j, "snr_db");
    g.rho_target = get_number(j, "rho_target");
    g.clutter_ratio0 = get_number(j, "clutter_ratio0");
    g.clutter_ratio1 = get_number(j, "clutter_ratio1");
    g.clutter_rho_max = get_number(j, "clutter_rho_max");
    g.same_clutter = get_bool(j, "same_clutter");
    return g;
}

SolverOptions solver_from(const Json& j, std::uint64_t seed) {
    SolverOptions s;
    s.epsilon = get_number(j, "epsilon");
    s.max_iters = get_int(j, "max_iters", 1);
    s.delta = get_number(j, "delta");
    s.delta_rel = get_number(j, "delta_rel");
    s.mu_tol = get_number(j, "mu_tol");
    s.power_iter_k = get_int(j, "power_iter_k", 1);
    s.power_iter_tol = get_number(j, "power_iter_tol");
    s.seed = seed;
    if (!(s.epsilon > 0.0)) throw ConfigError("solver.epsilon must be positive");
    if (s.delta_rel < 0.0 || !(s.mu_tol > 0.0)) throw ConfigError("solver.delta_rel and solver.mu_tol must be positive");
    get_int(j, "max_backtracks", 0);
    return s;
}

}  // namespace kldwave::cli
