#include "kldwave/scenario_io.hpp"

#include "kldwave/errors.hpp"

#include <fstream>
#include <sstream>

namespace kldwave {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    return j.at(key);
}

template <class T>
T number(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(std::string("field '") + key + "' must be an integer");
    }
    return v.get<T>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const char* what) {
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw ConfigError(std::string("unknown key '") + k + "' in " + what);
    }
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a non-empty array of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw ConfigError(what + ": rows must be non-empty arrays");
    ComplexMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Json& row = j[r];
        if (!row.is_array() || row.size() != cols) throw ConfigError(what + ": ragged rows");
        for (std::size_t c = 0; c < cols; ++c) {
            const Json& e = row[c];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ConfigError(what + ": entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

HermitianMatrix hermitian_from_json(const Json& j, const std::string& what) {
    try {
        return HermitianMatrix(matrix_from_json(j, what));
    } catch (const ConfigError&) {
        throw;
    } catch (const InputError& e) {
        throw InputError(what + ": " + e.what());
    }
}

Json to_json(const SensingScenario& s) {
    Json j;
    j["n_tx"] = s.n_tx;
    j["n_rx"] = s.n_rx;
    j["snapshots"] = s.snapshots;
    j["power_budget"] = s.power_budget;
    j["r_target"] = matrix_to_json(s.r_target.matrix());
    j["r_clutter0"] = matrix_to_json(s.r_clutter0.matrix());
    j["r_clutter1"] = matrix_to_json(s.r_clutter1.matrix());
    j["r_noise"] = matrix_to_json(s.r_noise.matrix());
    return j;
}

Json to_json(const Waveform& w) {
    Json j;
    j["power"] = w.power();
    j["x"] = matrix_to_json(w.x);
    return j;
}

Json to_json(const RandomAccessScenario& s) {
    Json j;
    j["n_devices"] = s.n_devices;
    j["n_tx"] = s.n_tx;
    j["n_rx"] = s.n_rx;
    j["snapshots"] = s.snapshots;
    j["power_budget"] = s.power_budgets;
    j["priors"] = s.priors;
    Json r = Json::array();
    for (const HermitianMatrix& m : s.r_device) r.push_back(matrix_to_json(m.matrix()));
    j["r_device"] = std::move(r);
    j["r_noise"] = matrix_to_json(s.r_noise.matrix());
    return j;
}

Json to_json(const WaveformSet& xs) {
    Json j;
    Json arr = Json::array();
    for (const Waveform& w : xs.x) arr.push_back(matrix_to_json(w.x));
    j["x"] = std::move(arr);
    return j;
}

Json to_json(const IsacScenario& s) {
    Json j;
    j["sensing"] = to_json(s.sensing);
    j["h_c"] = matrix_to_json(s.h_c);
    j["r_nc"] = matrix_to_json(s.r_nc.matrix());
    j["rho"] = s.rho;
    return j;
}

SensingScenario sensing_from_json(const Json& j) {
    reject_unknown(j, {"n_tx", "n_rx", "snapshots", "power_budget", "r_target", "r_clutter0", "r_clutter1", "r_noise"},
                   "scenario");
    SensingScenario s;
    s.n_tx = number<int>(j, "n_tx");
    s.n_rx = number<int>(j, "n_rx");
    s.snapshots = number<int>(j, "snapshots");
    s.power_budget = number<double>(j, "power_budget");
    s.r_target = hermitian_from_json(field(j, "r_target"), "r_target");
    s.r_clutter0 = hermitian_from_json(field(j, "r_clutter0"), "r_clutter0");
    s.r_clutter1 = hermitian_from_json(field(j, "r_clutter1"), "r_clutter1");
    s.r_noise = hermitian_from_json(field(j, "r_noise"), "r_noise");
    validate(s);
    return s;
}

Waveform waveform_from_json(const Json& j) {
    reject_unknown(j, {"x", "power"}, "waveform");
    return Waveform{matrix_from_json(field(j, "x"), "x")};
}

RandomAccessScenario random_access_from_json(const Json& j) {
    reject_unknown(j, {"n_devices", "n_tx", "n_rx", "snapshots", "power_budget", "priors", "r_device", "r_noise"},
                   "random-access scenario");
    RandomAccessScenario s;
    s.n_devices = number<int>(j, "n_devices");
    s.n_tx = number<int>(j, "n_tx");
    s.n_rx = number<int>(j, "n_rx");
    s.snapshots = number<int>(j, "snapshots");
    if (s.n_devices < 1) throw ConfigError("n_devices must be >= 1");
    const Json& p = field(j, "power_budget");
    if (p.is_number()) {
        s.power_budgets.assign(s.n_devices, p.get<double>());
    } else if (p.is_array()) {
        for (const Json& v : p) {
            if (!v.is_number()) throw ConfigError("power_budget entries must be numbers");
            s.power_budgets.push_back(v.get<double>());
        }
    } else {
        throw ConfigError("power_budget must be a number or a list");
    }
    const Json& pri = field(j, "priors");
    if (!pri.is_array()) throw ConfigError("priors must be a list");
    for (const Json& v : pri) {
        if (!v.is_number()) throw ConfigError("priors must be numbers");
        s.priors.push_back(v.get<double>());
    }
    const Json& r = field(j, "r_device");
    if (!r.is_array()) throw ConfigError("r_device must be a list of matrices");
    for (std::size_t i = 0; i < r.size(); ++i) {
        s.r_device.push_back(hermitian_from_json(r[i], "r_device[" + std::to_string(i) + "]"));
    }
    s.r_noise = hermitian_from_json(field(j, "r_noise"), "r_noise");
    validate(s);
    return s;
}

WaveformSet waveform_set_from_json(const Json& j) {
    reject_unknown(j, {"x"}, "waveform set");
    const Json& arr = field(j, "x");
    if (!arr.is_array()) throw ConfigError("x must be a list of matrices");
    WaveformSet xs;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        xs.x.push_back(Waveform{matrix_from_json(arr[i], "x[" + std::to_string(i) + "]")});
    }
    return xs;
}

IsacScenario isac_from_json(const Json& j) {
    reject_unknown(j, {"sensing", "h_c", "r_nc", "rho"}, "ISAC scenario");
    IsacScenario s;
    s.sensing = sensing_from_json(field(j, "sensing"));
    s.h_c = matrix_from_json(field(j, "h_c"), "h_c");
    s.r_nc = hermitian_from_json(field(j, "r_nc"), "r_nc");
    s.rho = number<double>(j, "rho");
    validate(s);
    return s;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace kldwave
