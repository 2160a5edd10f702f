#include "output.hpp"

#include "kldwave/errors.hpp"
#include "kldwave/rng.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <ctime>
#include <system_error>

namespace kldwave::cli {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 15];
    }
    return out;
}

std::string csv_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> columns, std::vector<std::string> timing_columns)
    : columns_(std::move(columns)), timing_(columns_.size(), false) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        for (const auto& t : timing_columns) timing_[i] = timing_[i] || columns_[i] == t;
    }
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw Error("CSV row width does not match the header");
    rows_.push_back(cells);
}

namespace {

std::string join(const std::vector<std::string>& cells, const std::vector<bool>* blank) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        if (!blank || !(*blank)[i]) line += cells[i];
    }
    return line + '\n';
}

std::string utc_now(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string CsvTable::text() const {
    std::string s = join(columns_, nullptr);
    for (const auto& r : rows_) s += join(r, nullptr);
    return s;
}

std::string CsvTable::reproducible_text() const {
    std::string s = join(columns_, nullptr);
    for (const auto& r : rows_) s += join(r, &timing_);
    return s;
}

RunOutput::RunOutput(std::filesystem::path dir, std::string command, Json config)
    : dir_(std::move(dir)),
      command_(std::move(command)),
      config_(std::move(config)),
      started_(std::chrono::system_clock::now()),
      started_mono_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void RunOutput::record(const std::string& name, const std::string& content, const std::string& reproducible) {
    write_file_atomic(dir_ / name, content);
    files_.push_back(Json{{"name", name},
                          {"bytes", content.size()},
                          {"sha256", sha256_hex(content)},
                          {"reproducible_sha256", sha256_hex(reproducible)}});
}

void RunOutput::write_csv(const std::string& name, const CsvTable& table) {
    record(name, table.text(), table.reproducible_text());
}

void RunOutput::write_json(const std::string& name, const Json& j) {
    const std::string s = j.dump(2) + '\n';
    record(name, s, s);
}

void RunOutput::finish() {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_mono_).count();
    Json m{{"version", KLDWAVE_VERSION},
           {"command", command_},
           {"config", config_},
           {"seed", config_["seed"]},
           {"rng", SeededRng::kAlgorithm},
           {"started_utc", utc_now(started_)},
           {"wall_seconds", wall},
           {"files", files_},
           {"result", result_}};
    write_file_atomic(dir_ / "manifest.json", m.dump(2) + '\n');
}

}  // namespace kldwave::cli
