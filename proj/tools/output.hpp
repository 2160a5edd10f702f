#pragma once

// Output directory of one run: CSV/JSON writers and the run manifest with
// SHA-256 digests of every file written.

#include "kldwave/scenario_io.hpp"

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kldwave::cli {

std::string sha256_hex(std::string_view data);

/// Shortest round-trip decimal, independent of the locale.
std::string csv_number(double x);

/// CSV table with a header row. Timing columns are blanked in the
/// reproducible digest, since wall-clock values differ between runs.
class CsvTable {
public:
    CsvTable(std::vector<std::string> columns, std::vector<std::string> timing_columns = {});
    void add_row(const std::vector<std::string>& cells);
    std::string text() const;
    std::string reproducible_text() const;

private:
    std::vector<std::string> columns_;
    std::vector<bool> timing_;
    std::vector<std::vector<std::string>> rows_;
};

class RunOutput {
public:
    RunOutput(std::filesystem::path dir, std::string command, Json config);
    const std::filesystem::path& dir() const { return dir_; }

    void write_csv(const std::string& name, const CsvTable& table);
    void write_json(const std::string& name, const Json& j);
    /// Extra result fields recorded in the manifest.
    Json& result() { return result_; }

    /// Writes manifest.json (atomically) listing every file written so far.
    void finish();

private:
    void record(const std::string& name, const std::string& content, const std::string& reproducible);

    std::filesystem::path dir_;
    std::string command_;
    Json config_;
    Json files_ = Json::array();
    Json result_ = Json::object();
    std::chrono::system_clock::time_point started_;
    std::chrono::steady_clock::time_point started_mono_;
};

}  // namespace kldwave::cli
