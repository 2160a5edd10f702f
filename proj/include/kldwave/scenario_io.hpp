#pragma once

// JSON encoding of scenarios and waveforms. Complex entries are [re, im]
// pairs; matrices are arrays of rows.

#include "kldwave/isac.hpp"
#include "kldwave/random_access.hpp"
#include "kldwave/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace kldwave {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const ComplexMatrix& m);
/// Throws ConfigError on malformed input; `what` names the field in messages.
ComplexMatrix matrix_from_json(const Json& j, const std::string& what);
HermitianMatrix hermitian_from_json(const Json& j, const std::string& what);

Json to_json(const SensingScenario& s);
Json to_json(const Waveform& w);
Json to_json(const RandomAccessScenario& s);
Json to_json(const WaveformSet& xs);
Json to_json(const IsacScenario& s);

/// Parsed scenarios are validated before being returned.
SensingScenario sensing_from_json(const Json& j);
Waveform waveform_from_json(const Json& j);
RandomAccessScenario random_access_from_json(const Json& j);
WaveformSet waveform_set_from_json(const Json& j);
IsacScenario isac_from_json(const Json& j);

/// Reads and parses a JSON file; IO and syntax errors become ConfigError.
Json read_json_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace kldwave
