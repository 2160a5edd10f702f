#pragma once

// Run configuration: per-command JSON defaults, file overrides and
// dotted-path --set assignments. Every key a run may use exists in the
// defaults, so unknown keys are rejected at merge time.

#include "kldwave/scenario_io.hpp"
#include "kldwave/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kldwave::cli {

inline constexpr std::string_view kCommands[] = {"optimize", "benchmark", "pareto", "random-access", "validate"};

/// Throws ConfigError for an unknown command.
Json default_config(std::string_view command);

/// Recursively copies `overrides` into `base`. Keys missing from `base` and
/// type changes throw ConfigError naming the dotted path. Arrays are replaced.
void merge_config(Json& base, const Json& overrides, const std::string& path = "");

/// Applies "a.b.c=value"; the value is read as JSON and otherwise as a string.
void apply_set(Json& config, std::string_view assignment);

struct Invocation {
    std::string command;
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallel;
    std::vector<std::string> sets;
};

/// Defaults, then the config file (a run manifest is accepted and its
/// resolved config reused), then --set, then the dedicated flags.
Json resolve_config(const Invocation& inv);

// Typed accessors; domain violations throw ConfigError naming the key.
double get_number(const Json& j, const std::string& key);
int get_int(const Json& j, const std::string& key, int min_value);
bool get_bool(const Json& j, const std::string& key);
std::string get_string(const Json& j, const std::string& key);
std::vector<double> get_numbers(const Json& j, const std::string& key);

GeneratorConfig generator_from(const Json& j);
SolverOptions solver_from(const Json& j, std::uint64_t seed);

}  // namespace kldwave::cli
