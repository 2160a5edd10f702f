#pragma once

// The five harness commands. Each reads a fully resolved config, writes its
// files under config["out"] and finishes with a manifest.

#include "config.hpp"

#include <iosfwd>

namespace kldwave::cli {

enum ExitCode : int { kExitOk = 0, kExitChecksFailed = 1, kExitConfig = 2, kExitNumerical = 3 };

/// Runs a resolved config. Errors propagate as exceptions.
int run_command(const std::string& command, const Json& config, std::ostream& log);

/// resolve_config + run_command, mapping InputError to 2 and NumericalError to 3.
int run(const Invocation& inv, std::ostream& log, std::ostream& err);

}  // namespace kldwave::cli
