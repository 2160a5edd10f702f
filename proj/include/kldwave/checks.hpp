#pragma once

// Named end-to-end checks of solver properties and experiment outcomes. Used
// by the acceptance test binary and by `kldwave validate`.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace kldwave::checks {

struct CheckContext {
    std::uint64_t seed = 0;
    int threads = 1;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Check {
    std::string name;
    std::string summary;
    std::function<CheckResult(const CheckContext&)> run;
};

const std::vector<Check>& all_checks();

/// Runs the checks whose name is in `only` (all when empty); unknown names throw ConfigError.
std::vector<CheckResult> run_checks(const CheckContext& ctx, const std::vector<std::string>& only = {});

/// "PASS name (1.2 s): detail" / "FAIL ...".
std::string format(const CheckResult& r);

}  // namespace kldwave::checks
