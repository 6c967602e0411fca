#pragma once

#include <map>
#include <string>

#include "phisig/util.hpp"

namespace phisig {

// Subcommand dispatch decoupled from argv parsing: the binary fills a
// RunConfig and calls run(), so the whole surface is drivable from tests.

enum class OutputFormat { defaulted, json, csv };

struct RunConfig {
    std::string subcommand;
    std::map<std::string, std::string> parameters; // raw option values
    OutputFormat format = OutputFormat::defaulted;
    std::string output_path; // empty = stdout
    u64 sieve_limit = 0;     // 0 = sized automatically from the request
    unsigned threads = 0;    // 0 = automatic
};

// Returns the process exit code: 0 success, 2 usage/domain errors,
// 3 resource ceilings (including arithmetic overflow), 4 internal errors.
int run(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResource = 3;
inline constexpr int kExitInternal = 4;

} // namespace phisig
