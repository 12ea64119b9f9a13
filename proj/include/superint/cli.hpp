#pragma once

// Run configuration and dispatch for the command-line driver. A run writes
// report.json (deterministic), manifest.json and command-specific CSV files.

#include "superint/systems.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace superint {

/// Invalid configuration; maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::string command;
    std::optional<SystemSpec> system;
    std::uint64_t seed = 42;
    std::optional<double> tol;  // check tolerance; each command has its own default
    std::string out = "out";
    nlohmann::json options = nlohmann::json::object();

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

const std::vector<std::string>& commands();

struct RunResult {
    int exit_code = 0;  // 0 pass, 1 check failure
    nlohmann::json report;
};

/// Executes one command and writes its artifacts under cfg.out.
/// Throws UsageError for configurations the command cannot accept.
RunResult run(const RunConfig& cfg);

}  // namespace superint
