// Config-driven runs: a single JSON file describes one experiment; the
// runner validates it against the published schema (configs/schema.json),
// dispatches into the experiment library, and writes attributable outputs:
//   <experiment>_<hash>.csv          one row per measured quantity
//   <experiment>_<hash>.summary.json constants, details, assertion outcomes
//   <experiment>_<hash>.manifest.json config hash, code version, file list,
//                                     wall clock, grid sizes
// Re-running the same config byte-reproduces the CSV and summary files (the
// manifest records wall-clock time, so it is the one file allowed to vary).
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace caloric {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct AssertionOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunResult {
    int exit_code = 0;  // 0 pass, 1 assertion failed (outputs still written)
    std::string manifest_path;
    std::vector<std::string> outputs;  // files written, relative to out_dir
    std::vector<AssertionOutcome> assertions;
    nlohmann::json manifest;
};

struct RunOptions {
    std::string out_dir = ".";
    int threads = 1;
};

// Schema check: throws ConfigError describing every violation found; returns
// the config with optional fields filled with their documented defaults.
nlohmann::json validate_config(const nlohmann::json& config);

RunResult run_config(const nlohmann::json& config, const RunOptions& opt = {});
RunResult run_config_file(const std::string& path, const RunOptions& opt = {});

// Reads a run manifest and writes plot-ready data (two-column whitespace-
// separated, with fitted lines / envelopes where the experiment has them)
// plus a text table of the empirical constants.  Returns the files written.
std::vector<std::string> write_report(const std::string& manifest_path,
                                      const std::string& out_dir);

// Named suites: "smoke" (n = 1 heat equation only, under a minute),
// "acceptance" (the full verification matrix), "full" (smoke + acceptance).
// Unknown names throw ConfigError.  Returns the worst exit code of the runs.
int run_suite(const std::string& name, const RunOptions& opt = {});

}  // namespace caloric
