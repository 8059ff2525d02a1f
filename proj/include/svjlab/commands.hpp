#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace svj {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes shared by the CLI and the C API.
enum class RunStatus : int {
    Ok = 0,
    CheckFailed = 1,
    ConfigError = 2,
    RuntimeError = 3,
};

struct RunOptions {
    std::string out_dir = ".";
    int threads = 0;            // 0 = available cores
    long long seed_override = -1;  // < 0: use the config's seed
};

// Commands: kernel-check, simulate, converge, laplace, stable-test.
// config_json is a single JSON document; outputs (CSV tables, JSON
// summaries) land in out_dir and embed a config echo, seed and version.
RunStatus run_command(const std::string& command, const std::string& config_json,
                      const RunOptions& options, std::string* error_message);

}  // namespace svj
