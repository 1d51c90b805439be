#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace depmig {

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;

    bool ok() const noexcept { return exit_code == 0; }
};

struct ProcessOptions {
    std::filesystem::path cwd;
    std::string input;
    /// Added to (or overriding) the inherited environment.
    std::vector<std::pair<std::string, std::string>> env;
};

/// Runs argv[0] (looked up on PATH unless it contains a slash) to completion, capturing stdout and stderr.
/// Throws Error when the executable cannot be found or started.
ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options = {});

} // namespace depmig
