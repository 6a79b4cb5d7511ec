#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace putforge {

struct CommandResult {
    int exit_code = -1;       // process exit status; -1 when not exited normally
    int signal = 0;           // terminating signal, if any
    bool timed_out = false;
    std::string output;       // combined stdout + stderr

    bool ok() const { return !timed_out && signal == 0 && exit_code == 0; }
};

/// Runs `command` through /bin/sh -c in `cwd` with additional environment
/// variables, capturing combined output. On timeout the whole process group is
/// killed. timeout of zero means no limit.
CommandResult run_command(const std::string& command, const std::filesystem::path& cwd,
                          const std::vector<std::pair<std::string, std::string>>& env = {},
                          std::chrono::milliseconds timeout = std::chrono::milliseconds{0});

/// Replaces every occurrence of `{key}` placeholders in a command template.
std::string expand_placeholders(
    std::string templ, const std::vector<std::pair<std::string, std::string>>& substitutions);

/// Quotes a string for safe interpolation into a /bin/sh command line.
std::string shell_quote(const std::string& s);

}  // namespace putforge
