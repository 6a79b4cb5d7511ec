#pragma once

#include <string>
#include <vector>

#include "putforge/code_model.hpp"
#include "putforge/fs_util.hpp"

namespace putforge {

/// A registered subject-test-framework adapter. The adapter fixes how tests
/// are recognized, which assertion names count as oracles, and the rendering
/// style of generated parameterized tests.
struct AdapterInfo {
    std::string id;
    std::vector<std::string> test_macros;
    std::vector<std::string> assertion_macros;
};

const AdapterInfo& adapter_info(const std::string& id);  // throws ConfigError if unknown

struct Config {
    fs::path project_root;
    std::string workspace = "putforge-out";  // resolved against project_root
    std::string adapter = "doctest";

    // Subject commands, run through /bin/sh in the tree being operated on.
    std::string build_command;     // optional; builds the subject tree
    std::string test_command;      // runs the suite; "{test}" -> one test, with attribution
    std::string workload_command;  // optional; field workload
    std::string put_command;       // runs one generated cell; "{put}" and "{row}"

    std::vector<std::string> assertion_allow_list;  // empty -> adapter default
    long provider_row_cap = 10000;
    long max_records_per_target = 100000;
    double per_row_timeout_s = 30.0;
    int retries = 0;
    std::vector<std::string> exclude_paths;
    bool per_site_variants = false;
    int parallel_puts = 0;  // 0/1 = sequential

    fs::path workspace_path() const;
    AnalysisOptions analysis_options() const;
    std::vector<std::string> assertions() const;  // allow-list with default applied
};

/// Loads <project_root>/putforge.toml (flat key = value subset: strings,
/// numbers, booleans, string arrays) and validates. Missing file yields
/// defaults; unknown keys and malformed values are ConfigErrors.
Config load_config(const fs::path& project_root);

void validate_config(const Config& config);  // throws ConfigError

}  // namespace putforge
