#pragma once

#include <string>
#include <vector>

#include "putforge/fs_util.hpp"
#include "putforge/runner.hpp"

namespace putforge {

struct FixtureVerifyResult {
    bool passed = false;
    std::vector<std::string> diffs;  // one line per mismatch
    Report report;
};

/// Copies the fixture into <scratch>/project, runs the full pipeline (analyze,
/// capture test + field, generate, classify), and diffs every produced
/// artifact against the fixture's committed ground-truth.json.
FixtureVerifyResult verify_fixture(const fs::path& fixture_src, const fs::path& scratch);

}  // namespace putforge
