#pragma once

#include <map>
#include <string>
#include <vector>

#include "putforge/capture.hpp"
#include "putforge/code_model.hpp"
#include "putforge/config.hpp"
#include "putforge/generate.hpp"
#include "putforge/instrument.hpp"
#include "putforge/runner.hpp"

namespace putforge {

/// Workspace layout. Every artifact lives under config.workspace_path().
struct StagePaths {
    fs::path workspace;
    fs::path targets_json;
    fs::path tests_json;
    fs::path instrumented_root;
    fs::path capture_test;
    fs::path capture_field;
    fs::path union_json;
    fs::path generated_root;
    fs::path puts_json;
    fs::path verdicts_jsonl;
    fs::path classification_json;
    fs::path report_json;
    fs::path report_md;
    fs::path finalized_dir;
    fs::path finalized_check_root;
};

StagePaths stage_paths(const Config& config);

/// analyze: parse the project, write targets.json and tests.json.
CodeModel cmd_analyze(const Config& config);

/// capture: instrument into the workspace, build, run the suite or workload
/// with the capture environment, producing capture.<mode>.jsonl.
CaptureRunSummary cmd_capture(const Config& config, CaptureContext mode);

struct GenerateResult {
    GenerationManifest manifest;
    std::map<std::string, CaptureUnion> unions;
    OriginalsByCutTarget originals;
    std::vector<std::string> diagnostics;  // skipped cut/target pairs etc.
};

/// generate: build unions from the capture logs (plus static originals), plan
/// alpha x beta, derive PUTs, and render them into <workspace>/generated/.
GenerateResult cmd_generate(const Config& config);

struct ClassifyResult {
    std::vector<Verdict> verdicts;
    std::vector<Classification> classifications;
    std::vector<std::string> compile_excluded_units;  // files that failed to build
    Report report;
};

/// classify: execute every cell, classify each PUT, finalize the
/// falsifiably-coupled ones (prune + merge + re-run), and write reports.
ClassifyResult cmd_classify(const Config& config);

/// report: regenerate report.{json,md} from existing artifacts.
Report cmd_report(const Config& config);

/// Per-(CUT, target) original tuples: statically-literal call sites first,
/// runtime attribution (test-context records carrying the owning CUT's id)
/// for single-site CUTs otherwise. Unresolvable pairs are skipped with a
/// diagnostic.
OriginalsByCutTarget compute_originals(const CodeModel& model,
                                       const std::vector<CaptureRecord>& test_records,
                                       std::vector<std::string>* diagnostics = nullptr);

}  // namespace putforge
