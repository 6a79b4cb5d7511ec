#pragma once

#include <string>
#include <vector>

#include "putforge/capture.hpp"
#include "putforge/code_model.hpp"
#include "putforge/config.hpp"
#include "putforge/fs_util.hpp"

namespace putforge {

struct InstrumentationPlan {
    std::vector<std::string> target_ids;
    fs::path output_root;
    fs::path capture_sink;  // absolute path the emitters append to
    CaptureContext session_context = CaptureContext::Test;
    long max_records_per_target = 100000;  // guards pathological loops
};

struct InsertedSpan {
    std::string file;    // relative path within the copy
    std::size_t offset;  // byte offset of the inserted emitter
    std::size_t length;
};

struct InstrumentationResult {
    std::vector<InsertedSpan> inserted;
    std::size_t files_rewritten = 0;
};

/// Copies project_root to plan.output_root (which must not exist) and prefixes
/// every planned target's body with a self-contained emitter statement. The
/// emitter needs no headers or link-time support: it binds libc symbols via
/// asm labels and shares one process-wide sequence counter through a common
/// symbol. Nothing else in the copy changes; removing each inserted span
/// restores the original bytes.
InstrumentationResult instrument(const fs::path& project_root, const CodeModel& model,
                                 const InstrumentationPlan& plan,
                                 const AnalysisOptions& options);

/// The single-statement emitter for one target (exposed for tests). The
/// per-target record cap is compiled into the statement.
std::string emitter_statement(const TargetMethod& target, long max_records = 100000);

/// Runs the subject build command in `root`. Throws SubjectBuildError with the
/// build log on failure. No-op when the command is empty.
void build_subject(const fs::path& root, const Config& config);

struct TestRunResult {
    std::string test_id;
    bool passed = false;
    int exit_code = 0;
};

struct CaptureRunSummary {
    CaptureContext mode = CaptureContext::Test;
    std::vector<TestRunResult> test_results;  // test mode with {test} only
    std::vector<std::string> failing_tests;
    bool command_failed = false;  // any nonzero exit
    std::vector<std::string> warnings;
    std::size_t records_appended = 0;
};

/// Runs the suite (mode test) or the workload (mode field) inside `root` with
/// the capture environment set. In test mode, a "{test}" placeholder in the
/// test command switches to one-process-per-test execution, which also injects
/// PUTFORGE_TEST_ID for attribution. Nonzero exits are warnings; the log is
/// kept either way.
CaptureRunSummary run_captured(const fs::path& root, CaptureContext mode, const Config& config,
                               const std::vector<std::string>& test_ids, const fs::path& sink);

/// Runs the plain test suite (no capture environment) and returns per-test
/// verdicts; used for instrumentation-preservation checks.
std::vector<TestRunResult> run_test_suite(const fs::path& root, const Config& config,
                                          const std::vector<std::string>& test_ids);

}  // namespace putforge
