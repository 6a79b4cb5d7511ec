#pragma once

#include <map>
#include <string>
#include <vector>

#include "putforge/capture.hpp"
#include "putforge/code_model.hpp"
#include "putforge/generate.hpp"
#include "putforge/runner.hpp"

namespace putforge::artifacts {

// targets.json: [{id, params, file, span}], key order fixed
void write_targets_json(const fs::path& path, const CodeModel& model);
std::map<std::string, std::vector<ScalarKind>> load_target_kinds(const fs::path& path);

// tests.json: [{id, file, span, assertion_count, target_ids}]
void write_tests_json(const fs::path& path, const CodeModel& model);

// union.json: {target-id: {tuples, provenance}}; byte-stable round trip
void write_union_json(const fs::path& path, const std::map<std::string, CaptureUnion>& unions);
std::map<std::string, CaptureUnion> load_union_json(const fs::path& path);

// puts.json: generation manifest
void write_puts_json(const fs::path& path, const GenerationManifest& manifest);
GenerationManifest load_puts_json(const fs::path& path);

// verdicts.jsonl: one line per cell
void write_verdicts_jsonl(const fs::path& path, const std::vector<Verdict>& verdicts);
std::vector<Verdict> load_verdicts_jsonl(const fs::path& path);

// classification.json: per PUT {category, pass_rows, original_rows}
void write_classification_json(const fs::path& path,
                               const std::vector<Classification>& classifications);
std::vector<Classification> load_classification_json(const fs::path& path);

// report.json + report.md
void write_report(const fs::path& json_path, const fs::path& md_path, const Report& report);

}  // namespace putforge::artifacts
