#include "putforge/pipeline.hpp"

#include <algorithm>
#include <set>

#include "putforge/artifacts.hpp"
#include "putforge/error.hpp"
#include "putforge/subprocess.hpp"

namespace putforge {

StagePaths stage_paths(const Config& config) {
    StagePaths p;
    p.workspace = config.workspace_path();
    p.targets_json = p.workspace / "targets.json";
    p.tests_json = p.workspace / "tests.json";
    p.instrumented_root = p.workspace / "instrumented";
    p.capture_test = p.workspace / "capture.test.jsonl";
    p.capture_field = p.workspace / "capture.field.jsonl";
    p.union_json = p.workspace / "union.json";
    p.generated_root = p.workspace / "generated";
    p.puts_json = p.workspace / "puts.json";
    p.verdicts_jsonl = p.workspace / "verdicts.jsonl";
    p.classification_json = p.workspace / "classification.json";
    p.report_json = p.workspace / "report.json";
    p.report_md = p.workspace / "report.md";
    p.finalized_dir = p.workspace / "finalized-puts";
    p.finalized_check_root = p.workspace / "finalized-check";
    return p;
}

CodeModel cmd_analyze(const Config& config) {
    const StagePaths paths = stage_paths(config);
    CodeModel model = analyze_project(config.project_root, config.analysis_options());
    fs::create_directories(paths.workspace);
    artifacts::write_targets_json(paths.targets_json, model);
    artifacts::write_tests_json(paths.tests_json, model);
    return model;
}

namespace {

// Re-analyzes and checks that the target set still matches targets.json, so
// later stages never operate on a silently changed project.
CodeModel load_consistent_model(const Config& config, const StagePaths& paths) {
    if (!fs::exists(paths.targets_json) || !fs::exists(paths.tests_json))
        throw MissingArtifactError("analyze has not run yet (missing targets.json/tests.json)");
    CodeModel model = analyze_project(config.project_root, config.analysis_options());
    const auto persisted = artifacts::load_target_kinds(paths.targets_json);
    std::set<std::string> current;
    for (const TargetMethod& t : model.targets) current.insert(t.id);
    std::set<std::string> stored;
    for (const auto& [id, kinds] : persisted) stored.insert(id);
    if (current != stored)
        throw Error("project changed since analyze; re-run the analyze stage");
    return model;
}

std::map<std::string, std::vector<ScalarKind>> kinds_of(const CodeModel& model) {
    std::map<std::string, std::vector<ScalarKind>> kinds;
    for (const TargetMethod& t : model.targets) {
        std::vector<ScalarKind> ks;
        for (const ParamInfo& p : t.params) ks.push_back(p.kind);
        kinds.emplace(t.id, std::move(ks));
    }
    return kinds;
}

}  // namespace

CaptureRunSummary cmd_capture(const Config& config, CaptureContext mode) {
    const StagePaths paths = stage_paths(config);
    CodeModel model = load_consistent_model(config, paths);

    const fs::path sink =
        mode == CaptureContext::Test ? paths.capture_test : paths.capture_field;
    fs::remove(sink);

    // One instrumented copy serves both modes; rebuild it fresh per capture run
    // so the copy always matches the current model.
    fs::remove_all(paths.instrumented_root);
    InstrumentationPlan plan;
    for (const TargetMethod& t : model.targets) plan.target_ids.push_back(t.id);
    plan.output_root = paths.instrumented_root;
    plan.capture_sink = sink;
    plan.session_context = mode;
    plan.max_records_per_target = config.max_records_per_target;
    instrument(config.project_root, model, plan, config.analysis_options());
    build_subject(paths.instrumented_root, config);

    std::vector<std::string> test_ids;
    for (const TestCase& t : model.tests) test_ids.push_back(t.id);
    return run_captured(paths.instrumented_root, mode, config, test_ids, sink);
}

OriginalsByCutTarget compute_originals(const CodeModel& model,
                                       const std::vector<CaptureRecord>& test_records,
                                       std::vector<std::string>* diagnostics) {
    OriginalsByCutTarget out;
    for (const TestCase& cut : model.tests) {
        std::map<std::string, std::size_t> site_counts;
        for (const TargetCallSite& s : cut.target_calls) site_counts[s.target_id]++;

        for (const TargetCallSite& site : cut.target_calls) {
            if (site.site_ordinal != 0) continue;  // the parameterized site
            const TargetMethod* target = model.find_target(site.target_id);
            if (!target) continue;
            auto static_tuple = resolve_original_arguments(site, *target);
            std::vector<CanonicalTuple> originals;
            if (static_tuple) {
                originals.push_back(std::move(*static_tuple));
            } else if (site_counts[site.target_id] == 1) {
                // runtime attribution: records from this CUT's own execution
                std::set<std::string> seen;
                for (const CaptureRecord& rec : test_records) {
                    if (rec.context != CaptureContext::Test) continue;
                    if (!rec.test_id || *rec.test_id != cut.id) continue;
                    if (rec.target_id != site.target_id) continue;
                    if (tuple_has_marker(rec.tuple)) continue;
                    if (seen.insert(tuple_key(rec.tuple)).second)
                        originals.push_back(rec.tuple);
                }
                if (originals.empty() && diagnostics) {
                    diagnostics->push_back("skipped " + cut.id + " / " + site.target_id +
                                           ": no original arguments recoverable at runtime");
                }
            } else if (diagnostics) {
                diagnostics->push_back(
                    "skipped " + cut.id + " / " + site.target_id +
                    ": non-literal arguments at a multi-site target; originals ambiguous");
            }
            if (!originals.empty()) out[cut.id][site.target_id] = std::move(originals);
        }
    }
    return out;
}

GenerateResult cmd_generate(const Config& config) {
    const StagePaths paths = stage_paths(config);
    CodeModel model = load_consistent_model(config, paths);

    const bool have_test = fs::exists(paths.capture_test);
    const bool have_field = fs::exists(paths.capture_field);
    if (!have_test && !have_field)
        throw MissingArtifactError("no capture logs found; run the capture stage first");

    const auto kinds = kinds_of(model);
    std::vector<CaptureRecord> test_records, records;
    LoadDiagnostics load_diag;
    if (have_test) {
        test_records = load_capture_log(paths.capture_test, kinds, &load_diag);
        records = test_records;
    }
    if (have_field) {
        auto field_records = load_capture_log(paths.capture_field, kinds, &load_diag);
        records.insert(records.end(), field_records.begin(), field_records.end());
    }

    GenerateResult result;
    result.originals = compute_originals(model, test_records, &result.diagnostics);
    for (const auto& msg : load_diag.rejected) result.diagnostics.push_back(msg);

    // per-target aggregate originals in deterministic source order
    std::map<std::string, std::vector<CanonicalTuple>> per_target;
    std::map<std::string, std::set<std::string>> per_target_keys;
    for (const TestCase& cut : model.tests) {
        auto it = result.originals.find(cut.id);
        if (it == result.originals.end()) continue;
        for (const TargetCallSite& site : cut.target_calls) {
            if (site.site_ordinal != 0) continue;
            auto o = it->second.find(site.target_id);
            if (o == it->second.end()) continue;
            for (const CanonicalTuple& t : o->second) {
                if (per_target_keys[site.target_id].insert(tuple_key(t)).second)
                    per_target[site.target_id].push_back(t);
            }
        }
    }

    result.unions = build_union(records, per_target);
    artifacts::write_union_json(paths.union_json, result.unions);

    fs::remove_all(paths.generated_root);
    auto copy_skip = [&](const fs::path& rel) {
        const std::string generic = rel.generic_string();
        const std::string ws = fs::path(config.workspace).generic_string();
        if (!fs::path(config.workspace).is_absolute() &&
            (generic == ws || generic.rfind(ws + "/", 0) == 0))
            return true;
        for (const auto& part : rel) {
            const std::string p = part.string();
            if (p == "generated-puts" || p == "finalized-puts" ||
                (!p.empty() && p[0] == '.'))
                return true;
        }
        return false;
    };
    copy_tree(config.project_root, paths.generated_root, copy_skip);

    result.manifest = generate_project(config.project_root, paths.generated_root, model,
                                       result.unions, result.originals, config);
    artifacts::write_puts_json(paths.puts_json, result.manifest);
    return result;
}

namespace {

// On a build failure, probes generated unit files one by one (disabling each
// in turn) to identify the offenders, excludes them, and reports the rest.
std::vector<std::string> isolate_compile_failures(const fs::path& generated_root,
                                                  GenerationManifest& manifest,
                                                  const Config& config) {
    std::vector<std::string> excluded;
    auto try_build = [&]() -> bool {
        try {
            build_subject(generated_root, config);
            return true;
        } catch (const SubjectBuildError&) {
            return false;
        }
    };
    if (try_build()) return excluded;

    auto disable = [&](const std::string& rel) {
        fs::rename(generated_root / rel, generated_root / (rel + ".disabled"));
    };
    auto enable = [&](const std::string& rel) {
        fs::rename(generated_root / (rel + ".disabled"), generated_root / rel);
    };

    std::vector<std::string> files;
    for (const UnitManifest& u : manifest.units) {
        if (!u.file.empty()) files.push_back(u.file);
    }
    // greedy: disable units until the build recovers, then re-enable each
    // disabled unit in turn to keep only the genuinely offending ones out
    std::vector<std::string> disabled;
    bool recovered = false;
    for (const std::string& f : files) {
        disable(f);
        disabled.push_back(f);
        if (try_build()) {
            recovered = true;
            break;
        }
    }
    if (!recovered)
        throw SubjectBuildError(
            "generated project fails to build even with all generated units disabled", "");
    for (const std::string& f : std::vector<std::string>(disabled)) {
        enable(f);
        if (try_build()) {
            disabled.erase(std::find(disabled.begin(), disabled.end(), f));
        } else {
            disable(f);
        }
    }
    excluded = disabled;

    // drop excluded units from the manifest so no cells run for them
    if (!excluded.empty()) {
        std::vector<UnitManifest> kept;
        for (UnitManifest& u : manifest.units) {
            if (std::find(excluded.begin(), excluded.end(), u.file) == excluded.end()) {
                kept.push_back(std::move(u));
            }
        }
        manifest.units = std::move(kept);
    }
    return excluded;
}

std::vector<Classification> classify_manifest(const GenerationManifest& manifest,
                                              const std::vector<Verdict>& verdicts) {
    std::map<std::string, std::map<std::size_t, Outcome>> by_put;
    for (const Verdict& v : verdicts) by_put[v.put_id][v.row] = v.outcome;

    std::vector<Classification> out;
    for (const UnitManifest& unit : manifest.units) {
        for (const PutManifest& put : unit.puts) {
            auto it = by_put.find(put.put_id);
            if (it == by_put.end())
                throw Error("missing verdicts for " + put.put_id);
            std::vector<Outcome> outcomes;
            for (std::size_t row = 0; row < unit.rows.size(); ++row) {
                auto cell = it->second.find(row);
                if (cell == it->second.end())
                    throw Error("missing verdict for " + put.put_id + " row " +
                                std::to_string(row));
                outcomes.push_back(cell->second);
            }
            const std::set<std::size_t> original_rows(unit.original_rows.begin(),
                                                      unit.original_rows.end());
            out.push_back(classify(put.put_id, outcomes, original_rows));
        }
    }
    return out;
}

}  // namespace

ClassifyResult cmd_classify(const Config& config) {
    const StagePaths paths = stage_paths(config);
    if (!fs::exists(paths.puts_json) || !fs::exists(paths.generated_root))
        throw MissingArtifactError("generate has not run yet (missing puts.json)");
    CodeModel model = load_consistent_model(config, paths);
    GenerationManifest manifest = artifacts::load_puts_json(paths.puts_json);

    ClassifyResult result;
    result.compile_excluded_units =
        isolate_compile_failures(paths.generated_root, manifest, config);

    CellStats cells;
    result.verdicts = execute_cells(paths.generated_root, manifest, config, &cells);
    artifacts::write_verdicts_jsonl(paths.verdicts_jsonl, result.verdicts);

    result.classifications = classify_manifest(manifest, result.verdicts);
    artifacts::write_classification_json(paths.classification_json, result.classifications);

    fs::remove_all(paths.finalized_dir);
    fs::create_directories(paths.finalized_dir);
    std::vector<FinalizedPut> finalized = finalize_puts(
        config.project_root, model, manifest, result.classifications, paths.finalized_dir);
    fs::remove_all(paths.finalized_check_root);
    verify_finalized(config.project_root, paths.finalized_dir, finalized, config,
                     paths.finalized_check_root);

    const auto unions = artifacts::load_union_json(paths.union_json);
    std::vector<CaptureRecord> test_records;
    if (fs::exists(paths.capture_test)) {
        test_records = load_capture_log(paths.capture_test, kinds_of(model));
    }
    const OriginalsByCutTarget originals = compute_originals(model, test_records);
    result.report = summarize(fs::canonical(config.project_root).filename().string(), result.classifications,
                              unions, originals, manifest, cells, model.excluded);
    result.report.finalized = std::move(finalized);
    artifacts::write_report(paths.report_json, paths.report_md, result.report);
    return result;
}

Report cmd_report(const Config& config) {
    const StagePaths paths = stage_paths(config);
    CodeModel model = load_consistent_model(config, paths);
    GenerationManifest manifest = artifacts::load_puts_json(paths.puts_json);
    const auto classifications = artifacts::load_classification_json(paths.classification_json);
    const auto verdicts = artifacts::load_verdicts_jsonl(paths.verdicts_jsonl);
    const auto unions = artifacts::load_union_json(paths.union_json);

    CellStats cells;
    cells.total = verdicts.size();
    for (const Verdict& v : verdicts) {
        if (v.outcome == Outcome::Error) ++cells.errors;
        if (v.outcome == Outcome::Timeout) ++cells.timeouts;
    }
    std::vector<CaptureRecord> test_records;
    if (fs::exists(paths.capture_test)) {
        test_records = load_capture_log(paths.capture_test, kinds_of(model));
    }
    const OriginalsByCutTarget originals = compute_originals(model, test_records);
    Report report = summarize(fs::canonical(config.project_root).filename().string(), classifications, unions,
                              originals, manifest, cells, model.excluded);
    artifacts::write_report(paths.report_json, paths.report_md, report);
    return report;
}

}  // namespace putforge
