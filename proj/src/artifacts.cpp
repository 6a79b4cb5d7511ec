#include "putforge/artifacts.hpp"

#include <fstream>

#include "json.hpp"
#include "putforge/error.hpp"

namespace putforge::artifacts {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json parse_file(const fs::path& path) {
    if (!fs::exists(path)) throw MissingArtifactError("missing artifact: " + path.string());
    ordered_json j = ordered_json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error("malformed JSON artifact: " + path.string());
    return j;
}

void dump_to(const fs::path& path, const ordered_json& j) {
    write_file(path, j.dump(2) + "\n");
}

ordered_json provenance_to_json(const ProvenanceFlags& f) {
    ordered_json a = ordered_json::array();
    if (f.test) a.push_back("test");
    if (f.field) a.push_back("field");
    if (f.original) a.push_back("original");
    return a;
}

}  // namespace

void write_targets_json(const fs::path& path, const CodeModel& model) {
    ordered_json out = ordered_json::array();
    for (const TargetMethod& t : model.targets) {
        ordered_json entry;
        entry["id"] = t.id;
        ordered_json params = ordered_json::array();
        for (const ParamInfo& p : t.params) params.push_back(p.kind.tag());
        entry["params"] = params;
        entry["file"] = t.file;
        entry["span"] = {t.span_begin, t.span_end};
        out.push_back(std::move(entry));
    }
    dump_to(path, out);
}

std::map<std::string, std::vector<ScalarKind>> load_target_kinds(const fs::path& path) {
    const ordered_json j = parse_file(path);
    std::map<std::string, std::vector<ScalarKind>> out;
    for (const auto& entry : j) {
        std::vector<ScalarKind> kinds;
        for (const auto& tag : entry.at("params")) {
            auto kind = ScalarKind::from_tag(tag.get<std::string>());
            if (!kind) throw Error("unknown kind tag in " + path.string());
            kinds.push_back(*kind);
        }
        out.emplace(entry.at("id").get<std::string>(), std::move(kinds));
    }
    return out;
}

void write_tests_json(const fs::path& path, const CodeModel& model) {
    ordered_json out = ordered_json::array();
    for (const TestCase& t : model.tests) {
        ordered_json entry;
        entry["id"] = t.id;
        entry["file"] = t.file;
        entry["span"] = {t.span_begin, t.span_end};
        entry["assertion_count"] = t.assertions.size();
        ordered_json ids = ordered_json::array();
        std::vector<std::string> seen;
        for (const TargetCallSite& s : t.target_calls) {
            if (std::find(seen.begin(), seen.end(), s.target_id) != seen.end()) continue;
            seen.push_back(s.target_id);
            ids.push_back(s.target_id);
        }
        entry["target_ids"] = ids;
        out.push_back(std::move(entry));
    }
    dump_to(path, out);
}

void write_union_json(const fs::path& path, const std::map<std::string, CaptureUnion>& unions) {
    ordered_json out = ordered_json::object();
    for (const auto& [target_id, u] : unions) {
        ordered_json entry;
        ordered_json tuples = ordered_json::array();
        ordered_json provenance = ordered_json::array();
        for (std::size_t i = 0; i < u.tuples.size(); ++i) {
            tuples.push_back(u.tuples[i]);
            provenance.push_back(provenance_to_json(u.provenance[i]));
        }
        entry["tuples"] = std::move(tuples);
        entry["provenance"] = std::move(provenance);
        out[target_id] = std::move(entry);
    }
    dump_to(path, out);
}

std::map<std::string, CaptureUnion> load_union_json(const fs::path& path) {
    const ordered_json j = parse_file(path);
    std::map<std::string, CaptureUnion> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        CaptureUnion u;
        u.target_id = it.key();
        for (const auto& tuple : it.value().at("tuples")) {
            u.tuples.push_back(tuple.get<CanonicalTuple>());
        }
        for (const auto& flags : it.value().at("provenance")) {
            ProvenanceFlags f;
            for (const auto& flag : flags) {
                const std::string s = flag.get<std::string>();
                if (s == "test") f.test = true;
                else if (s == "field") f.field = true;
                else if (s == "original") f.original = true;
            }
            u.provenance.push_back(f);
        }
        // originals occupy the tuple prefix, so the flag count is the length
        for (const ProvenanceFlags& f : u.provenance) {
            if (f.original) ++u.original_count;
        }
        out.emplace(u.target_id, std::move(u));
    }
    return out;
}

void write_puts_json(const fs::path& path, const GenerationManifest& manifest) {
    ordered_json out;
    ordered_json puts = ordered_json::array();
    ordered_json units = ordered_json::array();
    for (const UnitManifest& unit : manifest.units) {
        for (const PutManifest& put : unit.puts) {
            ordered_json p;
            p["put"] = put.put_id;
            p["cut"] = unit.cut_id;
            p["target"] = unit.target_id;
            p["assertion_index"] = put.assertion_index;
            p["provider_size"] = unit.rows.size();
            p["file"] = unit.file;
            p["test_name"] = put.test_name;
            puts.push_back(std::move(p));
        }
        ordered_json u;
        u["cut"] = unit.cut_id;
        u["target"] = unit.target_id;
        u["site_ordinal"] = unit.site_ordinal;
        u["file"] = unit.file;
        ordered_json unit_puts = ordered_json::array();
        for (const PutManifest& put : unit.puts) {
            unit_puts.push_back({{"put", put.put_id},
                                 {"test_name", put.test_name},
                                 {"assertion_index", put.assertion_index}});
        }
        u["puts"] = std::move(unit_puts);
        ordered_json excluded = ordered_json::array();
        for (const auto& [id, reason] : unit.excluded) {
            excluded.push_back({{"put", id}, {"reason", reason}});
        }
        u["excluded"] = std::move(excluded);
        u["rows"] = unit.rows;
        u["original_rows"] = unit.original_rows;
        u["row_labels"] = unit.row_labels;
        u["trimmed"] = unit.trimmed;
        units.push_back(std::move(u));
    }
    ordered_json plans = ordered_json::array();
    for (const PutGenerationPlan& plan : manifest.plans) {
        plans.push_back({{"cut", plan.cut_id},
                         {"alpha", plan.alpha},
                         {"beta", plan.beta},
                         {"expected_put_count", plan.expected_put_count},
                         {"qualifying_targets", plan.qualifying_targets}});
    }
    out["puts"] = std::move(puts);
    out["units"] = std::move(units);
    out["plans"] = std::move(plans);
    dump_to(path, out);
}

GenerationManifest load_puts_json(const fs::path& path) {
    const ordered_json j = parse_file(path);
    GenerationManifest manifest;
    for (const auto& u : j.at("units")) {
        UnitManifest unit;
        unit.cut_id = u.at("cut").get<std::string>();
        unit.target_id = u.at("target").get<std::string>();
        unit.site_ordinal = u.at("site_ordinal").get<std::size_t>();
        unit.file = u.at("file").get<std::string>();
        for (const auto& p : u.at("puts")) {
            unit.puts.push_back({p.at("put").get<std::string>(),
                                 p.at("test_name").get<std::string>(),
                                 p.at("assertion_index").get<std::size_t>()});
        }
        for (const auto& e : u.at("excluded")) {
            unit.excluded.push_back(
                {e.at("put").get<std::string>(), e.at("reason").get<std::string>()});
        }
        for (const auto& row : u.at("rows")) unit.rows.push_back(row.get<CanonicalTuple>());
        unit.original_rows = u.at("original_rows").get<std::vector<std::size_t>>();
        unit.row_labels = u.at("row_labels").get<std::vector<std::string>>();
        unit.trimmed = u.at("trimmed").get<std::size_t>();
        manifest.units.push_back(std::move(unit));
    }
    for (const auto& p : j.at("plans")) {
        PutGenerationPlan plan;
        plan.cut_id = p.at("cut").get<std::string>();
        plan.alpha = p.at("alpha").get<std::size_t>();
        plan.beta = p.at("beta").get<std::size_t>();
        plan.expected_put_count = p.at("expected_put_count").get<std::size_t>();
        plan.qualifying_targets = p.at("qualifying_targets").get<std::vector<std::string>>();
        manifest.plans.push_back(std::move(plan));
    }
    return manifest;
}

void write_verdicts_jsonl(const fs::path& path, const std::vector<Verdict>& verdicts) {
    std::string out;
    for (const Verdict& v : verdicts) {
        ordered_json j;
        j["put"] = v.put_id;
        j["row"] = v.row;
        j["o"] = outcome_name(v.outcome);
        out += j.dump();
        out += '\n';
    }
    write_file(path, out);
}

std::vector<Verdict> load_verdicts_jsonl(const fs::path& path) {
    if (!fs::exists(path)) throw MissingArtifactError("missing artifact: " + path.string());
    std::ifstream in(path);
    std::vector<Verdict> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const ordered_json j = ordered_json::parse(line);
        out.push_back({j.at("put").get<std::string>(), j.at("row").get<std::size_t>(),
                       outcome_from_name(j.at("o").get<std::string>())});
    }
    return out;
}

void write_classification_json(const fs::path& path,
                               const std::vector<Classification>& classifications) {
    ordered_json out = ordered_json::object();
    for (const Classification& c : classifications) {
        ordered_json entry;
        entry["category"] = category_name(c.category);
        entry["pass_rows"] = std::vector<std::size_t>(c.pass_rows.begin(), c.pass_rows.end());
        entry["original_rows"] =
            std::vector<std::size_t>(c.original_rows.begin(), c.original_rows.end());
        entry["had_error_cells"] = c.had_error_cells;
        out[c.put_id] = std::move(entry);
    }
    dump_to(path, out);
}

std::vector<Classification> load_classification_json(const fs::path& path) {
    const ordered_json j = parse_file(path);
    std::vector<Classification> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        Classification c;
        c.put_id = it.key();
        const std::string cat = it.value().at("category").get<std::string>();
        if (cat == "strongly-coupled") c.category = Category::StronglyCoupled;
        else if (cat == "decoupled") c.category = Category::Decoupled;
        else if (cat == "falsifiably-coupled") c.category = Category::FalsifiablyCoupled;
        else c.category = Category::IllFormed;
        for (const auto& r : it.value().at("pass_rows")) c.pass_rows.insert(r.get<std::size_t>());
        for (const auto& r : it.value().at("original_rows"))
            c.original_rows.insert(r.get<std::size_t>());
        c.had_error_cells = it.value().at("had_error_cells").get<bool>();
        out.push_back(std::move(c));
    }
    return out;
}

void write_report(const fs::path& json_path, const fs::path& md_path, const Report& report) {
    ordered_json j;
    j["project"] = report.project;
    ordered_json puts;
    puts["executed"] = report.puts_executed;
    puts["ill_formed"] = report.ill_formed;
    puts["strongly_coupled"] = report.strongly_coupled;
    puts["falsifiably_coupled"] = report.falsifiably_coupled;
    puts["decoupled"] = report.decoupled;
    puts["excluded_by_construction"] = report.excluded_by_construction;
    j["puts"] = std::move(puts);
    ordered_json cells;
    cells["total"] = report.cells.total;
    cells["errors"] = report.cells.errors;
    cells["timeouts"] = report.cells.timeouts;
    cells["retried"] = report.cells.retried;
    j["cells"] = std::move(cells);
    ordered_json targets = ordered_json::array();
    for (const TargetReportRow& row : report.targets) {
        targets.push_back({{"target", row.target_id},
                           {"cuts", row.cuts},
                           {"original_args", row.original_args},
                           {"captured_args", row.captured_args},
                           {"puts", row.puts},
                           {"coverage_factor", row.coverage_factor},
                           {"orders_of_magnitude", row.orders_of_magnitude}});
    }
    j["targets"] = std::move(targets);
    ordered_json finalized = ordered_json::array();
    for (const FinalizedPut& f : report.finalized) {
        finalized.push_back({{"put", f.id},
                             {"test_name", f.test_name},
                             {"file", f.file},
                             {"cut", f.cut_id},
                             {"target", f.target_id},
                             {"source_puts", f.source_put_ids},
                             {"assertions", f.assertion_indexes},
                             {"rows", f.kept_rows.size()},
                             {"verified", f.verified}});
    }
    j["finalized"] = std::move(finalized);
    ordered_json excluded;
    excluded["unresolved"] = report.excluded_calls.unresolved;
    excluded["non_scalar"] = report.excluded_calls.non_scalar;
    excluded["no_definition"] = report.excluded_calls.no_definition;
    excluded["zero_params"] = report.excluded_calls.zero_params;
    excluded["default_args"] = report.excluded_calls.default_args;
    excluded["arity_mismatch"] = report.excluded_calls.arity_mismatch;
    excluded["ambiguous"] = report.excluded_calls.ambiguous;
    excluded["in_lambda"] = report.excluded_calls.in_lambda;
    j["excluded_calls"] = std::move(excluded);
    dump_to(json_path, j);

    // report.md: the module table in the shape of the classification summary
    std::string md;
    md += "# putforge report: " + report.project + "\n\n";
    md += "## Classification\n\n";
    md += "| Module | PUTs | Strongly-coupled | Falsifiably-coupled | Decoupled |\n";
    md += "|---|---:|---:|---:|---:|\n";
    md += "| " + report.project + " | " + std::to_string(report.categorized_total()) + " | " +
          std::to_string(report.strongly_coupled) + " | " +
          std::to_string(report.falsifiably_coupled) + " | " +
          std::to_string(report.decoupled) + " |\n\n";
    md += std::to_string(report.ill_formed) +
          " ill-formed PUT(s) were filtered out and are excluded from the totals above; " +
          std::to_string(report.excluded_by_construction) +
          " PUT(s) were excluded at generation time.\n\n";
    md += "## Argument capture\n\n";
    md += "| Target | CUTs | Orig. args | Cap. args | PUTs | Factor | Orders |\n";
    md += "|---|---:|---:|---:|---:|---:|---:|\n";
    for (const TargetReportRow& row : report.targets) {
        char factor[32];
        std::snprintf(factor, sizeof factor, "%.2f", row.coverage_factor);
        md += "| `" + row.target_id + "` | " + std::to_string(row.cuts) + " | " +
              std::to_string(row.original_args) + " | " + std::to_string(row.captured_args) +
              " | " + std::to_string(row.puts) + " | " + factor + " | " +
              std::to_string(row.orders_of_magnitude) + " |\n";
    }
    if (!report.finalized.empty()) {
        md += "\n## Finalized PUTs\n\n";
        for (const FinalizedPut& f : report.finalized) {
            md += "- `" + f.id + "` (" + std::to_string(f.kept_rows.size()) + " rows, " +
                  std::to_string(f.assertion_indexes.size()) + " assertion(s), " +
                  (f.verified ? "re-run green" : "re-run FAILED") + ")\n";
        }
    }
    write_file(md_path, md);
}

}  // namespace putforge::artifacts
