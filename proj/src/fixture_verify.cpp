#include "putforge/fixture_verify.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"
#include "putforge/artifacts.hpp"
#include "putforge/error.hpp"
#include "putforge/pipeline.hpp"

namespace putforge {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string tuple_to_text(const CanonicalTuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ", ";
        out += t[i];
    }
    return out + ")";
}

std::set<std::string> tuple_set(const std::vector<CanonicalTuple>& tuples) {
    std::set<std::string> out;
    for (const auto& t : tuples) out.insert(tuple_key(t));
    return out;
}

}  // namespace

FixtureVerifyResult verify_fixture(const fs::path& fixture_src, const fs::path& scratch) {
    FixtureVerifyResult result;
    auto diff = [&](const std::string& msg) { result.diffs.push_back(msg); };

    const fs::path truth_path = fixture_src / "ground-truth.json";
    if (!fs::exists(truth_path))
        throw Error("fixture has no ground-truth.json: " + fixture_src.string());
    const ordered_json truth = ordered_json::parse(read_file(truth_path));

    const fs::path project = scratch / "project";
    copy_tree(fixture_src, project, [](const fs::path& rel) {
        const std::string base = rel.filename().string();
        return base == "ground-truth.json" || base == "putforge-out" || base == "bin" ||
               base == "tmp";
    });

    Config config = load_config(project);
    CodeModel model = cmd_analyze(config);
    cmd_capture(config, CaptureContext::Test);
    if (!config.workload_command.empty()) cmd_capture(config, CaptureContext::Field);
    GenerateResult gen = cmd_generate(config);
    ClassifyResult cls = cmd_classify(config);
    result.report = cls.report;

    // --- targets: union sizes, original counts, coverage ---
    if (truth.contains("targets")) {
        for (auto it = truth["targets"].begin(); it != truth["targets"].end(); ++it) {
            const std::string id = it.key();
            const auto u = gen.unions.find(id);
            if (u == gen.unions.end()) {
                diff("target " + id + ": expected in union, absent");
                continue;
            }
            const auto expected_union = it.value().at("union_count").get<std::size_t>();
            if (u->second.tuples.size() != expected_union)
                diff("target " + id + ": union size " + std::to_string(u->second.tuples.size()) +
                     ", expected " + std::to_string(expected_union));
            const TargetReportRow* row = nullptr;
            for (const auto& r : cls.report.targets) {
                if (r.target_id == id) row = &r;
            }
            if (!row) {
                diff("target " + id + ": missing from report");
                continue;
            }
            const auto expected_orig = it.value().at("original_count").get<std::size_t>();
            if (row->original_args != expected_orig)
                diff("target " + id + ": original count " + std::to_string(row->original_args) +
                     ", expected " + std::to_string(expected_orig));
            if (it.value().contains("coverage_factor")) {
                const double expected_factor = it.value().at("coverage_factor").get<double>();
                if (std::abs(row->coverage_factor - expected_factor) > 1e-9)
                    diff("target " + id + ": coverage factor " +
                         std::to_string(row->coverage_factor) + ", expected " +
                         std::to_string(expected_factor));
            }
            if (it.value().contains("orders_of_magnitude")) {
                const int expected_orders = it.value().at("orders_of_magnitude").get<int>();
                if (row->orders_of_magnitude != expected_orders)
                    diff("target " + id + ": orders " +
                         std::to_string(row->orders_of_magnitude) + ", expected " +
                         std::to_string(expected_orders));
            }
        }
    }

    // --- cuts: assertion counts and alpha x beta plans ---
    if (truth.contains("cuts")) {
        for (auto it = truth["cuts"].begin(); it != truth["cuts"].end(); ++it) {
            const std::string id = it.key();
            const TestCase* cut = nullptr;
            for (const auto& t : model.tests) {
                if (t.id == id) cut = &t;
            }
            if (!cut) {
                diff("cut " + id + ": not discovered");
                continue;
            }
            const auto expected_asserts = it.value().at("assertions").get<std::size_t>();
            if (cut->assertions.size() != expected_asserts)
                diff("cut " + id + ": " + std::to_string(cut->assertions.size()) +
                     " assertions, expected " + std::to_string(expected_asserts));
            const PutGenerationPlan* plan = nullptr;
            for (const auto& p : gen.manifest.plans) {
                if (p.cut_id == id) plan = &p;
            }
            if (!plan) {
                diff("cut " + id + ": no plan");
                continue;
            }
            const auto expected_alpha = it.value().at("alpha").get<std::size_t>();
            if (plan->alpha != expected_alpha)
                diff("cut " + id + ": alpha " + std::to_string(plan->alpha) + ", expected " +
                     std::to_string(expected_alpha));
            const auto expected_puts = it.value().at("expected_puts").get<std::size_t>();
            if (plan->expected_put_count != expected_puts)
                diff("cut " + id + ": expected_put_count " +
                     std::to_string(plan->expected_put_count) + ", expected " +
                     std::to_string(expected_puts));
        }
    }

    // --- per-PUT classification and pass tuples ---
    std::map<std::string, const UnitManifest*> unit_of_put;
    for (const auto& unit : gen.manifest.units) {
        for (const auto& put : unit.puts) unit_of_put[put.put_id] = &unit;
    }
    std::map<std::string, const Classification*> cls_of_put;
    for (const auto& c : cls.classifications) cls_of_put[c.put_id] = &c;

    if (truth.contains("puts")) {
        std::set<std::string> expected_ids;
        for (auto it = truth["puts"].begin(); it != truth["puts"].end(); ++it) {
            const std::string id = it.key();
            expected_ids.insert(id);
            const auto c = cls_of_put.find(id);
            if (c == cls_of_put.end()) {
                diff("put " + id + ": not generated/classified");
                continue;
            }
            const std::string expected_cat = it.value().at("category").get<std::string>();
            if (category_name(c->second->category) != expected_cat)
                diff("put " + id + ": category " + category_name(c->second->category) +
                     ", expected " + expected_cat);
            if (it.value().contains("pass_tuples")) {
                const UnitManifest* unit = unit_of_put.at(id);
                std::vector<CanonicalTuple> pass_tuples;
                for (std::size_t row : c->second->pass_rows)
                    pass_tuples.push_back(unit->rows[row]);
                std::vector<CanonicalTuple> expected;
                for (const auto& t : it.value().at("pass_tuples"))
                    expected.push_back(t.get<CanonicalTuple>());
                if (tuple_set(pass_tuples) != tuple_set(expected)) {
                    std::string got;
                    for (const auto& t : pass_tuples) got += " " + tuple_to_text(t);
                    diff("put " + id + ": pass tuples{" + got + " } differ from ground truth");
                }
            }
        }
        for (const auto& [id, c] : cls_of_put) {
            if (!expected_ids.count(id)) diff("put " + id + ": generated but not in ground truth");
        }
    }

    // --- report counts ---
    if (truth.contains("report")) {
        const auto& r = truth["report"];
        auto check = [&](const char* key, std::size_t actual) {
            if (r.contains(key) && r.at(key).get<std::size_t>() != actual)
                diff(std::string("report.") + key + ": " + std::to_string(actual) +
                     ", expected " + std::to_string(r.at(key).get<std::size_t>()));
        };
        check("executed", cls.report.puts_executed);
        check("ill_formed", cls.report.ill_formed);
        check("strongly_coupled", cls.report.strongly_coupled);
        check("falsifiably_coupled", cls.report.falsifiably_coupled);
        check("decoupled", cls.report.decoupled);
    }

    // --- finalized PUTs: pruned rows, merge structure, green re-run ---
    if (truth.contains("finalized")) {
        std::set<std::string> expected_final;
        for (auto it = truth["finalized"].begin(); it != truth["finalized"].end(); ++it) {
            const std::string id = it.key();
            expected_final.insert(id);
            const FinalizedPut* fin = nullptr;
            for (const auto& f : cls.report.finalized) {
                if (f.id == id) fin = &f;
            }
            if (!fin) {
                diff("finalized " + id + ": missing");
                continue;
            }
            if (!fin->verified) diff("finalized " + id + ": re-run was not green");
            const UnitManifest* unit = nullptr;
            for (const auto& u : gen.manifest.units) {
                if (u.cut_id == fin->cut_id && u.target_id == fin->target_id &&
                    u.site_ordinal == 0)
                    unit = &u;
            }
            if (it.value().contains("rows") && unit) {
                std::vector<CanonicalTuple> kept;
                for (std::size_t row : fin->kept_rows) kept.push_back(unit->rows[row]);
                std::vector<CanonicalTuple> expected;
                for (const auto& t : it.value().at("rows"))
                    expected.push_back(t.get<CanonicalTuple>());
                if (kept != expected) diff("finalized " + id + ": pruned rows differ");
            }
            if (it.value().contains("source_puts")) {
                std::set<std::string> got(fin->source_put_ids.begin(),
                                          fin->source_put_ids.end());
                std::set<std::string> expected;
                for (const auto& s : it.value().at("source_puts"))
                    expected.insert(s.get<std::string>());
                if (got != expected) diff("finalized " + id + ": merged sources differ");
            }
        }
        for (const auto& f : cls.report.finalized) {
            if (!expected_final.count(f.id))
                diff("finalized " + f.id + ": produced but not in ground truth");
        }
    }

    result.passed = result.diffs.empty();
    return result;
}

}  // namespace putforge
