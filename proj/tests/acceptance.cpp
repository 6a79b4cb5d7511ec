// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with its elapsed time. Fixture pipelines are cached across criteria;
// the first criterion that needs a fixture pays for its pipeline run.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <set>

#include "classify_reference.hpp"
#include "json.hpp"
#include "putforge/artifacts.hpp"
#include "putforge/error.hpp"
#include "putforge/fixture_verify.hpp"
#include "putforge/pipeline.hpp"
#include "test_util.hpp"

using namespace putforge;
using putforge::testutil::TempDir;
using putforge::testutil::fixture_dir;
using putforge::testutil::reference_classify;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
    int number;
    std::string title;
    double budget_s;  // 0 = no stated bound
    Clock::time_point start = Clock::now();
    bool ok = true;

    Criterion(int n, std::string t, double budget) : number(n), title(std::move(t)), budget_s(budget) {}

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            MESSAGE("criterion ", number, ": ", what);
        }
        CHECK(condition);
    }

    void finish() {
        const double elapsed =
            std::chrono::duration<double>(Clock::now() - start).count();
        if (budget_s > 0) {
            if (elapsed >= budget_s) ok = false;
            CHECK(elapsed < budget_s);
        }
        std::printf("[criterion %d] %s  %s (%.1fs%s)\n", number, ok ? "PASS" : "FAIL",
                    title.c_str(), elapsed,
                    budget_s > 0 ? (", budget " + std::to_string(static_cast<int>(budget_s)) + "s").c_str()
                                 : "");
        std::fflush(stdout);
    }
};

struct FixtureRun {
    std::unique_ptr<TempDir> dir;
    fs::path project;
    Config config;
    CodeModel model;
    CaptureRunSummary test_capture;
    GenerateResult gen;
    ClassifyResult cls;
};

FixtureRun run_pipeline(const std::string& name, const std::string& scratch_tag) {
    FixtureRun run;
    run.dir = std::make_unique<TempDir>("putforge_acceptance_" + scratch_tag);
    run.project = run.dir->path / "project";
    copy_tree(fixture_dir(name), run.project, [](const fs::path& rel) {
        const std::string base = rel.filename().string();
        return base == "ground-truth.json" || base == "putforge-out" || base == "bin" ||
               base == "tmp";
    });
    run.config = load_config(run.project);
    run.model = cmd_analyze(run.config);
    run.test_capture = cmd_capture(run.config, CaptureContext::Test);
    if (!run.config.workload_command.empty()) cmd_capture(run.config, CaptureContext::Field);
    run.gen = cmd_generate(run.config);
    run.cls = cmd_classify(run.config);
    return run;
}

FixtureRun& pipeline(const std::string& name) {
    static std::map<std::string, std::unique_ptr<FixtureRun>> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        it = cache.emplace(name, std::make_unique<FixtureRun>(run_pipeline(name, name))).first;
    }
    return *it->second;
}

const std::vector<std::string> kAllFixtures = {"radio_form", "codec", "sideeffect", "multi",
                                               "merge"};

std::set<std::string> pass_tuple_keys(const FixtureRun& run, const std::string& put_id) {
    const UnitManifest* unit = nullptr;
    for (const auto& u : run.gen.manifest.units) {
        for (const auto& p : u.puts) {
            if (p.put_id == put_id) unit = &u;
        }
    }
    REQUIRE(unit);
    std::set<std::string> keys;
    for (const auto& c : run.cls.classifications) {
        if (c.put_id != put_id) continue;
        for (std::size_t row : c.pass_rows) keys.insert(tuple_key(unit->rows[row]));
    }
    return keys;
}

const Classification* classification_of(const FixtureRun& run, const std::string& put_id) {
    for (const auto& c : run.cls.classifications) {
        if (c.put_id == put_id) return &c;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("criterion 1: alpha x beta law on a 2-target, 2-assertion CUT") {
    Criterion crit(1, "alpha x beta law (2 targets x 2 assertions -> 4 PUTs)", 30.0);
    FixtureRun& run = pipeline("multi");
    const PutGenerationPlan* plan = nullptr;
    for (const auto& p : run.gen.manifest.plans) {
        if (p.cut_id == "testLabelScale") plan = &p;
    }
    crit.expect(plan != nullptr, "plan for testLabelScale missing");
    if (plan) {
        crit.expect(plan->alpha == 2, "alpha != 2");
        crit.expect(plan->beta == 2, "beta != 2");
        crit.expect(plan->expected_put_count == 4, "expected_put_count != 4");
    }
    crit.expect(run.gen.manifest.total_puts() == 4,
                "generate emitted " + std::to_string(run.gen.manifest.total_puts()) +
                    " PUTs, expected exactly 4");
    crit.finish();
}

TEST_CASE("criterion 2: the radio-button scenario re-enacted") {
    Criterion crit(2, "12-row union; falsifiably {b,c}; strongly {b}", 60.0);
    FixtureRun& run = pipeline("radio_form");
    const auto u = run.gen.unions.find("RadioForm::select_option(s)");
    crit.expect(u != run.gen.unions.end() && u->second.tuples.size() == 12,
                "union size is not 12");

    const Classification* strong =
        classification_of(run, "testRadioButtons_PUT_select_option_0");
    const Classification* fals =
        classification_of(run, "testRadioButtons_PUT_select_option_1");
    crit.expect(strong && strong->category == Category::StronglyCoupled,
                "value-equality PUT is not strongly-coupled");
    crit.expect(fals && fals->category == Category::FalsifiablyCoupled,
                "export-count PUT is not falsifiably-coupled");
    crit.expect(pass_tuple_keys(run, "testRadioButtons_PUT_select_option_0") ==
                    std::set<std::string>{tuple_key({"s:b"})},
                "strongly-coupled pass rows are not exactly {b}");
    crit.expect(pass_tuple_keys(run, "testRadioButtons_PUT_select_option_1") ==
                    std::set<std::string>{tuple_key({"s:b"}), tuple_key({"s:c"})},
                "falsifiably-coupled pass rows are not exactly {b, c}");
    crit.finish();
}

TEST_CASE("criterion 3: classifier agrees with the brute-force reference") {
    Criterion crit(3, "1000 randomized instances vs independent oracle", 10.0);
    std::mt19937 rng(0x5eed);
    std::size_t agreements = 0;
    const std::size_t instances = 1000;
    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t rows = 1 + rng() % 50;
        std::set<std::size_t> originals;
        const std::size_t n_orig = 1 + rng() % rows;
        while (originals.size() < n_orig) originals.insert(rng() % rows);
        std::set<std::size_t> pass;
        for (std::size_t r = 0; r < rows; ++r) {
            if (rng() % 100 < 60) pass.insert(r);
        }
        std::vector<Outcome> outcomes(rows, Outcome::Fail);
        for (std::size_t r : pass) outcomes[r] = Outcome::Pass;
        const Classification c = classify("instance", outcomes, originals);
        if (c.category == reference_classify(rows, originals, pass)) ++agreements;
    }
    crit.expect(agreements == instances,
                std::to_string(instances - agreements) + " disagreements with the oracle");
    crit.finish();
}

TEST_CASE("criterion 4: canonical encodings survive the full log round trip") {
    Criterion crit(4, "10k scalars/kind through encode -> log -> load -> decode", 10.0);
    std::mt19937_64 rng(0xf005ba11);
    const int per_kind = 10000;

    std::vector<std::pair<std::string, ScalarKind>> kinds = {
        {"k_bool(bool)", ScalarKind::boolean()},
        {"k_i8(i8)", ScalarKind::integer(8, true)},
        {"k_u8(u8)", ScalarKind::integer(8, false)},
        {"k_i16(i16)", ScalarKind::integer(16, true)},
        {"k_u16(u16)", ScalarKind::integer(16, false)},
        {"k_i32(i32)", ScalarKind::integer(32, true)},
        {"k_u32(u32)", ScalarKind::integer(32, false)},
        {"k_i64(i64)", ScalarKind::integer(64, true)},
        {"k_u64(u64)", ScalarKind::integer(64, false)},
        {"k_f32(f32)", ScalarKind::f32()},
        {"k_f64(f64)", ScalarKind::f64()},
        {"k_c(c)", ScalarKind::character()},
        {"k_s(s)", ScalarKind::text()},
        {"k_ns(ns)", ScalarKind::nullable_text()},
    };

    auto random_value = [&](const ScalarKind& kind, int i) -> ScalarValue {
        switch (kind.type) {
            case ScalarType::Boolean: return make_bool(rng() & 1);
            case ScalarType::Integer: {
                std::uint64_t raw = rng();
                if (i == 0) raw = 0;
                if (i == 1) raw = ~0ull;  // extremes
                if (kind.is_signed) {
                    std::int64_t v = static_cast<std::int64_t>(raw);
                    if (kind.width < 64) {
                        v = static_cast<std::int64_t>(raw % (1ull << kind.width)) -
                            (1ll << (kind.width - 1));
                    }
                    if (i == 2) v = kind.width == 64 ? INT64_MIN : -(1ll << (kind.width - 1));
                    if (i == 3) v = kind.width == 64 ? INT64_MAX : (1ll << (kind.width - 1)) - 1;
                    return make_int(kind, v);
                }
                std::uint64_t v = kind.width == 64 ? raw : raw % (1ull << kind.width);
                return make_uint(kind, v);
            }
            case ScalarType::Float: {
                std::uint64_t bits = rng();
                if (i == 0) bits = 0x0000000000000000ull;  // +0.0
                if (i == 1) bits = 0x8000000000000000ull;  // -0.0
                if (i == 2) bits = 0x7ff8000000000001ull;  // NaN payload
                if (i == 3) bits = 0x7ff0000000000000ull;  // +inf
                if (kind.width == 32) {
                    std::uint32_t b32 = static_cast<std::uint32_t>(bits);
                    if (i == 0) b32 = 0x00000000u;
                    if (i == 1) b32 = 0x80000000u;
                    if (i == 2) b32 = 0x7fc00001u;
                    return make_f32(b32);
                }
                return make_f64(bits);
            }
            case ScalarType::Character:
                return make_char(static_cast<unsigned char>(rng() & 0xff));
            case ScalarType::Text:
            case ScalarType::NullableText: {
                if (kind.type == ScalarType::NullableText && i % 7 == 0)
                    return make_nullable(std::nullopt);
                std::string bytes;
                const std::size_t len = rng() % 24;
                for (std::size_t k = 0; k < len; ++k) bytes += static_cast<char>(rng() & 0xff);
                if (i == 1) bytes = std::string("\"quotes\"\n\r\t\\ and\x01ctrl") + '\0' + "z";
                if (i == 2) bytes = "caf\xc3\xa9 \xe6\x97\xa5\xe6\x9c\xac";  // multi-byte UTF-8
                ScalarValue v;
                v.kind = kind;
                v.text = bytes;
                return v;
            }
        }
        return make_bool(false);
    };

    // write one big JSONL capture log through the public record schema
    TempDir dir("putforge_acceptance_roundtrip");
    std::string log;
    std::vector<ScalarValue> values;
    std::map<std::string, std::vector<ScalarKind>> target_kinds;
    std::uint64_t seq = 0;
    for (const auto& [target, kind] : kinds) {
        target_kinds[target] = {kind};
        for (int i = 0; i < per_kind; ++i) {
            ScalarValue v = random_value(kind, i);
            values.push_back(v);
            nlohmann::ordered_json rec;
            rec["t"] = target;
            rec["a"] = {encode(v)};
            rec["c"] = (i & 1) ? "test" : "field";
            rec["id"] = nullptr;
            rec["n"] = seq++;
            log += rec.dump();
            log += '\n';
        }
    }
    const fs::path log_path = dir.path / "roundtrip.jsonl";
    write_file(log_path, log);

    LoadDiagnostics diag;
    const auto records = load_capture_log(log_path, target_kinds, &diag);
    crit.expect(records.size() == values.size(), "record count mismatch after load");
    crit.expect(diag.rejected.empty(), "unexpected rejected records");

    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        ScalarValue back = decode(records[i].tuple[0]);
        ScalarValue expected = values[i];
        // nullable non-null text decodes as plain text kind
        if (expected.kind.type == ScalarType::NullableText && !expected.is_null)
            expected.kind = ScalarKind::text();
        if (!(back == expected)) ++mismatches;
    }
    crit.expect(mismatches == 0, std::to_string(mismatches) + " bitwise mismatches");

    // dedup semantics: NaN == NaN (same payload), -0.0 != +0.0
    crit.expect(tuple_key({encode(make_f64(0x7ff8000000000001ull))}) ==
                    tuple_key({encode(make_f64(0x7ff8000000000001ull))}),
                "NaN != NaN under dedup");
    crit.expect(tuple_key({encode(make_f64(0x0ull))}) !=
                    tuple_key({encode(make_f64(0x8000000000000000ull))}),
                "-0.0 == +0.0 under dedup");
    crit.finish();
}

TEST_CASE("criterion 5: instrumentation preserves every fixture's verdict vector") {
    Criterion crit(5, "suite verdicts identical before/after instrumentation", 120.0);
    for (const std::string& name : kAllFixtures) {
        FixtureRun& run = pipeline(name);

        // baseline: pristine copy, no instrumentation, no capture environment
        TempDir base_dir("putforge_acceptance_base_" + name);
        const fs::path base = base_dir.path / "project";
        copy_tree(fixture_dir(name), base, [](const fs::path& rel) {
            const std::string b = rel.filename().string();
            return b == "ground-truth.json" || b == "putforge-out" || b == "bin" || b == "tmp";
        });
        const Config base_config = load_config(base);
        build_subject(base, base_config);
        std::vector<std::string> ids;
        for (const auto& t : run.model.tests) ids.push_back(t.id);
        const auto before = run_test_suite(base, base_config, ids);

        const auto& after = run.test_capture.test_results;
        crit.expect(before.size() == after.size(), name + ": verdict vector length differs");
        for (std::size_t i = 0; i < before.size() && i < after.size(); ++i) {
            crit.expect(before[i].test_id == after[i].test_id,
                        name + ": test order differs at " + std::to_string(i));
            crit.expect(before[i].passed == after[i].passed,
                        name + ": verdict differs for " + before[i].test_id);
        }
    }
    crit.finish();
}

TEST_CASE("criterion 6: finalization prunes to green and merges shared providers") {
    Criterion crit(6, "finalized PUTs re-run green; identical providers merged", 60.0);

    // every finalized PUT across fixtures re-runs 100% green
    for (const std::string& name : {std::string("radio_form"), std::string("multi"),
                                    std::string("merge")}) {
        FixtureRun& run = pipeline(name);
        for (const FinalizedPut& fin : run.cls.report.finalized) {
            crit.expect(fin.verified, name + ": " + fin.id + " did not re-run green");
        }
    }

    // merge fixture: two falsifiably-coupled PUTs with identical pruned
    // providers collapse into one multi-assertion PUT
    FixtureRun& merge_run = pipeline("merge");
    crit.expect(merge_run.cls.report.finalized.size() == 1,
                "merge fixture should finalize into exactly one PUT");
    if (merge_run.cls.report.finalized.size() == 1) {
        const FinalizedPut& fin = merge_run.cls.report.finalized[0];
        crit.expect(fin.source_put_ids.size() == 2, "merged PUT should come from 2 sources");
        crit.expect(fin.assertion_indexes == std::vector<std::size_t>{0, 1},
                    "merged PUT should carry both assertions");
        crit.expect(fin.kept_rows.size() == 4, "pruned provider should have 4 rows");
    }

    // pruned provider == pass rows for the radio_form falsifiable PUT
    FixtureRun& radio = pipeline("radio_form");
    crit.expect(radio.cls.report.finalized.size() == 1, "radio_form should finalize one PUT");
    if (radio.cls.report.finalized.size() == 1) {
        const FinalizedPut& fin = radio.cls.report.finalized[0];
        const Classification* fals =
            classification_of(radio, "testRadioButtons_PUT_select_option_1");
        crit.expect(fals != nullptr &&
                        std::set<std::size_t>(fin.kept_rows.begin(), fin.kept_rows.end()) ==
                            fals->pass_rows,
                    "pruned rows differ from the pass set");
    }
    crit.finish();
}

TEST_CASE("criterion 7: coverage-gain arithmetic at the reported scale") {
    Criterion crit(7, "originals 2, union 2694 -> factor 1347, 3 orders", 1.0);
    CaptureUnion u;
    u.tuples.resize(2694);
    const CoverageGain g = coverage_gain(u, 2);
    crit.expect(g.factor == 1347.0, "factor != 1347");
    crit.expect(g.orders_of_magnitude == 3, "orders of magnitude != 3");
    crit.finish();
}

TEST_CASE("criterion 8: report partition holds on every fixture") {
    Criterion crit(8, "strongly + falsifiably + decoupled == executed - ill-formed", 0.0);
    for (const std::string& name : kAllFixtures) {
        FixtureRun& run = pipeline(name);
        const Report& r = run.cls.report;
        crit.expect(r.strongly_coupled + r.falsifiably_coupled + r.decoupled ==
                        r.puts_executed - r.ill_formed,
                    name + ": partition law violated");
        crit.expect(r.puts_executed == run.cls.classifications.size(),
                    name + ": executed count differs from classification count");
    }
    crit.finish();
}

TEST_CASE("criterion 9: the pipeline is byte-deterministic") {
    Criterion crit(9, "two consecutive runs produce byte-identical artifacts", 0.0);
    FixtureRun first = run_pipeline("radio_form", "det1");
    FixtureRun second = run_pipeline("radio_form", "det2");
    for (const char* artifact : {"union.json", "puts.json", "classification.json"}) {
        const std::string a =
            read_file(stage_paths(first.config).workspace / artifact);
        const std::string b =
            read_file(stage_paths(second.config).workspace / artifact);
        crit.expect(a == b, std::string(artifact) + " differs between runs");
    }
    crit.finish();
}
