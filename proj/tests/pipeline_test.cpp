#include "putforge/pipeline.hpp"

#include <fstream>

#include "doctest.h"
#include "putforge/artifacts.hpp"
#include "putforge/error.hpp"
#include "test_util.hpp"

using namespace putforge;
using putforge::testutil::TempDir;
using putforge::testutil::fixture_dir;

namespace {

fs::path copy_fixture(const TempDir& dir, const std::string& name) {
    const fs::path project = dir.path / name;
    copy_tree(fixture_dir(name), project, [](const fs::path& rel) {
        const std::string base = rel.filename().string();
        return base == "ground-truth.json" || base == "putforge-out" || base == "bin" ||
               base == "tmp";
    });
    return project;
}

}  // namespace

TEST_CASE("analyze artifacts are byte-stable across reruns") {
    TempDir dir;
    const fs::path project = copy_fixture(dir, "codec");
    const Config config = load_config(project);
    const StagePaths paths = stage_paths(config);
    cmd_analyze(config);
    const std::string targets1 = read_file(paths.targets_json);
    const std::string tests1 = read_file(paths.tests_json);
    cmd_analyze(config);
    CHECK(read_file(paths.targets_json) == targets1);
    CHECK(read_file(paths.tests_json) == tests1);
}

TEST_CASE("field execution widens the codec union beyond the test-only union") {
    TempDir dir;
    const fs::path project = copy_fixture(dir, "codec");
    const Config config = load_config(project);
    const StagePaths paths = stage_paths(config);
    cmd_analyze(config);
    cmd_capture(config, CaptureContext::Test);

    // test-only: the union for encode collapses to the original argument
    GenerateResult test_only = cmd_generate(config);
    const std::size_t test_union = test_only.unions.at("encode(i32)").tuples.size();
    CHECK(test_union == 1);
    CHECK(test_only.manifest.total_puts() == 0);  // nothing qualifies yet

    cmd_capture(config, CaptureContext::Field);
    GenerateResult both = cmd_generate(config);
    const std::size_t both_union = both.unions.at("encode(i32)").tuples.size();
    CHECK(both_union == 101);
    CHECK(both_union > test_union);
    CHECK(both.manifest.total_puts() == 2);

    // provenance distinguishes the execution contexts
    const CaptureUnion& u = both.unions.at("encode(i32)");
    CHECK(u.provenance[0].test);      // the original, observed during tests
    CHECK(u.provenance[0].original);
    bool any_field_only = false;
    for (std::size_t i = 1; i < u.provenance.size(); ++i) {
        if (u.provenance[i].field && !u.provenance[i].test) any_field_only = true;
    }
    CHECK(any_field_only);
}

TEST_CASE("runtime attribution recovers originals for non-literal sites") {
    TempDir dir;
    const fs::path project = copy_fixture(dir, "codec");
    const Config config = load_config(project);
    cmd_analyze(config);
    cmd_capture(config, CaptureContext::Test);

    const CodeModel model = analyze_project(project, config.analysis_options());
    const StagePaths paths = stage_paths(config);
    const auto kinds = artifacts::load_target_kinds(paths.targets_json);
    const auto records = load_capture_log(paths.capture_test, kinds);
    const OriginalsByCutTarget originals = compute_originals(model, records);

    // encode(21) is literal; decode(code) and has_even_parity(code) are
    // recovered from the CUT's own instrumented execution
    REQUIRE(originals.count("testEncode"));
    const auto& per_target = originals.at("testEncode");
    CHECK(per_target.at("encode(i32)") == std::vector<CanonicalTuple>{{"i32:21"}});
    REQUIRE(per_target.count("decode(i32)"));
    CHECK(per_target.at("decode(i32)") == std::vector<CanonicalTuple>{{"i32:43"}});
    REQUIRE(per_target.count("has_even_parity(i32)"));
    CHECK(per_target.at("has_even_parity(i32)") == std::vector<CanonicalTuple>{{"i32:43"}});
}

TEST_CASE("fixtures pass under parallel cell execution") {
    TempDir dir;
    const fs::path project = copy_fixture(dir, "radio_form");
    {
        std::ofstream toml(project / "putforge.toml", std::ios::app);
        toml << "parallel_puts = 4\n";
    }
    const Config config = load_config(project);
    REQUIRE(config.parallel_puts == 4);
    cmd_analyze(config);
    cmd_capture(config, CaptureContext::Test);
    cmd_capture(config, CaptureContext::Field);
    cmd_generate(config);
    const ClassifyResult result = cmd_classify(config);
    CHECK(result.report.strongly_coupled == 1);
    CHECK(result.report.falsifiably_coupled == 1);
    CHECK(result.report.ill_formed == 0);
}

TEST_CASE("per-site variants parameterize every call site of a repeated target") {
    TempDir dir;
    const fs::path project = copy_fixture(dir, "sideeffect");
    {
        std::ofstream toml(project / "putforge.toml", std::ios::app);
        toml << "per_site_variants = true\n";
    }
    const Config config = load_config(project);
    cmd_analyze(config);
    cmd_capture(config, CaptureContext::Test);
    cmd_capture(config, CaptureContext::Field);
    const GenerateResult gen = cmd_generate(config);

    // bump() has two sites: the default unit plus a site-1 variant whose
    // original is the literal at that site (2). At the variant, keeping
    // assertion 0 parameterizes the call in place; keeping assertion 1 would
    // delete the statement holding the site, so that PUT is excluded.
    REQUIRE(gen.manifest.units.size() == 2);
    const UnitManifest& site0 = gen.manifest.units[0];
    const UnitManifest& site1 = gen.manifest.units[1];
    CHECK(site0.site_ordinal == 0);
    CHECK(site0.puts.size() == 2);
    CHECK(site1.site_ordinal == 1);
    REQUIRE(site1.puts.size() == 1);
    CHECK(site1.puts[0].assertion_index == 0);
    CHECK(site1.excluded.size() == 1);
    REQUIRE(!site1.original_rows.empty());
    CHECK(site1.rows[site1.original_rows[0]] == CanonicalTuple{"i32:2"});

    // the variant PUT checks bump(p) == 5 after bump(3): only p == 2 passes
    const ClassifyResult cls = cmd_classify(config);
    bool site1_strongly = false;
    for (const Classification& c : cls.classifications) {
        if (c.put_id == site1.puts[0].put_id)
            site1_strongly = c.category == Category::StronglyCoupled &&
                             c.pass_rows == std::set<std::size_t>(site1.original_rows.begin(),
                                                                  site1.original_rows.end());
    }
    CHECK(site1_strongly);
}

TEST_CASE("stage consistency guard catches a changed project") {
    TempDir dir;
    const fs::path project = copy_fixture(dir, "merge");
    const Config config = load_config(project);
    cmd_analyze(config);
    // grow the target surface after analyze
    write_file(project / "src" / "extra.cpp", "int extra_fn(int x) { return x; }\n");
    write_file(project / "tests" / "extra_test.cpp",
               "#include \"doctest.h\"\n"
               "int extra_fn(int x);\n"
               "TEST_CASE(\"extraTest\") { CHECK(extra_fn(1) == 1); }\n");
    CHECK_THROWS_WITH_AS(cmd_capture(config, CaptureContext::Test),
                         doctest::Contains("changed since analyze"), Error);
}
