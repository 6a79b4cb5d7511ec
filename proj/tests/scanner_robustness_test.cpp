#include "doctest.h"
#include "putforge/code_model.hpp"
#include "putforge/error.hpp"
#include "putforge/instrument.hpp"
#include "test_util.hpp"

using namespace putforge;
using putforge::testutil::TempDir;

namespace {

AnalysisOptions opts() {
    AnalysisOptions o;
    o.assertion_macros = {"CHECK"};
    return o;
}

}  // namespace

TEST_CASE("scanner handles namespaces, extern C, enums, and attributes") {
    TempDir dir;
    dir.file("src/medley.hpp",
             "#pragma once\n"
             "#include <string>\n"
             "namespace outer::inner {\n"
             "enum class Mode { A, B };\n"
             "enum Legacy { X = 1, Y = 2 };\n"
             "[[nodiscard]] int scaled(int x);\n"
             "}  // namespace outer::inner\n"
             "extern \"C\" {\n"
             "int c_style(int v);\n"
             "}\n"
             "namespace outer {\n"
             "namespace inner2 {\n"
             "struct Holder {\n"
             "  explicit Holder(const std::string& tag) : tag_{tag}, count_{0} {}\n"
             "  void bump(int by) { count_ += by; }\n"
             "  int count() const { return count_; }\n"
             " private:\n"
             "  std::string tag_;\n"
             "  int count_;\n"
             "};\n"
             "}\n"
             "}\n"
             "template <typename T>\n"
             "T identity(T v) { return v; }\n"
             "using Alias = outer::inner::Mode;\n")
        ;
    dir.file("src/medley.cpp",
             "#include \"medley.hpp\"\n"
             "namespace outer::inner {\n"
             "int scaled(int x) { return x * 3; }\n"
             "}\n"
             "extern \"C\" int c_style(int v) { return v + 1; }\n");
    dir.file("tests/t.cpp",
             "void CHECK(bool);\n"
             "#include \"../src/medley.hpp\"\n"
             "TEST_CASE(\"medley\") {\n"
             "  outer::inner2::Holder h(\"tag\");\n"
             "  h.bump(4);\n"
             "  int s = outer::inner::scaled(2);\n"
             "  int c = c_style(5);\n"
             "  int ignored = identity(1);\n"  // template: not a target
             "  CHECK(h.count() + s + c == 17);\n"
             "}\n");

    CodeModel model = analyze_project(dir.path, opts());
    REQUIRE(model.tests.size() == 1);
    const TestCase& t = model.tests[0];
    REQUIRE(t.target_calls.size() == 4);
    CHECK(t.target_calls[0].target_id == "outer::inner2::Holder::Holder(s)");
    CHECK(t.target_calls[1].target_id == "outer::inner2::Holder::bump(i32)");
    CHECK(t.target_calls[2].target_id == "outer::inner::scaled(i32)");
    CHECK(t.target_calls[3].target_id == "c_style(i32)");
    CHECK(model.find_target("outer::inner::scaled(i32)")->file == "src/medley.cpp");
    CHECK(!model.find_target("identity(i32)"));

    // the header-inline method and constructor instrument cleanly
    InstrumentationPlan plan;
    for (const auto& target : model.targets) plan.target_ids.push_back(target.id);
    plan.output_root = dir.path / "inst";
    plan.capture_sink = dir.path / "cap.jsonl";
    const auto result = instrument(dir.path, model, plan, opts());
    CHECK(result.inserted.size() == 4);

    dir.file("inst/main.cpp",
             "#include \"src/medley.hpp\"\n"
             "int main() {\n"
             "  outer::inner2::Holder h(\"run\");\n"
             "  h.bump(2);\n"
             "  return outer::inner::scaled(h.count()) + c_style(0) > 0 ? 0 : 1;\n"
             "}\n");
    Config config;
    config.project_root = plan.output_root;
    config.build_command = "g++ -std=c++20 -O0 -Isrc src/*.cpp main.cpp -o runner";
    config.workload_command = "./runner";
    build_subject(plan.output_root, config);
    const auto run =
        run_captured(plan.output_root, CaptureContext::Field, config, {}, plan.capture_sink);
    CHECK(!run.command_failed);
    CHECK(run.records_appended == 4);
}

TEST_CASE("functions with default arguments are not eligible targets") {
    TempDir dir;
    dir.file("src/lib.hpp", "int pad(int x, int width = 4);\n");
    dir.file("src/lib.cpp",
             "#include \"lib.hpp\"\nint pad(int x, int width) { return x * width; }\n");
    dir.file("tests/t.cpp",
             "void CHECK(bool);\n"
             "#include \"../src/lib.hpp\"\n"
             "TEST_CASE(\"pads\") { CHECK(pad(2, 4) == 8); }\n");
    CodeModel model = analyze_project(dir.path, opts());
    CHECK(model.targets.empty());
    CHECK(model.excluded.total() >= 1);
}

TEST_CASE("operators and destructors are skipped without derailing the scan") {
    TempDir dir;
    dir.file("src/ops.hpp",
             "#include <string>\n"
             "struct Box {\n"
             "  Box() = default;\n"
             "  ~Box() {}\n"
             "  bool operator==(const Box& other) const { return tag == other.tag; }\n"
             "  void tag_it(const std::string& t) { tag = t; }\n"
             "  std::string tag;\n"
             "};\n"
             "inline bool operator!=(const Box& a, const Box& b) { return !(a == b); }\n");
    dir.file("tests/t.cpp",
             "void CHECK(bool);\n"
             "#include \"../src/ops.hpp\"\n"
             "TEST_CASE(\"boxes\") {\n"
             "  Box b;\n"
             "  b.tag_it(\"red\");\n"
             "  CHECK(b.tag == \"red\");\n"
             "}\n");
    CodeModel model = analyze_project(dir.path, opts());
    REQUIRE(model.targets.size() == 1);
    CHECK(model.targets[0].id == "Box::tag_it(s)");
}

TEST_CASE("raw strings and comments inside test bodies stay opaque") {
    TempDir dir;
    dir.file("src/lib.hpp", "int take(int x);\n");
    dir.file("src/lib.cpp", "#include \"lib.hpp\"\nint take(int x) { return x; }\n");
    dir.file("tests/t.cpp",
             "#include <string>\n"
             "void CHECK(bool);\n"
             "#include \"../src/lib.hpp\"\n"
             "TEST_CASE(\"opaque\") {\n"
             "  std::string s = R\"(take(99); CHECK(false);)\";\n"
             "  // take(42); CHECK(s == \"}\");\n"
             "  /* take(7); } { */\n"
             "  int r = take(3);\n"
             "  CHECK(r == 3);\n"
             "}\n");
    CodeModel model = analyze_project(dir.path, opts());
    REQUIRE(model.tests.size() == 1);
    CHECK(model.tests[0].assertions.size() == 1);
    REQUIRE(model.tests[0].target_calls.size() == 1);
    auto original = resolve_original_arguments(model.tests[0].target_calls[0],
                                               *model.find_target("take(i32)"));
    REQUIRE(original);
    CHECK(*original == CanonicalTuple{"i32:3"});
}
