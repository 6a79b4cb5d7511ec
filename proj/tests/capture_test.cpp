#include "putforge/capture.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "putforge/error.hpp"
#include "test_util.hpp"

using namespace putforge;
using putforge::testutil::TempDir;

namespace {

const std::map<std::string, std::vector<ScalarKind>> kKinds = {
    {"set_value(s)", {ScalarKind::text()}},
    {"encode(i32)", {ScalarKind::integer(32, true)}},
};

CaptureRecord rec(const std::string& target, CanonicalTuple tuple, CaptureContext ctx,
                  std::optional<std::string> test_id = std::nullopt) {
    static std::uint64_t seq = 0;
    return {target, std::move(tuple), ctx, std::move(test_id), seq++};
}

}  // namespace

TEST_CASE("loads well-formed logs and tolerates a truncated tail") {
    TempDir dir;
    const fs::path log = dir.file(
        "capture.jsonl",
        "{\"t\":\"set_value(s)\",\"a\":[\"s:b\"],\"c\":\"test\",\"id\":\"t1\",\"n\":0}\n"
        "{\"t\":\"set_value(s)\",\"a\":[\"s:Off\"],\"c\":\"field\",\"id\":null,\"n\":1}\n"
        "{\"t\":\"encode(i32)\",\"a\":[\"i32:21\"],\"c\":\"test\",\"id\":\"t2\",\"n\":2}\n");
    LoadDiagnostics diag;
    auto records = load_capture_log(log, kKinds, &diag);
    CHECK(records.size() == 3);
    CHECK(diag.rejected.empty());
    CHECK(!diag.truncated_tail);

    const fs::path cut = dir.file(
        "truncated.jsonl",
        "{\"t\":\"set_value(s)\",\"a\":[\"s:b\"],\"c\":\"test\",\"id\":null,\"n\":0}\n"
        "{\"t\":\"set_value(s)\",\"a\":[\"s:c\"");
    records = load_capture_log(cut, kKinds, &diag);
    CHECK(records.size() == 1);
    CHECK(diag.truncated_tail);
}

TEST_CASE("rejects arity and kind mismatches per record") {
    TempDir dir;
    const fs::path log = dir.file(
        "capture.jsonl",
        "{\"t\":\"set_value(s)\",\"a\":[\"s:a\",\"s:b\"],\"c\":\"test\",\"id\":null,\"n\":0}\n"
        "{\"t\":\"encode(i32)\",\"a\":[\"s:x\"],\"c\":\"test\",\"id\":null,\"n\":1}\n"
        "{\"t\":\"mystery(s)\",\"a\":[\"s:x\"],\"c\":\"test\",\"id\":null,\"n\":2}\n"
        "{\"t\":\"set_value(s)\",\"a\":[\"s:ok\"],\"c\":\"test\",\"id\":null,\"n\":3}\n"
        "not json at all\n"
        "{\"t\":\"set_value(s)\",\"a\":[\"s:fine\"],\"c\":\"field\",\"id\":null,\"n\":4}\n");
    LoadDiagnostics diag;
    auto records = load_capture_log(log, kKinds, &diag);
    CHECK(records.size() == 2);
    CHECK(diag.rejected.size() == 4);
}

TEST_CASE("build_union dedups, merges provenance, injects missing originals") {
    std::vector<CaptureRecord> records;
    records.push_back(rec("set_value(s)", {"s:b"}, CaptureContext::Test, "t1"));
    records.push_back(rec("set_value(s)", {"s:b"}, CaptureContext::Field));
    records.push_back(rec("set_value(s)", {"s:Off"}, CaptureContext::Field));
    records.push_back(rec("set_value(s)", {"s:c"}, CaptureContext::Field));
    records.push_back(rec("set_value(s)", {"s:c"}, CaptureContext::Field));

    std::map<std::string, std::vector<CanonicalTuple>> originals;
    originals["set_value(s)"] = {{"s:b"}};
    originals["encode(i32)"] = {{"i32:21"}};  // never captured: injected

    auto unions = build_union(records, originals);
    REQUIRE(unions.count("set_value(s)"));
    const CaptureUnion& sv = unions.at("set_value(s)");
    REQUIRE(sv.tuples.size() == 3);
    CHECK(sv.original_count == 1);
    CHECK(sv.tuples[0] == CanonicalTuple{"s:b"});
    CHECK(sv.provenance[0].test);
    CHECK(sv.provenance[0].field);
    CHECK(sv.provenance[0].original);
    // remaining rows are ordered by dedup key: "s:Off" < "s:c"
    CHECK(sv.tuples[1] == CanonicalTuple{"s:Off"});
    CHECK(!sv.provenance[1].original);
    CHECK(sv.tuples[2] == CanonicalTuple{"s:c"});

    const CaptureUnion& enc = unions.at("encode(i32)");
    REQUIRE(enc.tuples.size() == 1);
    CHECK(enc.tuples[0] == CanonicalTuple{"i32:21"});
    CHECK(enc.provenance[0].original);
    CHECK(!enc.provenance[0].test);
}

TEST_CASE("union construction is order-insensitive and idempotent") {
    std::vector<CaptureRecord> records;
    std::mt19937 rng(7);
    for (int i = 0; i < 50; ++i) {
        records.push_back(rec("encode(i32)", {"i32:" + std::to_string(rng() % 10)},
                              (rng() & 1) ? CaptureContext::Test : CaptureContext::Field));
    }
    std::map<std::string, std::vector<CanonicalTuple>> originals;
    originals["encode(i32)"] = {{"i32:3"}};

    auto u1 = build_union(records, originals);
    std::shuffle(records.begin(), records.end(), rng);
    auto u2 = build_union(records, originals);
    REQUIRE(u1.count("encode(i32)"));
    const CaptureUnion& a = u1.at("encode(i32)");
    const CaptureUnion& b = u2.at("encode(i32)");
    CHECK(a.tuples == b.tuples);
    CHECK(a.provenance == b.provenance);

    // adding records never shrinks the union
    records.push_back(rec("encode(i32)", {"i32:77"}, CaptureContext::Field));
    auto u3 = build_union(records, originals);
    CHECK(u3.at("encode(i32)").tuples.size() == a.tuples.size() + 1);
    for (const auto& t : a.tuples) {
        CHECK(u3.at("encode(i32)").index_of(t));
    }
}

TEST_CASE("tuples with unserializable markers are dropped and counted") {
    std::vector<CaptureRecord> records;
    records.push_back(rec("set_value(s)", {"!"}, CaptureContext::Test));
    records.push_back(rec("set_value(s)", {"s:ok"}, CaptureContext::Test));
    std::size_t skipped = 0;
    auto unions = build_union(records, {}, &skipped);
    CHECK(skipped == 1);
    CHECK(unions.at("set_value(s)").tuples.size() == 1);
}

TEST_CASE("coverage gain arithmetic") {
    CaptureUnion u;
    u.tuples.resize(2694);
    CoverageGain g = coverage_gain(u, 2);
    CHECK(g.factor == doctest::Approx(1347.0));
    CHECK(g.orders_of_magnitude == 3);

    u.tuples.resize(1);
    g = coverage_gain(u, 1);
    CHECK(g.factor == doctest::Approx(1.0));
    CHECK(g.orders_of_magnitude == 0);

    u.tuples.resize(101);
    g = coverage_gain(u, 1);
    CHECK(g.factor == doctest::Approx(101.0));
    CHECK(g.orders_of_magnitude == 2);

    // exact powers of ten stay exact
    u.tuples.resize(1000);
    g = coverage_gain(u, 1);
    CHECK(g.orders_of_magnitude == 3);

    u.tuples.resize(999);
    g = coverage_gain(u, 1);
    CHECK(g.orders_of_magnitude == 2);

    // zero originals guard
    u.tuples.resize(5);
    g = coverage_gain(u, 0);
    CHECK(g.factor == doctest::Approx(5.0));
}
