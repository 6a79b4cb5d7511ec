#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "putforge/fs_util.hpp"
#include "putforge/scalar.hpp"

namespace putforge {

enum class CaptureContext { Test, Field };

inline const char* context_name(CaptureContext c) {
    return c == CaptureContext::Test ? "test" : "field";
}

/// One runtime invocation of an instrumented target.
struct CaptureRecord {
    std::string target_id;
    CanonicalTuple tuple;
    CaptureContext context = CaptureContext::Test;
    std::optional<std::string> test_id;
    std::uint64_t seq = 0;
};

struct LoadDiagnostics {
    bool truncated_tail = false;
    std::vector<std::string> rejected;  // per-record messages (line numbers included)
};

/// Loads a JSON-Lines capture log. Records whose arity or kinds do not match
/// the expected signature are rejected with a diagnostic; a truncated final
/// line is skipped with a warning flag. Throws Error if the file is unreadable.
std::vector<CaptureRecord> load_capture_log(
    const fs::path& log_path,
    const std::map<std::string, std::vector<ScalarKind>>& target_kinds,
    LoadDiagnostics* diagnostics = nullptr);

struct ProvenanceFlags {
    bool test = false;
    bool field = false;
    bool original = false;

    bool operator==(const ProvenanceFlags&) const = default;
};

/// The deduplicated argument union U(m) for one target, ordered originals
/// first (source order) and then remaining tuples lexicographically by
/// canonical dedup key.
struct CaptureUnion {
    std::string target_id;
    std::vector<CanonicalTuple> tuples;
    std::vector<ProvenanceFlags> provenance;  // parallel to tuples
    std::size_t original_count = 0;           // prefix length

    std::optional<std::size_t> index_of(const CanonicalTuple& tuple) const;
};

/// Builds per-target unions: dedup(records) ∪ originals, with provenance
/// reflecting every source a tuple was seen in. Originals absent from the
/// records are injected with provenance {original}. Tuples containing the
/// unserializable marker are dropped (counted via `skipped_markers`).
std::map<std::string, CaptureUnion> build_union(
    const std::vector<CaptureRecord>& records,
    const std::map<std::string, std::vector<CanonicalTuple>>& originals,
    std::size_t* skipped_markers = nullptr);

struct CoverageGain {
    std::size_t original_count = 0;
    std::size_t union_count = 0;
    double factor = 0.0;
    int orders_of_magnitude = 0;
};

CoverageGain coverage_gain(const CaptureUnion& u, std::size_t original_count);

}  // namespace putforge
