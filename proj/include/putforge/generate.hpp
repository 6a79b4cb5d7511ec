#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "putforge/capture.hpp"
#include "putforge/code_model.hpp"
#include "putforge/config.hpp"

namespace putforge {

struct PutGenerationPlan {
    std::string cut_id;
    std::size_t alpha = 0;  // qualifying targets (union strictly exceeds originals)
    std::size_t beta = 0;   // assertions in the CUT
    std::size_t expected_put_count = 0;
    std::vector<std::string> qualifying_targets;  // first-site order
};

/// A derived parameterized test: one kept assertion, one parameterized call
/// site, everything else from the CUT preserved in order.
struct PutSpec {
    std::string id;  // <cut>_PUT_<target-short>_<assertion-index>
    std::string cut_id;
    std::string target_id;
    std::size_t assertion_index = 0;
    std::size_t site_ordinal = 0;
    std::vector<ParamInfo> params;          // target params
    std::vector<std::string> param_names;   // chosen PUT parameter names
    std::string body;                       // rendered body (without outer braces)
    bool ill_formed_by_construction = false;
    std::string exclusion_reason;
};

struct ArgumentProvider {
    std::vector<std::string> put_ids;
    std::vector<CanonicalTuple> rows;   // unit originals first, then lexicographic
    std::vector<bool> original_flags;   // true exactly on a prefix
    std::size_t trimmed = 0;            // rows dropped by the provider cap
};

struct PutManifest {
    std::string put_id;
    std::string test_name;  // rendered TEST_CASE name (deterministically suffixed)
    std::size_t assertion_index = 0;
};

struct UnitManifest {
    std::string cut_id;
    std::string target_id;
    std::size_t site_ordinal = 0;  // which call site is parameterized
    std::string file;  // generated source, relative to the project copy
    std::vector<PutManifest> puts;
    std::vector<std::pair<std::string, std::string>> excluded;  // put id -> reason
    std::vector<CanonicalTuple> rows;
    std::vector<std::size_t> original_rows;  // indices (a prefix)
    std::vector<std::string> row_labels;
    std::size_t trimmed = 0;
};

struct GenerationManifest {
    std::vector<UnitManifest> units;
    std::vector<PutGenerationPlan> plans;
    std::size_t total_puts() const;
};

/// Per-(CUT, target) original tuples, source order.
using OriginalsByCutTarget = std::map<std::string, std::map<std::string, std::vector<CanonicalTuple>>>;

PutGenerationPlan make_plan(const TestCase& cut, const std::map<std::string, CaptureUnion>& unions,
                            const std::map<std::string, std::vector<CanonicalTuple>>& cut_originals);

/// Derives one PUT. `kept` may hold several assertion indexes (used when
/// merging finalized PUTs); single-assertion derivation passes one.
PutSpec derive_put(const TestCase& cut, const std::string& cut_source,
                   const TargetCallSite& site, const std::set<std::size_t>& kept,
                   const TargetMethod& target);

ArgumentProvider synthesize_provider(const std::vector<PutSpec>& puts, const CaptureUnion& u,
                                     const std::vector<CanonicalTuple>& unit_originals,
                                     long row_cap);

/// Renders one generated test unit (PUT functions + shared provider + TEST_CASE
/// wrappers), reusing the CUT file's preamble so the body compiles in the same
/// context as the original test.
std::string render_unit_source(const std::string& cut_file_source,
                               const std::vector<TestCase>& tests_in_file,
                               const std::vector<PutSpec>& puts,
                               const std::vector<std::string>& test_names,
                               const ArgumentProvider& provider);

std::string row_label(std::size_t index);

/// Runs planning, derivation, provider synthesis, and rendering for every CUT;
/// writes generated sources under <output_root>/generated-puts/.
GenerationManifest generate_project(const fs::path& project_root, const fs::path& output_root,
                                    const CodeModel& model,
                                    const std::map<std::string, CaptureUnion>& unions,
                                    const OriginalsByCutTarget& originals, const Config& config);

}  // namespace putforge
