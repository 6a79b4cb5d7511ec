#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "putforge/code_model.hpp"
#include "putforge/config.hpp"
#include "putforge/generate.hpp"

namespace putforge {

enum class Outcome { Pass, Fail, Error, Timeout };

const char* outcome_name(Outcome o);
Outcome outcome_from_name(const std::string& name);

struct Verdict {
    std::string put_id;
    std::size_t row = 0;
    Outcome outcome = Outcome::Error;
};

struct CellStats {
    std::size_t total = 0;
    std::size_t errors = 0;
    std::size_t timeouts = 0;
    std::size_t retried = 0;
};

/// Parses one doctest cell run (exit status + console output) into an outcome.
/// A run that selected no test case or executed no assertion is an infrastructure
/// error, distinguishable from an assertion failure.
Outcome interpret_cell_output(int exit_code, int signal, bool timed_out,
                              const std::string& output);

/// Executes every (PUT, row) cell of the manifest inside the generated project
/// copy. Rows of one PUT run sequentially in provider order; PUTs run in
/// parallel when config.parallel_puts > 1. Each cell is a fresh process.
std::vector<Verdict> execute_cells(const fs::path& generated_root,
                                   const GenerationManifest& manifest, const Config& config,
                                   CellStats* stats = nullptr);

enum class Category { StronglyCoupled, Decoupled, FalsifiablyCoupled, IllFormed };

const char* category_name(Category c);

struct Classification {
    std::string put_id;
    Category category = Category::IllFormed;
    std::set<std::size_t> pass_rows;
    std::set<std::size_t> original_rows;
    bool had_error_cells = false;  // error/timeout outcomes seen (reported separately)
};

/// The four-way taxonomy, evaluated in order: ill-formed, decoupled,
/// strongly-coupled, falsifiably-coupled. fail/error/timeout all count as
/// not-pass. Throws Error when original rows are missing/out of range or a
/// verdict is absent.
Classification classify(const std::string& put_id, const std::vector<Outcome>& row_outcomes,
                        const std::set<std::size_t>& original_rows);

struct FinalizedPut {
    std::string id;
    std::string test_name;
    std::string file;  // under finalized-puts/
    std::string cut_id;
    std::string target_id;
    std::vector<std::string> source_put_ids;
    std::vector<std::size_t> assertion_indexes;
    std::vector<std::size_t> kept_rows;  // indices into the unit provider
    bool verified = false;               // re-run all green
};

/// Prunes each falsifiably-coupled PUT's provider to its passing rows and
/// merges same-unit PUTs whose pruned providers are identical into one
/// multi-assertion PUT. Renders the results under <workspace>/finalized-puts/.
std::vector<FinalizedPut> finalize_puts(const fs::path& project_root, const CodeModel& model,
                                        const GenerationManifest& manifest,
                                        const std::vector<Classification>& classifications,
                                        const fs::path& finalized_dir);

/// Re-runs finalized PUTs in a scratch copy of the project; sets `verified`.
void verify_finalized(const fs::path& project_root, const fs::path& finalized_dir,
                      std::vector<FinalizedPut>& finalized, const Config& config,
                      const fs::path& scratch_root);

struct TargetReportRow {
    std::string target_id;
    std::size_t cuts = 0;
    std::size_t original_args = 0;
    std::size_t captured_args = 0;  // union size
    std::size_t puts = 0;
    double coverage_factor = 0.0;
    int orders_of_magnitude = 0;
};

struct Report {
    std::string project;
    std::size_t puts_executed = 0;
    std::size_t ill_formed = 0;
    std::size_t strongly_coupled = 0;
    std::size_t falsifiably_coupled = 0;
    std::size_t decoupled = 0;
    CellStats cells;
    std::vector<TargetReportRow> targets;
    std::vector<FinalizedPut> finalized;
    std::size_t excluded_by_construction = 0;
    ExclusionStats excluded_calls;

    std::size_t categorized_total() const {
        return strongly_coupled + falsifiably_coupled + decoupled;
    }
};

Report summarize(const std::string& project_name,
                 const std::vector<Classification>& classifications,
                 const std::map<std::string, CaptureUnion>& unions,
                 const OriginalsByCutTarget& originals, const GenerationManifest& manifest,
                 const CellStats& cells, const ExclusionStats& excluded_calls);

}  // namespace putforge
