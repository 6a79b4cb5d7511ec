#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "putforge/fs_util.hpp"
#include "putforge/scalar.hpp"

namespace putforge {

struct ParamInfo {
    std::string type_text;  // declared type, verbatim token join
    std::string name;       // may be empty (unnamed in the definition)
    ScalarKind kind;
};

/// A project-local callable whose parameters are all capturable scalars and
/// which is directly invoked by at least one test.
struct TargetMethod {
    std::string id;              // qualified name + "(" + kind tags + ")"
    std::string qualified_name;  // Namespace::Class::method
    std::string short_name;      // method / function / class (for ctors) name
    std::vector<ParamInfo> params;
    std::string file;            // definition file, relative to project root
    std::size_t span_begin = 0;  // definition span (declarator through body)
    std::size_t span_end = 0;
    std::size_t body_lbrace = 0;  // byte offset of the body's '{'
    bool is_member = false;
    bool is_ctor = false;
};

struct AssertionSite {
    std::size_t index = 0;  // 0-based, dense, source order
    std::size_t begin = 0;  // statement span, includes trailing ';' when present
    std::size_t end = 0;
    std::string text;       // verbatim bytes of the span
    bool flagged = false;   // inside a loop/conditional
    std::string macro;      // the allow-listed name that matched
};

struct ArgExpr {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::string text;
};

struct TargetCallSite {
    std::string target_id;
    std::size_t begin = 0;  // call-name token through closing ')'
    std::size_t end = 0;
    std::vector<ArgExpr> args;
    std::optional<CanonicalTuple> static_tuple;  // present iff all args are literals
    bool member_call = false;
    std::size_t site_ordinal = 0;  // per (test, target), lexical order
};

struct Statement {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct TestCase {
    std::string id;  // framework test name
    std::string file;
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
    std::size_t body_begin = 0;  // first byte after the body '{'
    std::size_t body_end = 0;    // byte offset of the body '}'
    std::vector<Statement> statements;  // top-level statements
    std::vector<AssertionSite> assertions;
    std::vector<TargetCallSite> target_calls;
};

/// Why call expressions were not selected as target call sites.
struct ExclusionStats {
    std::size_t unresolved = 0;       // name not found in the project index
    std::size_t non_scalar = 0;       // resolved, but parameters outside the kind set
    std::size_t no_definition = 0;    // declared but never defined in-project
    std::size_t zero_params = 0;
    std::size_t default_args = 0;
    std::size_t arity_mismatch = 0;
    std::size_t ambiguous = 0;        // overload not distinguishable at the site
    std::size_t in_lambda = 0;        // inside a closure defined in the test body

    std::size_t total() const {
        return unresolved + non_scalar + no_definition + zero_params + default_args +
               arity_mismatch + ambiguous + in_lambda;
    }
};

struct AnalysisOptions {
    std::vector<std::string> test_macros = {"TEST_CASE"};
    std::vector<std::string> assertion_macros;  // allow-list, adapter default if empty
    std::vector<std::string> exclude_paths;     // relative path prefixes or basenames
    std::string workspace_dir;                  // always skipped when non-empty
};

struct CodeModel {
    std::vector<TargetMethod> targets;  // sorted by id
    std::vector<TestCase> tests;        // sorted by (file, position)
    ExclusionStats excluded;

    const TargetMethod* find_target(const std::string& id) const;
};

/// Parses the subject project and returns tests with populated assertion and
/// target-call-site lists plus the referenced eligible targets.
/// Throws ParseError for files it cannot scan.
CodeModel analyze_project(const fs::path& project_root, const AnalysisOptions& options);

/// Canonical tuple for a call site whose arguments are all literals of the
/// declared kinds; nullopt when any argument is not a foldable literal.
/// Throws EncodingError for literals that do not fit the declared kind.
std::optional<CanonicalTuple> resolve_original_arguments(const TargetCallSite& site,
                                                         const TargetMethod& target);

/// True when `rel` matches one of the exclusion entries (path prefix or
/// basename) or lives under the workspace directory.
bool path_excluded(const fs::path& rel, const AnalysisOptions& options);

std::string sanitize_identifier(std::string_view text);

}  // namespace putforge
