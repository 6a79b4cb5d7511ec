#include "putforge/generate.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "putforge/error.hpp"
#include "putforge/lexer.hpp"

namespace putforge {

namespace {

// Extends a statement span to the whole line when nothing but whitespace
// surrounds it, so deletions do not leave blank ruins behind.
std::pair<std::size_t, std::size_t> extend_to_line(const std::string& src, std::size_t begin,
                                                   std::size_t end) {
    std::size_t line_start = begin;
    while (line_start > 0 && src[line_start - 1] != '\n') --line_start;
    for (std::size_t i = line_start; i < begin; ++i) {
        if (!std::isspace(static_cast<unsigned char>(src[i]))) return {begin, end};
    }
    std::size_t line_end = end;
    while (line_end < src.size() && src[line_end] != '\n') {
        if (!std::isspace(static_cast<unsigned char>(src[line_end]))) return {begin, end};
        ++line_end;
    }
    if (line_end < src.size()) ++line_end;  // the newline itself
    return {line_start, line_end};
}

struct Edit {
    std::size_t begin;
    std::size_t end;
    std::string replacement;
};

std::string apply_edits(std::string text, std::vector<Edit> edits, std::size_t base) {
    for (auto& e : edits) {
        e.begin -= base;
        e.end -= base;
    }
    std::sort(edits.begin(), edits.end(),
              [](const Edit& a, const Edit& b) { return a.begin > b.begin; });
    for (const Edit& e : edits) {
        text.replace(e.begin, e.end - e.begin, e.replacement);
    }
    return text;
}

std::vector<std::string> choose_param_names(const TargetMethod& target,
                                            const std::string& body_text) {
    std::unordered_set<std::string> used;
    for (const Token& t : tokenize(body_text, "<body>")) {
        if (t.kind == TokenKind::Ident) used.emplace(t.text(body_text));
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < target.params.size(); ++i) {
        std::string cand = sanitize_identifier(target.params[i].name);
        if (target.params[i].name.empty() || is_cpp_keyword(cand) || used.count(cand)) {
            cand = "p" + std::to_string(i + 1);
        }
        while (used.count(cand) || is_cpp_keyword(cand)) cand = "pf_" + cand;
        used.insert(cand);
        names.push_back(cand);
    }
    return names;
}

}  // namespace

std::size_t GenerationManifest::total_puts() const {
    std::size_t n = 0;
    for (const auto& u : units) n += u.puts.size();
    return n;
}

std::string row_label(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "row/%04zu", index);
    return buf;
}

PutGenerationPlan make_plan(const TestCase& cut, const std::map<std::string, CaptureUnion>& unions,
                            const std::map<std::string, std::vector<CanonicalTuple>>& cut_originals) {
    PutGenerationPlan plan;
    plan.cut_id = cut.id;
    plan.beta = cut.assertions.size();

    std::set<std::string> seen;
    for (const TargetCallSite& site : cut.target_calls) {
        if (!seen.insert(site.target_id).second) continue;
        const auto orig_it = cut_originals.find(site.target_id);
        if (orig_it == cut_originals.end() || orig_it->second.empty()) continue;
        const auto union_it = unions.find(site.target_id);
        if (union_it == unions.end()) continue;
        // qualifies only when the union strictly exceeds the CUT's originals
        std::set<std::string> orig_keys;
        for (const auto& t : orig_it->second) orig_keys.insert(tuple_key(t));
        bool exceeds = false;
        for (const auto& t : union_it->second.tuples) {
            if (!orig_keys.count(tuple_key(t))) {
                exceeds = true;
                break;
            }
        }
        if (exceeds) plan.qualifying_targets.push_back(site.target_id);
    }
    plan.alpha = plan.qualifying_targets.size();
    plan.expected_put_count = plan.alpha * plan.beta;
    return plan;
}

PutSpec derive_put(const TestCase& cut, const std::string& cut_source,
                   const TargetCallSite& site, const std::set<std::size_t>& kept,
                   const TargetMethod& target) {
    PutSpec put;
    put.cut_id = cut.id;
    put.target_id = target.id;
    put.site_ordinal = site.site_ordinal;
    put.assertion_index = kept.empty() ? 0 : *kept.begin();
    put.params = target.params;

    std::string id = sanitize_identifier(cut.id) + "_PUT_" +
                     sanitize_identifier(target.short_name);
    if (site.site_ordinal > 0) id += "_site" + std::to_string(site.site_ordinal);
    for (std::size_t k : kept) id += "_" + std::to_string(k);
    put.id = id;

    const std::string body_text =
        cut_source.substr(cut.body_begin, cut.body_end - cut.body_begin);
    put.param_names = choose_param_names(target, body_text);

    std::vector<Edit> edits;
    for (const AssertionSite& a : cut.assertions) {
        if (kept.count(a.index)) continue;
        if (site.begin >= a.begin && site.end <= a.end) {
            put.ill_formed_by_construction = true;
            put.exclusion_reason = "parameterized call site sits inside deleted assertion #" +
                                   std::to_string(a.index);
            return put;
        }
        auto [lo, hi] = extend_to_line(cut_source, a.begin, a.end);
        edits.push_back({lo, hi, ""});
    }
    for (std::size_t i = 0; i < site.args.size(); ++i) {
        edits.push_back({site.args[i].begin, site.args[i].end, put.param_names[i]});
    }
    put.body = apply_edits(body_text, std::move(edits), cut.body_begin);
    return put;
}

ArgumentProvider synthesize_provider(const std::vector<PutSpec>& puts, const CaptureUnion& u,
                                     const std::vector<CanonicalTuple>& unit_originals,
                                     long row_cap) {
    if (u.tuples.empty())
        throw Error("empty argument union for target " + u.target_id);
    ArgumentProvider provider;
    for (const PutSpec& p : puts) provider.put_ids.push_back(p.id);

    std::set<std::string> orig_keys;
    for (const CanonicalTuple& t : unit_originals) {
        const std::string key = tuple_key(t);
        if (!orig_keys.insert(key).second) continue;
        provider.rows.push_back(t);
        provider.original_flags.push_back(true);
    }
    std::vector<std::pair<std::string, const CanonicalTuple*>> rest;
    for (const CanonicalTuple& t : u.tuples) {
        const std::string key = tuple_key(t);
        if (orig_keys.count(key)) continue;
        rest.push_back({key, &t});
    }
    std::sort(rest.begin(), rest.end());
    const std::size_t cap = static_cast<std::size_t>(std::max<long>(row_cap, 1));
    for (const auto& [key, tuple] : rest) {
        if (provider.rows.size() >= cap) {
            ++provider.trimmed;
            continue;
        }
        provider.rows.push_back(*tuple);
        provider.original_flags.push_back(false);
    }
    return provider;
}

namespace {

std::string strip_config_defines(const std::string& text) {
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string_view line(text.data() + pos, eol - pos);
        std::string_view trimmed = line;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front())))
            trimmed.remove_prefix(1);
        if (trimmed.rfind("#define DOCTEST_CONFIG", 0) != 0) {
            out.append(line);
            out += '\n';
        }
        pos = eol + 1;
    }
    return out;
}

}  // namespace

std::string render_unit_source(const std::string& cut_file_source,
                               const std::vector<TestCase>& tests_in_file,
                               const std::vector<PutSpec>& puts,
                               const std::vector<std::string>& test_names,
                               const ArgumentProvider& provider) {
    if (puts.empty()) throw Error("render called with no parameterized tests");
    // preamble: the original file minus its test blocks and config defines
    std::string preamble = cut_file_source;
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (const TestCase& t : tests_in_file) {
        spans.push_back(extend_to_line(cut_file_source, t.span_begin, t.span_end));
    }
    std::sort(spans.begin(), spans.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (auto [lo, hi] : spans) preamble.erase(lo, hi - lo);
    preamble = strip_config_defines(preamble);

    const std::vector<ParamInfo>& params = puts.front().params;
    std::string tuple_type = "std::tuple<";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) tuple_type += ", ";
        tuple_type += cpp_value_type(params[i].kind);
    }
    tuple_type += ">";

    std::string out = preamble;
    out += "\n";
    out += "#include <bit>\n#include <cstdint>\n#include <cstdio>\n#include <optional>\n"
           "#include <string>\n#include <tuple>\n#include <vector>\n\n";
    out += "namespace {\n\n";
    out += "using pf_row_type = " + tuple_type + ";\n\n";
    out += "const std::vector<pf_row_type>& pf_provider() {\n";
    out += "    static const std::vector<pf_row_type> rows = {\n";
    for (const CanonicalTuple& row : provider.rows) {
        out += "        {";
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ", ";
            out += render_cpp_value(params[i].kind, row[i]);
        }
        out += "},\n";
    }
    out += "    };\n    return rows;\n}\n\n";
    out += "std::string pf_row_label(std::size_t i) {\n"
           "    char buf[32];\n"
           "    std::snprintf(buf, sizeof buf, \"row/%04zu\", i);\n"
           "    return buf;\n}\n\n";
    out += "}  // namespace\n";

    for (std::size_t p = 0; p < puts.size(); ++p) {
        const PutSpec& put = puts[p];
        const std::string fn = "pf_put_" + sanitize_identifier(test_names[p]);
        out += "\nstatic void " + fn + "(";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) out += ", ";
            out += params[i].type_text + " " + put.param_names[i];
        }
        out += ") {";
        out += put.body;
        out += "}\n\n";
        out += "TEST_CASE(\"" + test_names[p] + "\") {\n";
        out += "    const auto& pf_rows = pf_provider();\n";
        out += "    for (std::size_t pf_i = 0; pf_i < pf_rows.size(); ++pf_i) {\n";
        out += "        SUBCASE(pf_row_label(pf_i).c_str()) {\n";
        out += "            std::apply(" + fn + ", pf_rows[pf_i]);\n";
        out += "        }\n";
        out += "    }\n";
        out += "}\n";
    }
    return out;
}

GenerationManifest generate_project(const fs::path& project_root, const fs::path& output_root,
                                    const CodeModel& model,
                                    const std::map<std::string, CaptureUnion>& unions,
                                    const OriginalsByCutTarget& originals, const Config& config) {
    GenerationManifest manifest;

    std::set<std::string> taken_names;
    for (const TestCase& t : model.tests) taken_names.insert(t.id);
    std::set<std::string> taken_files;
    std::map<std::string, std::string> source_cache;
    auto source_of = [&](const std::string& file) -> const std::string& {
        auto it = source_cache.find(file);
        if (it == source_cache.end()) {
            it = source_cache.emplace(file, read_file(project_root / file)).first;
        }
        return it->second;
    };
    auto unique_name = [](std::set<std::string>& taken, std::string base) {
        std::string name = base;
        int n = 2;
        while (!taken.insert(name).second) {
            name = base + "_" + std::to_string(n++);
        }
        return name;
    };

    for (const TestCase& cut : model.tests) {
        static const std::map<std::string, std::vector<CanonicalTuple>> kNone;
        const auto cut_it = originals.find(cut.id);
        const auto& cut_originals = cut_it == originals.end() ? kNone : cut_it->second;
        PutGenerationPlan plan = make_plan(cut, unions, cut_originals);
        manifest.plans.push_back(plan);
        if (plan.expected_put_count == 0) continue;

        for (const std::string& target_id : plan.qualifying_targets) {
            const TargetMethod* target = model.find_target(target_id);
            if (!target) continue;
            std::vector<const TargetCallSite*> sites;
            for (const TargetCallSite& s : cut.target_calls) {
                if (s.target_id != target_id) continue;
                if (s.site_ordinal == 0 || config.per_site_variants) sites.push_back(&s);
            }
            for (const TargetCallSite* site : sites) {
                // a site variant parameterizes its own call site, so its
                // original tuple must come from that site's literals
                std::vector<CanonicalTuple> unit_originals;
                if (site->site_ordinal == 0) {
                    unit_originals = cut_originals.at(target_id);
                } else {
                    auto site_tuple = resolve_original_arguments(*site, *target);
                    if (!site_tuple) continue;  // no recoverable original for this site
                    unit_originals.push_back(std::move(*site_tuple));
                }

                std::vector<PutSpec> well_formed;
                std::vector<std::pair<std::string, std::string>> excluded;
                for (const AssertionSite& a : cut.assertions) {
                    PutSpec put =
                        derive_put(cut, source_of(cut.file), *site, {a.index}, *target);
                    if (put.ill_formed_by_construction) {
                        excluded.push_back({put.id, put.exclusion_reason});
                    } else {
                        well_formed.push_back(std::move(put));
                    }
                }
                if (well_formed.empty() && excluded.empty()) continue;

                UnitManifest unit;
                unit.cut_id = cut.id;
                unit.target_id = target_id;
                unit.site_ordinal = site->site_ordinal;
                unit.excluded = std::move(excluded);

                if (!well_formed.empty()) {
                    ArgumentProvider provider =
                        synthesize_provider(well_formed, unions.at(target_id), unit_originals,
                                            config.provider_row_cap);
                    std::vector<std::string> names;
                    for (const PutSpec& p : well_formed) {
                        names.push_back(unique_name(taken_names, p.id));
                    }
                    std::string base = "generated-puts/" + sanitize_identifier(cut.id) + "__" +
                                       sanitize_identifier(target->short_name);
                    if (site->site_ordinal > 0)
                        base += "_site" + std::to_string(site->site_ordinal);
                    unit.file = unique_name(taken_files, base) + ".cpp";

                    std::vector<TestCase> tests_in_file;
                    for (const TestCase& t : model.tests) {
                        if (t.file == cut.file) tests_in_file.push_back(t);
                    }
                    const std::string content = render_unit_source(
                        source_of(cut.file), tests_in_file, well_formed, names, provider);
                    write_file(output_root / unit.file, content);

                    for (std::size_t i = 0; i < well_formed.size(); ++i) {
                        unit.puts.push_back(
                            {well_formed[i].id, names[i], well_formed[i].assertion_index});
                    }
                    unit.rows = provider.rows;
                    for (std::size_t i = 0; i < provider.original_flags.size(); ++i) {
                        if (provider.original_flags[i]) unit.original_rows.push_back(i);
                    }
                    for (std::size_t i = 0; i < provider.rows.size(); ++i) {
                        unit.row_labels.push_back(row_label(i));
                    }
                    unit.trimmed = provider.trimmed;
                }
                manifest.units.push_back(std::move(unit));
            }
        }
    }
    return manifest;
}

}  // namespace putforge
