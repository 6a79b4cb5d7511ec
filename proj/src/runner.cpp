#include "putforge/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstring>
#include <mutex>
#include <thread>

#include "putforge/error.hpp"
#include "putforge/instrument.hpp"
#include "putforge/subprocess.hpp"

namespace putforge {

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Pass: return "pass";
        case Outcome::Fail: return "fail";
        case Outcome::Error: return "error";
        case Outcome::Timeout: return "timeout";
    }
    return "error";
}

Outcome outcome_from_name(const std::string& name) {
    if (name == "pass") return Outcome::Pass;
    if (name == "fail") return Outcome::Fail;
    if (name == "timeout") return Outcome::Timeout;
    return Outcome::Error;
}

const char* category_name(Category c) {
    switch (c) {
        case Category::StronglyCoupled: return "strongly-coupled";
        case Category::Decoupled: return "decoupled";
        case Category::FalsifiablyCoupled: return "falsifiably-coupled";
        case Category::IllFormed: return "ill-formed";
    }
    return "ill-formed";
}

namespace {

// First run of integers on the line, e.g. "test cases:  1 |  1 passed | 0 failed"
std::vector<long> line_integers(const std::string& text, const char* label) {
    std::vector<long> out;
    const std::size_t pos = text.find(label);
    if (pos == std::string::npos) return out;
    std::size_t i = pos + std::strlen(label);
    const std::size_t eol = text.find('\n', pos);
    const std::size_t end = eol == std::string::npos ? text.size() : eol;
    while (i < end) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            long v = 0;
            while (i < end && std::isdigit(static_cast<unsigned char>(text[i]))) {
                v = v * 10 + (text[i] - '0');
                ++i;
            }
            out.push_back(v);
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace

Outcome interpret_cell_output(int exit_code, int signal, bool timed_out,
                              const std::string& output) {
    if (timed_out) return Outcome::Timeout;
    if (signal != 0) return Outcome::Error;
    const std::vector<long> cases = line_integers(output, "test cases:");
    const std::vector<long> assertions = line_integers(output, "assertions:");
    if (cases.size() < 3 || assertions.empty()) return Outcome::Error;  // no report at all
    const long run = cases[0];
    const long failed = cases[2];
    if (run == 0) return Outcome::Error;  // filter selected nothing
    if (failed > 0 || exit_code != 0) return Outcome::Fail;
    if (assertions[0] == 0) return Outcome::Error;  // row label matched no subcase
    return Outcome::Pass;
}

std::vector<Verdict> execute_cells(const fs::path& generated_root,
                                   const GenerationManifest& manifest, const Config& config,
                                   CellStats* stats) {
    if (config.put_command.empty())
        throw ConfigError("put_command is not configured (needed to execute cells)");
    const auto timeout = std::chrono::milliseconds(
        static_cast<long>(config.per_row_timeout_s * 1000.0));

    struct Job {
        const UnitManifest* unit;
        const PutManifest* put;
    };
    std::vector<Job> jobs;
    for (const UnitManifest& unit : manifest.units) {
        for (const PutManifest& put : unit.puts) jobs.push_back({&unit, &put});
    }

    std::vector<std::vector<Verdict>> results(jobs.size());
    CellStats local;
    CellStats& st = stats ? *stats : local;
    std::mutex stats_mutex;

    auto run_job = [&](std::size_t index) {
        const Job& job = jobs[index];
        std::vector<Verdict>& verdicts = results[index];
        for (std::size_t row = 0; row < job.unit->rows.size(); ++row) {
            const std::string cmd = expand_placeholders(
                config.put_command,
                {{"put", job.put->test_name}, {"row", job.unit->row_labels[row]}});
            Outcome outcome = Outcome::Error;
            int attempts = 0;
            while (true) {
                const CommandResult r = run_command(cmd, generated_root, {}, timeout);
                outcome = interpret_cell_output(r.exit_code, r.signal, r.timed_out, r.output);
                if (outcome == Outcome::Pass || attempts >= config.retries) break;
                ++attempts;
                std::lock_guard<std::mutex> lock(stats_mutex);
                ++st.retried;
            }
            verdicts.push_back({job.put->put_id, row, outcome});
            std::lock_guard<std::mutex> lock(stats_mutex);
            ++st.total;
            if (outcome == Outcome::Error) ++st.errors;
            if (outcome == Outcome::Timeout) ++st.timeouts;
        }
    };

    const int workers = std::max(1, config.parallel_puts);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= jobs.size()) return;
                    run_job(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    std::vector<Verdict> out;
    for (auto& v : results) {
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

Classification classify(const std::string& put_id, const std::vector<Outcome>& row_outcomes,
                        const std::set<std::size_t>& original_rows) {
    if (original_rows.empty())
        throw Error("classify: no original rows for " + put_id);
    const std::size_t n = row_outcomes.size();
    for (std::size_t r : original_rows) {
        if (r >= n) throw Error("classify: original row out of range for " + put_id);
    }

    Classification c;
    c.put_id = put_id;
    c.original_rows = original_rows;
    for (std::size_t i = 0; i < n; ++i) {
        if (row_outcomes[i] == Outcome::Pass) c.pass_rows.insert(i);
        if (row_outcomes[i] == Outcome::Error || row_outcomes[i] == Outcome::Timeout)
            c.had_error_cells = true;
    }

    const bool originals_all_pass = std::all_of(
        original_rows.begin(), original_rows.end(),
        [&](std::size_t r) { return c.pass_rows.count(r) > 0; });

    if (!originals_all_pass) {
        c.category = Category::IllFormed;
    } else if (c.pass_rows.size() == n) {
        c.category = Category::Decoupled;
    } else if (c.pass_rows == c.original_rows) {
        c.category = Category::StronglyCoupled;
    } else {
        c.category = Category::FalsifiablyCoupled;
    }
    return c;
}

std::vector<FinalizedPut> finalize_puts(const fs::path& project_root, const CodeModel& model,
                                        const GenerationManifest& manifest,
                                        const std::vector<Classification>& classifications,
                                        const fs::path& finalized_dir) {
    std::map<std::string, const Classification*> by_put;
    for (const Classification& c : classifications) by_put[c.put_id] = &c;

    std::set<std::string> taken_names;
    for (const TestCase& t : model.tests) taken_names.insert(t.id);
    std::set<std::string> taken_files;
    std::map<std::string, std::string> source_cache;

    std::vector<FinalizedPut> out;
    for (const UnitManifest& unit : manifest.units) {
        // group same-unit falsifiably-coupled PUTs by pruned provider
        std::map<std::vector<std::size_t>, std::vector<const PutManifest*>> groups;
        for (const PutManifest& put : unit.puts) {
            auto it = by_put.find(put.put_id);
            if (it == by_put.end() ||
                it->second->category != Category::FalsifiablyCoupled)
                continue;
            std::vector<std::size_t> kept(it->second->pass_rows.begin(),
                                          it->second->pass_rows.end());
            groups[kept].push_back(&put);
        }
        if (groups.empty()) continue;

        const TestCase* cut = nullptr;
        for (const TestCase& t : model.tests) {
            if (t.id == unit.cut_id) cut = &t;
        }
        const TargetMethod* target = model.find_target(unit.target_id);
        if (!cut || !target)
            throw Error("finalize: stale manifest for unit " + unit.cut_id + "/" +
                        unit.target_id);
        const TargetCallSite* site = nullptr;
        for (const TargetCallSite& s : cut->target_calls) {
            if (s.target_id == unit.target_id && s.site_ordinal == unit.site_ordinal) site = &s;
        }
        if (!site) throw Error("finalize: call site not found for " + unit.target_id);

        auto src_it = source_cache.find(cut->file);
        if (src_it == source_cache.end()) {
            src_it = source_cache.emplace(cut->file, read_file(project_root / cut->file)).first;
        }
        const std::string& source = src_it->second;

        for (const auto& [kept_rows, puts] : groups) {
            std::set<std::size_t> assertion_set;
            for (const PutManifest* p : puts) assertion_set.insert(p->assertion_index);
            PutSpec merged = derive_put(*cut, source, *site, assertion_set, *target);
            if (merged.ill_formed_by_construction)
                throw Error("finalize: merged PUT became ill-formed for " + unit.cut_id);
            merged.id = sanitize_identifier(cut->id) + "_PUT_" +
                        sanitize_identifier(target->short_name) + "_final";
            for (std::size_t a : assertion_set) merged.id += "_" + std::to_string(a);

            ArgumentProvider pruned;
            pruned.put_ids.push_back(merged.id);
            const std::set<std::size_t> original_set(unit.original_rows.begin(),
                                                     unit.original_rows.end());
            for (std::size_t row : kept_rows) {
                pruned.rows.push_back(unit.rows[row]);
                pruned.original_flags.push_back(original_set.count(row) > 0);
            }

            FinalizedPut fin;
            fin.cut_id = unit.cut_id;
            fin.target_id = unit.target_id;
            fin.kept_rows = kept_rows;
            fin.assertion_indexes.assign(assertion_set.begin(), assertion_set.end());
            for (const PutManifest* p : puts) fin.source_put_ids.push_back(p->put_id);
            fin.id = merged.id;
            fin.test_name = fin.id;
            {
                int n = 2;
                while (!taken_names.insert(fin.test_name).second)
                    fin.test_name = fin.id + "_" + std::to_string(n++);
            }
            std::string base = sanitize_identifier(cut->id) + "__" +
                               sanitize_identifier(target->short_name) + "_final";
            std::string file_base = base;
            int n = 2;
            while (!taken_files.insert(file_base).second)
                file_base = base + "_" + std::to_string(n++);
            fin.file = file_base + ".cpp";

            std::vector<TestCase> tests_in_file;
            for (const TestCase& t : model.tests) {
                if (t.file == cut->file) tests_in_file.push_back(t);
            }
            const std::string content = render_unit_source(source, tests_in_file, {merged},
                                                           {fin.test_name}, pruned);
            write_file(finalized_dir / fin.file, content);
            out.push_back(std::move(fin));
        }
    }
    return out;
}

void verify_finalized(const fs::path& project_root, const fs::path& finalized_dir,
                      std::vector<FinalizedPut>& finalized, const Config& config,
                      const fs::path& scratch_root) {
    if (finalized.empty()) return;
    AnalysisOptions options = config.analysis_options();
    auto copy_skip = [&](const fs::path& rel) {
        const std::string generic = rel.generic_string();
        if (!options.workspace_dir.empty() &&
            (generic == options.workspace_dir ||
             generic.rfind(options.workspace_dir + "/", 0) == 0))
            return true;
        for (const auto& part : rel) {
            const std::string p = part.string();
            if (p == "generated-puts" || p == "finalized-puts" ||
                (!p.empty() && p[0] == '.'))
                return true;
        }
        return false;
    };
    copy_tree(project_root, scratch_root, copy_skip);
    for (const FinalizedPut& fin : finalized) {
        const std::string content = read_file(finalized_dir / fin.file);
        write_file(scratch_root / "generated-puts" / fin.file, content);
    }
    build_subject(scratch_root, config);

    const auto timeout = std::chrono::milliseconds(
        static_cast<long>(config.per_row_timeout_s * 1000.0));
    for (FinalizedPut& fin : finalized) {
        bool all_pass = true;
        for (std::size_t i = 0; i < fin.kept_rows.size(); ++i) {
            const std::string cmd = expand_placeholders(
                config.put_command, {{"put", fin.test_name}, {"row", row_label(i)}});
            const CommandResult r = run_command(cmd, scratch_root, {}, timeout);
            if (interpret_cell_output(r.exit_code, r.signal, r.timed_out, r.output) !=
                Outcome::Pass) {
                all_pass = false;
                break;
            }
        }
        fin.verified = all_pass;
    }
}

Report summarize(const std::string& project_name,
                 const std::vector<Classification>& classifications,
                 const std::map<std::string, CaptureUnion>& unions,
                 const OriginalsByCutTarget& originals, const GenerationManifest& manifest,
                 const CellStats& cells, const ExclusionStats& excluded_calls) {
    Report report;
    report.project = project_name;
    report.cells = cells;
    report.excluded_calls = excluded_calls;
    report.puts_executed = classifications.size();
    for (const Classification& c : classifications) {
        switch (c.category) {
            case Category::StronglyCoupled: ++report.strongly_coupled; break;
            case Category::Decoupled: ++report.decoupled; break;
            case Category::FalsifiablyCoupled: ++report.falsifiably_coupled; break;
            case Category::IllFormed: ++report.ill_formed; break;
        }
    }
    for (const UnitManifest& unit : manifest.units) {
        report.excluded_by_construction += unit.excluded.size();
    }

    std::map<std::string, TargetReportRow> rows;
    for (const auto& [target_id, u] : unions) {
        TargetReportRow row;
        row.target_id = target_id;
        row.captured_args = u.tuples.size();

        std::set<std::string> original_keys;
        for (const auto& [cut_id, per_target] : originals) {
            auto it = per_target.find(target_id);
            if (it == per_target.end() || it->second.empty()) continue;
            ++row.cuts;
            for (const auto& t : it->second) original_keys.insert(tuple_key(t));
        }
        row.original_args = original_keys.size();
        const CoverageGain gain = coverage_gain(u, row.original_args);
        row.coverage_factor = gain.factor;
        row.orders_of_magnitude = gain.orders_of_magnitude;
        rows.emplace(target_id, std::move(row));
    }
    for (const UnitManifest& unit : manifest.units) {
        auto it = rows.find(unit.target_id);
        if (it != rows.end()) it->second.puts += unit.puts.size();
    }
    for (auto& [id, row] : rows) report.targets.push_back(std::move(row));
    return report;
}

}  // namespace putforge
