#include "putforge/instrument.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "putforge/error.hpp"
#include "putforge/subprocess.hpp"

namespace putforge {

namespace {

// Pieces of the generated emitter. Everything lives inside one compound
// statement so that target files change in exactly one contiguous span, and
// everything resolves without headers: libc symbols are bound with asm labels
// and the process-wide sequence counter is a linker-merged common symbol.
const char* kEmitterPrelude =
    "extern char* pf9_getenv(const char*) __asm__(\"getenv\"); "
    "extern int pf9_open(const char*, int, int) __asm__(\"open\"); "
    "extern long pf9_write(int, const void*, unsigned long) __asm__(\"write\"); "
    "extern int pf9_close(int) __asm__(\"close\"); "
    "extern void* pf9_malloc(unsigned long) __asm__(\"malloc\"); "
    "extern void* pf9_realloc(void*, unsigned long) __asm__(\"realloc\"); "
    "extern void pf9_free(void*) __asm__(\"free\"); "
    "__asm__(\".comm putforge_seq_v1,8,8\"); "
    "extern unsigned long pf9_seq __asm__(\"putforge_seq_v1\"); "
    "const char* pf9_sink = pf9_getenv(\"PUTFORGE_SINK\"); "
    "if (pf9_sink && *pf9_sink) { "
    "unsigned long pf9_n = __atomic_fetch_add(&pf9_seq, 1ul, 5); "
    "struct Pf9Buf { "
    "char* d; unsigned long n; unsigned long c; void* (*re)(void*, unsigned long); "
    "void ch(char x) { if (n + 1 >= c) { c = c * 2 + 64; d = (char*)re(d, c); } d[n++] = x; } "
    "void s(const char* p) { while (*p) ch(*p++); } "
    "void dec(unsigned long long v) { char t[24]; int i = 0; if (!v) t[i++] = '0'; "
    "while (v) { t[i++] = (char)('0' + (int)(v % 10)); v /= 10; } while (i) ch(t[--i]); } "
    "void sdec(long long v) { if (v < 0) { ch('-'); dec((unsigned long long)(-(v + 1)) + 1ull); } "
    "else dec((unsigned long long)v); } "
    "void hx(unsigned long long v, int w) { const char* h = \"0123456789abcdef\"; "
    "for (int i = w - 1; i >= 0; --i) ch(h[(v >> (4 * i)) & 0xf]); } "
    // jt: canonical text escaping fused with JSON string escaping, emitted
    // with numeric codes to stay clear of nested literal escapes
    "void jt(const char* p, unsigned long k) { const char* h = \"0123456789abcdef\"; "
    "for (unsigned long i = 0; i < k; ++i) { unsigned char b = (unsigned char)p[i]; "
    "if (b == 34) { ch(92); ch(92); ch(92); ch(34); } "
    "else if (b == 92) { ch(92); ch(92); ch(92); ch(92); } "
    "else if (b == 10) { ch(92); ch(92); ch(110); } "
    "else if (b == 13) { ch(92); ch(92); ch(114); } "
    "else if (b == 9) { ch(92); ch(92); ch(116); } "
    "else if (b < 32 || b > 126) { ch(92); ch(92); ch(117); ch(48); ch(48); "
    "ch(h[b >> 4]); ch(h[b & 15]); } "
    "else ch((char)b); } } "
    "} pf9_b{(char*)pf9_malloc(128), 0, 128, pf9_realloc}; ";

const char* kEmitterFinish =
    "const char* pf9_ctx = pf9_getenv(\"PUTFORGE_CONTEXT\"); "
    "pf9_b.s(\"],\\\"c\\\":\\\"\"); "
    "pf9_b.s((pf9_ctx && pf9_ctx[0] == 't') ? \"test\" : \"field\"); "
    "pf9_b.s(\"\\\",\\\"id\\\":\"); "
    "const char* pf9_tid = pf9_getenv(\"PUTFORGE_TEST_ID\"); "
    "if (pf9_tid && *pf9_tid) { unsigned long pf9_tl = 0; while (pf9_tid[pf9_tl]) ++pf9_tl; "
    "pf9_b.ch(34); pf9_b.jt(pf9_tid, pf9_tl); pf9_b.ch(34); } else pf9_b.s(\"null\"); "
    "pf9_b.s(\",\\\"n\\\":\"); pf9_b.dec(pf9_n); pf9_b.ch(125); pf9_b.ch(10); "
    // O_WRONLY|O_CREAT|O_APPEND|O_CLOEXEC, mode 0644
    "int pf9_fd = pf9_open(pf9_sink, 525377, 420); "
    "if (pf9_fd >= 0) { pf9_write(pf9_fd, pf9_b.d, pf9_b.n); pf9_close(pf9_fd); } "
    "} pf9_free(pf9_b.d); } }";

// leading '"' of an array element, JSON-escaped into the record line
const char* kQuote = "pf9_b.ch(34); ";

std::string param_emitter(const ParamInfo& param) {
    const std::string name = "(" + param.name + ")";
    std::string out;
    switch (param.kind.type) {
        case ScalarType::Boolean:
            out += "pf9_b.s(" + name + " ? \"true\" : \"false\"); ";
            break;
        case ScalarType::Integer: {
            out += "pf9_b.s(\"" + param.kind.tag() + ":\"); ";
            if (param.kind.is_signed) {
                out += "pf9_b.sdec((long long)" + name + "); ";
            } else {
                out += "pf9_b.dec((unsigned long long)" + name + "); ";
            }
            break;
        }
        case ScalarType::Float:
            if (param.kind.width == 32) {
                out += "pf9_b.s(\"f32:\"); pf9_b.hx((unsigned long long)__builtin_bit_cast("
                       "unsigned int, (float)" + name + "), 8); ";
            } else {
                out += "pf9_b.s(\"f64:\"); pf9_b.hx(__builtin_bit_cast(unsigned long long, "
                       "(double)" + name + "), 16); ";
            }
            break;
        case ScalarType::Character:
            out += "pf9_b.s(\"c:\"); pf9_b.dec((unsigned long long)(unsigned char)" + name +
                   "); ";
            break;
        case ScalarType::Text:
            out += "pf9_b.s(\"s:\"); pf9_b.jt(" + name + ".data(), (unsigned long)" + name +
                   ".size()); ";
            break;
        case ScalarType::NullableText:
            out += "if (" + param.name + ") { pf9_b.s(\"s:\"); pf9_b.jt((*" + param.name +
                   ").data(), (unsigned long)(*" + param.name + ").size()); } "
                   "else pf9_b.s(\"nil\"); ";
            break;
    }
    return out;
}

}  // namespace

namespace {

// Per-target invocation counter: a linker-merged common symbol named from a
// hash of the target id, so every definition of the same target shares one
// counter without any header support.
std::string counter_symbol(const std::string& target_id) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : target_id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("putforge_cnt_") + buf;
}

}  // namespace

std::string emitter_statement(const TargetMethod& target, long max_records) {
    for (const ParamInfo& p : target.params) {
        if (p.name.empty())
            throw Error("target " + target.id +
                        " has an unnamed parameter; cannot instrument its definition");
    }
    const std::string counter = counter_symbol(target.id);
    std::string out = " { /*putforge:emit*/ ";
    out += kEmitterPrelude;
    out += "__asm__(\".comm " + counter + ",8,8\"); "
           "extern unsigned long pf9_cnt __asm__(\"" + counter + "\"); "
           "if (__atomic_add_fetch(&pf9_cnt, 1ul, 5) <= " +
           std::to_string(max_records) + "ul) { ";
    out += "pf9_b.s(\"{\\\"t\\\":\\\"\"); pf9_b.s(\"" + target.id + "\"); "
           "pf9_b.s(\"\\\",\\\"a\\\":[\"); ";
    for (std::size_t i = 0; i < target.params.size(); ++i) {
        if (i) out += "pf9_b.ch(44); ";  // ','
        out += kQuote;
        out += param_emitter(target.params[i]);
        out += kQuote;
    }
    out += kEmitterFinish;
    return out;
}

InstrumentationResult instrument(const fs::path& project_root, const CodeModel& model,
                                 const InstrumentationPlan& plan,
                                 const AnalysisOptions& options) {
    std::error_code ec;
    if (fs::equivalent(project_root, plan.output_root, ec))
        throw ConfigError("instrumentation output must differ from the project root");
    if (fs::exists(plan.output_root))
        throw Error("write conflict: output root already exists: " + plan.output_root.string());

    // resolve every planned target before touching the filesystem
    std::map<std::string, std::vector<const TargetMethod*>> by_file;
    for (const std::string& id : plan.target_ids) {
        const TargetMethod* t = model.find_target(id);
        if (!t) throw Error("target declaration not found: " + id);
        by_file[t->file].push_back(t);
    }

    // the copy keeps everything the subject needs to build; only artifact
    // directories and dot-entries stay behind
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
    copy_tree(project_root, plan.output_root, copy_skip);

    InstrumentationResult result;
    for (auto& [file, targets] : by_file) {
        const fs::path path = plan.output_root / file;
        std::string bytes = read_file(path);
        std::sort(targets.begin(), targets.end(),
                  [](const TargetMethod* a, const TargetMethod* b) {
                      return a->body_lbrace > b->body_lbrace;  // rewrite back to front
                  });
        for (const TargetMethod* t : targets) {
            if (t->body_lbrace >= bytes.size() || bytes[t->body_lbrace] != '{')
                throw Error("stale model: body brace not found for " + t->id + " in " + file);
            const std::string stmt = emitter_statement(*t, plan.max_records_per_target);
            bytes.insert(t->body_lbrace + 1, stmt);
            result.inserted.push_back({file, t->body_lbrace + 1, stmt.size()});
        }
        write_file(path, bytes);
        ++result.files_rewritten;
    }
    std::sort(result.inserted.begin(), result.inserted.end(),
              [](const InsertedSpan& a, const InsertedSpan& b) {
                  return a.file != b.file ? a.file < b.file : a.offset < b.offset;
              });
    return result;
}

void build_subject(const fs::path& root, const Config& config) {
    if (config.build_command.empty()) return;
    const CommandResult r = run_command(config.build_command, root);
    if (!r.ok()) {
        throw SubjectBuildError("subject build failed in " + root.string() +
                                    " (command: " + config.build_command + ")",
                                r.output);
    }
}

namespace {

std::size_t count_lines(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return 0;
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

}  // namespace

CaptureRunSummary run_captured(const fs::path& root, CaptureContext mode, const Config& config,
                               const std::vector<std::string>& test_ids, const fs::path& sink) {
    CaptureRunSummary summary;
    summary.mode = mode;
    const std::size_t before = fs::exists(sink) ? count_lines(sink) : 0;

    std::vector<std::pair<std::string, std::string>> env = {
        {"PUTFORGE_SINK", fs::absolute(sink).string()},
        {"PUTFORGE_CONTEXT", context_name(mode)},
    };

    if (mode == CaptureContext::Field) {
        if (config.workload_command.empty())
            throw ConfigError("workload_command is not configured");
        const CommandResult r = run_command(config.workload_command, root, env);
        if (!r.ok()) {
            summary.command_failed = true;
            summary.warnings.push_back("workload command exited with status " +
                                       std::to_string(r.exit_code) +
                                       (r.signal ? " (signal)" : "") + "; capture log kept");
        }
    } else {
        if (config.test_command.empty()) throw ConfigError("test_command is not configured");
        const bool per_test = config.test_command.find("{test}") != std::string::npos;
        if (per_test) {
            for (const std::string& id : test_ids) {
                auto test_env = env;
                test_env.push_back({"PUTFORGE_TEST_ID", id});
                const std::string cmd =
                    expand_placeholders(config.test_command, {{"test", id}});
                const CommandResult r = run_command(cmd, root, test_env);
                summary.test_results.push_back({id, r.ok(), r.exit_code});
                if (!r.ok()) {
                    summary.command_failed = true;
                    summary.failing_tests.push_back(id);
                }
            }
            if (!summary.failing_tests.empty()) {
                std::string msg = "failing tests under capture:";
                for (const auto& t : summary.failing_tests) msg += " " + t;
                summary.warnings.push_back(msg + "; capture log kept");
            }
        } else {
            const CommandResult r = run_command(config.test_command, root, env);
            if (!r.ok()) {
                summary.command_failed = true;
                summary.warnings.push_back("test command exited with status " +
                                           std::to_string(r.exit_code) + "; capture log kept");
            }
        }
    }
    summary.records_appended = (fs::exists(sink) ? count_lines(sink) : 0) - before;
    return summary;
}

std::vector<TestRunResult> run_test_suite(const fs::path& root, const Config& config,
                                          const std::vector<std::string>& test_ids) {
    if (config.test_command.empty()) throw ConfigError("test_command is not configured");
    std::vector<TestRunResult> out;
    const bool per_test = config.test_command.find("{test}") != std::string::npos;
    if (per_test) {
        for (const std::string& id : test_ids) {
            const std::string cmd = expand_placeholders(config.test_command, {{"test", id}});
            const CommandResult r = run_command(cmd, root);
            out.push_back({id, r.ok(), r.exit_code});
        }
    } else {
        const CommandResult r = run_command(config.test_command, root);
        out.push_back({"<suite>", r.ok(), r.exit_code});
    }
    return out;
}

}  // namespace putforge
