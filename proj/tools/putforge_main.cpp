#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "putforge/error.hpp"
#include "putforge/pipeline.hpp"

namespace {

using namespace putforge;

struct CliOverrides {
    std::string project = ".";
    std::string workspace;
    std::string test_command;
    std::string workload_command;
    std::string put_command;
    std::string build_command;
    std::string adapter;
    long row_cap = -1;
    double timeout = -1;
    int retries = -1;
    int parallel = -1;
    bool per_site_variants = false;
};

Config make_config(const CliOverrides& o) {
    Config cfg = load_config(fs::path(o.project));
    if (!o.workspace.empty()) cfg.workspace = o.workspace;
    if (!o.test_command.empty()) cfg.test_command = o.test_command;
    if (!o.workload_command.empty()) cfg.workload_command = o.workload_command;
    if (!o.put_command.empty()) cfg.put_command = o.put_command;
    if (!o.build_command.empty()) cfg.build_command = o.build_command;
    if (!o.adapter.empty()) cfg.adapter = o.adapter;
    if (o.row_cap > 0) cfg.provider_row_cap = o.row_cap;
    if (o.timeout > 0) cfg.per_row_timeout_s = o.timeout;
    if (o.retries >= 0) cfg.retries = o.retries;
    if (o.parallel >= 0) cfg.parallel_puts = o.parallel;
    if (o.per_site_variants) cfg.per_site_variants = true;
    validate_config(cfg);
    return cfg;
}

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--project", o.project, "subject project root (default: cwd)");
    cmd->add_option("--workspace", o.workspace, "artifact directory (default from config)");
    cmd->add_option("--test-cmd", o.test_command, "test command ({test} placeholder)");
    cmd->add_option("--workload-cmd", o.workload_command, "workload command");
    cmd->add_option("--put-cmd", o.put_command, "cell command ({put}/{row} placeholders)");
    cmd->add_option("--build-cmd", o.build_command, "build command");
    cmd->add_option("--adapter", o.adapter, "framework adapter (doctest)");
    cmd->add_option("--row-cap", o.row_cap, "provider row cap");
    cmd->add_option("--timeout", o.timeout, "per-row timeout, seconds");
    cmd->add_option("--retries", o.retries, "re-runs for failing cells");
    cmd->add_option("--parallel", o.parallel, "parallel PUT workers (rows stay sequential)");
    cmd->add_flag("--per-site-variants", o.per_site_variants,
                  "parameterize every call site of a repeated target");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"putforge: turns conventional unit tests into parameterized unit tests "
                 "using arguments captured at runtime"};
    app.require_subcommand(1);

    CliOverrides o;
    std::string capture_mode = "test";
    std::string capture_cmd;

    CLI::App* analyze = app.add_subcommand("analyze", "discover tests and target methods");
    add_common_flags(analyze, o);
    CLI::App* capture =
        app.add_subcommand("capture", "instrument and run the suite or workload");
    add_common_flags(capture, o);
    capture->add_option("--mode", capture_mode, "test|field")->check(CLI::IsMember({"test", "field"}));
    capture->add_option("--cmd", capture_cmd, "override the command for this mode");
    CLI::App* generate =
        app.add_subcommand("generate", "build argument unions and render PUTs");
    add_common_flags(generate, o);
    CLI::App* classify =
        app.add_subcommand("classify", "execute PUT cells, classify, finalize");
    add_common_flags(classify, o);
    CLI::App* report = app.add_subcommand("report", "regenerate report.{json,md}");
    add_common_flags(report, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(analyze)) {
            const Config cfg = make_config(o);
            const CodeModel model = cmd_analyze(cfg);
            std::printf("analyzed %s: %zu tests, %zu target methods, %zu ineligible calls\n",
                        cfg.project_root.string().c_str(), model.tests.size(),
                        model.targets.size(), model.excluded.total());
        } else if (app.got_subcommand(capture)) {
            Config cfg = make_config(o);
            const CaptureContext mode =
                capture_mode == "field" ? CaptureContext::Field : CaptureContext::Test;
            if (!capture_cmd.empty()) {
                if (mode == CaptureContext::Field) cfg.workload_command = capture_cmd;
                else cfg.test_command = capture_cmd;
            }
            const CaptureRunSummary summary = cmd_capture(cfg, mode);
            for (const auto& w : summary.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            std::printf("captured %zu records in %s mode\n", summary.records_appended,
                        context_name(mode));
        } else if (app.got_subcommand(generate)) {
            const Config cfg = make_config(o);
            const GenerateResult r = cmd_generate(cfg);
            for (const auto& d : r.diagnostics) std::fprintf(stderr, "note: %s\n", d.c_str());
            std::printf("generated %zu PUTs across %zu units\n", r.manifest.total_puts(),
                        r.manifest.units.size());
        } else if (app.got_subcommand(classify)) {
            const Config cfg = make_config(o);
            const ClassifyResult r = cmd_classify(cfg);
            for (const auto& f : r.compile_excluded_units)
                std::fprintf(stderr, "warning: excluded unit (compile failure): %s\n", f.c_str());
            std::printf("executed %zu cells: %zu strongly-coupled, %zu falsifiably-coupled, "
                        "%zu decoupled, %zu ill-formed\n",
                        r.verdicts.size(), r.report.strongly_coupled,
                        r.report.falsifiably_coupled, r.report.decoupled, r.report.ill_formed);
        } else if (app.got_subcommand(report)) {
            const Config cfg = make_config(o);
            const Report rep = cmd_report(cfg);
            std::printf("report written: %zu PUTs (%zu + %zu + %zu), %zu ill-formed\n",
                        rep.categorized_total(), rep.strongly_coupled, rep.falsifiably_coupled,
                        rep.decoupled, rep.ill_formed);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const MissingArtifactError& e) {
        std::fprintf(stderr, "missing prerequisite: %s\n", e.what());
        return 3;
    } catch (const SubjectBuildError& e) {
        std::fprintf(stderr, "subject build failure: %s\n%s\n", e.what(), e.log.c_str());
        return 4;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
