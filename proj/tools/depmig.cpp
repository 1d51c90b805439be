// Command-line front end: the full pipeline (`run`) and each stage on its own.

#include "depmig/log.hpp"
#include "depmig/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace depmig;

struct Options {
    RunConfig config;
    std::string format = "json";
    std::string select = "rules";
    std::string log_level = "info";
    bool to_stdout = false;
    bool no_fallback_index = false;
};

log::Level parse_level(const std::string& text) {
    if (text == "debug") return log::Level::debug;
    if (text == "info") return log::Level::info;
    if (text == "warn") return log::Level::warn;
    if (text == "error") return log::Level::error;
    throw UsageError("unknown log level: " + text);
}

void print_summary(const RunSummary& summary, bool to_stdout) {
    (to_stdout ? std::cerr : std::cout) << summary.to_text();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mines Java project histories for library migrations and method mappings"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    auto& c = opt.config;
    app.add_option("--projects", c.projects_file, "File listing one repository origin per line");
    app.add_option("--workdir", c.workdir, "Directory for mirrors, cache and reports")->capture_default_str();
    app.add_option("--db", c.db, "Database file (default <workdir>/depmig.sqlite)");
    app.add_option("--cache", c.cache_dir, "Archive cache directory (default <workdir>/cache)");
    app.add_option("--t-rel", c.t_rel, "Relevance threshold for normalized rule weights")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--context-lines", c.context_lines, "Context lines around diff changes")->capture_default_str();
    app.add_flag("--offline", c.offline, "Use only cached archives");
    app.add_option("--jobs", c.jobs, "Parallel projects and downloads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--repo-base", c.repo_base, "Maven repository base URL or local mirror path")->capture_default_str();
    app.add_option("--imports-count-as-use", c.imports_count_as_use,
                   "Treat imports of a library as a dependency (true/false)")
        ->capture_default_str();
    app.add_flag("--no-fallback-index", opt.no_fallback_index,
                 "Fail instead of guessing packages when a class archive is unavailable");
    app.add_option("--format", opt.format, "Report format: json, csv, diff (fragments), text (graph)")
        ->check(CLI::IsMember({"json", "csv", "diff", "text"}))
        ->capture_default_str();
    app.add_option("--select", opt.select, "Report selector: rules, segments, fragments, mappings, graph")
        ->check(CLI::IsMember({"rules", "segments", "fragments", "mappings", "graph"}))
        ->capture_default_str();
    app.add_flag("--stdout", opt.to_stdout, "Write reports to stdout (summaries go to stderr)");
    app.add_option("--log-level", opt.log_level, "debug, info, warn or error")->capture_default_str();

    auto* run = app.add_subcommand("run", "Run every stage and write all reports");
    auto* ingest = app.add_subcommand("ingest", "Clone projects and record commits and dependency changes");
    auto* rules = app.add_subcommand("detect-rules", "Build the migration graph and filter candidate rules");
    auto* segments = app.add_subcommand("detect-segments", "Locate migration periods per project and rule");
    auto* fragments = app.add_subcommand("detect-fragments", "Extract fragments, confirm rules, derive mappings");
    auto* docs = app.add_subcommand("collect-docs", "Fetch and attach API documentation to mappings");
    auto* report = app.add_subcommand("report", "Export stored results");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        log::set_min_level(parse_level(opt.log_level));
        c.allow_fallback_index = !opt.no_fallback_index;
        Pipeline pipeline(c);
        if (run->parsed()) {
            const auto summary = pipeline.run_all();
            if (opt.to_stdout) {
                std::cout << pipeline.report(export_format_from_string(opt.format),
                                             export_selector_from_string(opt.select));
            }
            print_summary(summary, opt.to_stdout);
            return summary.exit_code();
        }
        if (report->parsed()) {
            const auto format = export_format_from_string(opt.format);
            const auto selector = export_selector_from_string(opt.select);
            const auto bytes = pipeline.report(format, selector);
            if (opt.to_stdout) {
                std::cout << bytes;
            } else {
                std::cout << "wrote " << to_string(selector) << " report to " << c.reports_path().string() << "\n";
            }
            return 0;
        }
        if (ingest->parsed()) pipeline.ingest();
        if (rules->parsed()) pipeline.detect_rules();
        if (segments->parsed()) pipeline.detect_segments();
        if (fragments->parsed()) pipeline.detect_fragments();
        if (docs->parsed()) pipeline.collect_docs();
        const auto summary = pipeline.summary();
        print_summary(summary, opt.to_stdout);
        return summary.exit_code();
    } catch (const UsageError& e) {
        log::error("usage", {{"error", e.what()}});
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 1;
    } catch (const std::exception& e) {
        log::error("fatal", {{"error", e.what()}});
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
