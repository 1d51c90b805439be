// Acceptance checks: one PASS/FAIL/SKIP line per criterion, exit status 1 if any FAIL.

#include "depmig/diff.hpp"
#include "depmig/docs.hpp"
#include "depmig/log.hpp"
#include "depmig/manifest.hpp"
#include "depmig/pipeline.hpp"
#include "depmig/process.hpp"
#include "depmig/rule_graph.hpp"

#include "fixture_corpus.hpp"
#include "resolver_suite.hpp"
#include "temp_dir.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace depmig;

namespace {

// Tolerances and sizes.
constexpr double kCorpusSecondsLimit = 60.0;
constexpr double kResolverRecallTarget = 0.80; // reported, not enforced
constexpr int kDiffPairs = 1200;
constexpr int kScalingGraphs = 600;
constexpr int kMonotonicityGraphs = 500;
constexpr int kShuffleRounds = 300;

const std::string kSeleneseOrigin = "https://github.com/vmi/selenese-runner-java";
const std::string kSeleneseCommit = "641ab94e7d014cdf4fd6a83554dcff57130143d3";

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << (ok ? "PASS " : "FAIL ") << id << " " << detail << std::endl;
}

void skip(const std::string& id, const std::string& detail) { std::cout << "SKIP " << id << " " << detail << std::endl; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", v * 100.0);
    return buf;
}

const std::filesystem::path kSource = DEPMIG_SOURCE_DIR;

RunConfig corpus_config(const testkit::Corpus& corpus, const std::filesystem::path& workdir) {
    RunConfig c;
    c.projects_file = corpus.projects_file;
    c.workdir = workdir;
    c.repo_base = corpus.repository.string();
    c.t_rel = 1.0;
    return c;
}

std::map<std::string, std::string> json_exports(Store& store) {
    std::map<std::string, std::string> out;
    for (const auto s : {ExportSelector::rules, ExportSelector::segments, ExportSelector::fragments,
                         ExportSelector::mappings, ExportSelector::graph}) {
        out[std::string(to_string(s))] = store.export_report(ExportFormat::json, s);
    }
    return out;
}

void corpus_criteria(const std::filesystem::path& scratch) {
    const auto corpus = testkit::build_corpus(scratch / "corpus");
    const auto started = std::chrono::steady_clock::now();
    Pipeline first(corpus_config(corpus, scratch / "run-1"));
    const auto summary = first.run_all();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const auto score = testkit::score_store(corpus, first.store());

    report("1.rules", summary.exit_code() == 0 && score.rules_match(corpus),
           "confirmed=" + std::to_string(score.confirmed.size()) +
               (score.confirmed.empty() ? std::string() : " first=" + score.confirmed.front().str()));
    report("1.segments", score.segments_match(corpus),
           "found=" + std::to_string(score.segments.size()) + " expected=" + std::to_string(corpus.segments.size()));
    report("1.fragments", score.fragment_precision() == 1.0 && score.fragment_recall() == 1.0,
           "precision=" + percent(score.fragment_precision()) + " recall=" + percent(score.fragment_recall()) +
               " expected=" + std::to_string(corpus.fragments.size()));
    report("1.runtime", seconds < kCorpusSecondsLimit, std::to_string(seconds) + "s limit=" +
                                                           std::to_string(kCorpusSecondsLimit) + "s");

    Pipeline second(corpus_config(corpus, scratch / "run-2"));
    second.run_all();
    const auto a = json_exports(first.store());
    const auto b = json_exports(second.store());
    report("5e.store_determinism", a == b, "json exports of two full runs " + std::string(a == b ? "identical" : "differ"));
}

void manifest_criterion() {
    const auto change = diff_dependencies(parse_manifest(read_file(kSource / "tests/fixtures/pom_swap/before.xml")),
                                          parse_manifest(read_file(kSource / "tests/fixtures/pom_swap/after.xml")));
    const bool ok = change.removed == std::vector<LibraryCoordinate>{{"org.json", "json", "20080701"}} &&
                    change.added == std::vector<LibraryCoordinate>{{"com.google.code.gson", "gson", "2.3.1"}} &&
                    change.upgrades.empty();
    std::string detail = "removed=";
    for (const auto& c : change.removed) detail += c.str() + ";";
    detail += " added=";
    for (const auto& c : change.added) detail += c.str() + ";";
    detail += " upgrades=" + std::to_string(change.upgrades.size());
    report("2.manifest_diff", ok, detail);
}

LibraryId lib(const std::string& name) { return {"x", name}; }

std::set<RuleKey> kept(const MigrationGraph& g, double t_rel) {
    std::set<RuleKey> out;
    for (const auto& r : normalize_and_filter(g, {t_rel})) out.insert(r.key());
    return out;
}

void rule_filter_criterion() {
    MigrationGraph g;
    g.add_edge(lib("json"), lib("gson"), 12);
    g.add_edge(lib("json"), lib("jackson"), 3);
    g.add_edge(lib("json"), lib("json-simple"), 2);
    g.add_edge(lib("commons-logging"), lib("slf4j"), 7);
    g.add_edge(lib("commons-logging"), lib("log4j"), 1);
    const std::set<RuleKey> at_one = {{lib("json"), lib("gson")}, {lib("commons-logging"), lib("slf4j")}};
    std::set<RuleKey> at_low = at_one;
    at_low.insert({lib("json"), lib("jackson")});
    const auto k1 = kept(g, 1.0);
    const auto k2 = kept(g, 0.2);
    report("3.rule_filter", k1 == at_one && k2 == at_low,
           "t_rel=1.0 kept " + std::to_string(k1.size()) + ", t_rel=0.2 kept " + std::to_string(k2.size()));
}

void doc_criterion() {
    const auto docs = parse_doc_page(read_file(kSource / "tests/fixtures/docs/Gson.html"), "com.google.gson", "Gson");
    const auto it = std::find_if(docs.begin(), docs.end(), [](const MethodDoc& d) {
        return d.method == "toJson" && d.signature == std::vector<std::string>{"JsonElement"};
    });
    if (it == docs.end()) {
        report("4.doc_fields", false, "toJson(JsonElement) not found");
        return;
    }
    const bool ok = html_to_text(it->description) == "Converts a tree of JsonElements into its equivalent JSON representation." &&
                    it->param_docs.size() == 1 && it->param_docs[0].name == "jsonElement" &&
                    html_to_text(it->param_docs[0].text) == "root of a tree of JsonElements" &&
                    it->return_doc && html_to_text(*it->return_doc) == "JSON String representation of the tree" &&
                    it->since == "1.4";
    report("4.doc_fields", ok, "description=\"" + it->description + "\" since=" + it->since.value_or("-"));
}

std::string random_text(std::mt19937& rng) {
    static const std::vector<std::string> vocabulary = {"a", "b", "c", "int x = 1;", "}", "{", "", "return y;", "  // note"};
    const int lines = static_cast<int>(rng() % 25);
    std::string out;
    for (int i = 0; i < lines; ++i) out += vocabulary[rng() % vocabulary.size()] + "\n";
    if (!out.empty() && rng() % 5 == 0) out.pop_back(); // no final newline
    return out;
}

std::string mutate(const std::string& text, std::mt19937& rng) {
    auto lines = split_lines(text);
    std::vector<std::string> out(lines.begin(), lines.end());
    const int edits = static_cast<int>(rng() % 6);
    for (int e = 0; e < edits; ++e) {
        const auto pos = out.empty() ? 0 : rng() % (out.size() + 1);
        switch (rng() % 3) {
        case 0: out.insert(out.begin() + static_cast<long>(pos), "new " + std::to_string(rng() % 7) + "\n"); break;
        case 1:
            if (pos < out.size()) out.erase(out.begin() + static_cast<long>(pos));
            break;
        default:
            if (pos < out.size()) out[pos] = "changed " + std::to_string(rng() % 7) + "\n";
        }
    }
    std::string joined;
    for (const auto& l : out) joined += l;
    if (rng() % 7 == 0 && !joined.empty() && joined.back() == '\n') joined.pop_back();
    return joined;
}

void diff_property() {
    std::mt19937 rng(20150302);
    int exact = 0;
    for (int i = 0; i < kDiffPairs; ++i) {
        const auto before = random_text(rng);
        const auto after = rng() % 2 == 0 ? mutate(before, rng) : random_text(rng);
        const std::size_t context = std::vector<std::size_t>{0, 1, 3}[rng() % 3];
        try {
            if (apply_hunks(before, unified_diff(before, after, context)) == after) ++exact;
        } catch (const std::exception&) {
        }
    }
    report("5a.diff_round_trip", exact == kDiffPairs,
           std::to_string(exact) + "/" + std::to_string(kDiffPairs) + " byte-exact");
}

MigrationGraph random_graph(std::mt19937& rng) {
    MigrationGraph g;
    const auto nodes = 2 + rng() % 8;
    const auto edges = rng() % 25;
    for (std::size_t e = 0; e < edges; ++e) {
        g.add_edge(lib("n" + std::to_string(rng() % nodes)), lib("n" + std::to_string(rng() % nodes)), 1 + rng() % 30);
    }
    return g;
}

void graph_properties() {
    std::mt19937 rng(42);
    int invariant = 0;
    for (int i = 0; i < kScalingGraphs; ++i) {
        const auto g = random_graph(rng);
        if (g.nodes().empty()) {
            ++invariant;
            continue;
        }
        auto node_it = g.nodes().begin();
        std::advance(node_it, static_cast<long>(rng() % g.nodes().size()));
        const auto factor = 2 + rng() % 50;
        MigrationGraph scaled;
        for (const auto& [key, w] : g.edges()) scaled.add_edge(key.source, key.target, key.source == *node_it ? w * factor : w);
        const double t = static_cast<double>(rng() % 101) / 100.0;
        if (kept(g, 1.0) == kept(scaled, 1.0) && kept(g, t) == kept(scaled, t)) ++invariant;
    }
    report("5b.scaling_invariance", invariant == kScalingGraphs,
           std::to_string(invariant) + "/" + std::to_string(kScalingGraphs) + " graphs");

    int monotone = 0;
    for (int i = 0; i < kMonotonicityGraphs; ++i) {
        const auto g = random_graph(rng);
        bool ok = true;
        std::set<RuleKey> previous = kept(g, 0.0);
        for (int step = 1; step <= 20; ++step) {
            const auto now = kept(g, step / 20.0);
            ok = ok && std::includes(previous.begin(), previous.end(), now.begin(), now.end());
            previous = now;
        }
        if (ok) ++monotone;
    }
    report("5c.t_rel_monotonicity", monotone == kMonotonicityGraphs,
           std::to_string(monotone) + "/" + std::to_string(kMonotonicityGraphs) + " graphs");

    int independent = 0;
    for (int i = 0; i < kShuffleRounds; ++i) {
        std::vector<DependencyChange> changes(1 + rng() % 12);
        for (std::size_t c = 0; c < changes.size(); ++c) {
            changes[c].project = "p" + std::to_string(rng() % 3);
            changes[c].commit = "c" + std::to_string(c);
            for (auto n = rng() % 3; n > 0; --n) changes[c].removed.push_back({"x", "n" + std::to_string(rng() % 6), "1"});
            for (auto n = rng() % 3; n > 0; --n) changes[c].added.push_back({"x", "n" + std::to_string(rng() % 6), "2"});
        }
        MigrationGraph ordered;
        for (const auto& c : changes) ordered.accumulate(c);
        std::shuffle(changes.begin(), changes.end(), rng);
        MigrationGraph shuffled;
        for (const auto& c : changes) shuffled.accumulate(c);
        if (ordered == shuffled) ++independent;
    }
    report("5d.accumulate_order", independent == kShuffleRounds,
           std::to_string(independent) + "/" + std::to_string(kShuffleRounds) + " shuffles");
}

void resolver_criterion() {
    const auto score = testkit::score_resolver_fixtures(kSource / "tests/fixtures/resolver");
    report("6.resolver_precision", score.files.size() >= 20 && score.precision() == 1.0,
           "files=" + std::to_string(score.files.size()) + " precision=" + percent(score.precision()) + " recall=" +
               percent(score.recall()) + " (" + std::to_string(score.correct) + "/" + std::to_string(score.expected) +
               ", target " + percent(kResolverRecallTarget) + " non-blocking" +
               (score.recall() >= kResolverRecallTarget ? ", met)" : ", not met)"));
}

void network_criterion(const std::filesystem::path& scratch) {
    ProcessResult probe;
    try {
        probe = run_process({"timeout", "20", "git", "ls-remote", kSeleneseOrigin, "HEAD"},
                            {{}, {}, {{"GIT_TERMINAL_PROMPT", "0"}}});
    } catch (const std::exception& e) {
        probe.err = e.what();
    }
    if (!probe.ok()) {
        skip("7.selenese_commit", "origin unreachable, network-gated check not run");
        return;
    }
    const auto list = scratch / "selenese.txt";
    std::ofstream(list) << kSeleneseOrigin << "\n";
    RunConfig c;
    c.projects_file = list;
    c.workdir = scratch / "selenese";
    c.offline = true;
    try {
        Pipeline p(c);
        p.ingest();
        bool found = false;
        for (const auto& change : p.store().dependency_changes()) {
            if (change.commit != kSeleneseCommit) continue;
            const auto has = [](const std::vector<LibraryCoordinate>& v, const LibraryId& id) {
                return std::any_of(v.begin(), v.end(), [&](const LibraryCoordinate& x) { return x.id() == id; });
            };
            found = has(change.removed, {"org.json", "json"}) && has(change.added, {"com.google.code.gson", "gson"});
        }
        report("7.selenese_commit", found, "json->gson change at " + kSeleneseCommit.substr(0, 7) +
                                               (found ? " detected" : " not detected"));
    } catch (const std::exception& e) {
        report("7.selenese_commit", false, std::string("error: ") + e.what());
    }
}

} // namespace

int main() {
    log::set_min_level(log::Level::error);
    testkit::TempDir scratch("depmig-acceptance");
    try {
        corpus_criteria(scratch.path());
    } catch (const std::exception& e) {
        report("1.corpus", false, std::string("error: ") + e.what());
    }
    manifest_criterion();
    rule_filter_criterion();
    doc_criterion();
    diff_property();
    graph_properties();
    resolver_criterion();
    network_criterion(scratch.path());
    std::cout << (failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL " + std::to_string(failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
