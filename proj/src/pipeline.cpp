#include "depmig/pipeline.hpp"

#include "depmig/fragments.hpp"
#include "depmig/log.hpp"
#include "depmig/segments.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <mutex>
#include <semaphore>
#include <set>
#include <sstream>

namespace depmig {

namespace {

constexpr std::string_view kToolVersion = "1.0.0";

/// Runs fn over items with at most `jobs` calls in flight; results keep input order.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T>& items, std::size_t jobs, Fn fn) {
    using R = decltype(fn(items.front()));
    std::vector<R> results(items.size());
    if (items.empty()) return results;
    std::counting_semaphore<256> slots(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(jobs, 1, 256)));
    std::vector<std::future<void>> tasks;
    for (std::size_t i = 0; i < items.size(); ++i) {
        slots.acquire();
        tasks.push_back(std::async(std::launch::async, [&, i] {
            struct Release {
                std::counting_semaphore<256>& s;
                ~Release() { s.release(); }
            } release{slots};
            results[i] = fn(items[i]);
        }));
    }
    for (auto& t : tasks) t.get();
    return results;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<DependencyChange> changes_of(const std::vector<DependencyChange>& all, const std::string& project) {
    std::vector<DependencyChange> out;
    std::copy_if(all.begin(), all.end(), std::back_inserter(out),
                 [&](const DependencyChange& c) { return c.project == project; });
    return out;
}

} // namespace

void RunConfig::validate() const {
    RuleFilterConfig{t_rel}.validate();
    if (jobs == 0) throw UsageError("--jobs must be at least 1");
    if (workdir.empty()) throw UsageError("--workdir must not be empty");
}

std::vector<std::string> read_project_list(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot read project list " + file.string());
    std::vector<std::string> origins;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        auto origin = trim(line);
        if (!origin.empty()) origins.push_back(std::move(origin));
    }
    return origins;
}

std::string RunSummary::to_text() const {
    std::ostringstream out;
    out << "projects: " << projects << " (failed " << failures.size() << ")\n"
        << "commits: " << commits << "\n"
        << "dependency changes: " << dependency_changes << "\n"
        << "rules: candidate " << rules_candidate << ", confirmed " << rules_confirmed << ", discarded "
        << rules_discarded << "\n"
        << "segments: " << segments << "\n"
        << "fragments: " << fragments << "\n"
        << "mappings: " << mappings << "\n"
        << "docs: attached " << docs_attached << ", not found " << docs_missing << "\n";
    for (const auto& f : failures) out << "failed: " << f << "\n";
    return out.str();
}

Pipeline::Pipeline(RunConfig config, std::shared_ptr<Fetcher> fetcher)
    : config_((config.validate(), std::move(config))),
      store_(config_.db_path()),
      cache_(config_.cache_path(),
             fetcher ? std::move(fetcher) : (config_.offline ? nullptr : make_fetcher(config_.repo_base)),
             CacheOptions{config_.repo_base, 4, 4, std::chrono::milliseconds(250)}) {
    store_.set_metadata("tool_version", std::string(kToolVersion));
}

void Pipeline::require_stage(const std::string& stage, const std::string& message) const {
    if (!store_.metadata("stage." + stage)) throw StageError(message);
}

void Pipeline::mark_stage(const std::string& stage) { store_.set_metadata("stage." + stage, "done"); }

void Pipeline::fail(const std::string& project, const std::string& error) {
    log::error("project_failed", {{"project", project}, {"error", error}});
    failures_.push_back(project + ": " + error);
}

// ---------------------------------------------------------------------------

void Pipeline::ingest() {
    if (config_.projects_file.empty()) throw UsageError("--projects is required");
    const auto origins = read_project_list(config_.projects_file);
    if (origins.empty()) throw UsageError("project list " + config_.projects_file.string() + " is empty");
    log::info("git_version", {{"version", GitRepository::version()}});

    struct Job {
        std::string origin;
        std::string id;
    };
    std::vector<Job> jobs;
    std::set<std::string> ids;
    for (const auto& origin : origins) {
        auto id = derive_project_id(origin);
        const auto base = id;
        for (int n = 2; ids.contains(id); ++n) id = base + "-" + std::to_string(n);
        ids.insert(id);
        jobs.push_back({origin, id});
    }

    struct Result {
        std::optional<ProjectRef> ref;
        std::vector<CommitRecord> commits;
        std::vector<DependencyChange> changes;
        std::string error;
    };
    const auto repos = config_.workdir / "repos";
    const auto results = parallel_map(jobs, config_.jobs, [&](const Job& job) {
        Result r;
        try {
            const auto project = ingest_project(job.origin, repos, job.id);
            r.changes = ProjectHistory(project).dependency_changes();
            r.ref = project.ref();
            r.commits = project.commits();
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        return r;
    });

    Store::Transaction tx(store_);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& r = results[i];
        if (!r.ref) {
            fail(jobs[i].id, r.error);
            continue;
        }
        store_.upsert_project(*r.ref);
        for (const auto& c : r.commits) store_.upsert_commit(c);
        for (const auto& c : r.changes) store_.upsert_dependency_change(c);
        log::info("project_recorded", {{"project", r.ref->id},
                                       {"commits", std::to_string(r.commits.size())},
                                       {"dependency_changes", std::to_string(r.changes.size())}});
    }
    mark_stage("ingest");
    tx.commit();
}

void Pipeline::detect_rules() {
    if (store_.count("commits") == 0) throw StageError("no ingested commits; run the ingest stage first");
    Store::Transaction tx(store_);
    store_.clear_from("rules");
    MigrationGraph graph;
    for (const auto& change : store_.dependency_changes()) graph.accumulate(change);
    store_.replace_graph(graph);
    const auto rules = normalize_and_filter(graph, RuleFilterConfig{config_.t_rel});
    for (const auto& rule : rules) store_.upsert_rule(rule);
    std::ostringstream t_rel;
    t_rel << config_.t_rel;
    store_.set_metadata("t_rel", t_rel.str());
    mark_stage("rules");
    tx.commit();
    log::info("rules_detected", {{"edges", std::to_string(graph.edges().size())},
                                 {"candidates", std::to_string(rules.size())},
                                 {"t_rel", t_rel.str()}});
}

LibraryCoordinate Pipeline::choose_version(const LibraryId& library, const std::vector<DependencyChange>& changes) const {
    LibraryCoordinate chosen{library.group, library.artifact, std::string(kUnresolvedVersion)};
    for (const auto& change : changes) {
        auto consider = [&](const std::string& version) {
            if (version != kUnresolvedVersion && !version.empty()) chosen.version = version;
        };
        for (const auto* side : {&change.removed, &change.added}) {
            for (const auto& c : *side) {
                if (c.id() == library) consider(c.version);
            }
        }
        for (const auto& u : change.upgrades) {
            if (u.library == library) consider(u.to);
        }
    }
    return chosen;
}

std::shared_ptr<const PackageIndex> Pipeline::index_for(const LibraryCoordinate& coordinate) {
    if (const auto it = indices_.find(coordinate); it != indices_.end()) return it->second;
    std::shared_ptr<const PackageIndex> index;
    if (auto archive = cache_.get(coordinate, ArchiveKind::classes)) {
        try {
            index = std::make_shared<const PackageIndex>(build_package_index(coordinate, std::move(*archive)));
        } catch (const IndexError& e) {
            log::warn("index_unusable", {{"library", coordinate.str()}, {"error", e.what()}});
        }
    }
    indices_[coordinate] = index;
    return index;
}

std::shared_ptr<const PackageIndex> Pipeline::index_for(const LibraryId& library,
                                                        const std::vector<DependencyChange>& changes) {
    // Most recent resolved version first, then older ones.
    std::vector<std::string> versions;
    for (auto it = changes.rbegin(); it != changes.rend(); ++it) {
        auto add = [&](const std::string& v) {
            if (v != kUnresolvedVersion && std::find(versions.begin(), versions.end(), v) == versions.end()) {
                versions.push_back(v);
            }
        };
        for (const auto& u : it->upgrades) {
            if (u.library == library) {
                add(u.to);
                add(u.from);
            }
        }
        for (const auto* side : {&it->added, &it->removed}) {
            for (const auto& c : *side) {
                if (c.id() == library) add(c.version);
            }
        }
    }
    for (const auto& v : versions) {
        if (auto index = index_for(LibraryCoordinate{library.group, library.artifact, v})) return index;
    }
    if (!config_.allow_fallback_index) {
        throw SegmentError("no class archive for " + library.str() + " and the fallback index is disabled");
    }
    const LibraryCoordinate coordinate{library.group, library.artifact,
                                       versions.empty() ? std::string(kUnresolvedVersion) : versions.front()};
    log::warn("fallback_index", {{"library", library.str()}, {"prefix", library.group}});
    return std::make_shared<const PackageIndex>(fallback_package_index(coordinate));
}

IngestedProject Pipeline::load_project(const ProjectRef& ref, std::vector<CommitRecord> commits) {
    if (!std::filesystem::exists(ref.workdir / "HEAD")) {
        throw StageError("mirror of " + ref.id + " is missing at " + ref.workdir.string() + "; rerun ingest");
    }
    return IngestedProject(ref, std::move(commits));
}

namespace {

struct RuleWork {
    RuleKey rule;
    std::shared_ptr<const PackageIndex> source;
    std::shared_ptr<const PackageIndex> target;
};

struct ProjectWork {
    ProjectRef ref;
    std::vector<RuleWork> rules;
    std::vector<CommitRecord> commits;
    std::vector<Segment> segments; // fragments stage only
    std::string error;
};

} // namespace

void Pipeline::detect_segments() {
    require_stage("rules", "no detected rules; run detect-rules first");
    const auto rules = store_.rules();
    const auto all_changes = store_.dependency_changes();

    std::vector<ProjectWork> work;
    std::vector<std::pair<LibraryCoordinate, ArchiveKind>> wanted;
    for (const auto& ref : store_.projects()) {
        ProjectWork w{ref, {}, store_.commits(ref.id), {}, {}};
        const auto changes = changes_of(all_changes, ref.id);
        for (const auto& rule : rules) {
            if (!rule_applies(changes, rule.key())) continue;
            w.rules.push_back({rule.key(), nullptr, nullptr});
            for (const auto& lib : {rule.source, rule.target}) {
                const auto coordinate = choose_version(lib, changes);
                if (coordinate.resolved()) wanted.emplace_back(coordinate, ArchiveKind::classes);
            }
        }
        work.push_back(std::move(w));
    }
    cache_.prefetch(wanted);
    for (auto& w : work) {
        const auto changes = changes_of(all_changes, w.ref.id);
        try {
            for (auto& r : w.rules) {
                r.source = index_for(r.rule.source, changes);
                r.target = index_for(r.rule.target, changes);
            }
        } catch (const Error& e) {
            w.error = e.what();
        }
    }

    const SegmentOptions options{config_.imports_count_as_use};
    struct Result {
        std::vector<Segment> segments;
        std::string error;
    };
    const auto results = parallel_map(work, config_.jobs, [&](const ProjectWork& w) {
        Result r;
        if (!w.error.empty() || w.rules.empty()) {
            r.error = w.error;
            return r;
        }
        try {
            const auto project = load_project(w.ref, w.commits);
            const ProjectHistory history(project);
            for (const auto& rule : w.rules) {
                auto found = depmig::detect_segments(history, rule.rule, *rule.source, *rule.target, options);
                r.segments.insert(r.segments.end(), found.begin(), found.end());
            }
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        return r;
    });

    Store::Transaction tx(store_);
    store_.clear_from("segments");
    std::size_t total = 0;
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (!results[i].error.empty()) {
            fail(work[i].ref.id, results[i].error);
            continue;
        }
        for (const auto& s : results[i].segments) {
            store_.upsert_segment(s);
            log::info("segment", {{"project", s.project},
                                  {"rule", s.rule.str()},
                                  {"start", s.start_commit},
                                  {"end", s.end_commit},
                                  {"commits", std::to_string(s.commits.size())}});
        }
        total += results[i].segments.size();
    }
    mark_stage("segments");
    tx.commit();
    log::info("segments_detected", {{"segments", std::to_string(total)}});
}

void Pipeline::detect_fragments() {
    require_stage("segments", "no detected segments; run detect-segments first");
    const auto all_changes = store_.dependency_changes();
    const auto segments = store_.segments();

    std::vector<ProjectWork> work;
    for (const auto& ref : store_.projects()) {
        ProjectWork w{ref, {}, store_.commits(ref.id), {}, {}};
        const auto changes = changes_of(all_changes, ref.id);
        for (const auto& s : segments) {
            if (s.project != ref.id) continue;
            w.segments.push_back(s);
            const bool known = std::any_of(w.rules.begin(), w.rules.end(),
                                           [&](const RuleWork& r) { return r.rule == s.rule; });
            if (known) continue;
            try {
                w.rules.push_back({s.rule, index_for(s.rule.source, changes), index_for(s.rule.target, changes)});
            } catch (const Error& e) {
                w.error = e.what();
            }
        }
        if (!w.segments.empty()) work.push_back(std::move(w));
    }

    const std::size_t context = config_.context_lines;
    struct Result {
        std::vector<Fragment> fragments;
        std::string error;
    };
    const auto results = parallel_map(work, config_.jobs, [&](const ProjectWork& w) {
        Result r;
        if (!w.error.empty()) {
            r.error = w.error;
            return r;
        }
        try {
            const auto project = load_project(w.ref, w.commits);
            const ProjectHistory history(project);
            for (const auto& s : w.segments) {
                const auto lo = project.ordinal(s.start_commit);
                const auto hi = project.ordinal(s.end_commit);
                for (const auto& c : s.commits) {
                    const auto ord = project.ordinal(c);
                    if (ord < lo || ord > hi) {
                        throw Error("segment commit " + c + " lies outside its segment");
                    }
                }
                const auto& rule = *std::find_if(w.rules.begin(), w.rules.end(),
                                                 [&](const RuleWork& rw) { return rw.rule == s.rule; });
                auto found = depmig::detect_fragments(history, s, *rule.source, *rule.target, context);
                r.fragments.insert(r.fragments.end(), found.begin(), found.end());
            }
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        return r;
    });

    Store::Transaction tx(store_);
    store_.clear_from("fragments");
    std::vector<Fragment> all;
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (!results[i].error.empty()) {
            fail(work[i].ref.id, results[i].error);
            continue;
        }
        for (const auto& f : results[i].fragments) {
            store_.upsert_fragment(f);
            all.push_back(f);
        }
    }
    std::map<RuleKey, std::size_t> counts;
    for (const auto& f : all) ++counts[f.segment.rule];
    for (const auto& rule : confirm_rules(store_.rules(), counts)) store_.upsert_rule(rule);
    for (const auto& m : extract_mappings(all)) store_.upsert_mapping(m);
    mark_stage("fragments");
    tx.commit();
    log::info("fragments_detected", {{"fragments", std::to_string(all.size())}});
}

void Pipeline::collect_docs() {
    require_stage("fragments", "no detected fragments; run detect-fragments first");
    const auto mappings = store_.mappings();
    const auto segments = store_.segments();

    // Documentation is needed at the versions recorded by the segments of each rule.
    std::map<LibraryId, std::set<LibraryCoordinate>> wanted_by_library;
    for (const auto& s : segments) {
        wanted_by_library[s.rule.source].insert({s.rule.source.group, s.rule.source.artifact, s.source_version});
        wanted_by_library[s.rule.target].insert({s.rule.target.group, s.rule.target.artifact, s.target_version});
    }
    std::vector<std::pair<LibraryCoordinate, ArchiveKind>> wanted;
    for (const auto& [library, coordinates] : wanted_by_library) {
        for (const auto& c : coordinates) {
            if (c.resolved()) {
                wanted.emplace_back(c, ArchiveKind::documentation);
            } else {
                log::warn("docs_skipped", {{"library", c.str()}, {"reason", "unresolved version"}});
            }
        }
    }
    cache_.prefetch(wanted);

    std::map<LibraryId, std::vector<MethodDoc>> docs;
    for (const auto& [coordinate, kind] : wanted) {
        auto archive = cache_.get(coordinate, kind);
        if (!archive) {
            log::warn("docs_unavailable", {{"library", coordinate.str()}});
            continue;
        }
        try {
            auto parsed = parse_doc_archive(std::move(*archive), coordinate);
            log::info("docs_parsed", {{"library", coordinate.str()}, {"methods", std::to_string(parsed.size())}});
            auto& pool = docs[coordinate.id()];
            pool.insert(pool.end(), parsed.begin(), parsed.end());
        } catch (const DocError& e) {
            log::warn("docs_unreadable", {{"library", coordinate.str()}, {"error", e.what()}});
        }
    }

    Store::Transaction tx(store_);
    store_.clear_from("docs");
    for (const auto& [library, pool] : docs) {
        for (const auto& d : pool) store_.upsert_doc(d);
    }
    static const std::vector<MethodDoc> none;
    for (const auto& m : mappings) {
        const auto source_it = docs.find(m.rule.source);
        const auto target_it = docs.find(m.rule.target);
        const auto& source_docs = source_it == docs.end() ? none : source_it->second;
        const auto& target_docs = target_it == docs.end() ? none : target_it->second;
        const auto id = store_.upsert_mapping(m);
        for (const auto& method : m.source_methods) store_.upsert_mapping_doc(id, "source", find_doc(method, source_docs));
        for (const auto& method : m.target_methods) store_.upsert_mapping_doc(id, "target", find_doc(method, target_docs));
    }
    mark_stage("docs");
    tx.commit();
}

std::string Pipeline::report(ExportFormat format, ExportSelector selector) {
    switch (selector) {
    case ExportSelector::rules:
    case ExportSelector::graph: require_stage("rules", "no detected rules; run detect-rules first"); break;
    case ExportSelector::segments: require_stage("segments", "no detected segments; run detect-segments first"); break;
    case ExportSelector::fragments:
    case ExportSelector::mappings:
        require_stage("fragments", "no detected fragments; run detect-fragments first");
        break;
    }
    auto bytes = store_.export_report(format, selector);
    const auto dir = config_.reports_path();
    std::filesystem::create_directories(dir);
    const auto extension = format == ExportFormat::json ? ".json"
                           : format == ExportFormat::csv ? ".csv"
                           : format == ExportFormat::diff ? ".diff"
                                                          : ".txt";
    std::ofstream(dir / (std::string(to_string(selector)) + extension), std::ios::binary) << bytes;
    return bytes;
}

void Pipeline::write_reports() {
    for (const auto selector : {ExportSelector::rules, ExportSelector::segments, ExportSelector::fragments,
                                ExportSelector::mappings, ExportSelector::graph}) {
        report(ExportFormat::json, selector);
        report(ExportFormat::csv, selector);
    }
    report(ExportFormat::diff, ExportSelector::fragments);
    report(ExportFormat::text, ExportSelector::graph);
}

RunSummary Pipeline::run_all() {
    ingest();
    detect_rules();
    detect_segments();
    detect_fragments();
    collect_docs();
    write_reports();
    return summary();
}

RunSummary Pipeline::summary() const {
    RunSummary s;
    s.projects = store_.count("projects");
    s.commits = store_.count("commits");
    s.dependency_changes = store_.dependency_changes().size();
    for (const auto& r : store_.rules()) {
        switch (r.status) {
        case RuleStatus::candidate: ++s.rules_candidate; break;
        case RuleStatus::confirmed: ++s.rules_confirmed; break;
        case RuleStatus::discarded: ++s.rules_discarded; break;
        }
    }
    s.segments = store_.count("segments");
    s.fragments = store_.count("fragments");
    s.mappings = store_.count("method_mappings");
    for (const auto& m : store_.mappings()) {
        for (const auto& d : store_.mapping_docs(m)) (d.doc ? s.docs_attached : s.docs_missing)++;
    }
    s.failures = failures_;
    return s;
}

} // namespace depmig
