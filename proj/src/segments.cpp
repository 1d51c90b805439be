#include "depmig/segments.hpp"

#include "depmig/error.hpp"
#include "depmig/log.hpp"

#include <map>
#include <set>

namespace depmig {

std::optional<std::size_t> find_segment_end(const std::vector<CommitSignal>& timeline) {
    if (timeline.empty() || timeline.back().dependent_files > 0) {
        return std::nullopt;
    }
    std::size_t run = timeline.size() - 1;
    while (run > 0 && timeline[run - 1].dependent_files == 0) --run;
    if (run == 0) {
        return std::nullopt; // the source library was never used in code
    }
    for (std::size_t i = run; i < timeline.size(); ++i) {
        if (timeline[i].target_declared) return i;
    }
    return std::nullopt;
}

std::size_t find_segment_start(const std::vector<CommitSignal>& timeline, std::size_t end, std::size_t floor) {
    std::size_t bound = end;
    while (bound > floor && timeline[bound - 1].target_declared) --bound;
    for (std::size_t i = bound; i < end; ++i) {
        if (timeline[i].qualifies()) return i;
    }
    return end;
}

std::vector<SegmentBounds> find_segments(const std::vector<CommitSignal>& timeline) {
    std::vector<SegmentBounds> out;
    if (!find_segment_end(timeline)) {
        return out;
    }
    std::size_t floor = 0;
    std::size_t i = 0;
    while (i < timeline.size()) {
        if (timeline[i].dependent_files > 0) {
            ++i;
            continue;
        }
        const std::size_t run_begin = i;
        while (i < timeline.size() && timeline[i].dependent_files == 0) ++i;
        const std::size_t run_end = i; // exclusive
        if (run_begin > 0) {
            for (std::size_t e = run_begin; e < run_end; ++e) {
                if (timeline[e].target_declared) {
                    out.push_back({find_segment_start(timeline, e, floor), e});
                    break;
                }
            }
        }
        floor = run_end;
    }
    return out;
}

Segment record_versions(const std::vector<CommitSignal>& timeline, const SegmentBounds& bounds,
                        const std::string& project, const RuleKey& rule) {
    Segment segment;
    segment.project = project;
    segment.rule = rule;
    segment.start_commit = timeline.at(bounds.start).commit_id;
    segment.end_commit = timeline.at(bounds.end).commit_id;
    for (std::size_t i = bounds.start; i-- > 0;) {
        if (timeline[i].source_version) {
            segment.source_version = *timeline[i].source_version;
            break;
        }
    }
    if (timeline[bounds.end].target_version) {
        segment.target_version = *timeline[bounds.end].target_version;
    }
    for (std::size_t i = bounds.start; i <= bounds.end; ++i) {
        if (timeline[i].qualifies() || i == bounds.end) {
            segment.commits.push_back(timeline[i].commit_id);
        }
    }
    segment.weak_start = !timeline[bounds.start].removes_source_use;
    return segment;
}

ProjectHistory::ProjectHistory(const IngestedProject& project) : project_(project) {
    static const PathGlob java_files("**/*.java");
    static const PathGlob manifests("**/pom.xml");
    DependencySet state;
    for (const auto& commit : project.commits()) {
        CommitData data;
        data.java_changes = project.changed_files(commit.commit_id, java_files);
        for (const auto& change : project.changed_files(commit.commit_id, manifests)) {
            data.manifest_changed = true;
            if (change.kind == ChangeKind::renamed) {
                state.remove_manifest(change.old_path);
            }
            if (!change.after) {
                state.remove_manifest(change.path);
                continue;
            }
            try {
                state.set_manifest(change.path, parse_manifest(*change.after));
            } catch (const ManifestParseError& e) {
                log::warn("manifest_unparsable", {{"project", project.ref().id},
                                                  {"commit", commit.commit_id},
                                                  {"path", change.path},
                                                  {"error", e.what()}});
            }
        }
        data.libraries = state.libraries();
        commits_.push_back(std::move(data));
    }
}

const SourceFacts& ProjectHistory::facts(const std::string& blob_id, const std::string& path,
                                         const std::string& content) const {
    auto& slot = facts_[blob_id];
    if (!slot) {
        slot = std::make_unique<SourceFacts>(extract_facts(content, path));
    }
    return *slot;
}

std::vector<DependencyChange> ProjectHistory::dependency_changes() const {
    std::vector<DependencyChange> out;
    std::vector<LibraryCoordinate> previous;
    const auto& records = project_.commits();
    for (std::size_t i = 0; i < commits_.size(); ++i) {
        if (!commits_[i].manifest_changed) continue;
        auto change = diff_dependencies(previous, commits_[i].libraries);
        previous = commits_[i].libraries;
        if (change.empty() && change.upgrades.empty()) continue;
        change.project = project_.ref().id;
        change.commit = records[i].commit_id;
        out.push_back(std::move(change));
    }
    return out;
}

namespace {

std::map<MethodRef, std::size_t> use_counts(const SourceFacts* facts, const PackageIndex& index) {
    std::map<MethodRef, std::size_t> counts;
    if (facts != nullptr) {
        for (const auto& use : resolve_usages(*facts, index)) ++counts[use.method];
    }
    return counts;
}

/// True when some method occurs more often in `more` than in `fewer`.
bool gained(const std::map<MethodRef, std::size_t>& fewer, const std::map<MethodRef, std::size_t>& more) {
    for (const auto& [method, count] : more) {
        const auto it = fewer.find(method);
        if (it == fewer.end() || it->second < count) return true;
    }
    return false;
}

std::optional<std::string> declared_version(const std::vector<LibraryCoordinate>& libraries, const LibraryId& id) {
    for (const auto& c : libraries) {
        if (c.id() == id) return c.version;
    }
    return std::nullopt;
}

} // namespace

std::vector<CommitSignal> build_timeline(const ProjectHistory& history, const RuleKey& rule,
                                         const PackageIndex& source_index, const PackageIndex& target_index,
                                         const SegmentOptions& options) {
    std::vector<CommitSignal> timeline;
    std::set<std::string> dependent;
    const auto& records = history.project().commits();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& data = history.commits()[i];
        CommitSignal signal;
        signal.commit_id = records[i].commit_id;
        signal.source_version = declared_version(data.libraries, rule.source);
        signal.target_version = declared_version(data.libraries, rule.target);
        signal.target_declared = signal.target_version.has_value();
        for (const auto& change : data.java_changes) {
            const SourceFacts* before =
                change.before ? &history.facts(change.before_blob, change.path, *change.before) : nullptr;
            const SourceFacts* after =
                change.after ? &history.facts(change.after_blob, change.path, *change.after) : nullptr;
            if (change.kind == ChangeKind::renamed) dependent.erase(change.old_path);
            dependent.erase(change.path);
            if (after != nullptr && file_depends_on(*after, source_index, options.imports_count_as_use)) {
                dependent.insert(change.path);
            }
            const auto source_before = use_counts(before, source_index);
            const auto source_after = use_counts(after, source_index);
            const auto target_before = use_counts(before, target_index);
            const auto target_after = use_counts(after, target_index);
            signal.removes_source_use |= gained(source_after, source_before);
            signal.adds_target_use |= gained(target_before, target_after);
            signal.touches_library_code |= !source_before.empty() || !source_after.empty() ||
                                           !target_before.empty() || !target_after.empty();
        }
        signal.dependent_files = dependent.size();
        timeline.push_back(std::move(signal));
    }
    return timeline;
}

bool rule_applies(const std::vector<DependencyChange>& changes, const RuleKey& rule) {
    bool source = false;
    bool target = false;
    for (const auto& change : changes) {
        for (const auto* side : {&change.added, &change.removed}) {
            for (const auto& c : *side) {
                source |= c.id() == rule.source;
                target |= c.id() == rule.target;
            }
        }
    }
    return source && target;
}

std::vector<Segment> detect_segments(const ProjectHistory& history, const RuleKey& rule,
                                     const PackageIndex& source_index, const PackageIndex& target_index,
                                     const SegmentOptions& options) {
    const auto timeline = build_timeline(history, rule, source_index, target_index, options);
    std::vector<Segment> segments;
    for (const auto& bounds : find_segments(timeline)) {
        segments.push_back(record_versions(timeline, bounds, history.project().ref().id, rule));
    }
    return segments;
}

} // namespace depmig
