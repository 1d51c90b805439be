#pragma once

#include "depmig/java_facts.hpp"
#include "depmig/manifest.hpp"
#include "depmig/model.hpp"
#include "depmig/vcs.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace depmig {

struct Segment {
    std::string project;
    RuleKey rule;
    std::string start_commit;
    std::string end_commit;
    std::string source_version{kUnresolvedVersion};
    std::string target_version{kUnresolvedVersion};
    std::vector<std::string> commits; // oldest first, within [start, end]
    /// The start commit adds target uses without removing any source use.
    bool weak_start = false;

    bool operator==(const Segment&) const = default;
};

/// What one commit means for one rule, evaluated on the tree after the commit.
struct CommitSignal {
    std::string commit_id;
    std::size_t dependent_files = 0; // files depending on the source library
    bool target_declared = false;
    std::optional<std::string> source_version; // declared versions, if declared
    std::optional<std::string> target_version;
    bool removes_source_use = false;
    bool adds_target_use = false;
    /// Some changed file has a source or target use in its before or after version.
    bool touches_library_code = false;

    bool qualifies() const { return removes_source_use || adds_target_use; }
};

/// Index into `timeline` of the earliest commit E where the target is declared and from
/// which on no file depends on the source library; nullopt when the history never gets
/// there or the source library was never used in code.
std::optional<std::size_t> find_segment_end(const std::vector<CommitSignal>& timeline);

/// Earliest qualifying commit in [bound, end], where bound is the first commit of the
/// uninterrupted run of target declarations leading to `end` (clamped to `floor`).
/// Returns `end` when nothing earlier qualifies.
std::size_t find_segment_start(const std::vector<CommitSignal>& timeline, std::size_t end, std::size_t floor = 0);

struct SegmentBounds {
    std::size_t start = 0;
    std::size_t end = 0;
    bool operator==(const SegmentBounds&) const = default;
};

/// All migration periods, oldest first. Requires the final dependency-free run to reach
/// the last commit; every earlier dependency-free run that follows a dependent commit and
/// declares the target yields an additional, disjoint period.
std::vector<SegmentBounds> find_segments(const std::vector<CommitSignal>& timeline);

/// Fills versions and the commit list of a segment with the given bounds.
Segment record_versions(const std::vector<CommitSignal>& timeline, const SegmentBounds& bounds,
                        const std::string& project, const RuleKey& rule);

/// Manifest and Java source history of one ingested project, read once and shared by all
/// rules evaluated on it.
class ProjectHistory {
public:
    struct CommitData {
        std::vector<FileChange> java_changes;
        std::vector<LibraryCoordinate> libraries; // union over manifests after the commit
        bool manifest_changed = false;
    };

    explicit ProjectHistory(const IngestedProject& project);

    const IngestedProject& project() const noexcept { return project_; }
    const std::vector<CommitData>& commits() const noexcept { return commits_; }

    /// Facts of a blob (cached by blob id); `content` is used on a cache miss.
    const SourceFacts& facts(const std::string& blob_id, const std::string& path, const std::string& content) const;

    /// Dependency changes of every commit that changed the declared library set.
    std::vector<DependencyChange> dependency_changes() const;

private:
    const IngestedProject& project_;
    std::vector<CommitData> commits_;
    mutable std::unordered_map<std::string, std::unique_ptr<SourceFacts>> facts_;
};

struct SegmentOptions {
    bool imports_count_as_use = true;
};

/// Evaluates every commit of the project for `rule`.
std::vector<CommitSignal> build_timeline(const ProjectHistory& history, const RuleKey& rule,
                                         const PackageIndex& source_index, const PackageIndex& target_index,
                                         const SegmentOptions& options = {});

/// True when both libraries of the rule appear among the project's added or removed
/// libraries.
bool rule_applies(const std::vector<DependencyChange>& changes, const RuleKey& rule);

/// Full segment detection for one (project, rule).
std::vector<Segment> detect_segments(const ProjectHistory& history, const RuleKey& rule,
                                     const PackageIndex& source_index, const PackageIndex& target_index,
                                     const SegmentOptions& options = {});

} // namespace depmig
