#pragma once

#include "depmig/diff.hpp"
#include "depmig/java_facts.hpp"
#include "depmig/model.hpp"
#include "depmig/segments.hpp"

#include <set>
#include <string>
#include <vector>

namespace depmig {

/// Identity of a segment: project, rule and start commit.
struct SegmentRef {
    std::string project;
    RuleKey rule;
    std::string start_commit;

    auto operator<=>(const SegmentRef&) const = default;
    bool operator==(const SegmentRef&) const = default;

    static SegmentRef of(const Segment& segment) { return {segment.project, segment.rule, segment.start_commit}; }
};

/// A hunk witnessing at least one source -> target method mapping.
struct Fragment {
    SegmentRef segment;
    std::string commit;
    Hunk hunk;
    std::vector<LibraryMethodUse> removed_uses; // source library, on removed lines
    std::vector<LibraryMethodUse> added_uses;   // target library, on added lines

    std::set<MethodRef> source_methods() const;
    std::set<MethodRef> target_methods() const;
};

struct MethodMapping {
    RuleKey rule;
    std::set<MethodRef> source_methods;
    std::set<MethodRef> target_methods;
    std::size_t support = 0;

    bool operator==(const MethodMapping&) const = default;
};

/// Keeps hunks that remove a source-library use and add a target-library use. Uses are
/// attributed through line numbers of the full before/after file versions.
std::vector<Fragment> filter_fragments(const std::vector<Hunk>& hunks, const SegmentRef& segment,
                                       const std::string& commit, const SourceFacts& before,
                                       const SourceFacts& after, const PackageIndex& source_index,
                                       const PackageIndex& target_index);

/// Aggregates identical (source set, target set) pairs per rule; sorted by support
/// descending, then rule and method sets.
std::vector<MethodMapping> extract_mappings(const std::vector<Fragment>& fragments);

/// Fragments of every Java file changed by the commits of a segment. Renamed files are
/// diffed against their old content.
std::vector<Fragment> detect_fragments(const ProjectHistory& history, const Segment& segment,
                                       const PackageIndex& source_index, const PackageIndex& target_index,
                                       std::size_t context_lines = 3);

/// Review text for one fragment: "### fragment <project> <commit> <file> <rule>" followed
/// by file headers and the hunk.
std::string format_fragment(const Fragment& fragment);

} // namespace depmig
