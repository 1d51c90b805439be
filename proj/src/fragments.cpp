#include "depmig/fragments.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace depmig {

std::set<MethodRef> Fragment::source_methods() const {
    std::set<MethodRef> out;
    for (const auto& use : removed_uses) out.insert(use.method);
    return out;
}

std::set<MethodRef> Fragment::target_methods() const {
    std::set<MethodRef> out;
    for (const auto& use : added_uses) out.insert(use.method);
    return out;
}

namespace {

std::vector<LibraryMethodUse> uses_on(const std::vector<LibraryMethodUse>& uses,
                                      const std::unordered_set<std::size_t>& lines) {
    std::vector<LibraryMethodUse> out;
    for (const auto& use : uses) {
        if (lines.contains(use.line)) out.push_back(use);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

std::vector<Fragment> filter_fragments(const std::vector<Hunk>& hunks, const SegmentRef& segment,
                                       const std::string& commit, const SourceFacts& before,
                                       const SourceFacts& after, const PackageIndex& source_index,
                                       const PackageIndex& target_index) {
    std::vector<Fragment> out;
    if (hunks.empty()) return out;
    const auto source_uses = resolve_usages(before, source_index);
    const auto target_uses = resolve_usages(after, target_index);
    for (const auto& hunk : hunks) {
        std::unordered_set<std::size_t> removed_lines;
        std::unordered_set<std::size_t> added_lines;
        for (const auto& line : hunk.lines) {
            if (line.tag == LineTag::removed) removed_lines.insert(line.before_line);
            if (line.tag == LineTag::added) added_lines.insert(line.after_line);
        }
        auto removed = uses_on(source_uses, removed_lines);
        auto added = uses_on(target_uses, added_lines);
        if (removed.empty() || added.empty()) continue;
        out.push_back({segment, commit, hunk, std::move(removed), std::move(added)});
    }
    return out;
}

std::vector<MethodMapping> extract_mappings(const std::vector<Fragment>& fragments) {
    std::map<std::tuple<RuleKey, std::set<MethodRef>, std::set<MethodRef>>, std::size_t> support;
    for (const auto& f : fragments) {
        ++support[{f.segment.rule, f.source_methods(), f.target_methods()}];
    }
    std::vector<MethodMapping> out;
    for (const auto& [key, count] : support) {
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const MethodMapping& a, const MethodMapping& b) { return a.support > b.support; });
    return out;
}

std::vector<Fragment> detect_fragments(const ProjectHistory& history, const Segment& segment,
                                       const PackageIndex& source_index, const PackageIndex& target_index,
                                       std::size_t context_lines) {
    std::vector<Fragment> out;
    const auto ref = SegmentRef::of(segment);
    const auto& project = history.project();
    for (const auto& commit : segment.commits) {
        const auto ordinal = project.ordinal(commit);
        for (const auto& change : history.commits()[ordinal].java_changes) {
            if (!change.before || !change.after) continue; // one-sided files cannot hold both uses
            const auto& before = history.facts(change.before_blob, change.path, *change.before);
            const auto& after = history.facts(change.after_blob, change.path, *change.after);
            const auto hunks = unified_diff(*change.before, *change.after, context_lines, change.path);
            auto found = filter_fragments(hunks, ref, commit, before, after, source_index, target_index);
            out.insert(out.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
        }
    }
    return out;
}

std::string format_fragment(const Fragment& fragment) {
    const auto& file = fragment.hunk.file;
    std::string out = "### fragment " + fragment.segment.project + " " + fragment.commit + " " + file + " " +
                      fragment.segment.rule.source.str() + "->" + fragment.segment.rule.target.str() + "\n";
    out += "--- a/" + file + "\n+++ b/" + file + "\n";
    out += format_hunk(fragment.hunk);
    return out;
}

} // namespace depmig
