#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace depmig {

enum class LineTag { context, removed, added };

/// Line range of a hunk side. For an empty range `start` is the line preceding the
/// change (0 at the beginning of the file), as in GNU unified diffs.
struct LineRange {
    std::size_t start = 0;
    std::size_t length = 0;

    bool operator==(const LineRange&) const = default;
};

struct HunkLine {
    LineTag tag = LineTag::context;
    std::string text;            // including its newline, if the line had one
    std::size_t before_line = 0; // 1-based; 0 for added lines
    std::size_t after_line = 0;  // 1-based; 0 for removed lines

    bool operator==(const HunkLine&) const = default;
};

struct Hunk {
    std::string file;
    LineRange before;
    LineRange after;
    std::vector<HunkLine> lines;

    /// "@@ -a,b +c,d @@"
    std::string header() const;
    bool operator==(const Hunk&) const = default;
};

/// Splits text into lines, each keeping its trailing '\n'.
std::vector<std::string_view> split_lines(std::string_view text);

/// Line-based unified diff (minimal edit script, `context` lines around each change;
/// hunks whose context would overlap or touch are merged).
std::vector<Hunk> unified_diff(std::string_view before, std::string_view after, std::size_t context = 3,
                               const std::string& file = {});

/// Applies hunks produced from `before`; throws Error when they do not fit.
std::string apply_hunks(std::string_view before, const std::vector<Hunk>& hunks);

/// Hunk text in unified-diff notation, without file headers.
std::string format_hunk(const Hunk& hunk);

} // namespace depmig
