#include "depmig/diff.hpp"

#include "depmig/error.hpp"

#include <unordered_map>

namespace depmig {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto nl = text.find('\n', start);
        const auto end = nl == std::string_view::npos ? text.size() : nl + 1;
        lines.push_back(text.substr(start, end - start));
        start = end;
    }
    return lines;
}

namespace {

// Linear-space Myers diff over interned lines; marks the lines that are not part of the
// common subsequence.
class LineDiff {
public:
    LineDiff(const std::vector<int>& a, const std::vector<int>& b)
        : a_(a), b_(b), removed_(a.size(), false), added_(b.size(), false) {
        compare(0, static_cast<long>(a.size()), 0, static_cast<long>(b.size()));
    }

    const std::vector<bool>& removed() const { return removed_; }
    const std::vector<bool>& added() const { return added_; }

private:
    const std::vector<int>& a_;
    const std::vector<int>& b_;
    std::vector<bool> removed_;
    std::vector<bool> added_;

    void compare(long alo, long ahi, long blo, long bhi) {
        while (alo < ahi && blo < bhi && a_[alo] == b_[blo]) {
            ++alo;
            ++blo;
        }
        while (alo < ahi && blo < bhi && a_[ahi - 1] == b_[bhi - 1]) {
            --ahi;
            --bhi;
        }
        if (alo == ahi) {
            for (long j = blo; j < bhi; ++j) added_[j] = true;
            return;
        }
        if (blo == bhi) {
            for (long i = alo; i < ahi; ++i) removed_[i] = true;
            return;
        }
        bisect(alo, ahi, blo, bhi);
    }

    void bisect(long alo, long ahi, long blo, long bhi) {
        const long n = ahi - alo;
        const long m = bhi - blo;
        const long max_d = (n + m + 1) / 2;
        const long offset = max_d;
        const long length = 2 * max_d + 2;
        std::vector<long> v1(length, -1);
        std::vector<long> v2(length, -1);
        v1[offset + 1] = 0;
        v2[offset + 1] = 0;
        const long delta = n - m;
        const bool front = delta % 2 != 0;
        long k1start = 0, k1end = 0, k2start = 0, k2end = 0;
        for (long d = 0; d < max_d; ++d) {
            for (long k1 = -d + k1start; k1 <= d - k1end; k1 += 2) {
                const long k1_off = offset + k1;
                long x1 = (k1 == -d || (k1 != d && v1[k1_off - 1] < v1[k1_off + 1])) ? v1[k1_off + 1]
                                                                                      : v1[k1_off - 1] + 1;
                long y1 = x1 - k1;
                while (x1 < n && y1 < m && a_[alo + x1] == b_[blo + y1]) {
                    ++x1;
                    ++y1;
                }
                v1[k1_off] = x1;
                if (x1 > n) {
                    k1end += 2;
                } else if (y1 > m) {
                    k1start += 2;
                } else if (front) {
                    const long k2_off = offset + delta - k1;
                    if (k2_off >= 0 && k2_off < length && v2[k2_off] != -1 && x1 >= n - v2[k2_off]) {
                        split(alo, ahi, blo, bhi, x1, y1);
                        return;
                    }
                }
            }
            for (long k2 = -d + k2start; k2 <= d - k2end; k2 += 2) {
                const long k2_off = offset + k2;
                long x2 = (k2 == -d || (k2 != d && v2[k2_off - 1] < v2[k2_off + 1])) ? v2[k2_off + 1]
                                                                                      : v2[k2_off - 1] + 1;
                long y2 = x2 - k2;
                while (x2 < n && y2 < m && a_[ahi - x2 - 1] == b_[bhi - y2 - 1]) {
                    ++x2;
                    ++y2;
                }
                v2[k2_off] = x2;
                if (x2 > n) {
                    k2end += 2;
                } else if (y2 > m) {
                    k2start += 2;
                } else if (!front) {
                    const long k1_off = offset + delta - k2;
                    if (k1_off >= 0 && k1_off < length && v1[k1_off] != -1) {
                        const long x1 = v1[k1_off];
                        const long y1 = offset + x1 - k1_off;
                        if (x1 >= n - x2) {
                            split(alo, ahi, blo, bhi, x1, y1);
                            return;
                        }
                    }
                }
            }
        }
        // No common line at all.
        for (long i = alo; i < ahi; ++i) removed_[i] = true;
        for (long j = blo; j < bhi; ++j) added_[j] = true;
    }

    void split(long alo, long ahi, long blo, long bhi, long x, long y) {
        compare(alo, alo + x, blo, blo + y);
        compare(alo + x, ahi, blo + y, bhi);
    }
};

struct Op {
    LineTag tag;
    std::size_t a; // index into before lines at this op
    std::size_t b;
};

} // namespace

std::vector<Hunk> unified_diff(std::string_view before, std::string_view after, std::size_t context,
                               const std::string& file) {
    const auto a_lines = split_lines(before);
    const auto b_lines = split_lines(after);
    std::unordered_map<std::string_view, int> ids;
    auto intern = [&](const std::vector<std::string_view>& lines) {
        std::vector<int> out;
        out.reserve(lines.size());
        for (const auto line : lines) {
            out.push_back(ids.try_emplace(line, static_cast<int>(ids.size())).first->second);
        }
        return out;
    };
    const auto a = intern(a_lines);
    const auto b = intern(b_lines);
    const LineDiff diff(a, b);

    std::vector<Op> ops;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() || j < b.size()) {
        if (i < a.size() && diff.removed()[i]) {
            ops.push_back({LineTag::removed, i, j});
            ++i;
        } else if (j < b.size() && diff.added()[j]) {
            ops.push_back({LineTag::added, i, j});
            ++j;
        } else {
            ops.push_back({LineTag::context, i, j});
            ++i;
            ++j;
        }
    }

    std::vector<Hunk> hunks;
    std::size_t k = 0;
    while (k < ops.size()) {
        while (k < ops.size() && ops[k].tag == LineTag::context) ++k;
        if (k == ops.size()) break;
        const std::size_t first_change = k;
        std::size_t last_change = k;
        std::size_t scan = k + 1;
        while (scan < ops.size()) {
            if (ops[scan].tag != LineTag::context) {
                last_change = scan;
                ++scan;
                continue;
            }
            std::size_t run_end = scan;
            while (run_end < ops.size() && ops[run_end].tag == LineTag::context) ++run_end;
            if (run_end == ops.size() || run_end - scan > 2 * context) break;
            scan = run_end;
        }
        const std::size_t lo = first_change >= context ? first_change - context : 0;
        const std::size_t hi = std::min(ops.size(), last_change + context + 1);

        Hunk hunk;
        hunk.file = file;
        for (std::size_t p = lo; p < hi; ++p) {
            const auto& op = ops[p];
            HunkLine line;
            line.tag = op.tag;
            if (op.tag == LineTag::added) {
                line.text = std::string(b_lines[op.b]);
                line.after_line = op.b + 1;
                ++hunk.after.length;
            } else {
                line.text = std::string(a_lines[op.a]);
                line.before_line = op.a + 1;
                ++hunk.before.length;
                if (op.tag == LineTag::context) {
                    line.after_line = op.b + 1;
                    ++hunk.after.length;
                }
            }
            hunk.lines.push_back(std::move(line));
        }
        hunk.before.start = ops[lo].a + (hunk.before.length > 0 ? 1 : 0);
        hunk.after.start = ops[lo].b + (hunk.after.length > 0 ? 1 : 0);
        hunks.push_back(std::move(hunk));
        k = hi;
    }
    return hunks;
}

std::string apply_hunks(std::string_view before, const std::vector<Hunk>& hunks) {
    const auto lines = split_lines(before);
    std::string out;
    out.reserve(before.size());
    std::size_t next = 0; // 0-based index of the next unconsumed before line
    for (const auto& hunk : hunks) {
        const std::size_t first = hunk.before.length == 0 ? hunk.before.start : hunk.before.start - 1;
        if (first < next || first > lines.size()) {
            throw Error("hunk " + hunk.header() + " does not fit");
        }
        for (; next < first; ++next) out += lines[next];
        for (const auto& line : hunk.lines) {
            if (line.tag == LineTag::added) {
                out += line.text;
                continue;
            }
            if (next >= lines.size() || lines[next] != line.text) {
                throw Error("hunk " + hunk.header() + " does not match the original text");
            }
            if (line.tag == LineTag::context) out += line.text;
            ++next;
        }
    }
    for (; next < lines.size(); ++next) out += lines[next];
    return out;
}

std::string Hunk::header() const {
    auto range = [](const LineRange& r) {
        std::string s = std::to_string(r.start);
        if (r.length != 1) s += "," + std::to_string(r.length);
        return s;
    };
    return "@@ -" + range(before) + " +" + range(after) + " @@";
}

std::string format_hunk(const Hunk& hunk) {
    std::string out = hunk.header() + "\n";
    for (const auto& line : hunk.lines) {
        out += line.tag == LineTag::context ? ' ' : line.tag == LineTag::removed ? '-' : '+';
        out += line.text;
        if (line.text.empty() || line.text.back() != '\n') {
            out += "\n\\ No newline at end of file\n";
        }
    }
    return out;
}

} // namespace depmig
