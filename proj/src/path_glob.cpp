#include "depmig/path_glob.hpp"

namespace depmig {
namespace {

std::string glob_to_regex(std::string_view glob) {
    std::string out;
    for (std::size_t i = 0; i < glob.size(); ++i) {
        const char c = glob[i];
        if (c == '*') {
            if (i + 1 < glob.size() && glob[i + 1] == '*') {
                if (i + 2 < glob.size() && glob[i + 2] == '/') {
                    out += "(?:.*/)?";
                    i += 2;
                } else {
                    out += ".*";
                    i += 1;
                }
            } else {
                out += "[^/]*";
            }
        } else if (c == '?') {
            out += "[^/]";
        } else if (std::string_view("\\^$.|+()[]{}").find(c) != std::string_view::npos) {
            out += '\\';
            out += c;
        } else {
            out += c;
        }
    }
    return out;
}

} // namespace

PathGlob::PathGlob(std::string pattern)
    : pattern_(std::move(pattern)), regex_(glob_to_regex(pattern_), std::regex::ECMAScript) {}

bool PathGlob::matches(std::string_view path) const {
    return std::regex_match(path.begin(), path.end(), regex_);
}

} // namespace depmig
