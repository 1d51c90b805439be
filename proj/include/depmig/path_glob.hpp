#pragma once

#include <regex>
#include <string>
#include <string_view>

namespace depmig {

/// Repo-relative path glob. `*` and `?` stay within one path segment, `**/` spans zero or more
/// directories, so "**/pom.xml" matches both "pom.xml" and "a/b/pom.xml".
class PathGlob {
public:
    explicit PathGlob(std::string pattern);

    bool matches(std::string_view path) const;
    const std::string& pattern() const noexcept { return pattern_; }

private:
    std::string pattern_;
    std::regex regex_;
};

} // namespace depmig
