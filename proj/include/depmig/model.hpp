#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>

namespace depmig {

inline constexpr std::string_view kUnresolvedVersion = "unresolved";

/// Library identity: the (group, artifact) pair. Versions never take part in identity.
struct LibraryId {
    std::string group;
    std::string artifact;

    std::string str() const { return group + ":" + artifact; }
    auto operator<=>(const LibraryId&) const = default;
    bool operator==(const LibraryId&) const = default;

    /// Parses "group:artifact"; throws UsageError on malformed input.
    static LibraryId parse(std::string_view text);
};

/// A (group, artifact, version) build dependency.
struct LibraryCoordinate {
    std::string group;
    std::string artifact;
    std::string version{kUnresolvedVersion};

    LibraryId id() const { return {group, artifact}; }
    bool resolved() const { return !version.empty() && version != kUnresolvedVersion; }
    std::string str() const { return group + ":" + artifact + ":" + version; }
    auto operator<=>(const LibraryCoordinate&) const = default;
    bool operator==(const LibraryCoordinate&) const = default;
};

/// Directed source -> target pair identifying a migration rule.
struct RuleKey {
    LibraryId source;
    LibraryId target;

    std::string str() const { return source.str() + " -> " + target.str(); }
    auto operator<=>(const RuleKey&) const = default;
    bool operator==(const RuleKey&) const = default;
};

/// A library method at arity granularity. Constructors use the method name "<init>".
struct MethodRef {
    std::string class_name; // fully qualified
    std::string method;
    std::size_t arity = 0;

    std::string str() const { return class_name + "." + method + "/" + std::to_string(arity); }
    std::string simple_class_name() const;
    bool is_constructor() const { return method == "<init>"; }

    static MethodRef parse(std::string_view text);
    auto operator<=>(const MethodRef&) const = default;
    bool operator==(const MethodRef&) const = default;
};

inline constexpr std::string_view kConstructorName = "<init>";

} // namespace depmig
