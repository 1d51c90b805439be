#pragma once

#include "depmig/model.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace depmig {

/// Classes and packages published by one library, used to decide whether client code
/// refers to it. Nested classes are folded into their outermost class.
struct PackageIndex {
    LibraryCoordinate library;
    std::set<std::string> classes;  // fully qualified, dotted
    std::set<std::string> packages;
    /// Set for indices synthesized from the coordinate's group when no class archive was
    /// available; membership is then decided by package prefix.
    bool low_confidence = false;

    bool has_class(std::string_view fqn) const;
    bool has_package(std::string_view package) const;
    /// Maps a possibly nested qualified name ("a.B.C") to the indexed outer class ("a.B").
    std::optional<std::string> owning_class(std::string_view qualified) const;
};

/// Builds an index from a zip-format class archive. Throws IndexError when the archive is
/// unreadable or holds no classes.
PackageIndex build_package_index(const LibraryCoordinate& coordinate, std::string archive);

/// Low-confidence index treating the coordinate's group as the package prefix.
PackageIndex fallback_package_index(const LibraryCoordinate& coordinate);

struct Import {
    std::string name; // "a.b.C", "a.b" for wildcards, "a.b.C.m" for static members
    bool is_static = false;
    bool is_wildcard = false;
    std::size_t line = 0;

    bool operator==(const Import&) const = default;
};

struct Declaration {
    std::string name;
    std::string type; // as written, generics stripped; empty for untyped lambda parameters
    std::size_t line = 0;
    std::size_t scope_begin = 0; // byte offsets, half-open
    std::size_t scope_end = 0;
    bool is_field = false;

    bool operator==(const Declaration&) const = default;
};

enum class InvocationKind { constructor, instance, static_call, static_imported };

std::string_view to_string(InvocationKind kind);

struct Invocation {
    std::size_t line = 0;
    std::size_t offset = 0;
    InvocationKind kind = InvocationKind::instance;
    /// Variable name, type name, or qualified class name; empty for unqualified calls or
    /// receivers that are arbitrary expressions.
    std::string receiver;
    /// Type of the receiver when it is evident in the file: the declared type of a variable,
    /// the class of a constructor-chained call, or the class itself for constructors and
    /// static calls.
    std::string receiver_type;
    std::string method; // class simple name for constructors
    std::size_t arity = 0;

    bool operator==(const Invocation&) const = default;
};

struct SourceFacts {
    std::string path;
    std::string package_name;
    std::vector<Import> imports;
    std::vector<Declaration> declarations;
    std::vector<Invocation> invocations;
    std::set<std::string> declared_types;   // classes/interfaces/enums/records defined in the file
    std::set<std::string> declared_methods; // method names defined in the file
    std::size_t line_count = 0;
};

/// Best-effort extraction over any text; never throws on malformed input. Comments and
/// string literals are skipped.
SourceFacts extract_facts(std::string_view source, std::string path = {});

struct LibraryMethodUse {
    LibraryId library;
    MethodRef method;
    std::size_t line = 0;

    auto operator<=>(const LibraryMethodUse&) const = default;
    bool operator==(const LibraryMethodUse&) const = default;
};

/// Invocations whose receiver or constructed type resolves, through the file's imports or
/// package, to a class of `index`. Unresolvable invocations are left out.
std::vector<LibraryMethodUse> resolve_usages(const SourceFacts& facts, const PackageIndex& index);

/// True when an import names a class or package of the library (if `imports_count_as_use`)
/// or any invocation resolves to it.
bool file_depends_on(const SourceFacts& facts, const PackageIndex& index, bool imports_count_as_use = true);
bool file_depends_on(std::string_view source, const PackageIndex& index, bool imports_count_as_use = true);

} // namespace depmig
