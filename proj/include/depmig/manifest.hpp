#pragma once

#include "depmig/model.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace depmig {

/// Same library declared with a different version on each side.
struct VersionUpgrade {
    LibraryId library;
    std::string from;
    std::string to;

    bool operator==(const VersionUpgrade&) const = default;
};

/// Library-level delta between two manifest states. `added` and `removed` never share an
/// identity; both are sorted and deduplicated by identity.
struct DependencyChange {
    std::string project;
    std::string commit;
    std::vector<LibraryCoordinate> added;
    std::vector<LibraryCoordinate> removed;
    std::vector<VersionUpgrade> upgrades;

    bool empty() const { return added.empty() && removed.empty(); }
};

/// Parses the <dependency> entries of a POM, in document order. `${name}` placeholders in
/// group/artifact/version are interpolated from <properties> and the project's own
/// version/groupId; anything left unresolved yields the version "unresolved".
/// Throws ManifestParseError (with line/column) on malformed XML.
std::vector<LibraryCoordinate> parse_manifest(std::string_view content);

/// Identity-level diff. Identities on both sides with different versions become upgrades
/// and are excluded from added/removed.
DependencyChange diff_dependencies(const std::vector<LibraryCoordinate>& before,
                                   const std::vector<LibraryCoordinate>& after);

/// Union of the dependencies declared by every manifest of a project at one commit.
/// When several manifests declare one identity, a resolved version wins over
/// "unresolved", then the manifest with the smallest path.
class DependencySet {
public:
    void set_manifest(const std::string& path, std::vector<LibraryCoordinate> coordinates);
    void remove_manifest(const std::string& path);

    std::vector<LibraryCoordinate> libraries() const;
    bool operator==(const DependencySet&) const = default;

private:
    std::map<std::string, std::vector<LibraryCoordinate>> manifests_;
};

} // namespace depmig
