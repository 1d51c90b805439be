#include "depmig/manifest.hpp"

#include "depmig/error.hpp"

#include <boost/property_tree/detail/rapidxml.hpp>

#include <algorithm>

namespace rx = boost::property_tree::detail::rapidxml;

namespace depmig {
namespace {

using Node = rx::xml_node<char>;

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

/// Element name without any namespace prefix.
std::string_view local_name(const Node& node) {
    std::string_view name(node.name(), node.name_size());
    const auto colon = name.find(':');
    return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

const Node* child(const Node* parent, std::string_view name) {
    if (parent == nullptr) {
        return nullptr;
    }
    for (auto* c = parent->first_node(); c != nullptr; c = c->next_sibling()) {
        if (c->type() == rx::node_element && local_name(*c) == name) {
            return c;
        }
    }
    return nullptr;
}

std::string text_of(const Node* node) {
    if (node == nullptr) {
        return {};
    }
    std::string text;
    for (auto* c = node->first_node(); c != nullptr; c = c->next_sibling()) {
        if (c->type() == rx::node_data || c->type() == rx::node_cdata) {
            text.append(c->value(), c->value_size());
        }
    }
    return trim(text);
}

void collect_dependencies(const Node* node, std::vector<const Node*>& out) {
    for (auto* c = node->first_node(); c != nullptr; c = c->next_sibling()) {
        if (c->type() != rx::node_element) {
            continue;
        }
        if (local_name(*c) == "dependency") {
            out.push_back(c);
        } else {
            collect_dependencies(c, out);
        }
    }
}

class Interpolator {
public:
    explicit Interpolator(const Node* project) {
        if (project == nullptr) {
            return;
        }
        if (const auto* props = child(project, "properties")) {
            for (auto* p = props->first_node(); p != nullptr; p = p->next_sibling()) {
                if (p->type() == rx::node_element) {
                    values_.emplace(std::string(local_name(*p)), text_of(p));
                }
            }
        }
        const auto* parent = child(project, "parent");
        auto own_or_parent = [&](std::string_view element) {
            auto value = text_of(child(project, element));
            return value.empty() ? text_of(child(parent, element)) : value;
        };
        const auto version = own_or_parent("version");
        const auto group = own_or_parent("groupId");
        for (const auto* key : {"project.version", "pom.version", "version"}) {
            if (!version.empty()) values_.try_emplace(key, version);
        }
        for (const auto* key : {"project.groupId", "pom.groupId", "groupId"}) {
            if (!group.empty()) values_.try_emplace(key, group);
        }
        if (const auto artifact = text_of(child(project, "artifactId")); !artifact.empty()) {
            values_.try_emplace("project.artifactId", artifact);
        }
        if (const auto pv = text_of(child(parent, "version")); !pv.empty()) {
            values_.try_emplace("project.parent.version", pv);
        }
        if (const auto pg = text_of(child(parent, "groupId")); !pg.empty()) {
            values_.try_emplace("project.parent.groupId", pg);
        }
    }

    /// Returns false when a placeholder cannot be resolved.
    bool expand(std::string& text, int depth = 0) const {
        if (depth > 16) {
            return false;
        }
        std::string out;
        std::size_t pos = 0;
        bool complete = true;
        while (pos < text.size()) {
            const auto open = text.find("${", pos);
            if (open == std::string::npos) {
                out.append(text, pos);
                break;
            }
            const auto close = text.find('}', open + 2);
            if (close == std::string::npos) {
                out.append(text, pos);
                complete = false;
                break;
            }
            out.append(text, pos, open - pos);
            const auto key = text.substr(open + 2, close - open - 2);
            const auto it = values_.find(key);
            std::string value;
            if (it != values_.end()) {
                value = it->second;
                complete &= expand(value, depth + 1);
            } else {
                value = text.substr(open, close - open + 1);
                complete = false;
            }
            out += value;
            pos = close + 1;
        }
        text = std::move(out);
        return complete;
    }

private:
    std::map<std::string, std::string> values_;
};

std::pair<int, int> line_column(std::string_view text, const char* where) {
    int line = 1;
    int column = 1;
    const auto offset = where == nullptr ? text.size()
                                         : std::min<std::size_t>(static_cast<std::size_t>(where - text.data()),
                                                                 text.size());
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

} // namespace

std::vector<LibraryCoordinate> parse_manifest(std::string_view content) {
    std::vector<char> buffer(content.begin(), content.end());
    buffer.push_back('\0');
    rx::xml_document<char> doc;
    try {
        doc.parse<rx::parse_validate_closing_tags>(buffer.data());
    } catch (const rx::parse_error& e) {
        const auto [line, column] = line_column(std::string_view(buffer.data(), content.size()), e.where<char>());
        throw ManifestParseError(e.what(), line, column);
    }

    const Node* project = nullptr;
    for (auto* n = doc.first_node(); n != nullptr; n = n->next_sibling()) {
        if (n->type() == rx::node_element) {
            project = n;
            break;
        }
    }
    std::vector<LibraryCoordinate> coordinates;
    if (project == nullptr) {
        return coordinates;
    }
    const Interpolator interpolator(project);
    std::vector<const Node*> entries;
    collect_dependencies(project, entries);
    for (const auto* entry : entries) {
        auto group = text_of(child(entry, "groupId"));
        auto artifact = text_of(child(entry, "artifactId"));
        auto version = text_of(child(entry, "version"));
        interpolator.expand(group);
        interpolator.expand(artifact);
        if (group.empty() || artifact.empty()) {
            continue;
        }
        if (version.empty() || !interpolator.expand(version) || version.empty()) {
            version = std::string(kUnresolvedVersion);
        }
        coordinates.push_back({std::move(group), std::move(artifact), std::move(version)});
    }
    return coordinates;
}

namespace {

std::map<LibraryId, std::string> by_identity(const std::vector<LibraryCoordinate>& coordinates) {
    std::map<LibraryId, std::string> out;
    for (const auto& c : coordinates) {
        auto [it, inserted] = out.try_emplace(c.id(), c.version);
        if (!inserted && it->second == kUnresolvedVersion && c.resolved()) {
            it->second = c.version;
        }
    }
    return out;
}

} // namespace

DependencyChange diff_dependencies(const std::vector<LibraryCoordinate>& before,
                                   const std::vector<LibraryCoordinate>& after) {
    const auto old_libs = by_identity(before);
    const auto new_libs = by_identity(after);
    DependencyChange change;
    for (const auto& [id, version] : new_libs) {
        const auto it = old_libs.find(id);
        if (it == old_libs.end()) {
            change.added.push_back({id.group, id.artifact, version});
        } else if (it->second != version) {
            change.upgrades.push_back({id, it->second, version});
        }
    }
    for (const auto& [id, version] : old_libs) {
        if (!new_libs.contains(id)) {
            change.removed.push_back({id.group, id.artifact, version});
        }
    }
    return change;
}

void DependencySet::set_manifest(const std::string& path, std::vector<LibraryCoordinate> coordinates) {
    manifests_[path] = std::move(coordinates);
}

void DependencySet::remove_manifest(const std::string& path) { manifests_.erase(path); }

std::vector<LibraryCoordinate> DependencySet::libraries() const {
    std::map<LibraryId, std::string> merged;
    for (const auto& [path, coordinates] : manifests_) {
        for (const auto& c : coordinates) {
            auto [it, inserted] = merged.try_emplace(c.id(), c.version);
            if (!inserted && it->second == kUnresolvedVersion && c.resolved()) {
                it->second = c.version;
            }
        }
    }
    std::vector<LibraryCoordinate> out;
    out.reserve(merged.size());
    for (const auto& [id, version] : merged) {
        out.push_back({id.group, id.artifact, version});
    }
    return out;
}

} // namespace depmig
