#include "depmig/rule_graph.hpp"

#include "depmig/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace depmig {
namespace {

// Normalized weights are ratios of integers; this only absorbs division rounding.
constexpr double kThresholdEpsilon = 1e-12;

} // namespace

void MigrationGraph::accumulate(const DependencyChange& change) {
    for (const auto& c : change.removed) nodes_.insert(c.id());
    for (const auto& c : change.added) nodes_.insert(c.id());

    // Identities are deduplicated so a pair counts once per change.
    std::set<LibraryId> removed;
    std::set<LibraryId> added;
    for (const auto& c : change.removed) removed.insert(c.id());
    for (const auto& c : change.added) added.insert(c.id());
    for (const auto& source : removed) {
        for (const auto& target : added) {
            add_edge(source, target, 1);
        }
    }
}

void MigrationGraph::add_edge(const LibraryId& source, const LibraryId& target, std::uint64_t weight) {
    if (weight == 0 || source == target) {
        return;
    }
    nodes_.insert(source);
    nodes_.insert(target);
    edges_[RuleKey{source, target}] += weight;
}

void MigrationGraph::merge(const MigrationGraph& other) {
    nodes_.insert(other.nodes_.begin(), other.nodes_.end());
    for (const auto& [key, weight] : other.edges_) {
        edges_[key] += weight;
    }
}

std::uint64_t MigrationGraph::weight(const LibraryId& source, const LibraryId& target) const {
    const auto it = edges_.find(RuleKey{source, target});
    return it == edges_.end() ? 0 : it->second;
}

std::uint64_t MigrationGraph::max_outgoing(const LibraryId& source) const {
    std::uint64_t best = 0;
    // Edges are ordered by source first, so the outgoing edges of a node are contiguous.
    for (auto it = edges_.lower_bound(RuleKey{source, LibraryId{}}); it != edges_.end() && it->first.source == source;
         ++it) {
        best = std::max(best, it->second);
    }
    return best;
}

std::string MigrationGraph::to_edge_list() const {
    std::ostringstream out;
    for (const auto& [key, weight] : edges_) {
        const double normalized = static_cast<double>(weight) / static_cast<double>(max_outgoing(key.source));
        out << key.source.str() << " -> " << key.target.str() << ' ' << weight << ' ' << normalized << '\n';
    }
    return out.str();
}

void RuleFilterConfig::validate() const {
    if (!(t_rel >= 0.0 && t_rel <= 1.0)) {
        throw UsageError("t_rel must lie in [0, 1]");
    }
}

std::string_view to_string(RuleStatus status) {
    switch (status) {
    case RuleStatus::candidate: return "candidate";
    case RuleStatus::confirmed: return "confirmed";
    case RuleStatus::discarded: return "discarded";
    }
    return "candidate";
}

RuleStatus rule_status_from_string(std::string_view text) {
    if (text == "candidate") return RuleStatus::candidate;
    if (text == "confirmed") return RuleStatus::confirmed;
    if (text == "discarded") return RuleStatus::discarded;
    throw StoreError("unknown rule status: " + std::string(text));
}

std::vector<MigrationRule> normalize_and_filter(const MigrationGraph& graph, const RuleFilterConfig& config) {
    config.validate();
    std::map<LibraryId, std::uint64_t> max_weight;
    for (const auto& [key, weight] : graph.edges()) {
        auto& best = max_weight[key.source];
        best = std::max(best, weight);
    }
    std::vector<MigrationRule> rules;
    for (const auto& [key, weight] : graph.edges()) {
        const auto top = max_weight.at(key.source);
        // Edges at the maximum are exactly 1.0, independent of rounding.
        const double normalized =
            weight == top ? 1.0 : static_cast<double>(weight) / static_cast<double>(top);
        if (normalized + kThresholdEpsilon >= config.t_rel) {
            rules.push_back({key.source, key.target, weight, normalized, RuleStatus::candidate});
        }
    }
    std::sort(rules.begin(), rules.end(), [](const MigrationRule& a, const MigrationRule& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.source != b.source) return a.source < b.source;
        return a.target < b.target;
    });
    return rules;
}

std::vector<MigrationRule> confirm_rules(std::vector<MigrationRule> rules,
                                         const std::map<RuleKey, std::size_t>& fragment_counts) {
    for (auto& rule : rules) {
        const auto it = fragment_counts.find(rule.key());
        rule.status = it != fragment_counts.end() && it->second > 0 ? RuleStatus::confirmed : RuleStatus::discarded;
    }
    return rules;
}

} // namespace depmig
