#pragma once

#include "depmig/manifest.hpp"
#include "depmig/model.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace depmig {

/// Weighted directed graph of candidate migrations. Edge weights count (project, commit)
/// observations of a removed -> added library pair.
class MigrationGraph {
public:
    using EdgeMap = std::map<RuleKey, std::uint64_t>;

    /// Adds one observation for every pair in removed x added (self pairs skipped).
    /// Expects one call per (project, commit).
    void accumulate(const DependencyChange& change);

    /// Adds `weight` to an edge; weight 0 and self loops are ignored.
    void add_edge(const LibraryId& source, const LibraryId& target, std::uint64_t weight);
    void merge(const MigrationGraph& other);

    const EdgeMap& edges() const noexcept { return edges_; }
    const std::set<LibraryId>& nodes() const noexcept { return nodes_; }
    std::uint64_t weight(const LibraryId& source, const LibraryId& target) const;
    std::uint64_t max_outgoing(const LibraryId& source) const;

    /// One line per edge: "g:a -> g:a weight normalized".
    std::string to_edge_list() const;

    bool operator==(const MigrationGraph&) const = default;

private:
    EdgeMap edges_;
    std::set<LibraryId> nodes_;
};

struct RuleFilterConfig {
    double t_rel = 1.0;

    /// Throws UsageError unless 0 <= t_rel <= 1.
    void validate() const;
};

enum class RuleStatus { candidate, confirmed, discarded };

std::string_view to_string(RuleStatus status);
RuleStatus rule_status_from_string(std::string_view text);

struct MigrationRule {
    LibraryId source;
    LibraryId target;
    std::uint64_t weight = 0;
    double normalized_weight = 0.0;
    RuleStatus status = RuleStatus::candidate;

    RuleKey key() const { return {source, target}; }
    bool operator==(const MigrationRule&) const = default;
};

/// Normalizes each edge by its source's highest outgoing weight and keeps edges whose
/// normalized weight is >= t_rel. Sorted by (weight desc, source, target).
std::vector<MigrationRule> normalize_and_filter(const MigrationGraph& graph, const RuleFilterConfig& config);

/// Marks rules with at least one fragment confirmed and the rest discarded. All rules are
/// returned so discarded ones stay auditable.
std::vector<MigrationRule> confirm_rules(std::vector<MigrationRule> rules,
                                         const std::map<RuleKey, std::size_t>& fragment_counts);

} // namespace depmig
