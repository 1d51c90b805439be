#pragma once

#include "depmig/docs.hpp"
#include "depmig/fragments.hpp"
#include "depmig/manifest.hpp"
#include "depmig/rule_graph.hpp"
#include "depmig/segments.hpp"
#include "depmig/vcs.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

struct sqlite3;

namespace depmig {

inline constexpr int kSchemaVersion = 1;

enum class ExportFormat { json, csv, diff, text };
enum class ExportSelector { rules, segments, fragments, mappings, graph };

ExportFormat export_format_from_string(std::string_view text);     // throws UsageError
ExportSelector export_selector_from_string(std::string_view text); // throws UsageError
std::string_view to_string(ExportFormat format);
std::string_view to_string(ExportSelector selector);

/// Documentation attached to one method of a stored mapping.
struct StoredDocMatch {
    std::string side; // "source" or "target"
    MethodRef method;
    std::optional<MethodDoc> doc;
    bool ambiguous = false;
};

/// Relational system of record between pipeline stages (SQLite, one file). Upserts are
/// idempotent on natural keys; references are checked and reported by name.
class Store {
public:
    /// Opens or creates the database; ":memory:" gives a private in-memory store. Throws
    /// StoreError on an incompatible schema version.
    explicit Store(const std::filesystem::path& path);
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// RAII transaction; rolls back unless committed.
    class Transaction {
    public:
        explicit Transaction(Store& store);
        ~Transaction();
        void commit();

    private:
        Store& store_;
        bool done_ = false;
    };

    void set_metadata(const std::string& key, const std::string& value);
    std::optional<std::string> metadata(const std::string& key) const;

    void upsert_project(const ProjectRef& project);
    void upsert_commit(const CommitRecord& commit);
    void upsert_dependency_change(const DependencyChange& change);

    /// Replaces the stored graph.
    void replace_graph(const MigrationGraph& graph);
    std::int64_t upsert_rule(const MigrationRule& rule);
    std::int64_t upsert_segment(const Segment& segment);
    std::int64_t upsert_fragment(const Fragment& fragment);
    std::int64_t upsert_mapping(const MethodMapping& mapping);
    std::int64_t upsert_doc(const MethodDoc& doc);
    void upsert_mapping_doc(std::int64_t mapping_id, std::string_view side, const DocMatch& match);

    /// Drops derived data from a stage onwards: "rules" clears rules and everything
    /// derived, "segments" clears segments onwards, "fragments" clears fragments and
    /// mappings and resets rule statuses to candidate, "docs" clears attached docs.
    void clear_from(std::string_view stage);

    std::vector<ProjectRef> projects() const;
    std::vector<CommitRecord> commits(const std::string& project) const;
    std::vector<DependencyChange> dependency_changes() const;
    MigrationGraph graph() const;
    std::vector<MigrationRule> rules() const;
    std::vector<Segment> segments() const;
    std::vector<Fragment> fragments() const;
    std::vector<MethodMapping> mappings() const;
    std::vector<MethodDoc> docs() const;
    std::vector<StoredDocMatch> mapping_docs(const MethodMapping& mapping) const;

    std::size_t count(std::string_view table) const;

    /// Deterministic report bytes. json/csv for every selector; diff for fragments; text
    /// for the graph edge list. Other combinations throw UsageError.
    std::string export_report(ExportFormat format, ExportSelector selector) const;

private:
    sqlite3* db_ = nullptr;

    void exec(const std::string& sql) const;
    void create_schema();
    std::int64_t rule_id(const RuleKey& rule) const;
    std::int64_t segment_id(const SegmentRef& segment) const;
    std::int64_t mapping_id(const MethodMapping& mapping) const;
};

/// CSV field quoting per RFC 4180.
std::string csv_field(std::string_view value);

} // namespace depmig
