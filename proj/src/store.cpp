#include "depmig/store.hpp"

#include "depmig/error.hpp"

#include <json.hpp>
#include <sqlite3.h>

#include <algorithm>
#include <sstream>

namespace depmig {

using Json = nlohmann::ordered_json;

ExportFormat export_format_from_string(std::string_view text) {
    if (text == "json") return ExportFormat::json;
    if (text == "csv") return ExportFormat::csv;
    if (text == "diff") return ExportFormat::diff;
    if (text == "text") return ExportFormat::text;
    throw UsageError("unknown export format: " + std::string(text));
}

ExportSelector export_selector_from_string(std::string_view text) {
    if (text == "rules") return ExportSelector::rules;
    if (text == "segments") return ExportSelector::segments;
    if (text == "fragments") return ExportSelector::fragments;
    if (text == "mappings") return ExportSelector::mappings;
    if (text == "graph") return ExportSelector::graph;
    throw UsageError("unknown export selector: " + std::string(text));
}

std::string_view to_string(ExportFormat format) {
    switch (format) {
    case ExportFormat::json: return "json";
    case ExportFormat::csv: return "csv";
    case ExportFormat::diff: return "diff";
    case ExportFormat::text: return "text";
    }
    return "json";
}

std::string_view to_string(ExportSelector selector) {
    switch (selector) {
    case ExportSelector::rules: return "rules";
    case ExportSelector::segments: return "segments";
    case ExportSelector::fragments: return "fragments";
    case ExportSelector::mappings: return "mappings";
    case ExportSelector::graph: return "graph";
    }
    return "rules";
}

std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
    std::string out = "\"";
    for (const char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

class Statement {
public:
    Statement(sqlite3* db, std::string_view sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) != SQLITE_OK) {
            throw StoreError(std::string("cannot prepare statement: ") + sqlite3_errmsg(db));
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int i, std::string_view v) {
        check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
        return *this;
    }
    Statement& bind(int i, const std::string& v) { return bind(i, std::string_view(v)); }
    Statement& bind(int i, const char* v) { return bind(i, std::string_view(v)); }
    Statement& bind(int i, std::int64_t v) {
        check(sqlite3_bind_int64(stmt_, i, v));
        return *this;
    }
    Statement& bind(int i, std::uint64_t v) { return bind(i, static_cast<std::int64_t>(v)); }
    Statement& bind(int i, int v) { return bind(i, static_cast<std::int64_t>(v)); }
    Statement& bind(int i, bool v) { return bind(i, static_cast<std::int64_t>(v ? 1 : 0)); }
    Statement& bind(int i, double v) {
        check(sqlite3_bind_double(stmt_, i, v));
        return *this;
    }
    Statement& bind(int i, const std::optional<std::string>& v) {
        if (v) return bind(i, *v);
        check(sqlite3_bind_null(stmt_, i));
        return *this;
    }

    template <typename... Args>
    Statement& bind_all(const Args&... args) {
        int i = 1;
        (bind(i++, args), ...);
        return *this;
    }

    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw StoreError(std::string("statement failed: ") + sqlite3_errmsg(db_));
    }

    std::string text(int col) const {
        const auto* p = sqlite3_column_text(stmt_, col);
        return p == nullptr ? std::string{}
                            : std::string(reinterpret_cast<const char*>(p),
                                          static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)));
    }
    std::optional<std::string> optional_text(int col) const {
        if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) return std::nullopt;
        return text(col);
    }
    std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
    double real(int col) const { return sqlite3_column_double(stmt_, col); }

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;

    void check(int rc) const {
        if (rc != SQLITE_OK) throw StoreError(std::string("cannot bind parameter: ") + sqlite3_errmsg(db_));
    }
};

constexpr std::string_view kSchema = R"sql(
CREATE TABLE IF NOT EXISTS schema_info (version INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS run_metadata (key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS projects (
  id TEXT PRIMARY KEY, origin TEXT NOT NULL, workdir TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS commits (
  project TEXT NOT NULL REFERENCES projects(id),
  commit_id TEXT NOT NULL, date TEXT NOT NULL, author TEXT NOT NULL, message TEXT NOT NULL,
  ordinal INTEGER NOT NULL,
  PRIMARY KEY (project, commit_id));
CREATE TABLE IF NOT EXISTS dependency_changes (
  project TEXT NOT NULL, commit_id TEXT NOT NULL,
  kind TEXT NOT NULL CHECK (kind IN ('added', 'removed', 'upgrade')),
  group_id TEXT NOT NULL, artifact_id TEXT NOT NULL,
  version TEXT NOT NULL, from_version TEXT,
  PRIMARY KEY (project, commit_id, kind, group_id, artifact_id),
  FOREIGN KEY (project, commit_id) REFERENCES commits(project, commit_id));
CREATE TABLE IF NOT EXISTS graph_edges (
  source TEXT NOT NULL, target TEXT NOT NULL, weight INTEGER NOT NULL CHECK (weight >= 1),
  PRIMARY KEY (source, target));
CREATE TABLE IF NOT EXISTS rules (
  id INTEGER PRIMARY KEY, source TEXT NOT NULL, target TEXT NOT NULL,
  weight INTEGER NOT NULL, normalized_weight REAL NOT NULL, status TEXT NOT NULL,
  UNIQUE (source, target));
CREATE TABLE IF NOT EXISTS segments (
  id INTEGER PRIMARY KEY, project TEXT NOT NULL REFERENCES projects(id),
  rule_id INTEGER NOT NULL REFERENCES rules(id),
  start_commit TEXT NOT NULL, end_commit TEXT NOT NULL,
  source_version TEXT NOT NULL, target_version TEXT NOT NULL, weak_start INTEGER NOT NULL,
  UNIQUE (project, rule_id, start_commit));
CREATE TABLE IF NOT EXISTS segment_commits (
  segment_id INTEGER NOT NULL REFERENCES segments(id), position INTEGER NOT NULL,
  commit_id TEXT NOT NULL, PRIMARY KEY (segment_id, position));
CREATE TABLE IF NOT EXISTS fragments (
  id INTEGER PRIMARY KEY, segment_id INTEGER NOT NULL REFERENCES segments(id),
  commit_id TEXT NOT NULL, file TEXT NOT NULL,
  before_start INTEGER NOT NULL, before_length INTEGER NOT NULL,
  after_start INTEGER NOT NULL, after_length INTEGER NOT NULL,
  hunk TEXT NOT NULL, removed_uses TEXT NOT NULL, added_uses TEXT NOT NULL,
  UNIQUE (segment_id, commit_id, file, before_start, after_start));
CREATE TABLE IF NOT EXISTS method_mappings (
  id INTEGER PRIMARY KEY, rule_id INTEGER NOT NULL REFERENCES rules(id),
  source_methods TEXT NOT NULL, target_methods TEXT NOT NULL, support INTEGER NOT NULL,
  UNIQUE (rule_id, source_methods, target_methods));
CREATE TABLE IF NOT EXISTS method_docs (
  id INTEGER PRIMARY KEY, group_id TEXT NOT NULL, artifact_id TEXT NOT NULL, version TEXT NOT NULL,
  package TEXT NOT NULL, class_name TEXT NOT NULL, method TEXT NOT NULL, signature TEXT NOT NULL,
  class_description TEXT NOT NULL, description TEXT NOT NULL, param_docs TEXT NOT NULL,
  return_doc TEXT, since TEXT, is_constructor INTEGER NOT NULL,
  UNIQUE (group_id, artifact_id, version, package, class_name, method, signature));
CREATE TABLE IF NOT EXISTS mapping_docs (
  mapping_id INTEGER NOT NULL REFERENCES method_mappings(id),
  side TEXT NOT NULL CHECK (side IN ('source', 'target')), method TEXT NOT NULL,
  doc_id INTEGER REFERENCES method_docs(id), ambiguous INTEGER NOT NULL,
  PRIMARY KEY (mapping_id, side, method));
)sql";

std::string methods_json(const std::set<MethodRef>& methods) {
    Json out = Json::array();
    for (const auto& m : methods) out.push_back(m.str());
    return out.dump();
}

std::set<MethodRef> methods_from_json(const std::string& text) {
    std::set<MethodRef> out;
    for (const auto& m : Json::parse(text)) out.insert(MethodRef::parse(m.get<std::string>()));
    return out;
}

Json uses_json(const std::vector<LibraryMethodUse>& uses) {
    Json out = Json::array();
    for (const auto& u : uses) {
        out.push_back({{"library", u.library.str()}, {"method", u.method.str()}, {"line", u.line}});
    }
    return out;
}

std::vector<LibraryMethodUse> uses_from_json(const std::string& text) {
    std::vector<LibraryMethodUse> out;
    for (const auto& u : Json::parse(text)) {
        out.push_back({LibraryId::parse(u.at("library").get<std::string>()),
                       MethodRef::parse(u.at("method").get<std::string>()), u.at("line").get<std::size_t>()});
    }
    return out;
}

Json hunk_json(const Hunk& hunk) {
    Json lines = Json::array();
    for (const auto& l : hunk.lines) {
        const char* tag = l.tag == LineTag::context ? "context" : l.tag == LineTag::removed ? "removed" : "added";
        lines.push_back({{"tag", tag}, {"text", l.text}, {"before_line", l.before_line}, {"after_line", l.after_line}});
    }
    return lines;
}

std::vector<HunkLine> hunk_lines_from_json(const std::string& text) {
    std::vector<HunkLine> out;
    for (const auto& l : Json::parse(text)) {
        const auto tag = l.at("tag").get<std::string>();
        out.push_back({tag == "context"   ? LineTag::context
                       : tag == "removed" ? LineTag::removed
                                          : LineTag::added,
                       l.at("text").get<std::string>(), l.at("before_line").get<std::size_t>(),
                       l.at("after_line").get<std::size_t>()});
    }
    return out;
}

Json string_array(const std::vector<std::string>& values) {
    Json out = Json::array();
    for (const auto& v : values) out.push_back(v);
    return out;
}

std::string join(const std::vector<std::string>& values, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += sep;
        out += values[i];
    }
    return out;
}

std::vector<std::string> method_strings(const std::set<MethodRef>& methods) {
    std::vector<std::string> out;
    for (const auto& m : methods) out.push_back(m.str());
    return out;
}

std::string format_double(double value) { return Json(value).dump(); }

} // namespace

Store::Store(const std::filesystem::path& path) {
    if (path != ":memory:" && path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
        const std::string message = db_ != nullptr ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        throw StoreError("cannot open database " + path.string() + ": " + message);
    }
    sqlite3_busy_timeout(db_, 5000);
    exec("PRAGMA foreign_keys = ON");
    create_schema();
}

Store::~Store() { sqlite3_close(db_); }

void Store::exec(const std::string& sql) const {
    char* error = nullptr;
    if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &error) != SQLITE_OK) {
        const std::string message = error != nullptr ? error : "unknown error";
        sqlite3_free(error);
        throw StoreError("sql failed: " + message);
    }
}

void Store::create_schema() {
    exec("BEGIN");
    try {
        exec(std::string(kSchema));
        Statement version(db_, "SELECT version FROM schema_info");
        if (version.step()) {
            const auto found = version.integer(0);
            if (found != kSchemaVersion) {
                throw StoreError("database schema version " + std::to_string(found) + " is not supported (expected " +
                                 std::to_string(kSchemaVersion) + ")");
            }
        } else {
            Statement(db_, "INSERT INTO schema_info (version) VALUES (?)").bind_all(kSchemaVersion).step();
        }
        exec("COMMIT");
    } catch (...) {
        exec("ROLLBACK");
        throw;
    }
}

Store::Transaction::Transaction(Store& store) : store_(store) { store_.exec("BEGIN IMMEDIATE"); }

Store::Transaction::~Transaction() {
    if (!done_) {
        try {
            store_.exec("ROLLBACK");
        } catch (...) {
        }
    }
}

void Store::Transaction::commit() {
    store_.exec("COMMIT");
    done_ = true;
}

void Store::set_metadata(const std::string& key, const std::string& value) {
    Statement(db_, "INSERT INTO run_metadata (key, value) VALUES (?, ?) "
                   "ON CONFLICT (key) DO UPDATE SET value = excluded.value")
        .bind_all(key, value)
        .step();
}

std::optional<std::string> Store::metadata(const std::string& key) const {
    Statement q(db_, "SELECT value FROM run_metadata WHERE key = ?");
    q.bind_all(key);
    if (q.step()) return q.text(0);
    return std::nullopt;
}

void Store::upsert_project(const ProjectRef& project) {
    Statement(db_, "INSERT INTO projects (id, origin, workdir) VALUES (?, ?, ?) "
                   "ON CONFLICT (id) DO UPDATE SET origin = excluded.origin, workdir = excluded.workdir")
        .bind_all(project.id, project.origin, project.workdir.string())
        .step();
}

void Store::upsert_commit(const CommitRecord& commit) {
    Statement exists(db_, "SELECT 1 FROM projects WHERE id = ?");
    exists.bind_all(commit.project);
    if (!exists.step()) {
        throw StoreError("commit " + commit.commit_id + " references unknown project " + commit.project);
    }
    Statement(db_, "INSERT INTO commits (project, commit_id, date, author, message, ordinal) VALUES (?, ?, ?, ?, ?, ?) "
                   "ON CONFLICT (project, commit_id) DO UPDATE SET date = excluded.date, author = excluded.author, "
                   "message = excluded.message, ordinal = excluded.ordinal")
        .bind_all(commit.project, commit.commit_id, commit.date, commit.author, commit.message,
                  static_cast<std::int64_t>(commit.ordinal))
        .step();
}

void Store::upsert_dependency_change(const DependencyChange& change) {
    Statement exists(db_, "SELECT 1 FROM commits WHERE project = ? AND commit_id = ?");
    exists.bind_all(change.project, change.commit);
    if (!exists.step()) {
        throw StoreError("dependency change references unknown commit " + change.project + "@" + change.commit);
    }
    const std::string sql = "INSERT INTO dependency_changes (project, commit_id, kind, group_id, artifact_id, version, "
                            "from_version) VALUES (?, ?, ?, ?, ?, ?, ?) "
                            "ON CONFLICT (project, commit_id, kind, group_id, artifact_id) DO UPDATE SET "
                            "version = excluded.version, from_version = excluded.from_version";
    for (const auto& c : change.added) {
        Statement(db_, sql)
            .bind_all(change.project, change.commit, "added", c.group, c.artifact, c.version,
                      std::optional<std::string>{})
            .step();
    }
    for (const auto& c : change.removed) {
        Statement(db_, sql)
            .bind_all(change.project, change.commit, "removed", c.group, c.artifact, c.version,
                      std::optional<std::string>{})
            .step();
    }
    for (const auto& u : change.upgrades) {
        Statement(db_, sql)
            .bind_all(change.project, change.commit, "upgrade", u.library.group, u.library.artifact, u.to,
                      std::optional<std::string>{u.from})
            .step();
    }
}

void Store::replace_graph(const MigrationGraph& graph) {
    exec("DELETE FROM graph_edges");
    for (const auto& [key, weight] : graph.edges()) {
        Statement(db_, "INSERT INTO graph_edges (source, target, weight) VALUES (?, ?, ?)")
            .bind_all(key.source.str(), key.target.str(), weight)
            .step();
    }
}

std::int64_t Store::upsert_rule(const MigrationRule& rule) {
    Statement q(db_, "INSERT INTO rules (source, target, weight, normalized_weight, status) VALUES (?, ?, ?, ?, ?) "
                     "ON CONFLICT (source, target) DO UPDATE SET weight = excluded.weight, "
                     "normalized_weight = excluded.normalized_weight, status = excluded.status RETURNING id");
    q.bind_all(rule.source.str(), rule.target.str(), rule.weight, rule.normalized_weight,
               std::string(to_string(rule.status)));
    q.step();
    const auto id = q.integer(0);
    while (q.step()) {
    }
    return id;
}

std::int64_t Store::rule_id(const RuleKey& rule) const {
    Statement q(db_, "SELECT id FROM rules WHERE source = ? AND target = ?");
    q.bind_all(rule.source.str(), rule.target.str());
    if (!q.step()) throw StoreError("reference to unknown rule " + rule.str());
    return q.integer(0);
}

std::int64_t Store::segment_id(const SegmentRef& segment) const {
    const auto rule = rule_id(segment.rule);
    Statement q(db_, "SELECT id FROM segments WHERE project = ? AND rule_id = ? AND start_commit = ?");
    q.bind_all(segment.project, rule, segment.start_commit);
    if (!q.step()) {
        throw StoreError("reference to unknown segment " + segment.project + "/" + segment.rule.str() + "@" +
                         segment.start_commit);
    }
    return q.integer(0);
}

std::int64_t Store::upsert_segment(const Segment& segment) {
    Statement project(db_, "SELECT 1 FROM projects WHERE id = ?");
    project.bind_all(segment.project);
    if (!project.step()) throw StoreError("segment references unknown project " + segment.project);
    const auto rule = rule_id(segment.rule);
    Statement q(db_, "INSERT INTO segments (project, rule_id, start_commit, end_commit, source_version, "
                     "target_version, weak_start) VALUES (?, ?, ?, ?, ?, ?, ?) "
                     "ON CONFLICT (project, rule_id, start_commit) DO UPDATE SET end_commit = excluded.end_commit, "
                     "source_version = excluded.source_version, target_version = excluded.target_version, "
                     "weak_start = excluded.weak_start RETURNING id");
    q.bind_all(segment.project, rule, segment.start_commit, segment.end_commit, segment.source_version,
               segment.target_version, segment.weak_start);
    q.step();
    const auto id = q.integer(0);
    while (q.step()) {
    }
    Statement(db_, "DELETE FROM segment_commits WHERE segment_id = ?").bind_all(id).step();
    for (std::size_t i = 0; i < segment.commits.size(); ++i) {
        Statement(db_, "INSERT INTO segment_commits (segment_id, position, commit_id) VALUES (?, ?, ?)")
            .bind_all(id, static_cast<std::int64_t>(i), segment.commits[i])
            .step();
    }
    return id;
}

std::int64_t Store::upsert_fragment(const Fragment& fragment) {
    const auto segment = segment_id(fragment.segment);
    Statement q(db_, "INSERT INTO fragments (segment_id, commit_id, file, before_start, before_length, after_start, "
                     "after_length, hunk, removed_uses, added_uses) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?) "
                     "ON CONFLICT (segment_id, commit_id, file, before_start, after_start) DO UPDATE SET "
                     "before_length = excluded.before_length, after_length = excluded.after_length, "
                     "hunk = excluded.hunk, removed_uses = excluded.removed_uses, added_uses = excluded.added_uses "
                     "RETURNING id");
    q.bind_all(segment, fragment.commit, fragment.hunk.file, static_cast<std::int64_t>(fragment.hunk.before.start),
               static_cast<std::int64_t>(fragment.hunk.before.length),
               static_cast<std::int64_t>(fragment.hunk.after.start),
               static_cast<std::int64_t>(fragment.hunk.after.length), hunk_json(fragment.hunk).dump(),
               uses_json(fragment.removed_uses).dump(), uses_json(fragment.added_uses).dump());
    q.step();
    const auto id = q.integer(0);
    while (q.step()) {
    }
    return id;
}

std::int64_t Store::upsert_mapping(const MethodMapping& mapping) {
    const auto rule = rule_id(mapping.rule);
    Statement q(db_, "INSERT INTO method_mappings (rule_id, source_methods, target_methods, support) "
                     "VALUES (?, ?, ?, ?) ON CONFLICT (rule_id, source_methods, target_methods) DO UPDATE SET "
                     "support = excluded.support RETURNING id");
    q.bind_all(rule, methods_json(mapping.source_methods), methods_json(mapping.target_methods),
               static_cast<std::int64_t>(mapping.support));
    q.step();
    const auto id = q.integer(0);
    while (q.step()) {
    }
    return id;
}

std::int64_t Store::mapping_id(const MethodMapping& mapping) const {
    Statement q(db_, "SELECT id FROM method_mappings WHERE rule_id = ? AND source_methods = ? AND target_methods = ?");
    q.bind_all(rule_id(mapping.rule), methods_json(mapping.source_methods), methods_json(mapping.target_methods));
    if (!q.step()) throw StoreError("reference to unknown mapping of rule " + mapping.rule.str());
    return q.integer(0);
}

std::int64_t Store::upsert_doc(const MethodDoc& doc) {
    Json params = Json::array();
    for (const auto& p : doc.param_docs) params.push_back({{"name", p.name}, {"text", p.text}});
    Statement q(db_, "INSERT INTO method_docs (group_id, artifact_id, version, package, class_name, method, signature, "
                     "class_description, description, param_docs, return_doc, since, is_constructor) "
                     "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?) "
                     "ON CONFLICT (group_id, artifact_id, version, package, class_name, method, signature) DO UPDATE "
                     "SET class_description = excluded.class_description, description = excluded.description, "
                     "param_docs = excluded.param_docs, return_doc = excluded.return_doc, since = excluded.since, "
                     "is_constructor = excluded.is_constructor RETURNING id");
    q.bind_all(doc.library.group, doc.library.artifact, doc.library.version, doc.package, doc.class_name, doc.method,
               string_array(doc.signature).dump(), doc.class_description, doc.description, params.dump(),
               doc.return_doc, doc.since, doc.is_constructor);
    q.step();
    const auto id = q.integer(0);
    while (q.step()) {
    }
    return id;
}

void Store::upsert_mapping_doc(std::int64_t mapping, std::string_view side, const DocMatch& match) {
    Statement exists(db_, "SELECT 1 FROM method_mappings WHERE id = ?");
    exists.bind_all(mapping);
    if (!exists.step()) throw StoreError("documentation references unknown mapping id " + std::to_string(mapping));
    std::optional<std::int64_t> doc_id;
    if (match.doc) doc_id = upsert_doc(*match.doc);
    Statement q(db_, "INSERT INTO mapping_docs (mapping_id, side, method, doc_id, ambiguous) VALUES (?, ?, ?, ?, ?) "
                     "ON CONFLICT (mapping_id, side, method) DO UPDATE SET doc_id = excluded.doc_id, "
                     "ambiguous = excluded.ambiguous");
    q.bind_all(mapping, side, match.method.str());
    if (doc_id) {
        q.bind(4, *doc_id);
    } else {
        q.bind(4, std::optional<std::string>{});
    }
    q.bind(5, match.ambiguous);
    q.step();
}

void Store::clear_from(std::string_view stage) {
    if (stage == "docs") {
        exec("DELETE FROM mapping_docs");
        exec("DELETE FROM method_docs");
    } else if (stage == "fragments") {
        exec("DELETE FROM mapping_docs; DELETE FROM method_docs; DELETE FROM method_mappings; DELETE FROM fragments");
        exec("UPDATE rules SET status = 'candidate'");
    } else if (stage == "segments") {
        clear_from("fragments");
        exec("DELETE FROM segment_commits; DELETE FROM segments");
    } else if (stage == "rules") {
        clear_from("segments");
        exec("DELETE FROM rules; DELETE FROM graph_edges");
    } else {
        throw UsageError("unknown stage: " + std::string(stage));
    }
}

std::vector<ProjectRef> Store::projects() const {
    std::vector<ProjectRef> out;
    Statement q(db_, "SELECT id, origin, workdir FROM projects ORDER BY id");
    while (q.step()) out.push_back({q.text(0), q.text(1), q.text(2)});
    return out;
}

std::vector<CommitRecord> Store::commits(const std::string& project) const {
    std::vector<CommitRecord> out;
    Statement q(db_, "SELECT project, commit_id, date, author, message, ordinal FROM commits WHERE project = ? "
                     "ORDER BY ordinal");
    q.bind_all(project);
    while (q.step()) {
        out.push_back({q.text(0), q.text(1), q.text(2), q.text(3), q.text(4), static_cast<std::size_t>(q.integer(5))});
    }
    return out;
}

std::vector<DependencyChange> Store::dependency_changes() const {
    std::vector<DependencyChange> out;
    Statement q(db_, "SELECT d.project, d.commit_id, d.kind, d.group_id, d.artifact_id, d.version, d.from_version "
                     "FROM dependency_changes d JOIN commits c ON c.project = d.project AND c.commit_id = d.commit_id "
                     "ORDER BY d.project, c.ordinal, d.kind, d.group_id, d.artifact_id");
    while (q.step()) {
        if (out.empty() || out.back().project != q.text(0) || out.back().commit != q.text(1)) {
            out.push_back({q.text(0), q.text(1), {}, {}, {}});
        }
        auto& change = out.back();
        const auto kind = q.text(2);
        LibraryCoordinate c{q.text(3), q.text(4), q.text(5)};
        if (kind == "added") {
            change.added.push_back(std::move(c));
        } else if (kind == "removed") {
            change.removed.push_back(std::move(c));
        } else {
            change.upgrades.push_back({c.id(), q.optional_text(6).value_or(std::string(kUnresolvedVersion)), c.version});
        }
    }
    return out;
}

MigrationGraph Store::graph() const {
    MigrationGraph graph;
    Statement q(db_, "SELECT source, target, weight FROM graph_edges ORDER BY source, target");
    while (q.step()) {
        graph.add_edge(LibraryId::parse(q.text(0)), LibraryId::parse(q.text(1)),
                       static_cast<std::uint64_t>(q.integer(2)));
    }
    return graph;
}

std::vector<MigrationRule> Store::rules() const {
    std::vector<MigrationRule> out;
    Statement q(db_, "SELECT source, target, weight, normalized_weight, status FROM rules "
                     "ORDER BY weight DESC, source, target");
    while (q.step()) {
        out.push_back({LibraryId::parse(q.text(0)), LibraryId::parse(q.text(1)),
                       static_cast<std::uint64_t>(q.integer(2)), q.real(3), rule_status_from_string(q.text(4))});
    }
    return out;
}

std::vector<Segment> Store::segments() const {
    std::vector<Segment> out;
    Statement q(db_, "SELECT s.id, s.project, r.source, r.target, s.start_commit, s.end_commit, s.source_version, "
                     "s.target_version, s.weak_start FROM segments s JOIN rules r ON r.id = s.rule_id "
                     "JOIN commits c ON c.project = s.project AND c.commit_id = s.start_commit "
                     "ORDER BY s.project, r.source, r.target, c.ordinal");
    while (q.step()) {
        Segment s;
        s.project = q.text(1);
        s.rule = {LibraryId::parse(q.text(2)), LibraryId::parse(q.text(3))};
        s.start_commit = q.text(4);
        s.end_commit = q.text(5);
        s.source_version = q.text(6);
        s.target_version = q.text(7);
        s.weak_start = q.integer(8) != 0;
        Statement commits(db_, "SELECT commit_id FROM segment_commits WHERE segment_id = ? ORDER BY position");
        commits.bind_all(q.integer(0));
        while (commits.step()) s.commits.push_back(commits.text(0));
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Fragment> Store::fragments() const {
    std::vector<Fragment> out;
    Statement q(db_, "SELECT s.project, r.source, r.target, s.start_commit, f.commit_id, f.file, f.before_start, "
                     "f.before_length, f.after_start, f.after_length, f.hunk, f.removed_uses, f.added_uses "
                     "FROM fragments f JOIN segments s ON s.id = f.segment_id JOIN rules r ON r.id = s.rule_id "
                     "JOIN commits c ON c.project = s.project AND c.commit_id = f.commit_id "
                     "ORDER BY s.project, r.source, r.target, c.ordinal, f.file, f.before_start, f.after_start");
    while (q.step()) {
        Fragment f;
        f.segment = {q.text(0), {LibraryId::parse(q.text(1)), LibraryId::parse(q.text(2))}, q.text(3)};
        f.commit = q.text(4);
        f.hunk.file = q.text(5);
        f.hunk.before = {static_cast<std::size_t>(q.integer(6)), static_cast<std::size_t>(q.integer(7))};
        f.hunk.after = {static_cast<std::size_t>(q.integer(8)), static_cast<std::size_t>(q.integer(9))};
        f.hunk.lines = hunk_lines_from_json(q.text(10));
        f.removed_uses = uses_from_json(q.text(11));
        f.added_uses = uses_from_json(q.text(12));
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<MethodMapping> Store::mappings() const {
    std::vector<MethodMapping> out;
    Statement q(db_, "SELECT r.source, r.target, m.source_methods, m.target_methods, m.support FROM method_mappings m "
                     "JOIN rules r ON r.id = m.rule_id "
                     "ORDER BY m.support DESC, r.source, r.target, m.source_methods, m.target_methods");
    while (q.step()) {
        out.push_back({{LibraryId::parse(q.text(0)), LibraryId::parse(q.text(1))}, methods_from_json(q.text(2)),
                       methods_from_json(q.text(3)), static_cast<std::size_t>(q.integer(4))});
    }
    return out;
}

namespace {

std::string_view kDocColumns = "d.group_id, d.artifact_id, d.version, d.package, d.class_name, d.method, d.signature, "
                               "d.class_description, d.description, d.param_docs, d.return_doc, d.since, "
                               "d.is_constructor";

MethodDoc doc_from_row(const Statement& q, int first) {
    MethodDoc doc;
    doc.library = {q.text(first), q.text(first + 1), q.text(first + 2)};
    doc.package = q.text(first + 3);
    doc.class_name = q.text(first + 4);
    doc.method = q.text(first + 5);
    for (const auto& s : Json::parse(q.text(first + 6))) doc.signature.push_back(s.get<std::string>());
    doc.class_description = q.text(first + 7);
    doc.description = q.text(first + 8);
    for (const auto& p : Json::parse(q.text(first + 9))) {
        doc.param_docs.push_back({p.at("name").get<std::string>(), p.at("text").get<std::string>()});
    }
    doc.return_doc = q.optional_text(first + 10);
    doc.since = q.optional_text(first + 11);
    doc.is_constructor = q.integer(first + 12) != 0;
    return doc;
}

} // namespace

std::vector<MethodDoc> Store::docs() const {
    std::vector<MethodDoc> out;
    Statement q(db_, "SELECT " + std::string(kDocColumns) +
                         " FROM method_docs d ORDER BY d.group_id, d.artifact_id, d.version, d.package, "
                         "d.class_name, d.method, d.signature");
    while (q.step()) out.push_back(doc_from_row(q, 0));
    return out;
}

std::vector<StoredDocMatch> Store::mapping_docs(const MethodMapping& mapping) const {
    std::vector<StoredDocMatch> out;
    Statement q(db_, "SELECT md.side, md.method, md.ambiguous, d.id, " + std::string(kDocColumns) +
                         " FROM mapping_docs md LEFT JOIN method_docs d ON d.id = md.doc_id "
                         "WHERE md.mapping_id = ? ORDER BY md.side DESC, md.method");
    q.bind_all(mapping_id(mapping));
    while (q.step()) {
        StoredDocMatch m{q.text(0), MethodRef::parse(q.text(1)), std::nullopt, q.integer(2) != 0};
        if (q.optional_text(3)) m.doc = doc_from_row(q, 4);
        out.push_back(std::move(m));
    }
    return out;
}

std::size_t Store::count(std::string_view table) const {
    static const std::set<std::string_view> known = {
        "projects", "commits",   "dependency_changes", "graph_edges",   "rules",       "segments",
        "segment_commits", "fragments", "method_mappings",    "method_docs", "mapping_docs", "run_metadata"};
    if (!known.contains(table)) throw UsageError("unknown table: " + std::string(table));
    Statement q(db_, "SELECT COUNT(*) FROM " + std::string(table));
    q.step();
    return static_cast<std::size_t>(q.integer(0));
}

namespace {

Json rule_ref_json(const RuleKey& rule) { return {{"source", rule.source.str()}, {"target", rule.target.str()}}; }

Json doc_json(const StoredDocMatch& m) {
    Json out;
    out["method"] = m.method.str();
    out["found"] = m.doc.has_value();
    out["ambiguous"] = m.ambiguous;
    if (m.doc) {
        const auto& d = *m.doc;
        out["library"] = d.library.str();
        out["package"] = d.package;
        out["class_name"] = d.class_name;
        out["class_description"] = d.class_description;
        out["name"] = d.method;
        out["signature"] = string_array(d.signature);
        out["description"] = d.description;
        Json params = Json::array();
        for (const auto& p : d.param_docs) params.push_back({{"name", p.name}, {"text", p.text}});
        out["param_docs"] = params;
        out["return_doc"] = d.return_doc ? Json(*d.return_doc) : Json(nullptr);
        out["since"] = d.since ? Json(*d.since) : Json(nullptr);
    }
    return out;
}

std::string csv(const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            out += csv_field(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

} // namespace

std::string Store::export_report(ExportFormat format, ExportSelector selector) const {
    auto unsupported = [&] {
        return UsageError("format " + std::string(to_string(format)) + " is not available for " +
                          std::string(to_string(selector)));
    };
    if (format == ExportFormat::diff && selector != ExportSelector::fragments) throw unsupported();
    if (format == ExportFormat::text && selector != ExportSelector::graph) throw unsupported();

    switch (selector) {
    case ExportSelector::rules: {
        std::map<RuleKey, std::pair<std::size_t, std::size_t>> counts;
        for (const auto& s : segments()) ++counts[s.rule].first;
        for (const auto& f : fragments()) ++counts[f.segment.rule].second;
        const auto all = rules();
        if (format == ExportFormat::json) {
            Json out = Json::array();
            for (const auto& r : all) {
                out.push_back({{"source", r.source.str()},
                               {"target", r.target.str()},
                               {"weight", r.weight},
                               {"normalized_weight", r.normalized_weight},
                               {"status", to_string(r.status)},
                               {"segments", counts[r.key()].first},
                               {"fragments", counts[r.key()].second}});
            }
            return out.dump(2) + "\n";
        }
        std::vector<std::vector<std::string>> rows = {
            {"source", "target", "weight", "normalized_weight", "status", "segments", "fragments"}};
        for (const auto& r : all) {
            rows.push_back({r.source.str(), r.target.str(), std::to_string(r.weight), format_double(r.normalized_weight),
                            std::string(to_string(r.status)), std::to_string(counts[r.key()].first),
                            std::to_string(counts[r.key()].second)});
        }
        return csv(rows);
    }
    case ExportSelector::segments: {
        const auto all = segments();
        if (format == ExportFormat::json) {
            Json out = Json::array();
            for (const auto& s : all) {
                out.push_back({{"project", s.project},
                               {"rule", rule_ref_json(s.rule)},
                               {"start_commit", s.start_commit},
                               {"end_commit", s.end_commit},
                               {"source_version", s.source_version},
                               {"target_version", s.target_version},
                               {"weak_start", s.weak_start},
                               {"commits", string_array(s.commits)}});
            }
            return out.dump(2) + "\n";
        }
        std::vector<std::vector<std::string>> rows = {{"project", "source", "target", "start_commit", "end_commit",
                                                       "source_version", "target_version", "weak_start", "commits"}};
        for (const auto& s : all) {
            rows.push_back({s.project, s.rule.source.str(), s.rule.target.str(), s.start_commit, s.end_commit,
                            s.source_version, s.target_version, s.weak_start ? "true" : "false", join(s.commits, " ")});
        }
        return csv(rows);
    }
    case ExportSelector::fragments: {
        const auto all = fragments();
        if (format == ExportFormat::diff) {
            std::string out;
            for (const auto& f : all) out += format_fragment(f);
            return out;
        }
        if (format == ExportFormat::json) {
            Json out = Json::array();
            for (const auto& f : all) {
                out.push_back({{"project", f.segment.project},
                               {"rule", rule_ref_json(f.segment.rule)},
                               {"segment_start", f.segment.start_commit},
                               {"commit", f.commit},
                               {"file", f.hunk.file},
                               {"before", {{"start", f.hunk.before.start}, {"length", f.hunk.before.length}}},
                               {"after", {{"start", f.hunk.after.start}, {"length", f.hunk.after.length}}},
                               {"removed_methods", string_array(method_strings(f.source_methods()))},
                               {"added_methods", string_array(method_strings(f.target_methods()))},
                               {"hunk", format_hunk(f.hunk)}});
            }
            return out.dump(2) + "\n";
        }
        std::vector<std::vector<std::string>> rows = {{"project", "source", "target", "segment_start", "commit", "file",
                                                       "before_start", "before_length", "after_start", "after_length",
                                                       "removed_methods", "added_methods"}};
        for (const auto& f : all) {
            rows.push_back({f.segment.project, f.segment.rule.source.str(), f.segment.rule.target.str(),
                            f.segment.start_commit, f.commit, f.hunk.file, std::to_string(f.hunk.before.start),
                            std::to_string(f.hunk.before.length), std::to_string(f.hunk.after.start),
                            std::to_string(f.hunk.after.length), join(method_strings(f.source_methods()), ";"),
                            join(method_strings(f.target_methods()), ";")});
        }
        return csv(rows);
    }
    case ExportSelector::mappings: {
        const auto all = mappings();
        if (format == ExportFormat::json) {
            Json out = Json::array();
            for (const auto& m : all) {
                Json source_docs = Json::array();
                Json target_docs = Json::array();
                for (const auto& d : mapping_docs(m)) (d.side == "source" ? source_docs : target_docs).push_back(doc_json(d));
                out.push_back({{"rule", rule_ref_json(m.rule)},
                               {"source_methods", string_array(method_strings(m.source_methods))},
                               {"target_methods", string_array(method_strings(m.target_methods))},
                               {"support", m.support},
                               {"source_docs", source_docs},
                               {"target_docs", target_docs}});
            }
            return out.dump(2) + "\n";
        }
        std::vector<std::vector<std::string>> rows = {{"rule", "source_methods", "target_methods", "support"}};
        for (const auto& m : all) {
            rows.push_back({m.rule.str(), join(method_strings(m.source_methods), ";"),
                            join(method_strings(m.target_methods), ";"), std::to_string(m.support)});
        }
        return csv(rows);
    }
    case ExportSelector::graph: {
        const auto g = graph();
        if (format == ExportFormat::text) return g.to_edge_list();
        if (format == ExportFormat::json) {
            Json out = Json::array();
            for (const auto& [key, weight] : g.edges()) {
                out.push_back({{"source", key.source.str()},
                               {"target", key.target.str()},
                               {"weight", weight},
                               {"normalized_weight", static_cast<double>(weight) /
                                                         static_cast<double>(g.max_outgoing(key.source))}});
            }
            return out.dump(2) + "\n";
        }
        std::vector<std::vector<std::string>> rows = {{"source", "target", "weight", "normalized_weight"}};
        for (const auto& [key, weight] : g.edges()) {
            rows.push_back({key.source.str(), key.target.str(), std::to_string(weight),
                            format_double(static_cast<double>(weight) / static_cast<double>(g.max_outgoing(key.source)))});
        }
        return csv(rows);
    }
    }
    throw unsupported();
}

} // namespace depmig
