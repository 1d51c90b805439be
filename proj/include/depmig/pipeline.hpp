#pragma once

#include "depmig/docs.hpp"
#include "depmig/error.hpp"
#include "depmig/store.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace depmig {

/// A stage was invoked before the data it depends on exists.
class StageError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::filesystem::path projects_file;
    std::filesystem::path workdir{"depmig-work"};
    std::filesystem::path db;        // default: <workdir>/depmig.sqlite
    std::filesystem::path cache_dir; // default: <workdir>/cache
    double t_rel = 1.0;
    std::size_t context_lines = 3;
    bool offline = false;
    bool imports_count_as_use = true;
    bool allow_fallback_index = true;
    std::string repo_base{kDefaultRepositoryBase};
    std::size_t jobs = 4;

    std::filesystem::path db_path() const { return db.empty() ? workdir / "depmig.sqlite" : db; }
    std::filesystem::path cache_path() const { return cache_dir.empty() ? workdir / "cache" : cache_dir; }
    std::filesystem::path reports_path() const { return workdir / "reports"; }

    /// Throws UsageError for out-of-range values.
    void validate() const;
};

/// Origins listed one per line; blank lines and `#` comments are ignored.
std::vector<std::string> read_project_list(const std::filesystem::path& file);

struct RunSummary {
    std::size_t projects = 0;
    std::size_t commits = 0;
    std::size_t dependency_changes = 0;
    std::size_t rules_candidate = 0;
    std::size_t rules_confirmed = 0;
    std::size_t rules_discarded = 0;
    std::size_t segments = 0;
    std::size_t fragments = 0;
    std::size_t mappings = 0;
    std::size_t docs_attached = 0;
    std::size_t docs_missing = 0;
    std::vector<std::string> failures; // "<project>: <error>"

    int exit_code() const { return failures.empty() ? 0 : 2; }
    std::string to_text() const;
};

class Pipeline {
public:
    /// `fetcher` overrides the network access derived from the configuration.
    explicit Pipeline(RunConfig config, std::shared_ptr<Fetcher> fetcher = nullptr);

    const RunConfig& config() const noexcept { return config_; }
    Store& store() noexcept { return store_; }
    ArchiveCache& cache() noexcept { return cache_; }

    void ingest();
    void detect_rules();
    void detect_segments();
    /// Also confirms or discards rules and extracts method mappings.
    void detect_fragments();
    void collect_docs();
    /// Export bytes; also written to <workdir>/reports.
    std::string report(ExportFormat format, ExportSelector selector);
    void write_reports();

    /// Every stage in order followed by the reports.
    RunSummary run_all();

    /// Counts from the store plus the failures recorded by stages run on this instance.
    RunSummary summary() const;

private:
    RunConfig config_;
    Store store_;
    ArchiveCache cache_;
    std::vector<std::string> failures_;
    std::map<LibraryCoordinate, std::shared_ptr<const PackageIndex>> indices_;

    void require_stage(const std::string& stage, const std::string& message) const;
    void mark_stage(const std::string& stage);
    void fail(const std::string& project, const std::string& error);

    LibraryCoordinate choose_version(const LibraryId& library, const std::vector<DependencyChange>& changes) const;
    std::shared_ptr<const PackageIndex> index_for(const LibraryCoordinate& coordinate);
    std::shared_ptr<const PackageIndex> index_for(const LibraryId& library, const std::vector<DependencyChange>& changes);
    static IngestedProject load_project(const ProjectRef& ref, std::vector<CommitRecord> commits);
};

} // namespace depmig
