#pragma once

#include "depmig/path_glob.hpp"
#include "depmig/process.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace depmig {

struct ProjectRef {
    std::string id;
    std::string origin;
    std::filesystem::path workdir; // bare mirror of the origin

    bool operator==(const ProjectRef&) const = default;
};

struct CommitRecord {
    std::string project;
    std::string commit_id;
    std::string date; // UTC, ISO-8601
    std::string author;
    std::string message;
    std::size_t ordinal = 0; // 0 = oldest first-parent commit

    bool operator==(const CommitRecord&) const = default;
};

enum class ChangeKind { added, modified, deleted, renamed };

std::string_view to_string(ChangeKind kind);

/// One changed path in a commit, without contents.
struct TreeChange {
    std::string path;
    std::string old_path; // set for renames
    ChangeKind kind = ChangeKind::modified;
    std::string before_blob; // empty when absent
    std::string after_blob;
};

struct FileChange {
    std::string commit;
    std::string path;
    ChangeKind kind = ChangeKind::modified;
    std::string old_path; // renamed only
    std::optional<std::string> before;
    std::optional<std::string> after;
    std::string before_blob;
    std::string after_blob;
};

/// Thin wrapper over git plumbing for one repository directory.
class GitRepository {
public:
    explicit GitRepository(std::filesystem::path git_dir);

    /// Mirror-clones `origin` into `dest`, or refreshes an existing mirror of the same origin.
    static GitRepository clone_or_update(const std::string& origin, const std::filesystem::path& dest);

    /// `git --version`; throws Error if git is not on PATH.
    static std::string version();

    const std::filesystem::path& git_dir() const noexcept { return git_dir_; }
    bool has_commits() const;

    /// First-parent history of HEAD, oldest first.
    std::vector<CommitRecord> first_parent_history(const std::string& project_id) const;

    /// Tree diff of `commit` against `parent` (or against the empty tree for a root commit),
    /// with rename detection. Submodules and symlinks are skipped.
    std::vector<TreeChange> diff_tree(const std::optional<std::string>& parent, const std::string& commit,
                                      const PathGlob* filter = nullptr) const;

    /// Reads blobs by id. Binary blobs map to nullopt.
    std::unordered_map<std::string, std::optional<std::string>>
    read_blobs(const std::vector<std::string>& blob_ids) const;

    ProcessResult git(std::vector<std::string> args, std::string input = {}) const;

private:
    std::filesystem::path git_dir_;
};

/// An ingested project: its mirror plus the first-parent commit list.
class IngestedProject {
public:
    IngestedProject(ProjectRef ref, std::vector<CommitRecord> commits);

    const ProjectRef& ref() const noexcept { return ref_; }
    const std::vector<CommitRecord>& commits() const noexcept { return commits_; }
    const GitRepository& repository() const noexcept { return repo_; }

    /// Throws LookupError for commits outside the ingested history.
    const CommitRecord& commit(const std::string& commit_id) const;
    std::size_t ordinal(const std::string& commit_id) const { return commit(commit_id).ordinal; }
    std::optional<std::string> parent_of(const std::string& commit_id) const;

    std::vector<TreeChange> changed_entries(const std::string& commit_id, const PathGlob& filter) const;
    std::vector<FileChange> changed_files(const std::string& commit_id, const PathGlob& filter) const;

private:
    ProjectRef ref_;
    std::vector<CommitRecord> commits_;
    std::unordered_map<std::string, std::size_t> by_id_;
    GitRepository repo_;
};

/// Default project id: last path component of the origin without a `.git` suffix.
std::string derive_project_id(const std::string& origin);

/// Clones (or refreshes) `origin` under `workdir_root/<id>` and reads its history.
/// Throws IngestError on clone failure and NoHistoryError on an empty repository.
IngestedProject ingest_project(const std::string& origin, const std::filesystem::path& workdir_root,
                               const std::string& project_id = {});

/// True when the blob looks binary (NUL byte within the first 8000 bytes).
bool looks_binary(std::string_view content);

} // namespace depmig
