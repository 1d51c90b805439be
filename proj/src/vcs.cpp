#include "depmig/vcs.hpp"

#include "depmig/error.hpp"
#include "depmig/log.hpp"

#include <charconv>
#include <ctime>

namespace depmig {
namespace {

const std::vector<std::pair<std::string, std::string>> kGitEnv = {
    {"GIT_TERMINAL_PROMPT", "0"},
    {"LC_ALL", "C"},
};

bool is_null_sha(std::string_view sha) {
    return sha.empty() || sha.find_first_not_of('0') == std::string_view::npos;
}

std::string iso_utc(std::int64_t epoch_seconds) {
    const std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string trim_trailing(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
        s.pop_back();
    }
    return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find(sep, start);
        if (end == std::string_view::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

ProcessResult run_git(const std::filesystem::path& cwd, std::vector<std::string> args, std::string input = {}) {
    args.insert(args.begin(), "git");
    return run_process(args, ProcessOptions{cwd, std::move(input), kGitEnv});
}

} // namespace

std::string_view to_string(ChangeKind kind) {
    switch (kind) {
    case ChangeKind::added: return "added";
    case ChangeKind::modified: return "modified";
    case ChangeKind::deleted: return "deleted";
    case ChangeKind::renamed: return "renamed";
    }
    return "modified";
}

bool looks_binary(std::string_view content) {
    return content.substr(0, 8000).find('\0') != std::string_view::npos;
}

GitRepository::GitRepository(std::filesystem::path git_dir) : git_dir_(std::move(git_dir)) {}

ProcessResult GitRepository::git(std::vector<std::string> args, std::string input) const {
    args.insert(args.begin(), {"--git-dir", git_dir_.string()});
    return run_git(git_dir_.parent_path().empty() ? std::filesystem::current_path() : git_dir_.parent_path(),
                   std::move(args), std::move(input));
}

std::string GitRepository::version() {
    const auto result = run_git(std::filesystem::current_path(), {"--version"});
    if (!result.ok()) {
        throw Error("git --version failed: " + result.err);
    }
    return trim_trailing(result.out);
}

GitRepository GitRepository::clone_or_update(const std::string& origin_arg, const std::filesystem::path& dest) {
    std::error_code ec;
    // Local paths are made absolute because git runs from the mirror's parent directory.
    std::string origin = origin_arg;
    if (!origin.empty() && origin.find("://") == std::string::npos && std::filesystem::exists(origin, ec)) {
        origin = std::filesystem::absolute(origin).lexically_normal().string();
        while (origin.size() > 1 && origin.back() == '/') {
            origin.pop_back();
        }
    }
    if (std::filesystem::exists(dest / "HEAD", ec)) {
        GitRepository repo(dest);
        const auto url = repo.git({"config", "--get", "remote.origin.url"});
        if (!url.ok() || trim_trailing(url.out) != origin) {
            throw IngestError(origin, "workdir " + dest.string() + " holds a different repository");
        }
        const auto fetched = repo.git({"remote", "update", "--prune"});
        if (!fetched.ok()) {
            throw IngestError(origin, trim_trailing(fetched.err));
        }
        return repo;
    }
    std::filesystem::create_directories(dest.parent_path(), ec);
    const auto cloned = run_git(dest.parent_path(), {"clone", "--mirror", "--quiet", origin, dest.string()});
    if (!cloned.ok()) {
        std::filesystem::remove_all(dest, ec);
        throw IngestError(origin, trim_trailing(cloned.err));
    }
    return GitRepository(dest);
}

bool GitRepository::has_commits() const {
    return git({"rev-parse", "--verify", "--quiet", "HEAD^{commit}"}).ok();
}

std::vector<CommitRecord> GitRepository::first_parent_history(const std::string& project_id) const {
    const auto result = git({"-c", "log.showSignature=false", "log", "--first-parent", "--reverse", "--no-color",
                             "--format=%x1e%H%x1f%ct%x1f%an%x1f%B", "HEAD"});
    if (!result.ok()) {
        throw Error("git log failed: " + trim_trailing(result.err));
    }
    std::vector<CommitRecord> commits;
    for (const auto record : split(result.out, '\x1e')) {
        if (record.empty()) {
            continue;
        }
        const auto fields = split(record, '\x1f');
        if (fields.size() < 4) {
            throw Error("unexpected git log record");
        }
        std::int64_t epoch = 0;
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), epoch);
        CommitRecord commit;
        commit.project = project_id;
        commit.commit_id = std::string(fields[0]);
        commit.date = iso_utc(epoch);
        commit.author = std::string(fields[2]);
        // Messages may themselves contain the field separator; rejoin the tail.
        std::string message(fields[3]);
        for (std::size_t i = 4; i < fields.size(); ++i) {
            message += '\x1f';
            message += fields[i];
        }
        commit.message = trim_trailing(std::move(message));
        commit.ordinal = commits.size();
        commits.push_back(std::move(commit));
    }
    return commits;
}

std::vector<TreeChange> GitRepository::diff_tree(const std::optional<std::string>& parent, const std::string& commit,
                                                 const PathGlob* filter) const {
    std::vector<std::string> args = {"diff-tree", "-r", "-z", "-M", "--no-abbrev", "--no-commit-id", "--raw"};
    if (parent) {
        args.push_back(*parent);
    } else {
        args.emplace_back("--root");
    }
    args.push_back(commit);
    const auto result = git(args);
    if (!result.ok()) {
        throw Error("git diff-tree failed for " + commit + ": " + trim_trailing(result.err));
    }

    std::vector<TreeChange> changes;
    const auto tokens = split(result.out, '\0');
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto header = tokens[i];
        if (header.empty() || header.front() != ':') {
            continue;
        }
        // ":<old mode> <new mode> <old sha> <new sha> <status>"
        const auto parts = split(header.substr(1), ' ');
        if (parts.size() < 5 || i + 1 >= tokens.size()) {
            throw Error("unexpected diff-tree output");
        }
        const char status = parts[4].empty() ? 'M' : parts[4].front();
        TreeChange change;
        if (status == 'R' || status == 'C') {
            if (i + 2 >= tokens.size()) {
                throw Error("unexpected diff-tree rename output");
            }
            change.old_path = std::string(tokens[i + 1]);
            change.path = std::string(tokens[i + 2]);
            i += 2;
        } else {
            change.path = std::string(tokens[i + 1]);
            i += 1;
        }
        const auto old_mode = parts[0];
        const auto new_mode = parts[1];
        const auto regular = [](std::string_view mode) { return mode == "000000" || mode.starts_with("100"); };
        if (!regular(old_mode) || !regular(new_mode)) {
            continue; // submodule or symlink
        }
        switch (status) {
        case 'A': change.kind = ChangeKind::added; break;
        case 'D': change.kind = ChangeKind::deleted; break;
        case 'R': change.kind = ChangeKind::renamed; break;
        case 'C': change.kind = ChangeKind::added; change.old_path.clear(); break;
        default: change.kind = ChangeKind::modified; break;
        }
        if (!is_null_sha(parts[2]) && change.kind != ChangeKind::added) {
            change.before_blob = std::string(parts[2]);
        }
        if (!is_null_sha(parts[3]) && change.kind != ChangeKind::deleted) {
            change.after_blob = std::string(parts[3]);
        }
        if (filter != nullptr && !filter->matches(change.path) &&
            (change.old_path.empty() || !filter->matches(change.old_path))) {
            continue;
        }
        changes.push_back(std::move(change));
    }
    return changes;
}

std::unordered_map<std::string, std::optional<std::string>>
GitRepository::read_blobs(const std::vector<std::string>& blob_ids) const {
    std::unordered_map<std::string, std::optional<std::string>> blobs;
    if (blob_ids.empty()) {
        return blobs;
    }
    std::string input;
    for (const auto& id : blob_ids) {
        input += id;
        input += '\n';
    }
    const auto result = git({"cat-file", "--batch"}, std::move(input));
    if (!result.ok()) {
        throw Error("git cat-file failed: " + trim_trailing(result.err));
    }
    const std::string_view out(result.out);
    std::size_t pos = 0;
    while (pos < out.size()) {
        const auto eol = out.find('\n', pos);
        if (eol == std::string_view::npos) {
            break;
        }
        const auto header = split(out.substr(pos, eol - pos), ' ');
        pos = eol + 1;
        if (header.size() == 2 && header[1] == "missing") {
            throw Error("blob missing: " + std::string(header[0]));
        }
        if (header.size() != 3) {
            throw Error("unexpected cat-file header");
        }
        std::size_t size = 0;
        std::from_chars(header[2].data(), header[2].data() + header[2].size(), size);
        if (pos + size > out.size()) {
            throw Error("truncated cat-file output");
        }
        const auto content = out.substr(pos, size);
        pos += size + 1; // trailing newline after each object
        if (looks_binary(content)) {
            blobs.emplace(std::string(header[0]), std::nullopt);
        } else {
            blobs.emplace(std::string(header[0]), std::string(content));
        }
    }
    return blobs;
}

IngestedProject::IngestedProject(ProjectRef ref, std::vector<CommitRecord> commits)
    : ref_(std::move(ref)), commits_(std::move(commits)), repo_(ref_.workdir) {
    for (std::size_t i = 0; i < commits_.size(); ++i) {
        by_id_.emplace(commits_[i].commit_id, i);
    }
}

const CommitRecord& IngestedProject::commit(const std::string& commit_id) const {
    const auto it = by_id_.find(commit_id);
    if (it == by_id_.end()) {
        throw LookupError("commit " + commit_id + " is not in the ingested history of " + ref_.id);
    }
    return commits_[it->second];
}

std::optional<std::string> IngestedProject::parent_of(const std::string& commit_id) const {
    const auto ordinal = commit(commit_id).ordinal;
    if (ordinal == 0) {
        return std::nullopt;
    }
    return commits_[ordinal - 1].commit_id;
}

std::vector<TreeChange> IngestedProject::changed_entries(const std::string& commit_id, const PathGlob& filter) const {
    return repo_.diff_tree(parent_of(commit_id), commit_id, &filter);
}

std::vector<FileChange> IngestedProject::changed_files(const std::string& commit_id, const PathGlob& filter) const {
    const auto entries = changed_entries(commit_id, filter);
    std::vector<std::string> ids;
    for (const auto& e : entries) {
        if (!e.before_blob.empty()) ids.push_back(e.before_blob);
        if (!e.after_blob.empty()) ids.push_back(e.after_blob);
    }
    const auto blobs = repo_.read_blobs(ids);
    std::vector<FileChange> changes;
    for (const auto& e : entries) {
        FileChange change{commit_id, e.path, e.kind, e.old_path, std::nullopt, std::nullopt, e.before_blob,
                          e.after_blob};
        bool binary = false;
        if (!e.before_blob.empty()) {
            const auto& blob = blobs.at(e.before_blob);
            binary |= !blob.has_value();
            change.before = blob;
        }
        if (!e.after_blob.empty()) {
            const auto& blob = blobs.at(e.after_blob);
            binary |= !blob.has_value();
            change.after = blob;
        }
        if (binary) {
            continue;
        }
        changes.push_back(std::move(change));
    }
    return changes;
}

std::string derive_project_id(const std::string& origin) {
    std::string trimmed = origin;
    while (!trimmed.empty() && (trimmed.back() == '/' || trimmed.back() == '\\')) {
        trimmed.pop_back();
    }
    const auto slash = trimmed.find_last_of("/\\:");
    std::string id = slash == std::string::npos ? trimmed : trimmed.substr(slash + 1);
    if (id.ends_with(".git")) {
        id.resize(id.size() - 4);
    }
    return id.empty() ? "project" : id;
}

IngestedProject ingest_project(const std::string& origin, const std::filesystem::path& workdir_root,
                               const std::string& project_id) {
    const std::string id = project_id.empty() ? derive_project_id(origin) : project_id;
    const auto dest = std::filesystem::absolute(workdir_root / (id + ".git"));
    auto repo = GitRepository::clone_or_update(origin, dest);
    if (!repo.has_commits()) {
        throw NoHistoryError(origin);
    }
    auto commits = repo.first_parent_history(id);
    if (commits.empty()) {
        throw NoHistoryError(origin);
    }
    log::info("ingested", {{"project", id}, {"commits", std::to_string(commits.size())}});
    return IngestedProject(ProjectRef{id, origin, dest}, std::move(commits));
}

} // namespace depmig
