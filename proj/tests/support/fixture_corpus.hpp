#pragma once

#include "depmig/model.hpp"
#include "depmig/store.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace depmig::testkit {

struct ScriptCommit {
    std::string message;
    std::map<std::string, std::optional<std::string>> files; // nullopt deletes
};

struct RepoScript {
    std::string name;
    std::vector<ScriptCommit> commits;
};

/// Runs git in `dir` with fixed identity and no user configuration; throws on failure.
/// Returns stdout without trailing newlines.
std::string git(const std::filesystem::path& dir, std::vector<std::string> args, const std::string& date = {});

/// Creates `dir` as a git repository with fixed authorship and dates and replays the script
/// on branch main. Returns commit ids, oldest first.
std::vector<std::string> build_repo(const std::filesystem::path& dir, const RepoScript& script,
                                    int date_offset_days = 0);

struct PomDependency {
    std::string group;
    std::string artifact;
    std::string version;
    std::string scope;
};

std::string pom(const std::string& artifact, const std::vector<PomDependency>& deps,
                const std::vector<std::pair<std::string, std::string>>& properties = {});

const std::vector<RepoScript>& corpus_scripts();

struct ExpectedSegment {
    std::string project;
    std::string start_commit;
    std::string end_commit;
    std::vector<std::string> commits;
    std::string source_version;
    std::string target_version;
};

struct ExpectedFragment {
    std::string project;
    std::string commit;
    std::string file;
    std::set<std::string> removed;
    std::set<std::string> added;

    auto operator<=>(const ExpectedFragment&) const = default;
    bool operator==(const ExpectedFragment&) const = default;
};

struct Corpus {
    std::filesystem::path root;
    std::filesystem::path projects_file;
    std::filesystem::path repository; // Maven layout, usable as a file:// repository base
    std::map<std::string, std::vector<std::string>> commits; // project -> ids, oldest first
    RuleKey confirmed;
    std::map<RuleKey, std::uint64_t> edges;
    std::size_t candidates_at_t1 = 0;
    std::vector<ExpectedSegment> segments;
    std::vector<ExpectedFragment> fragments;
};

/// Builds every scripted repository under root/repos, the archive repository under
/// root/m2 and root/projects.txt, and returns what a correct run must find.
Corpus build_corpus(const std::filesystem::path& root);

/// Writes synthetic class and javadoc archives for the corpus libraries.
void write_archive_repository(const std::filesystem::path& repository);

/// Serializes the expectations as JSON.
std::string oracle_json(const Corpus& corpus);

/// Stored results compared with the corpus expectations.
struct CorpusScore {
    std::vector<RuleKey> confirmed;
    std::size_t candidates = 0; // rules that passed the relevance filter
    std::map<RuleKey, std::uint64_t> edges;
    std::vector<ExpectedSegment> segments;
    std::set<ExpectedFragment> found;
    std::set<ExpectedFragment> missing;
    std::set<ExpectedFragment> extra;

    bool rules_match(const Corpus& corpus) const;
    bool segments_match(const Corpus& corpus) const;
    double fragment_precision() const;
    double fragment_recall() const;
};

CorpusScore score_store(const Corpus& corpus, const Store& store);

} // namespace depmig::testkit
