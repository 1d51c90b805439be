#include "depmig/error.hpp"
#include "depmig/vcs.hpp"

#include "fixture_corpus.hpp"
#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

using namespace depmig;

namespace {

const testkit::RepoScript& script(const std::string& name) {
    for (const auto& s : testkit::corpus_scripts()) {
        if (s.name == name) return s;
    }
    throw std::runtime_error("no script " + name);
}

} // namespace

TEST(Ingest, CommitsInOrderWithMetadata) {
    testkit::TempDir dir;
    const auto& s = script("mig-json-gson");
    const auto ids = testkit::build_repo(dir / "origin", s);
    const auto project = ingest_project((dir / "origin").string(), dir / "work");
    EXPECT_EQ(project.ref().id, "origin");
    ASSERT_EQ(project.commits().size(), s.commits.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& c = project.commits()[i];
        EXPECT_EQ(c.commit_id, ids[i]);
        EXPECT_EQ(c.message, s.commits[i].message);
        EXPECT_EQ(c.ordinal, i);
        EXPECT_EQ(c.author, "Fixture Author");
        EXPECT_EQ(c.project, "origin");
    }
    EXPECT_EQ(project.commits()[0].date, "2015-03-02T09:00:00Z");
    EXPECT_EQ(project.commits()[1].date, "2015-03-03T09:00:00Z");
    EXPECT_EQ(project.parent_of(ids[0]), std::nullopt);
    EXPECT_EQ(project.parent_of(ids[2]), ids[1]);
    EXPECT_EQ(project.ordinal(ids[3]), 3u);
    EXPECT_THROW(project.commit("0000000000000000000000000000000000000000"), LookupError);
}

TEST(Ingest, ChangedFilesCarryContents) {
    testkit::TempDir dir;
    const auto ids = testkit::build_repo(dir / "origin", script("mig-json-gson"));
    const auto project = ingest_project((dir / "origin").string(), dir / "work");

    const auto root = project.changed_files(ids[0], PathGlob("**/*.java"));
    EXPECT_EQ(root.size(), 3u);
    for (const auto& f : root) {
        EXPECT_EQ(f.kind, ChangeKind::added);
        EXPECT_FALSE(f.before.has_value());
        ASSERT_TRUE(f.after.has_value());
        EXPECT_NE(f.after->find("org.json"), std::string::npos);
    }
    const auto poms = project.changed_files(ids[1], PathGlob("**/pom.xml"));
    ASSERT_EQ(poms.size(), 1u);
    EXPECT_EQ(poms[0].path, "pom.xml");
    EXPECT_EQ(poms[0].kind, ChangeKind::modified);
    EXPECT_EQ(poms[0].before->find("gson"), std::string::npos);
    EXPECT_NE(poms[0].after->find("${gson.version}"), std::string::npos);
    EXPECT_TRUE(project.changed_files(ids[4], PathGlob("**/*.java")).empty());
}

TEST(Ingest, RenamesDeletesAndBinaries) {
    testkit::TempDir dir;
    const std::string body = "package a;\n\npublic class Thing {\n    int x;\n    int y;\n    int z;\n}\n";
    testkit::RepoScript s{"shapes",
                          {{"init", {{"src/a/Thing.java", body}, {"src/a/Gone.java", "class Gone {}\n"},
                                     {"logo.png", std::string("\x89PNG\r\n\x1a\n\0\0\0", 11)}}},
                           {"move", {{"src/a/Thing.java", std::nullopt}, {"src/b/Thing.java", body},
                                     {"src/a/Gone.java", std::nullopt}}},
                           {"art", {{"logo.png", std::string("\x89PNG\r\n\x1a\n\0\0\1", 11)}}}}};
    const auto ids = testkit::build_repo(dir / "origin", s);
    const auto project = ingest_project((dir / "origin").string(), dir / "work");

    auto moved = project.changed_files(ids[1], PathGlob("**/*.java"));
    ASSERT_EQ(moved.size(), 2u);
    std::sort(moved.begin(), moved.end(), [](const FileChange& a, const FileChange& b) { return a.path < b.path; });
    EXPECT_EQ(moved[0].path, "src/a/Gone.java");
    EXPECT_EQ(moved[0].kind, ChangeKind::deleted);
    EXPECT_FALSE(moved[0].after.has_value());
    EXPECT_EQ(moved[1].path, "src/b/Thing.java");
    EXPECT_EQ(moved[1].kind, ChangeKind::renamed);
    EXPECT_EQ(moved[1].old_path, "src/a/Thing.java");
    EXPECT_EQ(moved[1].before, moved[1].after);

    // Binary blobs are listed as tree changes but never surface as file contents.
    EXPECT_EQ(project.changed_entries(ids[2], PathGlob("*.png")).size(), 1u);
    EXPECT_TRUE(project.changed_files(ids[2], PathGlob("*.png")).empty());
    EXPECT_TRUE(looks_binary(std::string("a\0b", 3)));
    EXPECT_FALSE(looks_binary("plain text\n"));
}

TEST(Ingest, FollowsFirstParentThroughMerges) {
    testkit::TempDir dir;
    const auto origin = dir / "origin";
    const auto ids = testkit::build_repo(origin, {"m", {{"base", {{"a.txt", "a\n"}}}}});
    testkit::git(origin, {"checkout", "-q", "-b", "feature"});
    std::ofstream(origin / "b.txt") << "b\n";
    testkit::git(origin, {"add", "b.txt"});
    testkit::git(origin, {"commit", "-q", "-m", "feature work"}, "1425373200 +0000");
    testkit::git(origin, {"checkout", "-q", "main"});
    std::ofstream(origin / "c.txt") << "c\n";
    testkit::git(origin, {"add", "c.txt"});
    testkit::git(origin, {"commit", "-q", "-m", "mainline work"}, "1425459600 +0000");
    testkit::git(origin, {"merge", "-q", "--no-ff", "-m", "merge feature", "feature"}, "1425546000 +0000");

    const auto project = ingest_project(origin.string(), dir / "work");
    ASSERT_EQ(project.commits().size(), 3u);
    EXPECT_EQ(project.commits()[0].commit_id, ids[0]);
    EXPECT_EQ(project.commits()[1].message, "mainline work");
    EXPECT_EQ(project.commits()[2].message, "merge feature");
    // Against its first parent the merge brings in the feature file.
    const auto merged = project.changed_files(project.commits()[2].commit_id, PathGlob("*.txt"));
    ASSERT_EQ(merged.size(), 1u);
    EXPECT_EQ(merged[0].path, "b.txt");
}

TEST(Ingest, RefreshPicksUpNewCommits) {
    testkit::TempDir dir;
    const auto origin = dir / "origin";
    testkit::build_repo(origin, {"r", {{"one", {{"a.txt", "1\n"}}}}});
    EXPECT_EQ(ingest_project(origin.string(), dir / "work").commits().size(), 1u);
    std::ofstream(origin / "a.txt") << "2\n";
    testkit::git(origin, {"commit", "-q", "-am", "two"}, "1425373200 +0000");
    EXPECT_EQ(ingest_project(origin.string(), dir / "work").commits().size(), 2u);
}

TEST(Ingest, Failures) {
    testkit::TempDir dir;
    EXPECT_THROW(ingest_project((dir / "does-not-exist").string(), dir / "work"), IngestError);
    std::filesystem::create_directories(dir / "empty");
    testkit::git(dir / "empty", {"init", "-q"});
    EXPECT_THROW(ingest_project((dir / "empty").string(), dir / "work"), NoHistoryError);
}

TEST(ProjectId, DerivedFromOrigin) {
    EXPECT_EQ(derive_project_id("https://github.com/vmi/selenese-runner-java.git"), "selenese-runner-java");
    EXPECT_EQ(derive_project_id("git@github.com:org/repo"), "repo");
    EXPECT_EQ(derive_project_id("/tmp/x/mig-single/"), "mig-single");
    EXPECT_EQ(derive_project_id(""), "project");
}
