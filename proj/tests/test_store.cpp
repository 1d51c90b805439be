#include "depmig/error.hpp"
#include "depmig/store.hpp"

#include "temp_dir.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sqlite3.h>

using namespace depmig;

namespace {

const LibraryId kJson{"org.json", "json"};
const LibraryId kGson{"com.google.code.gson", "gson"};
const LibraryId kJackson{"com.fasterxml.jackson.core", "jackson-databind"};
const RuleKey kRule{kJson, kGson};

Fragment make_fragment(const std::string& commit, const std::string& file) {
    Fragment f;
    f.segment = {"p", kRule, "c1"};
    f.commit = commit;
    f.hunk.file = file;
    f.hunk.before = {4, 1};
    f.hunk.after = {4, 1};
    f.hunk.lines = {{LineTag::removed, "    new JSONObject();\n", 4, 0}, {LineTag::added, "    new Gson();\n", 0, 4}};
    f.removed_uses = {{kJson, MethodRef::parse("org.json.JSONObject.<init>/0"), 4}};
    f.added_uses = {{kGson, MethodRef::parse("com.google.gson.Gson.<init>/0"), 4}};
    return f;
}

MethodMapping make_mapping() {
    return {kRule, {MethodRef::parse("org.json.JSONObject.<init>/0")}, {MethodRef::parse("com.google.gson.Gson.<init>/0")}, 2};
}

/// A small, consistent data set covering every table.
void populate(Store& store) {
    Store::Transaction tx(store);
    store.upsert_project({"p", "/origin/p", "/work/p.git"});
    for (std::size_t i = 0; i < 3; ++i) {
        const auto id = "c" + std::to_string(i);
        store.upsert_commit({"p", id, "2015-03-0" + std::to_string(i + 2) + "T09:00:00Z", "A <a@x>", "msg, \"quoted\"\nline", i});
    }
    store.upsert_dependency_change({"p", "c1", {{"com.google.code.gson", "gson", "2.3.1"}}, {{"org.json", "json", "20080701"}}, {}});
    MigrationGraph graph;
    graph.add_edge(kJson, kGson, 3);
    graph.add_edge(kJson, kJackson, 1);
    store.replace_graph(graph);
    store.upsert_rule({kJson, kGson, 3, 1.0, RuleStatus::confirmed});
    store.upsert_rule({kJson, kJackson, 1, 1.0 / 3.0, RuleStatus::discarded});
    store.upsert_segment({"p", kRule, "c1", "c2", "20080701", "2.3.1", {"c1", "c2"}, false});
    store.upsert_fragment(make_fragment("c2", "B.java"));
    store.upsert_fragment(make_fragment("c1", "A.java"));
    const auto mapping = store.upsert_mapping(make_mapping());
    MethodDoc doc;
    doc.library = {"com.google.code.gson", "gson", "2.3.1"};
    doc.package = "com.google.gson";
    doc.class_name = "Gson";
    doc.method = "Gson";
    doc.is_constructor = true;
    doc.description = "Constructs a Gson object with default configuration.";
    store.upsert_doc(doc);
    store.upsert_mapping_doc(mapping, "target", {MethodRef::parse("com.google.gson.Gson.<init>/0"), doc, false});
    store.upsert_mapping_doc(mapping, "source", {MethodRef::parse("org.json.JSONObject.<init>/0"), std::nullopt, false});
    tx.commit();
}

std::vector<std::string> all_exports(const Store& store) {
    std::vector<std::string> out;
    for (const auto selector : {ExportSelector::rules, ExportSelector::segments, ExportSelector::fragments,
                                ExportSelector::mappings, ExportSelector::graph}) {
        out.push_back(store.export_report(ExportFormat::json, selector));
        out.push_back(store.export_report(ExportFormat::csv, selector));
    }
    out.push_back(store.export_report(ExportFormat::diff, ExportSelector::fragments));
    out.push_back(store.export_report(ExportFormat::text, ExportSelector::graph));
    return out;
}

} // namespace

TEST(Store, RoundTripsEveryRecord) {
    Store store(":memory:");
    populate(store);
    EXPECT_EQ(store.projects(), (std::vector<ProjectRef>{{"p", "/origin/p", "/work/p.git"}}));
    const auto commits = store.commits("p");
    ASSERT_EQ(commits.size(), 3u);
    EXPECT_EQ(commits[1].message, "msg, \"quoted\"\nline");
    EXPECT_EQ(commits[2].ordinal, 2u);
    ASSERT_EQ(store.dependency_changes().size(), 1u);
    EXPECT_EQ(store.dependency_changes()[0].added[0].version, "2.3.1");
    EXPECT_EQ(store.graph().weight(kJson, kGson), 3u);
    const auto rules = store.rules();
    ASSERT_EQ(rules.size(), 2u);
    EXPECT_EQ(rules[0].status, RuleStatus::confirmed);
    EXPECT_DOUBLE_EQ(rules[1].normalized_weight, 1.0 / 3.0);
    ASSERT_EQ(store.segments().size(), 1u);
    EXPECT_EQ(store.segments()[0].commits, (std::vector<std::string>{"c1", "c2"}));
    const auto fragments = store.fragments();
    ASSERT_EQ(fragments.size(), 2u);
    // Ordered by commit position, not insertion.
    const auto expected = make_fragment("c1", "A.java");
    EXPECT_EQ(fragments[0].segment, expected.segment);
    EXPECT_EQ(fragments[0].commit, "c1");
    EXPECT_EQ(fragments[0].hunk, expected.hunk);
    EXPECT_EQ(fragments[0].removed_uses, expected.removed_uses);
    EXPECT_EQ(fragments[0].added_uses, expected.added_uses);
    EXPECT_EQ(fragments[1].commit, "c2");
    EXPECT_EQ(store.mappings(), std::vector<MethodMapping>{make_mapping()});
    const auto docs = store.mapping_docs(make_mapping());
    ASSERT_EQ(docs.size(), 2u);
    EXPECT_EQ(docs[0].side, "target");
    ASSERT_TRUE(docs[0].doc.has_value());
    EXPECT_EQ(docs[0].doc->description, "Constructs a Gson object with default configuration.");
    EXPECT_FALSE(docs[1].doc.has_value());
}

TEST(Store, UpsertsAreIdempotent) {
    Store store(":memory:");
    populate(store);
    std::map<std::string, std::size_t> before;
    for (const auto* t : {"projects", "commits", "dependency_changes", "graph_edges", "rules", "segments",
                          "segment_commits", "fragments", "method_mappings", "method_docs", "mapping_docs"}) {
        before[t] = store.count(t);
        EXPECT_GT(before[t], 0u) << t;
    }
    const auto exports = all_exports(store);
    populate(store);
    for (const auto& [t, n] : before) EXPECT_EQ(store.count(t), n) << t;
    EXPECT_EQ(all_exports(store), exports);
    // Same natural key, new payload: updated in place.
    store.upsert_rule({kJson, kGson, 5, 1.0, RuleStatus::candidate});
    EXPECT_EQ(store.count("rules"), 2u);
    EXPECT_EQ(store.rules()[0].weight, 5u);
    EXPECT_THROW(store.count("sqlite_master"), UsageError);
}

TEST(Store, ReferencesAreChecked) {
    Store store(":memory:");
    EXPECT_THROW(store.upsert_commit({"ghost", "c0", "", "", "", 0}), StoreError);
    store.upsert_project({"p", "o", "w"});
    EXPECT_THROW(store.upsert_dependency_change({"p", "nope", {}, {}, {}}), StoreError);
    EXPECT_THROW(store.upsert_segment({"p", kRule, "c1", "c2", "", "", {}, false}), StoreError);
    EXPECT_THROW(store.upsert_fragment(make_fragment("c1", "A.java")), StoreError);
    EXPECT_THROW(store.upsert_mapping(make_mapping()), StoreError);
    EXPECT_THROW(store.upsert_mapping_doc(42, "source", {}), StoreError);
    try {
        store.upsert_mapping(make_mapping());
    } catch (const StoreError& e) {
        EXPECT_NE(std::string(e.what()).find("org.json:json -> com.google.code.gson:gson"), std::string::npos) << e.what();
    }
}

TEST(Store, TransactionsRollBackUnlessCommitted) {
    Store store(":memory:");
    {
        Store::Transaction tx(store);
        store.upsert_project({"p", "o", "w"});
    }
    EXPECT_EQ(store.count("projects"), 0u);
    {
        Store::Transaction tx(store);
        store.upsert_project({"p", "o", "w"});
        tx.commit();
    }
    EXPECT_EQ(store.count("projects"), 1u);
}

TEST(Store, ClearFromCascades) {
    Store store(":memory:");
    populate(store);
    store.clear_from("docs");
    EXPECT_EQ(store.count("mapping_docs"), 0u);
    EXPECT_EQ(store.count("method_mappings"), 1u);

    populate(store);
    store.clear_from("fragments");
    EXPECT_EQ(store.count("fragments"), 0u);
    EXPECT_EQ(store.count("method_mappings"), 0u);
    EXPECT_EQ(store.count("segments"), 1u);
    for (const auto& r : store.rules()) EXPECT_EQ(r.status, RuleStatus::candidate);

    populate(store);
    store.clear_from("segments");
    EXPECT_EQ(store.count("segments"), 0u);
    EXPECT_EQ(store.count("segment_commits"), 0u);
    EXPECT_EQ(store.count("fragments"), 0u);
    EXPECT_EQ(store.count("rules"), 2u);

    populate(store);
    store.clear_from("rules");
    EXPECT_EQ(store.count("rules"), 0u);
    EXPECT_EQ(store.count("method_mappings"), 0u);
    EXPECT_EQ(store.count("commits"), 3u);
    EXPECT_EQ(store.count("dependency_changes"), 2u); // one row per added or removed library
    EXPECT_THROW(store.clear_from("everything"), UsageError);
}

TEST(Store, PersistsAndRejectsOtherSchemaVersions) {
    testkit::TempDir dir;
    const auto path = dir / "store.sqlite";
    std::vector<std::string> exports;
    {
        Store store(path);
        populate(store);
        store.set_metadata("t_rel", "1");
        exports = all_exports(store);
    }
    {
        Store reopened(path);
        EXPECT_EQ(all_exports(reopened), exports);
        EXPECT_EQ(reopened.metadata("t_rel"), "1");
        EXPECT_FALSE(reopened.metadata("absent").has_value());
    }
    sqlite3* db = nullptr;
    ASSERT_EQ(sqlite3_open(path.c_str(), &db), SQLITE_OK);
    ASSERT_EQ(sqlite3_exec(db, "UPDATE schema_info SET version = 99", nullptr, nullptr, nullptr), SQLITE_OK);
    sqlite3_close(db);
    EXPECT_THROW(Store{path}, StoreError);
    EXPECT_THROW(Store{dir.path()}, StoreError);
}

TEST(Export, FormatsAndSelectors) {
    Store store(":memory:");
    populate(store);
    const auto rules = nlohmann::json::parse(store.export_report(ExportFormat::json, ExportSelector::rules));
    ASSERT_EQ(rules.size(), 2u);
    EXPECT_EQ(rules[0]["source"], "org.json:json");
    EXPECT_EQ(rules[0]["status"], "confirmed");
    EXPECT_EQ(rules[0]["segments"], 1);
    EXPECT_EQ(rules[0]["fragments"], 2);
    EXPECT_EQ(rules[1]["fragments"], 0);

    const auto csv = store.export_report(ExportFormat::csv, ExportSelector::rules);
    EXPECT_EQ(csv.substr(0, csv.find("\r\n")), "source,target,weight,normalized_weight,status,segments,fragments");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\r'), 3);

    const auto diff = store.export_report(ExportFormat::diff, ExportSelector::fragments);
    EXPECT_EQ(diff.rfind("### fragment p c1 A.java org.json:json->com.google.code.gson:gson\n--- a/A.java\n+++ b/A.java\n"
                         "@@ -4 +4 @@\n-    new JSONObject();\n+    new Gson();\n",
                         0),
              0u)
        << diff;

    const auto mappings = nlohmann::json::parse(store.export_report(ExportFormat::json, ExportSelector::mappings));
    ASSERT_EQ(mappings.size(), 1u);
    EXPECT_EQ(mappings[0]["support"], 2);
    EXPECT_EQ(mappings[0]["target_docs"][0]["found"], true);
    EXPECT_EQ(mappings[0]["target_docs"][0]["return_doc"], nullptr);
    EXPECT_EQ(mappings[0]["source_docs"][0]["found"], false);

    EXPECT_EQ(store.export_report(ExportFormat::text, ExportSelector::graph), store.graph().to_edge_list());
    EXPECT_THROW(store.export_report(ExportFormat::diff, ExportSelector::rules), UsageError);
    EXPECT_THROW(store.export_report(ExportFormat::text, ExportSelector::segments), UsageError);
}

TEST(Export, EmptyStore) {
    Store store(":memory:");
    EXPECT_EQ(store.export_report(ExportFormat::json, ExportSelector::rules), "[]\n");
    EXPECT_EQ(store.export_report(ExportFormat::diff, ExportSelector::fragments), "");
    EXPECT_EQ(store.export_report(ExportFormat::csv, ExportSelector::mappings),
              "rule,source_methods,target_methods,support\r\n");
}

TEST(Export, Names) {
    for (const auto f : {ExportFormat::json, ExportFormat::csv, ExportFormat::diff, ExportFormat::text}) {
        EXPECT_EQ(export_format_from_string(to_string(f)), f);
    }
    for (const auto s : {ExportSelector::rules, ExportSelector::segments, ExportSelector::fragments,
                         ExportSelector::mappings, ExportSelector::graph}) {
        EXPECT_EQ(export_selector_from_string(to_string(s)), s);
    }
    EXPECT_THROW(export_format_from_string("xml"), UsageError);
    EXPECT_THROW(export_selector_from_string(""), UsageError);
}

TEST(CsvField, QuotesOnlyWhenNeeded) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field(""), "");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
    EXPECT_EQ(csv_field("cr\r"), "\"cr\r\"");
}
