#pragma once

#include "depmig/fragments.hpp"
#include "depmig/model.hpp"

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <set>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace depmig {

enum class ArchiveKind { classes, documentation };

inline constexpr std::string_view kDefaultRepositoryBase = "https://repo1.maven.org/maven2";

/// Repository-relative path, e.g. "com/google/code/gson/gson/2.2.2/gson-2.2.2-javadoc.jar".
/// nullopt for unresolved versions.
std::optional<std::string> archive_path(const LibraryCoordinate& coordinate, ArchiveKind kind);
std::optional<std::string> archive_url(const LibraryCoordinate& coordinate, ArchiveKind kind,
                                       std::string_view base = kDefaultRepositoryBase);

struct ParamDoc {
    std::string name;
    std::string text;
    bool operator==(const ParamDoc&) const = default;
};

struct MethodDoc {
    LibraryCoordinate library;
    std::string package;
    std::string class_name; // simple name as in the page title, e.g. "Gson" or "Outer.Inner"
    std::string class_description;
    std::string method; // class name for constructors
    std::vector<std::string> signature; // simple parameter type names
    std::string description;
    std::vector<ParamDoc> param_docs;
    std::optional<std::string> return_doc;
    std::optional<std::string> since;
    bool is_constructor = false;

    std::size_t arity() const { return signature.size(); }
    bool operator==(const MethodDoc&) const = default;
};

/// Removes markup, decodes entities and collapses whitespace.
std::string html_to_text(std::string_view html);

/// Parses one class page of JDK 7/8 doclet output. Pages without member details yield
/// nothing.
std::vector<MethodDoc> parse_doc_page(std::string_view html, const std::string& package,
                                      const std::string& class_name, const LibraryCoordinate& library = {});

/// Parses every class page of a documentation archive. Throws DocError when the archive
/// cannot be read.
std::vector<MethodDoc> parse_doc_archive(std::string archive, const LibraryCoordinate& library = {});

struct FetchResult {
    int status = 0; // HTTP status; 0 when the transfer itself failed
    std::string body;
    std::string error;
};

class Fetcher {
public:
    virtual ~Fetcher() = default;
    virtual FetchResult get(const std::string& url) = 0;
};

/// HTTP(S) GET via cpp-httplib; follows redirects.
class HttpFetcher : public Fetcher {
public:
    explicit HttpFetcher(std::chrono::seconds timeout = std::chrono::seconds(30));
    FetchResult get(const std::string& url) override;

private:
    std::chrono::seconds timeout_;
};

/// Serves "file://" URLs or plain paths from a local repository mirror.
class FileFetcher : public Fetcher {
public:
    FetchResult get(const std::string& url) override;
};

/// Picks the fetcher for a repository base: FileFetcher for local paths, HttpFetcher
/// otherwise.
std::shared_ptr<Fetcher> make_fetcher(std::string_view base);

struct CacheOptions {
    std::string base{kDefaultRepositoryBase};
    std::size_t max_concurrent = 4;
    int max_attempts = 4;
    std::chrono::milliseconds initial_backoff{250};
};

/// Local archive cache mirroring the repository layout under `root`. A null fetcher
/// makes the cache offline.
class ArchiveCache {
public:
    ArchiveCache(std::filesystem::path root, std::shared_ptr<Fetcher> fetcher, CacheOptions options = {});

    const std::filesystem::path& root() const noexcept { return root_; }
    bool offline() const noexcept { return fetcher_ == nullptr; }

    /// Cached location of an archive, whether or not it exists yet.
    std::optional<std::filesystem::path> location(const LibraryCoordinate& coordinate, ArchiveKind kind) const;

    /// Archive bytes from the cache, downloading on a miss. nullopt when the version is
    /// unresolved, the cache is offline, or the repository does not have the archive.
    std::optional<std::string> get(const LibraryCoordinate& coordinate, ArchiveKind kind);

    /// Downloads missing archives with at most `max_concurrent` transfers in flight.
    void prefetch(const std::vector<std::pair<LibraryCoordinate, ArchiveKind>>& wanted);

    std::size_t network_calls() const noexcept { return network_calls_.load(); }

private:
    std::filesystem::path root_;
    std::shared_ptr<Fetcher> fetcher_;
    CacheOptions options_;
    std::atomic<std::size_t> network_calls_{0};
    std::mutex missing_mutex_;
    std::set<std::string> missing_; // urls that failed during this session

    std::optional<std::string> download(const std::string& url);
};

struct DocMatch {
    MethodRef method;
    std::optional<MethodDoc> doc; // nullopt: no documentation found
    bool ambiguous = false;       // several equal-arity overloads; the first page entry was taken

    bool found() const { return doc.has_value(); }
};

struct DocumentedMapping {
    MethodMapping mapping;
    std::vector<DocMatch> source_docs;
    std::vector<DocMatch> target_docs;
};

/// Finds the documentation of one method by (class simple name, method, arity). Docs of
/// the same package are preferred when present.
DocMatch find_doc(const MethodRef& method, const std::vector<MethodDoc>& docs);

std::vector<DocumentedMapping> attach_docs(const std::vector<MethodMapping>& mappings,
                                           const std::vector<MethodDoc>& docs);

} // namespace depmig
