#include "depmig/docs.hpp"

#include "depmig/error.hpp"
#include "depmig/log.hpp"
#include "depmig/zip_archive.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <future>
#include <random>
#include <semaphore>
#include <sstream>
#include <thread>

namespace depmig {

std::optional<std::string> archive_path(const LibraryCoordinate& coordinate, ArchiveKind kind) {
    if (!coordinate.resolved() || coordinate.group.empty() || coordinate.artifact.empty()) {
        return std::nullopt;
    }
    std::string group = coordinate.group;
    std::replace(group.begin(), group.end(), '.', '/');
    const auto& a = coordinate.artifact;
    const auto& v = coordinate.version;
    return group + "/" + a + "/" + v + "/" + a + "-" + v + (kind == ArchiveKind::documentation ? "-javadoc" : "") +
           ".jar";
}

std::optional<std::string> archive_url(const LibraryCoordinate& coordinate, ArchiveKind kind, std::string_view base) {
    auto path = archive_path(coordinate, kind);
    if (!path) {
        log::warn("archive_skipped", {{"library", coordinate.str()}, {"reason", "unresolved version"}});
        return std::nullopt;
    }
    std::string url(base);
    while (!url.empty() && url.back() == '/') url.pop_back();
    return url + "/" + *path;
}

// ---------------------------------------------------------------------------
// HTML

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x110000) {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

std::string decode_entities(std::string_view s) {
    static const std::pair<std::string_view, std::string_view> named[] = {
        {"nbsp", " "}, {"lt", "<"}, {"gt", ">"}, {"amp", "&"}, {"quot", "\""}, {"apos", "'"},
        {"mdash", "\xE2\x80\x94"}, {"ndash", "\xE2\x80\x93"}, {"hellip", "\xE2\x80\xA6"}, {"copy", "\xC2\xA9"},
    };
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        const auto semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += s[i++];
            continue;
        }
        const auto name = s.substr(i + 1, semi - i - 1);
        bool decoded = false;
        if (name.size() > 1 && name[0] == '#') {
            try {
                const bool hex = name[1] == 'x' || name[1] == 'X';
                const auto cp = std::stoul(std::string(name.substr(hex ? 2 : 1)), nullptr, hex ? 16 : 10);
                append_utf8(out, cp == 0xA0 ? 0x20 : cp);
                decoded = true;
            } catch (const std::exception&) {
            }
        } else {
            for (const auto& [entity, text] : named) {
                if (name == entity) {
                    out += text;
                    decoded = true;
                    break;
                }
            }
        }
        if (decoded) {
            i = semi + 1;
        } else {
            out += s[i++];
        }
    }
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool space = false;
    for (const char c : s) {
        if (std::isspace(static_cast<unsigned char>(c)) != 0) {
            space = !out.empty();
        } else {
            if (space) out += ' ';
            space = false;
            out += c;
        }
    }
    return out;
}

/// Lower-cased copy used for searching; offsets are shared with the original.
struct Page {
    std::string_view html;
    std::string folded;

    explicit Page(std::string_view h) : html(h), folded(lower(h)) {}

    std::size_t find(std::string_view needle, std::size_t from, std::size_t limit = std::string::npos) const {
        const auto pos = folded.find(needle, from);
        return pos == std::string::npos || pos >= limit ? std::string::npos : pos;
    }

    /// Content of the element opened at `open` (a '<' of `tag`), honoring nesting.
    std::pair<std::size_t, std::size_t> element(std::size_t open, std::string_view tag, std::size_t limit) const {
        const auto content = folded.find('>', open);
        if (content == std::string::npos) return {limit, limit};
        const std::string open_tag = "<" + std::string(tag);
        const std::string close_tag = "</" + std::string(tag);
        int depth = 1;
        std::size_t pos = content + 1;
        while (pos < limit) {
            const auto next_open = find(open_tag, pos, limit);
            const auto next_close = find(close_tag, pos, limit);
            if (next_close == std::string::npos) break;
            if (next_open != std::string::npos && next_open < next_close) {
                ++depth;
                pos = next_open + open_tag.size();
                continue;
            }
            if (--depth == 0) return {content + 1, next_close};
            pos = next_close + close_tag.size();
        }
        return {content + 1, limit};
    }

    std::string text(std::size_t begin, std::size_t end) const {
        return html_to_text(html.substr(begin, end - begin));
    }
};

/// Value of a name= or id= attribute of the <a> tag at `open`.
std::optional<std::string> anchor_name(const Page& page, std::size_t open) {
    const auto close = page.folded.find('>', open);
    if (close == std::string::npos) return std::nullopt;
    const auto tag = std::string_view(page.folded).substr(open, close - open);
    for (const std::string_view attr : {"name=", "id="}) {
        auto pos = tag.find(attr);
        while (pos != std::string_view::npos && pos > 0 && !std::isspace(static_cast<unsigned char>(tag[pos - 1]))) {
            pos = tag.find(attr, pos + 1);
        }
        if (pos == std::string_view::npos) continue;
        pos += attr.size();
        const char quote = tag[pos];
        std::size_t end;
        if (quote == '"' || quote == '\'') {
            ++pos;
            end = tag.find(quote, pos);
        } else {
            end = tag.find_first_of(" \t\r\n", pos);
        }
        if (end == std::string_view::npos) end = tag.size();
        return decode_entities(page.html.substr(open + pos, end - pos));
    }
    return std::nullopt;
}

std::string simple_type(std::string type) {
    std::string suffix;
    while (type.ends_with("[]")) {
        suffix += "[]";
        type.resize(type.size() - 2);
    }
    while (type.ends_with(":A")) { // JDK 8 array notation
        suffix += "[]";
        type.resize(type.size() - 2);
    }
    if (type.ends_with("...")) {
        suffix = "..." + suffix;
        type.resize(type.size() - 3);
    }
    if (const auto lt = type.find('<'); lt != std::string::npos) type.resize(lt);
    const auto dot = type.rfind('.');
    return (dot == std::string::npos ? type : type.substr(dot + 1)) + suffix;
}

struct MemberAnchor {
    std::string name;
    std::vector<std::string> params;
};

/// "m(a.B,int[])" (JDK 7) or "m-a.B-int:A-" (JDK 8).
std::optional<MemberAnchor> parse_member_anchor(const std::string& anchor) {
    MemberAnchor out;
    auto split_params = [&](std::string_view list, char sep) {
        std::size_t start = 0;
        while (start <= list.size()) {
            auto end = list.find(sep, start);
            if (end == std::string_view::npos) end = list.size();
            std::string param(list.substr(start, end - start));
            param.erase(std::remove_if(param.begin(), param.end(),
                                       [](unsigned char c) { return std::isspace(c) != 0; }),
                        param.end());
            if (!param.empty()) out.params.push_back(simple_type(param));
            start = end + 1;
        }
    };
    const auto paren = anchor.find('(');
    if (paren != std::string::npos && anchor.ends_with(")")) {
        out.name = anchor.substr(0, paren);
        split_params(std::string_view(anchor).substr(paren + 1, anchor.size() - paren - 2), ',');
    } else if (const auto dash = anchor.find('-'); dash != std::string::npos && anchor.ends_with("-")) {
        out.name = anchor.substr(0, dash);
        split_params(std::string_view(anchor).substr(dash + 1, anchor.size() - dash - 2), '-');
    } else {
        return std::nullopt;
    }
    if (out.name.empty() || !std::all_of(out.name.begin(), out.name.end(), [](unsigned char c) {
            return std::isalnum(c) != 0 || c == '_' || c == '$' || c == '.' || c == '<' || c == '>' || c >= 0x80;
        })) {
        return std::nullopt;
    }
    return out;
}

/// Definition list entries: label text -> list of <dd> spans.
std::vector<std::pair<std::string, std::vector<std::pair<std::size_t, std::size_t>>>>
definition_list(const Page& page, std::size_t begin, std::size_t end) {
    std::vector<std::pair<std::string, std::vector<std::pair<std::size_t, std::size_t>>>> out;
    std::size_t pos = begin;
    while (true) {
        const auto dt = page.find("<dt", pos, end);
        if (dt == std::string::npos) break;
        const auto dt_content = page.folded.find('>', dt) + 1;
        auto dt_end = page.find("</dt", dt_content, end);
        const auto next_dd = page.find("<dd", dt_content, end);
        if (dt_end == std::string::npos || (next_dd != std::string::npos && next_dd < dt_end)) dt_end = next_dd;
        if (dt_end == std::string::npos) break;
        auto label = lower(page.text(dt_content, dt_end));
        std::vector<std::pair<std::size_t, std::size_t>> values;
        pos = dt_end;
        while (true) {
            const auto dd = page.find("<dd", pos, end);
            const auto following_dt = page.find("<dt", pos, end);
            if (dd == std::string::npos || (following_dt != std::string::npos && following_dt < dd)) break;
            const auto dd_content = page.folded.find('>', dd) + 1;
            std::size_t dd_end = end;
            for (const std::string_view stop : {"</dd", "<dd", "<dt", "</dl"}) {
                const auto s = page.find(stop, dd_content, end);
                if (s != std::string::npos) dd_end = std::min(dd_end, s);
            }
            values.emplace_back(dd_content, dd_end);
            pos = dd_end;
        }
        out.emplace_back(std::move(label), std::move(values));
    }
    return out;
}

std::string first_block(const Page& page, std::size_t begin, std::size_t end) {
    const auto block = page.find("<div class=\"block\"", begin, end);
    if (block == std::string::npos) return {};
    const auto [from, to] = page.element(block, "div", end);
    return page.text(from, to);
}

} // namespace

std::string html_to_text(std::string_view html) {
    std::string stripped;
    stripped.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        if (html.substr(i, 4) == "<!--") {
            const auto end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        if (html[i] == '<') {
            const auto end = html.find('>', i);
            if (end == std::string_view::npos) break;
            // Block-level tags separate words; inline tags do not.
            const auto tag = lower(html.substr(i + 1, std::min<std::size_t>(end - i - 1, 4)));
            if (tag.starts_with("br") || tag.starts_with("p") || tag.starts_with("/p") || tag.starts_with("li") ||
                tag.starts_with("div") || tag.starts_with("/div") || tag.starts_with("dd") || tag.starts_with("dt")) {
                stripped += ' ';
            }
            i = end + 1;
            continue;
        }
        stripped += html[i++];
    }
    return collapse_whitespace(decode_entities(stripped));
}

std::vector<MethodDoc> parse_doc_page(std::string_view html, const std::string& package,
                                      const std::string& class_name, const LibraryCoordinate& library) {
    const Page page(html);
    std::vector<MethodDoc> docs;

    std::size_t details = std::string::npos;
    for (const std::string_view marker : {"constructor_detail", "constructor.detail", "method_detail", "method.detail"}) {
        details = std::min(details, page.find(marker, 0));
    }
    if (details == std::string::npos) return docs;
    auto details_end = page.find("end of class data", details);
    if (details_end == std::string::npos) details_end = page.folded.size();

    std::string class_description;
    if (const auto desc = page.find("<div class=\"description\"", 0, details); desc != std::string::npos) {
        class_description = first_block(page, desc, details);
    }

    struct Located {
        std::size_t begin;
        MemberAnchor anchor;
    };
    std::vector<Located> members;
    for (std::size_t pos = page.find("<a", details, details_end); pos != std::string::npos;
         pos = page.find("<a", pos + 2, details_end)) {
        const char next = page.folded[pos + 2];
        if (!std::isspace(static_cast<unsigned char>(next))) continue;
        const auto name = anchor_name(page, pos);
        if (!name) continue;
        if (auto anchor = parse_member_anchor(*name)) members.push_back({pos, std::move(*anchor)});
    }
    if (members.empty()) {
        log::warn("doc_format_unrecognized", {{"class", package + "." + class_name}});
        return docs;
    }

    const auto simple_class = class_name.substr(class_name.rfind('.') == std::string::npos ? 0 : class_name.rfind('.') + 1);
    for (std::size_t m = 0; m < members.size(); ++m) {
        const auto begin = members[m].begin;
        const auto end = m + 1 < members.size() ? members[m + 1].begin : details_end;
        MethodDoc doc;
        doc.library = library;
        doc.package = package;
        doc.class_name = class_name;
        doc.class_description = class_description;
        doc.is_constructor = members[m].anchor.name == simple_class || members[m].anchor.name == class_name ||
                             members[m].anchor.name == "<init>";
        doc.method = doc.is_constructor ? class_name : members[m].anchor.name;
        doc.signature = members[m].anchor.params;

        auto dl = page.find("<dl", begin, end);
        // The description block precedes the tag list.
        doc.description = first_block(page, begin, dl == std::string::npos ? end : dl);
        if (dl != std::string::npos) {
            for (const auto& [label, values] : definition_list(page, dl, end)) {
                if (label.starts_with("parameters")) {
                    for (const auto& [from, to] : values) {
                        const auto text = page.text(from, to);
                        const auto sep = text.find(" - ");
                        if (sep == std::string::npos) {
                            doc.param_docs.push_back({text, {}});
                        } else {
                            doc.param_docs.push_back({text.substr(0, sep), text.substr(sep + 3)});
                        }
                    }
                } else if (label.starts_with("returns") && !values.empty()) {
                    doc.return_doc = page.text(values.front().first, values.front().second);
                } else if (label.starts_with("since") && !values.empty()) {
                    doc.since = page.text(values.front().first, values.front().second);
                }
            }
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

namespace {

/// Package and class of a class page, or nullopt for index/summary/use pages.
std::optional<std::pair<std::string, std::string>> class_page(std::string_view entry) {
    if (!entry.ends_with(".html")) return std::nullopt;
    for (const std::string_view skip : {"class-use/", "doc-files/", "src-html/"}) {
        if (entry.find(skip) != std::string_view::npos) return std::nullopt;
    }
    entry.remove_suffix(5);
    const auto slash = entry.rfind('/');
    const auto name = slash == std::string_view::npos ? entry : entry.substr(slash + 1);
    if (name.empty() || std::isupper(static_cast<unsigned char>(name.front())) == 0 ||
        name.find('-') != std::string_view::npos) {
        return std::nullopt;
    }
    std::string package(slash == std::string_view::npos ? std::string_view{} : entry.substr(0, slash));
    std::replace(package.begin(), package.end(), '/', '.');
    return std::pair{package, std::string(name)};
}

} // namespace

std::vector<MethodDoc> parse_doc_archive(std::string archive, const LibraryCoordinate& library) {
    std::optional<ZipArchive> zip;
    try {
        zip.emplace(std::move(archive));
    } catch (const Error& e) {
        throw DocError(std::string("unreadable documentation archive: ") + e.what());
    }
    auto entries = zip->entries();
    std::sort(entries.begin(), entries.end(), [](const ZipEntry& a, const ZipEntry& b) { return a.name < b.name; });
    std::vector<MethodDoc> docs;
    for (const auto& entry : entries) {
        const auto page = class_page(entry.name);
        if (!page) continue;
        std::string html;
        try {
            html = zip->read(entry);
        } catch (const Error& e) {
            throw DocError("unreadable documentation page " + entry.name + ": " + e.what());
        }
        auto found = parse_doc_page(html, page->first, page->second, library);
        docs.insert(docs.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
    }
    return docs;
}

// ---------------------------------------------------------------------------
// Fetching

HttpFetcher::HttpFetcher(std::chrono::seconds timeout) : timeout_(timeout) {}

FetchResult HttpFetcher::get(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return {0, {}, "not an absolute URL: " + url};
    const auto path_begin = url.find('/', scheme_end + 3);
    const auto origin = url.substr(0, path_begin);
    const auto path = path_begin == std::string::npos ? std::string("/") : url.substr(path_begin);
    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    auto result = client.Get(path);
    if (!result) return {0, {}, httplib::to_string(result.error())};
    return {result->status, std::move(result->body), {}};
}

FetchResult FileFetcher::get(const std::string& url) {
    std::string path = url;
    if (path.starts_with("file://")) path = path.substr(7);
    std::ifstream in(path, std::ios::binary);
    if (!in) return {404, {}, "not found: " + path};
    std::ostringstream body;
    body << in.rdbuf();
    return {200, body.str(), {}};
}

std::shared_ptr<Fetcher> make_fetcher(std::string_view base) {
    if (base.find("://") == std::string_view::npos || base.starts_with("file://")) {
        return std::make_shared<FileFetcher>();
    }
    return std::make_shared<HttpFetcher>();
}

ArchiveCache::ArchiveCache(std::filesystem::path root, std::shared_ptr<Fetcher> fetcher, CacheOptions options)
    : root_(std::move(root)), fetcher_(std::move(fetcher)), options_(std::move(options)) {}

std::optional<std::filesystem::path> ArchiveCache::location(const LibraryCoordinate& coordinate,
                                                            ArchiveKind kind) const {
    const auto path = archive_path(coordinate, kind);
    if (!path) return std::nullopt;
    return root_ / *path;
}

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

void write_atomically(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::create_directories(path.parent_path());
    static std::atomic<unsigned> counter{0};
    auto temp = path;
    temp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
            std::to_string(counter++);
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("cannot write " + temp.string());
    }
    std::filesystem::rename(temp, path);
}

} // namespace

std::optional<std::string> ArchiveCache::download(const std::string& url) {
    auto delay = options_.initial_backoff;
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
        ++network_calls_;
        auto result = fetcher_->get(url);
        if (result.status == 200) return std::move(result.body);
        const bool retry = result.status == 0 || result.status == 429 || result.status >= 500;
        log::warn("download_failed", {{"url", url},
                                      {"status", std::to_string(result.status)},
                                      {"attempt", std::to_string(attempt)},
                                      {"error", result.error}});
        if (!retry || attempt == options_.max_attempts) break;
        std::this_thread::sleep_for(delay);
        delay *= 2;
    }
    return std::nullopt;
}

std::optional<std::string> ArchiveCache::get(const LibraryCoordinate& coordinate, ArchiveKind kind) {
    const auto path = location(coordinate, kind);
    if (!path) {
        log::warn("archive_skipped", {{"library", coordinate.str()}, {"reason", "unresolved version"}});
        return std::nullopt;
    }
    if (auto cached = read_file(*path)) return cached;
    if (offline()) return std::nullopt;
    const auto url = archive_url(coordinate, kind, options_.base);
    {
        std::lock_guard lock(missing_mutex_);
        if (missing_.contains(*url)) return std::nullopt;
    }
    auto bytes = download(*url);
    if (bytes) {
        write_atomically(*path, *bytes);
        log::info("archive_fetched", {{"url", *url}, {"bytes", std::to_string(bytes->size())}});
    } else {
        std::lock_guard lock(missing_mutex_);
        missing_.insert(*url);
    }
    return bytes;
}

void ArchiveCache::prefetch(const std::vector<std::pair<LibraryCoordinate, ArchiveKind>>& wanted) {
    if (offline()) return;
    std::counting_semaphore<64> slots(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(options_.max_concurrent, 1, 64)));
    std::vector<std::future<void>> tasks;
    for (const auto& [coordinate, kind] : wanted) {
        const auto path = location(coordinate, kind);
        if (!path || std::filesystem::exists(*path)) continue;
        slots.acquire();
        tasks.push_back(std::async(std::launch::async, [this, &slots, coordinate = coordinate, kind = kind] {
            try {
                get(coordinate, kind);
            } catch (const std::exception& e) {
                log::warn("prefetch_failed", {{"library", coordinate.str()}, {"error", e.what()}});
            }
            slots.release();
        }));
    }
    for (auto& t : tasks) t.get();
}

// ---------------------------------------------------------------------------
// Attachment

DocMatch find_doc(const MethodRef& method, const std::vector<MethodDoc>& docs) {
    DocMatch match{method, std::nullopt, false};
    const auto simple = method.simple_class_name();
    const auto dot = method.class_name.rfind('.');
    const auto package = dot == std::string::npos ? std::string{} : method.class_name.substr(0, dot);
    const auto name = method.is_constructor() ? simple : method.method;
    std::vector<const MethodDoc*> candidates;
    for (const auto& doc : docs) {
        if (doc.class_name == simple && doc.method == name && doc.arity() == method.arity &&
            doc.is_constructor == method.is_constructor()) {
            candidates.push_back(&doc);
        }
    }
    std::vector<const MethodDoc*> same_package;
    std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(same_package),
                 [&](const MethodDoc* d) { return d->package == package; });
    const auto& pool = same_package.empty() ? candidates : same_package;
    if (!pool.empty()) {
        match.doc = *pool.front();
        match.ambiguous = pool.size() > 1;
    }
    return match;
}

std::vector<DocumentedMapping> attach_docs(const std::vector<MethodMapping>& mappings,
                                           const std::vector<MethodDoc>& docs) {
    std::vector<DocumentedMapping> out;
    for (const auto& mapping : mappings) {
        DocumentedMapping documented{mapping, {}, {}};
        for (const auto& m : mapping.source_methods) documented.source_docs.push_back(find_doc(m, docs));
        for (const auto& m : mapping.target_methods) documented.target_docs.push_back(find_doc(m, docs));
        out.push_back(std::move(documented));
    }
    return out;
}

} // namespace depmig
