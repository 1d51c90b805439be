#include "depmig/java_facts.hpp"

#include "depmig/error.hpp"
#include "depmig/zip_archive.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace depmig {

// ---------------------------------------------------------------------------
// PackageIndex

namespace {

bool starts_upper(std::string_view s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s.front())) != 0;
}

/// CamelCase type-like segment: upper-case first letter and at least one lower-case letter.
bool camel_case(std::string_view s) {
    return starts_upper(s) &&
           std::any_of(s.begin(), s.end(), [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; });
}

std::vector<std::string_view> split_dots(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = s.find('.', start);
        parts.push_back(s.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (dot == std::string_view::npos) {
            break;
        }
        start = dot + 1;
    }
    return parts;
}

std::string package_of(std::string_view fqn) {
    const auto dot = fqn.rfind('.');
    return dot == std::string_view::npos ? std::string() : std::string(fqn.substr(0, dot));
}

} // namespace

std::optional<std::string> PackageIndex::owning_class(std::string_view qualified) const {
    if (low_confidence) {
        const auto prefix = library.group;
        if (prefix.empty() || qualified.size() <= prefix.size() || !qualified.starts_with(prefix) ||
            qualified[prefix.size()] != '.') {
            return std::nullopt;
        }
        const auto segments = split_dots(qualified.substr(prefix.size() + 1));
        std::string cls = prefix;
        for (const auto seg : segments) {
            cls += '.';
            cls += seg;
            if (camel_case(seg)) {
                return cls;
            }
        }
        return std::nullopt;
    }
    std::string candidate(qualified);
    while (true) {
        if (classes.contains(candidate)) {
            return candidate;
        }
        const auto dot = candidate.rfind('.');
        if (dot == std::string::npos) {
            return std::nullopt;
        }
        candidate.resize(dot);
    }
}

bool PackageIndex::has_class(std::string_view fqn) const {
    if (!low_confidence) {
        return classes.contains(std::string(fqn));
    }
    const auto owner = owning_class(fqn);
    return owner && *owner == fqn;
}

bool PackageIndex::has_package(std::string_view package) const {
    if (!low_confidence) {
        return packages.contains(std::string(package));
    }
    const auto& prefix = library.group;
    return package == prefix || (package.size() > prefix.size() && package.starts_with(prefix) &&
                                 package[prefix.size()] == '.');
}

PackageIndex build_package_index(const LibraryCoordinate& coordinate, std::string archive) {
    PackageIndex index;
    index.library = coordinate;
    std::vector<ZipEntry> entries;
    try {
        entries = ZipArchive(std::move(archive)).entries();
    } catch (const Error& e) {
        throw IndexError("unreadable class archive for " + coordinate.str() + ": " + e.what());
    }
    for (const auto& entry : entries) {
        std::string_view name(entry.name);
        if (entry.is_directory() || !name.ends_with(".class") || name.starts_with("META-INF/")) {
            continue;
        }
        name.remove_suffix(6);
        const auto slash = name.rfind('/');
        const auto simple = slash == std::string_view::npos ? name : name.substr(slash + 1);
        if (simple == "module-info" || simple == "package-info") {
            continue;
        }
        std::string dotted(name);
        std::replace(dotted.begin(), dotted.end(), '/', '.');
        if (const auto dollar = dotted.find('$'); dollar != std::string::npos) {
            dotted.resize(dollar);
        }
        if (dotted.empty() || dotted.back() == '.') {
            continue;
        }
        index.packages.insert(package_of(dotted));
        index.classes.insert(std::move(dotted));
    }
    if (index.classes.empty()) {
        throw IndexError("class archive for " + coordinate.str() + " contains no classes");
    }
    return index;
}

PackageIndex fallback_package_index(const LibraryCoordinate& coordinate) {
    PackageIndex index;
    index.library = coordinate;
    index.low_confidence = true;
    index.packages.insert(coordinate.group);
    return index;
}

std::string_view to_string(InvocationKind kind) {
    switch (kind) {
    case InvocationKind::constructor: return "constructor";
    case InvocationKind::instance: return "instance";
    case InvocationKind::static_call: return "static_call";
    case InvocationKind::static_imported: return "static_imported";
    }
    return "instance";
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

enum class Tok { ident, number, literal, punct };

struct Token {
    Tok kind;
    std::string_view text;
    std::size_t offset;
    std::size_t line;
};

constexpr std::array kKeywords = {
    "abstract", "assert",     "boolean", "break",     "byte",     "case",      "catch",        "char",
    "class",    "const",      "continue", "default",  "do",       "double",    "else",         "enum",
    "extends",  "final",      "finally", "float",     "for",      "goto",      "if",           "implements",
    "import",   "instanceof", "int",     "interface", "long",     "native",    "new",          "package",
    "private",  "protected",  "public",  "return",    "short",    "static",    "strictfp",     "super",
    "switch",   "synchronized", "this",  "throw",     "throws",   "transient", "try",          "void",
    "volatile", "while",      "true",    "false",     "null",
};

constexpr std::array kPrimitives = {"boolean", "byte", "char", "short", "int", "long", "float", "double", "void"};

constexpr std::array kModifiers = {"public",    "private",   "protected", "static",       "final",
                                   "abstract",  "transient", "volatile",  "synchronized", "native",
                                   "strictfp",  "default"};

template <std::size_t N>
bool in(const std::array<const char*, N>& set, std::string_view word) {
    return std::any_of(set.begin(), set.end(), [&](const char* k) { return word == k; });
}

bool is_ident_start(unsigned char c) { return std::isalpha(c) != 0 || c == '_' || c == '$' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) != 0 || c == '_' || c == '$' || c >= 0x80; }

std::vector<Token> lex(std::string_view src, std::size_t& line_count) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    std::size_t line = 1;
    const auto n = src.size();
    auto count_lines = [&](std::size_t from, std::size_t to) {
        line += static_cast<std::size_t>(std::count(src.begin() + static_cast<std::ptrdiff_t>(from),
                                                    src.begin() + static_cast<std::ptrdiff_t>(to), '\n'));
    };
    while (i < n) {
        const auto c = static_cast<unsigned char>(src[i]);
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(c) != 0 || c < 0x20 || c == 0x7f) {
            ++i;
        } else if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n') ++i;
        } else if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            const auto end = src.find("*/", i + 2);
            const auto stop = end == std::string_view::npos ? n : end + 2;
            count_lines(i, stop);
            i = stop;
        } else if (c == '"' && src.substr(i, 3) == "\"\"\"") {
            const auto start = i;
            std::size_t j = i + 3;
            while (j < n && src.substr(j, 3) != "\"\"\"") {
                j += src[j] == '\\' ? 2 : 1;
            }
            j = std::min(n, j + 3);
            tokens.push_back({Tok::literal, src.substr(start, j - start), start, line});
            count_lines(start, j);
            i = j;
        } else if (c == '"' || c == '\'') {
            const auto start = i;
            std::size_t j = i + 1;
            while (j < n && src[j] != static_cast<char>(c) && src[j] != '\n') {
                j += src[j] == '\\' && j + 1 < n && src[j + 1] != '\n' ? 2 : 1;
            }
            if (j < n && src[j] == static_cast<char>(c)) ++j;
            tokens.push_back({Tok::literal, src.substr(start, j - start), start, line});
            i = j;
        } else if (is_ident_start(c)) {
            const auto start = i;
            while (i < n && is_ident_char(static_cast<unsigned char>(src[i]))) ++i;
            tokens.push_back({Tok::ident, src.substr(start, i - start), start, line});
        } else if (std::isdigit(c) != 0) {
            const auto start = i;
            while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) != 0 || src[i] == '_' ||
                             (src[i] == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])) != 0))) {
                ++i;
            }
            tokens.push_back({Tok::number, src.substr(start, i - start), start, line});
        } else {
            std::size_t len = 1;
            const auto rest = src.substr(i, 3);
            if (rest == "...") {
                len = 3;
            } else if (rest.starts_with("->") || rest.starts_with("::")) {
                len = 2;
            }
            tokens.push_back({Tok::punct, src.substr(i, len), i, line});
            i += len;
        }
    }
    line_count = src.empty() ? 0 : (src.back() == '\n' ? line - 1 : line);
    return tokens;
}

constexpr long kNone = -1;

class Extractor {
public:
    Extractor(std::string_view src, std::string path) : src_(src) {
        facts_.path = std::move(path);
        tokens_ = lex(src, facts_.line_count);
        pair_brackets();
        classify_blocks();
    }

    SourceFacts run() {
        scan_header();
        scan_type_names();
        scan_declarations();
        scan_invocations();
        return std::move(facts_);
    }

private:
    std::string_view src_;
    std::vector<Token> tokens_;
    std::vector<long> match_;     // partner index for brackets, kNone otherwise
    std::vector<long> container_; // innermost open bracket enclosing each token
    std::vector<bool> type_body_; // for '{' tokens
    SourceFacts facts_;

    long size() const { return static_cast<long>(tokens_.size()); }

    std::string_view text(long i) const {
        return i >= 0 && i < size() ? tokens_[static_cast<std::size_t>(i)].text : std::string_view{};
    }
    bool is(long i, std::string_view t) const {
        return i >= 0 && i < size() && tokens_[static_cast<std::size_t>(i)].kind != Tok::literal && text(i) == t;
    }
    bool is_ident(long i) const {
        return i >= 0 && i < size() && tokens_[static_cast<std::size_t>(i)].kind == Tok::ident;
    }
    bool is_name(long i) const { return is_ident(i) && !in(kKeywords, text(i)); }
    const Token& tok(long i) const { return tokens_[static_cast<std::size_t>(i)]; }

    /// Byte offset just past the token matching the opener at `open`, or end of source.
    std::size_t end_offset_of(long open) const {
        const auto close = match_[static_cast<std::size_t>(open)];
        return close == kNone || close >= size() ? src_.size() : tok(close).offset + 1;
    }

    static bool opener(std::string_view t) { return t == "(" || t == "[" || t == "{"; }
    static bool closer(std::string_view t) { return t == ")" || t == "]" || t == "}"; }
    static std::string_view partner(std::string_view t) {
        if (t == ")") return "(";
        if (t == "]") return "[";
        return "{";
    }

    void pair_brackets() {
        match_.assign(tokens_.size(), kNone);
        container_.assign(tokens_.size(), kNone);
        std::vector<long> stack;
        for (long i = 0; i < size(); ++i) {
            container_[static_cast<std::size_t>(i)] = stack.empty() ? kNone : stack.back();
            if (tok(i).kind != Tok::punct) {
                continue;
            }
            const auto t = text(i);
            if (opener(t)) {
                stack.push_back(i);
            } else if (closer(t)) {
                const auto want = partner(t);
                auto it = std::find_if(stack.rbegin(), stack.rend(), [&](long o) { return text(o) == want; });
                if (it == stack.rend()) {
                    continue; // stray closer
                }
                const long open = *it;
                // Openers above the partner are unbalanced; close them here.
                while (stack.back() != open) {
                    match_[static_cast<std::size_t>(stack.back())] = i;
                    stack.pop_back();
                }
                stack.pop_back();
                match_[static_cast<std::size_t>(open)] = i;
                match_[static_cast<std::size_t>(i)] = open;
                container_[static_cast<std::size_t>(i)] = stack.empty() ? kNone : stack.back();
            }
        }
        for (const long open : stack) {
            match_[static_cast<std::size_t>(open)] = size();
        }
    }

    /// Index just before a generic argument list ending at `close` ('>'), or kNone.
    long skip_generic_back(long close) const {
        int depth = 0;
        for (long k = close; k >= 0; --k) {
            const auto t = text(k);
            if (is(k, ">")) {
                ++depth;
            } else if (is(k, "<")) {
                if (--depth == 0) return k - 1;
            } else if (!(is_ident(k) || is(k, ".") || is(k, ",") || is(k, "?") || is(k, "[") || is(k, "]") ||
                         is(k, "&"))) {
                return kNone;
            }
            (void)t;
        }
        return kNone;
    }

    /// Index just after a generic argument list starting at `open` ('<'), or kNone.
    long skip_generic_forward(long open) const {
        int depth = 0;
        for (long k = open; k < size(); ++k) {
            if (is(k, "<")) {
                ++depth;
            } else if (is(k, ">")) {
                if (--depth == 0) return k + 1;
            } else if (!(is_ident(k) || is(k, ".") || is(k, ",") || is(k, "?") || is(k, "[") || is(k, "]") ||
                         is(k, "&"))) {
                return kNone;
            }
        }
        return kNone;
    }

    /// Reads a dotted identifier chain ending at `last`; returns (first index, joined text).
    std::pair<long, std::string> chain_back(long last) const {
        long first = last;
        while (is(first - 1, ".") && is_ident(first - 2)) {
            const auto t = text(first - 2);
            if (t == "this" || t == "super") {
                first -= 2;
                break;
            }
            if (in(kKeywords, t)) break;
            first -= 2;
        }
        std::string joined;
        for (long k = first; k <= last; k += 2) {
            if (!joined.empty()) joined += '.';
            joined += text(k);
        }
        return {first, joined};
    }

    void classify_blocks() {
        type_body_.assign(tokens_.size(), false);
        for (long b = 0; b < size(); ++b) {
            if (!is(b, "{")) {
                continue;
            }
            if (is(b - 1, ")")) {
                const long open = match_[static_cast<std::size_t>(b - 1)];
                if (open != kNone && constructed_type_before(open)) {
                    type_body_[static_cast<std::size_t>(b)] = true; // anonymous class body
                    continue;
                }
            }
            for (long k = b - 1; k >= 0; --k) {
                if (is(k, ";") || is(k, "{") || is(k, "}") || is(k, "=")) {
                    break;
                }
                if (is(k, ")")) {
                    const long open = match_[static_cast<std::size_t>(k)];
                    if (open == kNone) break;
                    k = open;
                    continue;
                }
                const auto t = text(k);
                if ((t == "class" || t == "interface" || t == "enum") && is_ident(k) && !is(k - 1, ".")) {
                    type_body_[static_cast<std::size_t>(b)] = true;
                    break;
                }
                if (t == "record" && is_name(k + 1) && is(k + 2, "(")) {
                    type_body_[static_cast<std::size_t>(b)] = true;
                    break;
                }
            }
        }
    }

    /// If `open` ('(') follows `new Type<...>`, returns the type as written.
    std::optional<std::string> constructed_type_before(long open) const {
        long k = open - 1;
        if (is(k, ">")) {
            k = skip_generic_back(k);
            if (k == kNone) return std::nullopt;
        }
        if (!is_name(k)) return std::nullopt;
        auto [first, chain] = chain_back(k);
        if (!is(first - 1, "new")) return std::nullopt;
        return chain;
    }

    void scan_header() {
        for (long i = 0; i < size(); ++i) {
            if (container_[static_cast<std::size_t>(i)] != kNone) {
                continue;
            }
            if (is(i, "package") && is_ident(i)) {
                std::string name;
                long k = i + 1;
                while (is_ident(k) || is(k, ".")) {
                    name += text(k);
                    ++k;
                }
                facts_.package_name = name;
                i = k;
            } else if (is(i, "import") && is_ident(i)) {
                Import imp;
                imp.line = tok(i).line;
                long k = i + 1;
                if (is(k, "static")) {
                    imp.is_static = true;
                    ++k;
                }
                std::string name;
                while (k < size() && !is(k, ";")) {
                    if (is(k, "*")) {
                        imp.is_wildcard = true;
                    } else if (is_ident(k) || is(k, ".")) {
                        name += text(k);
                    } else {
                        break;
                    }
                    ++k;
                }
                if (imp.is_wildcard && name.ends_with('.')) {
                    name.pop_back();
                }
                if (!name.empty()) {
                    imp.name = std::move(name);
                    facts_.imports.push_back(std::move(imp));
                }
                i = k;
            }
        }
    }

    void scan_type_names() {
        for (long i = 0; i + 1 < size(); ++i) {
            const auto t = text(i);
            if ((t == "class" || t == "interface" || t == "enum") && is_ident(i) && !is(i - 1, ".") &&
                is_name(i + 1)) {
                facts_.declared_types.emplace(text(i + 1));
            } else if (t == "record" && is_name(i + 1) && is(i + 2, "(")) {
                facts_.declared_types.emplace(text(i + 1));
            }
        }
    }

    long innermost(long i, std::string_view kind) const {
        for (long c = container_[static_cast<std::size_t>(i)]; c != kNone; c = container_[static_cast<std::size_t>(c)]) {
            if (text(c) == kind) return c;
        }
        return kNone;
    }

    /// End offset of a lambda whose arrow is at `arrow`.
    std::size_t lambda_end(long arrow) const {
        if (is(arrow + 1, "{")) {
            return end_offset_of(arrow + 1);
        }
        const long c = container_[static_cast<std::size_t>(arrow)];
        return c == kNone ? src_.size() : end_offset_of(c);
    }

    /// Scope of a declaration whose name token is `name_idx`.
    std::optional<std::pair<std::size_t, std::size_t>> scope_of(long name_idx, bool& is_field) const {
        is_field = false;
        const auto begin = tok(name_idx).offset;
        const long c = container_[static_cast<std::size_t>(name_idx)];
        if (c == kNone) {
            return std::pair{begin, src_.size()};
        }
        if (is(c, "[")) {
            return std::nullopt;
        }
        if (is(c, "{")) {
            if (type_body_[static_cast<std::size_t>(c)]) {
                is_field = true;
                return std::pair{tok(c).offset, end_offset_of(c)};
            }
            return std::pair{begin, end_offset_of(c)};
        }
        // Parameter-like declaration inside parentheses.
        const long close = match_[static_cast<std::size_t>(c)];
        long k = close == kNone ? size() : close + 1;
        if (is(k, "throws")) {
            while (k < size() && !is(k, "{") && !is(k, ";")) ++k;
        }
        if (is(k, "{")) {
            return std::pair{begin, end_offset_of(k)};
        }
        if (is(k, "->")) {
            return std::pair{begin, lambda_end(k)};
        }
        if (is(k, ";")) {
            return std::pair{begin, close < size() ? tok(close).offset + 1 : src_.size()};
        }
        const long block = innermost(c, "{");
        return std::pair{begin, block == kNone ? src_.size() : end_offset_of(block)};
    }

    /// Parses the declared type ending just before the name at `name_idx`. Returns the type
    /// text and the index of its first token.
    std::optional<std::pair<std::string, long>> declared_type(long name_idx) const {
        long j = name_idx - 1;
        if (is(j, "...")) --j;
        while (is(j, "]") && is(j - 1, "[")) j -= 2;
        if (is(j, ">")) {
            j = skip_generic_back(j);
            if (j == kNone) return std::nullopt;
        }
        if (!is_ident(j)) return std::nullopt;
        const auto base = text(j);
        if (in(kKeywords, base) && !in(kPrimitives, base)) return std::nullopt;
        auto [first, type] = chain_back(j);
        const long before = first - 1;
        if (before >= 0) {
            const auto b = text(before);
            const bool ok = is(before, ";") || is(before, "{") || is(before, "}") || is(before, "(") ||
                            is(before, ",") || is(before, ")") || is(before, "|") || is(before, ">") ||
                            is(before, ":") || (is_ident(before) && in(kModifiers, b)) ||
                            is(before, "instanceof") || (is_ident(before) && is(before - 1, "@"));
            if (!ok) return std::nullopt;
            // `a.b = c` style member access is never a declaration.
            if (is(before, ",") || is(before, ")")) {
                // Only accept when the enclosing construct is a parameter list or a statement.
            }
        }
        return std::pair{type, first};
    }

    void add_declaration(long name_idx, std::string type) {
        bool is_field = false;
        const auto scope = scope_of(name_idx, is_field);
        if (!scope) return;
        facts_.declarations.push_back(
            {std::string(text(name_idx)), std::move(type), tok(name_idx).line, scope->first, scope->second, is_field});
    }

    static bool declaration_follower(std::string_view t) {
        return t == "=" || t == ";" || t == "," || t == ")" || t == ":";
    }

    void scan_declarations() {
        for (long i = 0; i < size(); ++i) {
            if (!is_name(i)) continue;
            // Untyped lambda parameter: `x -> ...`
            if (is(i + 1, "->") && !is(i - 1, ".") && !is_ident(i - 1)) {
                facts_.declarations.push_back(
                    {std::string(text(i)), {}, tok(i).line, tok(i).offset, lambda_end(i + 1), false});
                continue;
            }
            if (!(tok(i + 1 < size() ? i + 1 : i).kind == Tok::punct && i + 1 < size() &&
                  declaration_follower(text(i + 1)))) {
                continue;
            }
            if (is(i + 1, "=") && is(i + 2, "=")) continue;
            if (is(i + 1, ":") && is(i + 2, ":")) continue;
            const auto declared = declared_type(i);
            if (!declared) continue;
            auto type = declared->first;
            if (type == "var" && is(i + 1, "=") && is(i + 2, "new")) {
                long k = i + 3;
                if (is_name(k)) {
                    std::string chain(text(k));
                    while (is(k + 1, ".") && is_name(k + 2)) {
                        k += 2;
                        chain += '.';
                        chain += text(k);
                    }
                    type = chain;
                }
            }
            add_declaration(i, type);
            // Further declarators of the same statement: `T a = x, b;`
            if (is(i + 1, "=") || is(i + 1, ",")) {
                const long c = container_[static_cast<std::size_t>(i)];
                if (c != kNone && is(c, "(")) continue;
                for (long k = i + 1; k < size(); ++k) {
                    if (is(k, ";") || closer(text(k))) break;
                    if (tok(k).kind == Tok::punct && opener(text(k))) {
                        const long m = match_[static_cast<std::size_t>(k)];
                        if (m == kNone || m >= size()) break;
                        k = m;
                        continue;
                    }
                    if (is(k, ",") && is_name(k + 1) && (is(k + 2, "=") || is(k + 2, ";") || is(k + 2, ","))) {
                        add_declaration(k + 1, declared->first == "var" ? std::string{} : declared->first);
                    }
                }
            }
        }
        // Untyped parenthesized lambda parameters: `(a, b) -> ...`
        for (long p = 0; p < size(); ++p) {
            if (!is(p, "(")) continue;
            const long q = match_[static_cast<std::size_t>(p)];
            if (q == kNone || q >= size() || !is(q + 1, "->")) continue;
            // Only `name` or `name, name, ...`; `(Type name)` is a typed parameter.
            bool untyped = true;
            for (long k = p + 1; k < q; ++k) {
                const bool want_name = (k - p) % 2 == 1;
                if (want_name ? !is_name(k) : !is(k, ",")) {
                    untyped = false;
                    break;
                }
            }
            if (q > p + 1 && is(q - 1, ",")) untyped = false;
            if (!untyped) continue;
            for (long k = p + 1; k < q; ++k) {
                if (is_name(k)) {
                    facts_.declarations.push_back(
                        {std::string(text(k)), {}, tok(k).line, tok(k).offset, lambda_end(q + 1), false});
                }
            }
        }
        std::stable_sort(facts_.declarations.begin(), facts_.declarations.end(),
                         [](const Declaration& a, const Declaration& b) { return a.scope_begin < b.scope_begin; });
    }

    const Declaration* lookup(std::string_view name, std::size_t offset, bool fields_only) const {
        const Declaration* best = nullptr;
        for (const auto& d : facts_.declarations) {
            if (d.name != name || offset < d.scope_begin || offset >= d.scope_end) continue;
            if (fields_only && !d.is_field) continue;
            if (best == nullptr || d.scope_begin >= best->scope_begin) best = &d;
        }
        return best;
    }

    std::size_t arity(long open) const {
        const long close = match_[static_cast<std::size_t>(open)];
        if (close == kNone || close >= size()) {
            // Unbalanced call: count up to the end of input.
        }
        const long stop = close == kNone ? size() : close;
        if (stop == open + 1) return 0;
        std::size_t commas = 0;
        for (long k = open + 1; k < stop; ++k) {
            if (tok(k).kind == Tok::punct && opener(text(k))) {
                const long m = match_[static_cast<std::size_t>(k)];
                if (m == kNone || m >= stop) break;
                k = m;
            } else if (is(k, "<") && is_ident(k - 1) && starts_upper(text(k - 1))) {
                const long after = skip_generic_forward(k);
                if (after != kNone && after <= stop) k = after - 1;
            } else if (is(k, ",")) {
                ++commas;
            }
        }
        return commas + 1;
    }

    bool looks_like_method_declaration(long name_idx) const {
        const long prev = name_idx - 1;
        if (prev < 0) return false;
        if (is(prev, ">")) {
            const long before = skip_generic_back(prev);
            // `obj.<T>call(` is an invocation with explicit type arguments.
            return !(before != kNone && is(before, "."));
        }
        if (is(prev, "]")) return true;
        if (is_ident(prev)) {
            const auto t = text(prev);
            return !in(kKeywords, t) || in(kPrimitives, t) || in(kModifiers, t);
        }
        // Package-private constructors: `Name(args) {`
        const long close = match_[static_cast<std::size_t>(name_idx + 1)];
        if (close != kNone && close < size() && (is(close + 1, "{") || is(close + 1, "throws")) &&
            (is(prev, ";") || is(prev, "{") || is(prev, "}"))) {
            return true;
        }
        return false;
    }

    void scan_invocations() {
        // Methods declared anywhere in the file hide static imports, even before the declaration.
        for (long i = 0; i < size(); ++i) {
            if (is_name(i) && is(i + 1, "(") && !is(i - 1, "new") && looks_like_method_declaration(i)) {
                facts_.declared_methods.emplace(text(i));
            }
        }
        for (long i = 0; i < size(); ++i) {
            if (is(i, "new") && is_ident(i)) {
                scan_constructor(i);
                continue;
            }
            if (!is_name(i) || !is(i + 1, "(")) continue;
            if (looks_like_method_declaration(i)) continue;
            if (is(i - 1, "::")) continue;
            Invocation inv;
            inv.line = tok(i).line;
            inv.offset = tok(i).offset;
            inv.method = std::string(text(i));
            inv.arity = arity(i + 1);

            long dot = i - 1;
            if (is(dot, ">")) {
                const long before = skip_generic_back(dot);
                if (before != kNone && is(before, ".")) dot = before;
            }
            if (!is(dot, ".")) {
                classify_unqualified(inv);
            } else {
                classify_qualified(inv, dot - 1);
            }
            facts_.invocations.push_back(std::move(inv));
        }
    }

    void classify_unqualified(Invocation& inv) const {
        inv.kind = InvocationKind::instance;
        if (facts_.declared_methods.contains(inv.method)) return;
        for (const auto& imp : facts_.imports) {
            if (!imp.is_static || imp.is_wildcard) continue;
            const auto dot = imp.name.rfind('.');
            if (dot == std::string::npos || imp.name.substr(dot + 1) != inv.method) continue;
            inv.kind = InvocationKind::static_imported;
            inv.receiver = imp.name.substr(0, dot);
            inv.receiver_type = inv.receiver;
            return;
        }
    }

    void classify_qualified(Invocation& inv, long last) const {
        inv.kind = InvocationKind::instance;
        // `new T() { ... }.m(...)`: step back over the anonymous body.
        if (is(last, "}")) {
            const long open_brace = match_[static_cast<std::size_t>(last)];
            if (open_brace == kNone || !is(open_brace - 1, ")")) return;
            last = open_brace - 1;
        }
        if (is(last, ")")) {
            const long open = match_[static_cast<std::size_t>(last)];
            if (open != kNone) {
                if (auto type = constructed_type_before(open)) {
                    inv.receiver = *type;
                    inv.receiver_type = *type;
                }
            }
            return;
        }
        if (!is_ident(last)) return;
        auto [first, chain] = chain_back(last);
        if (is(first - 1, ".") || is(first - 1, "::")) return; // tail of a longer expression
        const std::size_t segments = static_cast<std::size_t>((last - first) / 2 + 1);
        const auto head = text(first);
        if (segments == 1) {
            if (head == "this" || head == "super") return;
            inv.receiver = std::string(head);
            if (const auto* decl = lookup(head, inv.offset, false)) {
                inv.receiver_type = decl->type;
            } else if (starts_upper(head)) {
                inv.kind = InvocationKind::static_call;
                inv.receiver_type = inv.receiver;
            }
            return;
        }
        if (head == "this" && segments == 2) {
            const auto field = text(last);
            inv.receiver = std::string(field);
            if (const auto* decl = lookup(field, inv.offset, true)) {
                inv.receiver_type = decl->type;
            }
            return;
        }
        if (head == "this" || head == "super" || lookup(head, inv.offset, false) != nullptr) {
            return; // member access on an object
        }
        // Qualified type name: lower-case package segments, then CamelCase type segments.
        bool in_types = false;
        for (long k = first; k <= last; k += 2) {
            const auto seg = text(k);
            if (in_types || starts_upper(seg)) {
                if (!camel_case(seg) && !(k == first && starts_upper(seg))) return;
                in_types = true;
            }
        }
        if (!in_types) return;
        inv.kind = InvocationKind::static_call;
        inv.receiver = chain;
        inv.receiver_type = chain;
    }

    void scan_constructor(long new_idx) {
        long k = new_idx + 1;
        while (is(k, "@") && is_ident(k + 1)) k += 2; // type annotations
        if (!is_name(k)) return;
        std::string chain(text(k));
        while (is(k + 1, ".") && is_name(k + 2)) {
            k += 2;
            chain += '.';
            chain += text(k);
        }
        const long name_idx = k;
        long open = k + 1;
        if (is(open, "<")) {
            open = skip_generic_forward(open);
            if (open == kNone) return;
        }
        if (!is(open, "(")) return;
        Invocation inv;
        inv.kind = InvocationKind::constructor;
        inv.line = tok(name_idx).line;
        inv.offset = tok(new_idx).offset;
        inv.receiver = chain;
        inv.receiver_type = chain;
        inv.method = std::string(text(name_idx));
        inv.arity = arity(open);
        facts_.invocations.push_back(std::move(inv));
    }
};

} // namespace

SourceFacts extract_facts(std::string_view source, std::string path) {
    return Extractor(source, std::move(path)).run();
}

// ---------------------------------------------------------------------------
// Resolution

namespace {

std::string strip_type(std::string_view type) {
    std::string out(type);
    if (const auto lt = out.find('<'); lt != std::string::npos) out.resize(lt);
    while (out.ends_with("[]")) out.resize(out.size() - 2);
    if (out.ends_with("...")) out.resize(out.size() - 3);
    return out;
}

class TypeResolver {
public:
    TypeResolver(const SourceFacts& facts, const PackageIndex& index) : facts_(facts), index_(index) {}

    std::optional<std::string> resolve(std::string_view written) const {
        const auto type = strip_type(written);
        if (type.empty()) return std::nullopt;
        const auto segments = split_dots(type);
        if (segments.size() == 1) {
            return resolve_simple(type);
        }
        if (!starts_upper(segments.front())) {
            return index_.owning_class(type);
        }
        const auto outer = resolve_simple(segments.front());
        if (!outer) return std::nullopt;
        for (std::size_t i = 1; i < segments.size(); ++i) {
            if (!camel_case(segments[i])) return std::nullopt;
        }
        return outer;
    }

private:
    const SourceFacts& facts_;
    const PackageIndex& index_;

    std::optional<std::string> resolve_simple(std::string_view name) const {
        for (const auto& imp : facts_.imports) {
            if (imp.is_static || imp.is_wildcard) continue;
            const auto dot = imp.name.rfind('.');
            const std::string_view last = dot == std::string::npos ? std::string_view(imp.name)
                                                                   : std::string_view(imp.name).substr(dot + 1);
            if (last == name) {
                return index_.owning_class(imp.name); // an explicit import shadows everything else
            }
        }
        if (facts_.declared_types.contains(std::string(name))) return std::nullopt;
        if (!index_.low_confidence && !facts_.package_name.empty()) {
            const auto candidate = facts_.package_name + "." + std::string(name);
            if (index_.has_class(candidate)) return candidate;
        }
        for (const auto& imp : facts_.imports) {
            if (imp.is_static || !imp.is_wildcard) continue;
            const auto candidate = imp.name + "." + std::string(name);
            if (index_.has_class(candidate)) return candidate;
            // `import a.Outer.*` brings nested types of an indexed class into scope.
            if (index_.has_class(imp.name) && camel_case(name)) return imp.name;
        }
        return std::nullopt;
    }
};

} // namespace

std::vector<LibraryMethodUse> resolve_usages(const SourceFacts& facts, const PackageIndex& index) {
    const TypeResolver resolver(facts, index);
    std::vector<LibraryMethodUse> uses;
    for (const auto& inv : facts.invocations) {
        std::optional<std::string> cls;
        std::string method = inv.method;
        switch (inv.kind) {
        case InvocationKind::constructor:
            cls = resolver.resolve(inv.receiver_type);
            method = std::string(kConstructorName);
            break;
        case InvocationKind::instance:
        case InvocationKind::static_call:
            if (!inv.receiver_type.empty()) cls = resolver.resolve(inv.receiver_type);
            break;
        case InvocationKind::static_imported:
            cls = index.owning_class(inv.receiver_type);
            break;
        }
        if (cls) {
            uses.push_back({index.library.id(), MethodRef{*cls, method, inv.arity}, inv.line});
        }
    }
    return uses;
}

bool file_depends_on(const SourceFacts& facts, const PackageIndex& index, bool imports_count_as_use) {
    if (imports_count_as_use) {
        for (const auto& imp : facts.imports) {
            if (imp.is_static) {
                const auto owner = imp.is_wildcard ? imp.name : package_of(imp.name);
                if (index.owning_class(owner)) return true;
            } else if (imp.is_wildcard) {
                if (index.has_package(imp.name) || index.owning_class(imp.name)) return true;
            } else if (index.owning_class(imp.name)) {
                return true;
            }
        }
    }
    return !resolve_usages(facts, index).empty();
}

bool file_depends_on(std::string_view source, const PackageIndex& index, bool imports_count_as_use) {
    return file_depends_on(extract_facts(source), index, imports_count_as_use);
}

} // namespace depmig
