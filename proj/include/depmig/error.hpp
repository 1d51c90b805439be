#pragma once

#include <stdexcept>
#include <string>

namespace depmig {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cloning or reading a repository failed.
class IngestError : public Error {
public:
    IngestError(std::string origin, const std::string& what)
        : Error("ingest failed for " + origin + ": " + what), origin_(std::move(origin)) {}
    const std::string& origin() const noexcept { return origin_; }

private:
    std::string origin_;
};

/// The repository exists but has no commits.
class NoHistoryError : public IngestError {
public:
    explicit NoHistoryError(std::string origin) : IngestError(std::move(origin), "no history") {}
};

/// A commit or entity was requested that is not part of the ingested data.
class LookupError : public Error {
public:
    using Error::Error;
};

class ManifestParseError : public Error {
public:
    ManifestParseError(const std::string& what, int line, int column)
        : Error("manifest parse error at " + std::to_string(line) + ":" + std::to_string(column) +
                ": " + what),
          line_(line), column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class SegmentError : public Error {
public:
    using Error::Error;
};

class DocError : public Error {
public:
    using Error::Error;
};

class StoreError : public Error {
public:
    using Error::Error;
};

/// Invalid user input (flags, selectors, configuration).
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace depmig
