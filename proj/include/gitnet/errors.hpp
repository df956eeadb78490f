#pragma once

#include <stdexcept>
#include <string>

namespace gitnet {

// Base classes map to the CLI exit-code contract:
// RepositoryError -> 2, StoreError -> 3, UsageError -> 1.
class RepositoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotARepository : public RepositoryError {
public:
    explicit NotARepository(const std::string& path)
        : RepositoryError("not a git repository: " + path) {}
};

class EmptyRepository : public RepositoryError {
public:
    explicit EmptyRepository(const std::string& path)
        : RepositoryError("repository has no commits: " + path) {}
};

class CommitNotFound : public RepositoryError {
public:
    explicit CommitNotFound(const std::string& hash)
        : RepositoryError("commit not found: " + hash) {}
};

class FileNotAtRevision : public RepositoryError {
public:
    FileNotAtRevision(const std::string& path, const std::string& rev)
        : RepositoryError("file " + path + " not present at revision " + rev) {}
};

class BinaryFile : public RepositoryError {
public:
    explicit BinaryFile(const std::string& path)
        : RepositoryError("binary file cannot be blamed: " + path) {}
};

class MalformedDiff : public RepositoryError {
public:
    explicit MalformedDiff(const std::string& what)
        : RepositoryError("malformed unified diff: " + what) {}
};

// Diff/blame coordinate mismatch; aborts the current file, mining continues.
class MissingBlameEntry : public std::runtime_error {
public:
    explicit MissingBlameEntry(int line)
        : std::runtime_error("no blame entry for pre-image line " + std::to_string(line)),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class ModeMismatch : public StoreError {
public:
    ModeMismatch(const std::string& have, const std::string& want)
        : StoreError("store was mined with granularity '" + have +
                     "', requested '" + want + "'") {}
};

class DuplicateCommit : public StoreError {
public:
    explicit DuplicateCommit(const std::string& hash)
        : StoreError("commit already written: " + hash) {}
};

class IoFailure : public StoreError {
public:
    using StoreError::StoreError;
};

class InvalidWindow : public UsageError {
public:
    InvalidWindow() : UsageError("window end must be after window start") {}
};

class PathNotFound : public UsageError {
public:
    explicit PathNotFound(const std::string& path)
        : UsageError("path has no co-edit rows in the store: " + path) {}
};

} // namespace gitnet
