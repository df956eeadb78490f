#pragma once

#include "gitnet/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

struct sqlite3;
struct sqlite3_stmt;

namespace gitnet {

struct CoEditFilters {
    std::optional<std::int64_t> from_time; // inclusive, post-commit author_date
    std::optional<std::int64_t> to_time;   // exclusive
    std::optional<std::string> author;     // post-commit author email
    std::optional<std::string> path_prefix;
    std::optional<EditKind> kind;
};

/// A coedits row joined with both commit rows.
struct JoinedCoEdit {
    std::int64_t id = 0;
    CoEditRecord record;
    std::int64_t post_author_date = 0;
    std::string post_author_email;
    std::string post_author_name;
    std::optional<std::int64_t> pre_author_date;
    std::optional<std::string> pre_author_email;
    std::optional<std::string> pre_author_name;
};

/// Single-file relational store for mined commits and co-edit rows.
/// One writer at a time (advisory lock); readers open their own handles.
class Store {
public:
    static Store open(const std::string& path, Granularity mode, bool writable = true);
    static Store open_reader(const std::string& path);

    ~Store();
    Store(Store&&) noexcept;
    Store& operator=(Store&&) noexcept;

    Granularity mode() const { return mode_; }
    const std::string& path() const { return path_; }

    void set_meta(const std::string& key, const std::string& value);
    std::optional<std::string> get_meta(const std::string& key) const;

    /// Atomically writes one commit row plus all its co-edit rows.
    void write_commit(const CommitRecord& commit, const std::vector<CoEditRecord>& records);

    std::set<std::string> processed_commits() const;

    void record_failure(const std::string& hash, const std::string& error);

    std::vector<JoinedCoEdit> query_coedits(const CoEditFilters& filters = {}) const;

    std::int64_t count_coedits() const;

    /// True if every coedits.post_commit references a commits row.
    bool check_referential_integrity() const;

    /// Order-insensitive digest of the commits and coedits tables
    /// (coedits.id excluded, so it is independent of write order).
    std::uint64_t table_digest() const;

private:
    Store() = default;
    void exec(const std::string& sql);

    sqlite3* db_ = nullptr;
    int lock_fd_ = -1;
    std::string path_;
    Granularity mode_ = Granularity::Line;
};

} // namespace gitnet
