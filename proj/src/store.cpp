#include "gitnet/store.hpp"

#include "gitnet/errors.hpp"

#include <sqlite3.h>

#include <cstring>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace gitnet {

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS commits (
    hash TEXT PRIMARY KEY,
    author_date INTEGER NOT NULL,
    author_timezone INTEGER NOT NULL,
    author_email TEXT NOT NULL,
    author_name TEXT NOT NULL,
    branches TEXT NOT NULL DEFAULT '',
    committer_date INTEGER NOT NULL,
    committer_timezone INTEGER NOT NULL,
    committer_email TEXT NOT NULL,
    committer_name TEXT NOT NULL,
    in_main_branch INTEGER NOT NULL,
    merge INTEGER NOT NULL,
    modifications INTEGER NOT NULL,
    commit_message_len INTEGER NOT NULL,
    parents TEXT NOT NULL DEFAULT '',
    project_name TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS coedits (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    mod_filename TEXT NOT NULL,
    mod_new_path TEXT,
    mod_old_path TEXT,
    pre_commit TEXT,
    post_commit TEXT NOT NULL,
    kind TEXT NOT NULL,
    granularity TEXT NOT NULL,
    pre_line_num INTEGER,
    pre_line_len_in_chars INTEGER,
    pre_line_text_entropy REAL,
    post_line_num INTEGER,
    post_line_len_in_chars INTEGER,
    post_line_text_entropy REAL,
    pre_block_starting_line_num INTEGER,
    pre_block_len_in_lines INTEGER,
    pre_block_len_in_chars INTEGER,
    pre_block_text_entropy REAL,
    post_block_starting_line_num INTEGER,
    post_block_len_in_lines INTEGER,
    post_block_len_in_chars INTEGER,
    post_block_text_entropy REAL,
    attributed_line_count INTEGER NOT NULL DEFAULT 1,
    mod_added INTEGER NOT NULL,
    mod_removed INTEGER NOT NULL,
    levenshtein_dist INTEGER,
    mod_cyclomatic_complexity INTEGER,
    mod_loc INTEGER,
    mod_token_count INTEGER
);
CREATE INDEX IF NOT EXISTS idx_coedits_post ON coedits(post_commit);
CREATE TABLE IF NOT EXISTS meta (
    key TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS failures (
    hash TEXT NOT NULL,
    error TEXT NOT NULL,
    at INTEGER NOT NULL
);
)sql";

class Stmt {
public:
    Stmt(sqlite3* db, const char* sql)
    {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
            throw IoFailure(std::string("sqlite prepare failed: ") + sqlite3_errmsg(db));
    }
    ~Stmt() { sqlite3_finalize(stmt_); }
    Stmt(const Stmt&) = delete;

    sqlite3_stmt* get() { return stmt_; }

    void bind(int i, const std::string& v)
    {
        sqlite3_bind_text(stmt_, i, v.c_str(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    }
    void bind(int i, std::int64_t v) { sqlite3_bind_int64(stmt_, i, v); }
    void bind(int i, int v) { sqlite3_bind_int(stmt_, i, v); }
    void bind(int i, double v) { sqlite3_bind_double(stmt_, i, v); }
    void bind_null(int i) { sqlite3_bind_null(stmt_, i); }
    template <typename T> void bind_opt(int i, const std::optional<T>& v)
    {
        if (v)
            bind(i, *v);
        else
            bind_null(i);
    }

    bool row()
    {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW)
            return true;
        if (rc == SQLITE_DONE)
            return false;
        throw IoFailure(std::string("sqlite step failed: ") +
                        sqlite3_errmsg(sqlite3_db_handle(stmt_)));
    }
    void exec()
    {
        if (row())
            throw IoFailure("statement unexpectedly returned rows");
    }

    bool is_null(int col) { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
    std::string text(int col)
    {
        const auto* p = sqlite3_column_text(stmt_, col);
        return p ? reinterpret_cast<const char*>(p) : "";
    }
    std::int64_t i64(int col) { return sqlite3_column_int64(stmt_, col); }
    double real(int col) { return sqlite3_column_double(stmt_, col); }
    std::optional<int> opt_int(int col)
    {
        return is_null(col) ? std::nullopt : std::optional<int>(static_cast<int>(i64(col)));
    }
    std::optional<std::int64_t> opt_i64(int col)
    {
        return is_null(col) ? std::nullopt : std::optional<std::int64_t>(i64(col));
    }
    std::optional<double> opt_real(int col)
    {
        return is_null(col) ? std::nullopt : std::optional<double>(real(col));
    }
    std::optional<std::string> opt_text(int col)
    {
        return is_null(col) ? std::nullopt : std::optional<std::string>(text(col));
    }

private:
    sqlite3_stmt* stmt_ = nullptr;
};

std::string join_list(const std::vector<std::string>& items)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += ',';
        out += items[i];
    }
    return out;
}

std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 1469598103934665603ULL)
{
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

Store Store::open(const std::string& path, Granularity mode, bool writable)
{
    Store store;
    store.path_ = path;
    const int flags = writable ? (SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE)
                               : SQLITE_OPEN_READONLY;
    if (sqlite3_open_v2(path.c_str(), &store.db_, flags, nullptr) != SQLITE_OK)
        throw IoFailure("cannot open store at " + path);
    sqlite3_busy_timeout(store.db_, 30000);

    if (writable) {
        // one writer per store file
        store.lock_fd_ = ::open((path + ".lock").c_str(), O_CREAT | O_RDWR, 0644);
        if (store.lock_fd_ < 0 || flock(store.lock_fd_, LOCK_EX | LOCK_NB) != 0)
            throw IoFailure("store is locked by another writer: " + path);
        store.exec(kSchema);
    }

    const auto existing = store.get_meta("mode");
    if (existing) {
        if (*existing != to_string(mode))
            throw ModeMismatch(*existing, to_string(mode));
    } else if (writable) {
        store.set_meta("mode", to_string(mode));
        store.set_meta("tool_version", kToolVersion);
        store.set_meta("schema_version", "1");
    }
    store.mode_ = mode;
    return store;
}

Store Store::open_reader(const std::string& path)
{
    Store store;
    store.path_ = path;
    if (sqlite3_open_v2(path.c_str(), &store.db_, SQLITE_OPEN_READONLY, nullptr) != SQLITE_OK)
        throw IoFailure("cannot open store at " + path);
    sqlite3_busy_timeout(store.db_, 30000);
    const auto mode = store.get_meta("mode");
    if (!mode)
        throw IoFailure("not a mined store (missing meta.mode): " + path);
    store.mode_ = granularity_from_string(*mode);
    return store;
}

Store::~Store()
{
    if (db_)
        sqlite3_close(db_);
    if (lock_fd_ >= 0)
        close(lock_fd_);
}

Store::Store(Store&& other) noexcept
    : db_(other.db_), lock_fd_(other.lock_fd_), path_(std::move(other.path_)),
      mode_(other.mode_)
{
    other.db_ = nullptr;
    other.lock_fd_ = -1;
}

Store& Store::operator=(Store&& other) noexcept
{
    if (this != &other) {
        if (db_)
            sqlite3_close(db_);
        if (lock_fd_ >= 0)
            close(lock_fd_);
        db_ = other.db_;
        lock_fd_ = other.lock_fd_;
        path_ = std::move(other.path_);
        mode_ = other.mode_;
        other.db_ = nullptr;
        other.lock_fd_ = -1;
    }
    return *this;
}

void Store::exec(const std::string& sql)
{
    char* err = nullptr;
    if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown sqlite error";
        sqlite3_free(err);
        throw IoFailure("sqlite exec failed: " + msg);
    }
}

void Store::set_meta(const std::string& key, const std::string& value)
{
    Stmt stmt(db_, "INSERT OR REPLACE INTO meta(key, value) VALUES(?, ?)");
    stmt.bind(1, key);
    stmt.bind(2, value);
    stmt.exec();
}

std::optional<std::string> Store::get_meta(const std::string& key) const
{
    sqlite3_stmt* probe = nullptr;
    // meta may not exist yet in a fresh read-only open
    if (sqlite3_prepare_v2(db_, "SELECT value FROM meta WHERE key = ?", -1, &probe,
                           nullptr) != SQLITE_OK)
        return std::nullopt;
    sqlite3_finalize(probe);
    Stmt stmt(db_, "SELECT value FROM meta WHERE key = ?");
    stmt.bind(1, key);
    if (stmt.row())
        return stmt.text(0);
    return std::nullopt;
}

void Store::write_commit(const CommitRecord& commit, const std::vector<CoEditRecord>& records)
{
    exec("BEGIN IMMEDIATE");
    try {
        {
            Stmt check(db_, "SELECT 1 FROM commits WHERE hash = ?");
            check.bind(1, commit.hash);
            if (check.row())
                throw DuplicateCommit(commit.hash);
        }
        {
            Stmt ins(db_, R"sql(
                INSERT INTO commits (hash, author_date, author_timezone, author_email,
                    author_name, branches, committer_date, committer_timezone,
                    committer_email, committer_name, in_main_branch, merge,
                    modifications, commit_message_len, parents, project_name)
                VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?))sql");
            ins.bind(1, commit.hash);
            ins.bind(2, commit.author_date);
            ins.bind(3, commit.author_timezone);
            ins.bind(4, commit.author_email);
            ins.bind(5, commit.author_name);
            ins.bind(6, join_list(commit.branches));
            ins.bind(7, commit.committer_date);
            ins.bind(8, commit.committer_timezone);
            ins.bind(9, commit.committer_email);
            ins.bind(10, commit.committer_name);
            ins.bind(11, commit.in_main_branch ? 1 : 0);
            ins.bind(12, commit.merge ? 1 : 0);
            ins.bind(13, commit.modifications);
            ins.bind(14, commit.commit_message_len);
            ins.bind(15, join_list(commit.parents));
            ins.bind(16, commit.project_name);
            ins.exec();
        }
        Stmt ins(db_, R"sql(
            INSERT INTO coedits (mod_filename, mod_new_path, mod_old_path, pre_commit,
                post_commit, kind, granularity,
                pre_line_num, pre_line_len_in_chars, pre_line_text_entropy,
                post_line_num, post_line_len_in_chars, post_line_text_entropy,
                pre_block_starting_line_num, pre_block_len_in_lines,
                pre_block_len_in_chars, pre_block_text_entropy,
                post_block_starting_line_num, post_block_len_in_lines,
                post_block_len_in_chars, post_block_text_entropy,
                attributed_line_count, mod_added, mod_removed, levenshtein_dist,
                mod_cyclomatic_complexity, mod_loc, mod_token_count)
            VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?))sql");
        for (const auto& r : records) {
            sqlite3_reset(ins.get());
            ins.bind(1, r.mod_filename);
            ins.bind_opt(2, r.mod_new_path);
            ins.bind_opt(3, r.mod_old_path);
            ins.bind_opt(4, r.pre_commit);
            ins.bind(5, r.post_commit);
            ins.bind(6, std::string(to_string(r.kind)));
            ins.bind(7, std::string(to_string(r.granularity)));
            ins.bind_opt(8, r.pre_line_num);
            ins.bind_opt(9, r.pre_line_len_in_chars);
            ins.bind_opt(10, r.pre_line_text_entropy);
            ins.bind_opt(11, r.post_line_num);
            ins.bind_opt(12, r.post_line_len_in_chars);
            ins.bind_opt(13, r.post_line_text_entropy);
            ins.bind_opt(14, r.pre_block_starting_line_num);
            ins.bind_opt(15, r.pre_block_len_in_lines);
            ins.bind_opt(16, r.pre_block_len_in_chars);
            ins.bind_opt(17, r.pre_block_text_entropy);
            ins.bind_opt(18, r.post_block_starting_line_num);
            ins.bind_opt(19, r.post_block_len_in_lines);
            ins.bind_opt(20, r.post_block_len_in_chars);
            ins.bind_opt(21, r.post_block_text_entropy);
            ins.bind(22, r.attributed_line_count);
            ins.bind(23, r.mod_added);
            ins.bind(24, r.mod_removed);
            ins.bind_opt(25, r.levenshtein_dist);
            ins.bind_opt(26, r.mod_cyclomatic_complexity);
            ins.bind_opt(27, r.mod_loc);
            ins.bind_opt(28, r.mod_token_count);
            ins.exec();
        }
        exec("COMMIT");
    } catch (...) {
        exec("ROLLBACK");
        throw;
    }
}

std::set<std::string> Store::processed_commits() const
{
    std::set<std::string> out;
    Stmt stmt(db_, "SELECT hash FROM commits");
    while (stmt.row())
        out.insert(stmt.text(0));
    return out;
}

void Store::record_failure(const std::string& hash, const std::string& error)
{
    Stmt stmt(db_, "INSERT INTO failures(hash, error, at) VALUES(?, ?, strftime('%s','now'))");
    stmt.bind(1, hash);
    stmt.bind(2, error);
    stmt.exec();
}

std::vector<JoinedCoEdit> Store::query_coedits(const CoEditFilters& filters) const
{
    std::ostringstream sql;
    sql << R"sql(
        SELECT co.id, co.mod_filename, co.mod_new_path, co.mod_old_path, co.pre_commit,
               co.post_commit, co.kind, co.granularity,
               co.pre_line_num, co.pre_line_len_in_chars, co.pre_line_text_entropy,
               co.post_line_num, co.post_line_len_in_chars, co.post_line_text_entropy,
               co.pre_block_starting_line_num, co.pre_block_len_in_lines,
               co.pre_block_len_in_chars, co.pre_block_text_entropy,
               co.post_block_starting_line_num, co.post_block_len_in_lines,
               co.post_block_len_in_chars, co.post_block_text_entropy,
               co.attributed_line_count, co.mod_added, co.mod_removed,
               co.levenshtein_dist, co.mod_cyclomatic_complexity, co.mod_loc,
               co.mod_token_count,
               post.author_date, post.author_email, post.author_name,
               pre.author_date, pre.author_email, pre.author_name
        FROM coedits co
        JOIN commits post ON post.hash = co.post_commit
        LEFT JOIN commits pre ON pre.hash = co.pre_commit
        WHERE 1=1)sql";
    if (filters.from_time)
        sql << " AND post.author_date >= ?";
    if (filters.to_time)
        sql << " AND post.author_date < ?";
    if (filters.author)
        sql << " AND lower(post.author_email) = lower(?)";
    if (filters.path_prefix)
        sql << " AND (co.mod_new_path LIKE ? || '%' OR co.mod_old_path LIKE ? || '%')";
    if (filters.kind)
        sql << " AND co.kind = ?";
    sql << " ORDER BY post.author_date, co.id";

    Stmt stmt(db_, sql.str().c_str());
    int i = 1;
    if (filters.from_time)
        stmt.bind(i++, *filters.from_time);
    if (filters.to_time)
        stmt.bind(i++, *filters.to_time);
    if (filters.author)
        stmt.bind(i++, *filters.author);
    if (filters.path_prefix) {
        stmt.bind(i++, *filters.path_prefix);
        stmt.bind(i++, *filters.path_prefix);
    }
    if (filters.kind)
        stmt.bind(i++, std::string(to_string(*filters.kind)));

    std::vector<JoinedCoEdit> out;
    while (stmt.row()) {
        JoinedCoEdit j;
        j.id = stmt.i64(0);
        CoEditRecord& r = j.record;
        r.mod_filename = stmt.text(1);
        r.mod_new_path = stmt.opt_text(2);
        r.mod_old_path = stmt.opt_text(3);
        r.pre_commit = stmt.opt_text(4);
        r.post_commit = stmt.text(5);
        r.kind = edit_kind_from_string(stmt.text(6));
        r.granularity = granularity_from_string(stmt.text(7));
        r.pre_line_num = stmt.opt_int(8);
        r.pre_line_len_in_chars = stmt.opt_int(9);
        r.pre_line_text_entropy = stmt.opt_real(10);
        r.post_line_num = stmt.opt_int(11);
        r.post_line_len_in_chars = stmt.opt_int(12);
        r.post_line_text_entropy = stmt.opt_real(13);
        r.pre_block_starting_line_num = stmt.opt_int(14);
        r.pre_block_len_in_lines = stmt.opt_int(15);
        r.pre_block_len_in_chars = stmt.opt_int(16);
        r.pre_block_text_entropy = stmt.opt_real(17);
        r.post_block_starting_line_num = stmt.opt_int(18);
        r.post_block_len_in_lines = stmt.opt_int(19);
        r.post_block_len_in_chars = stmt.opt_int(20);
        r.post_block_text_entropy = stmt.opt_real(21);
        r.attributed_line_count = static_cast<int>(stmt.i64(22));
        r.mod_added = static_cast<int>(stmt.i64(23));
        r.mod_removed = static_cast<int>(stmt.i64(24));
        r.levenshtein_dist = stmt.opt_i64(25);
        r.mod_cyclomatic_complexity = stmt.opt_int(26);
        r.mod_loc = stmt.opt_int(27);
        r.mod_token_count = stmt.opt_int(28);
        j.post_author_date = stmt.i64(29);
        j.post_author_email = stmt.text(30);
        j.post_author_name = stmt.text(31);
        j.pre_author_date = stmt.opt_i64(32);
        j.pre_author_email = stmt.opt_text(33);
        j.pre_author_name = stmt.opt_text(34);
        out.push_back(std::move(j));
    }
    return out;
}

std::int64_t Store::count_coedits() const
{
    Stmt stmt(db_, "SELECT COUNT(*) FROM coedits");
    stmt.row();
    return stmt.i64(0);
}

bool Store::check_referential_integrity() const
{
    Stmt stmt(db_, R"sql(
        SELECT COUNT(*) FROM coedits co
        LEFT JOIN commits c ON c.hash = co.post_commit
        WHERE c.hash IS NULL)sql");
    stmt.row();
    return stmt.i64(0) == 0;
}

std::uint64_t Store::table_digest() const
{
    // Sum of per-row FNV hashes: independent of row order and id assignment.
    std::uint64_t digest = 0;
    const auto hash_rows = [&](const char* sql) {
        // serialize every column with NULL distinguished from empty/zero
        sqlite3_stmt* stmt = nullptr;
        if (sqlite3_prepare_v2(db_, sql, -1, &stmt, nullptr) != SQLITE_OK)
            throw IoFailure(std::string("sqlite prepare failed: ") + sqlite3_errmsg(db_));
        while (sqlite3_step(stmt) == SQLITE_ROW) {
            std::string row;
            const int cols = sqlite3_column_count(stmt);
            for (int c = 0; c < cols; ++c) {
                if (sqlite3_column_type(stmt, c) == SQLITE_NULL) {
                    row += "\x01NULL";
                } else {
                    const auto* p = sqlite3_column_text(stmt, c);
                    row += "\x01";
                    row += p ? reinterpret_cast<const char*>(p) : "";
                }
            }
            digest += fnv1a(row);
        }
        sqlite3_finalize(stmt);
    };
    hash_rows("SELECT * FROM commits");
    hash_rows(R"sql(SELECT mod_filename, mod_new_path, mod_old_path, pre_commit,
        post_commit, kind, granularity, pre_line_num, pre_line_len_in_chars,
        round(pre_line_text_entropy, 9), post_line_num, post_line_len_in_chars,
        round(post_line_text_entropy, 9), pre_block_starting_line_num,
        pre_block_len_in_lines, pre_block_len_in_chars, round(pre_block_text_entropy, 9),
        post_block_starting_line_num, post_block_len_in_lines, post_block_len_in_chars,
        round(post_block_text_entropy, 9), attributed_line_count, mod_added,
        mod_removed, levenshtein_dist, mod_cyclomatic_complexity, mod_loc,
        mod_token_count FROM coedits)sql");
    return digest;
}

} // namespace gitnet
