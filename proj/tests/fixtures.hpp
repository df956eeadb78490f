#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gitnet::testing {

/// Self-deleting temporary directory.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string sub(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

struct Author {
    std::string name;
    std::string email;
};

inline const Author kAlice{"Alice", "alice@example.com"};
inline const Author kBob{"Bob", "bob@example.com"};
inline const Author kCarol{"Carol", "carol@example.com"};

/// Runs git in `dir`, throws on nonzero exit. Returns stdout.
std::string git(const std::string& dir, const std::vector<std::string>& args,
                const std::vector<std::string>& env = {});

/// `git init` with a deterministic default branch.
void init_repo(const std::string& dir);

void write_file(const std::string& dir, const std::string& rel, const std::string& content);
void remove_file(const std::string& dir, const std::string& rel);
void move_file(const std::string& dir, const std::string& from, const std::string& to);

/// Stages everything and commits with fixed author/committer dates.
/// Returns the commit hash.
std::string commit_all(const std::string& dir, const Author& author, std::int64_t date,
                       const std::string& message);

/// Merges `branch` into the current branch (always a merge commit).
std::string merge_branch(const std::string& dir, const std::string& branch,
                         const Author& author, std::int64_t date);

/// The standard 3-commit fixture: Alice creates a 3-line file, Bob rewrites
/// line 1, Carol deletes line 2. Returns the three hashes in order.
std::vector<std::string> make_three_commit_repo(const std::string& dir);

/// The 6-commit, 3-author fixture used by the end-to-end criteria.
/// Commit plan (file a.txt unless noted):
///   c0 Alice t0      : a.txt = "alpha\nbravo\ncharlie\n"
///   c1 Bob   t0+1d   : rewrites line 1 -> "ALPHA"
///   c2 Carol t0+2d   : deletes line 2 ("bravo")
///   c3 Alice t0+3d   : appends "delta" (pure addition), adds b.txt (2 lines)
///   c4 Bob   t0+4d   : replaces lines 1-2 of b.txt with three new lines
///   c5 Carol t0+33d  : edits a.txt line 2 ("charlie" -> "charlie!")
std::vector<std::string> make_six_commit_repo(const std::string& dir);

constexpr std::int64_t kT0 = 1577836800; // 2020-01-01 00:00:00 UTC
constexpr std::int64_t kDay = 86400;

} // namespace gitnet::testing
