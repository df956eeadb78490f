#pragma once

#include "gitnet/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gitnet {

class PipeProcess;

enum class CommitOrder { Topological, Chronological };

/// Read-only adapter over a local git repository, backed by the git CLI.
/// Not thread-safe; each worker owns its own instance.
class GitRepository {
public:
    explicit GitRepository(std::string path);
    ~GitRepository();
    GitRepository(GitRepository&&) noexcept;
    GitRepository& operator=(GitRepository&&) noexcept;

    const std::string& path() const { return path_; }
    const std::string& project_name() const { return project_name_; }

    /// All commits reachable from any branch head, each exactly once.
    /// Chronological order sorts by committer_date, hash as tiebreaker.
    /// `collect_branches` additionally resolves the containing branch names
    /// (off by default; expensive on large repositories).
    std::vector<CommitRecord> list_commits(CommitOrder order = CommitOrder::Chronological,
                                           bool collect_branches = false);

    /// File modifications of a commit relative to its first parent (the
    /// empty tree for root commits), with rename detection. Binary files
    /// carry empty diff_text and binary=true.
    std::vector<FileModification> extract_modifications(const CommitRecord& commit);

    /// Plain line-history blame (no copy/move detection) of `path` as it
    /// exists at `revision`.
    LineAttribution blame_pre_image(const std::string& path, const std::string& revision);

    /// Blob content of revision:path; nullopt if the path is absent there.
    std::optional<std::string> read_blob(const std::string& revision, const std::string& path);

private:
    struct ProcessResultRef;
    std::string git_out(const std::vector<std::string>& args) const;

    std::string path_;
    std::string project_name_;
    std::unique_ptr<PipeProcess> catfile_;
};

} // namespace gitnet
