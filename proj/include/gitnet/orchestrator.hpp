#pragma once

#include "gitnet/store.hpp"
#include "gitnet/types.hpp"
#include "gitnet/vcs.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gitnet {

struct MiningOptions {
    Granularity granularity = Granularity::Line;
    std::vector<std::string> exclude_patterns; // exact path, glob, or dir prefix
    unsigned worker_count = 0;                 // 0 = auto (GIT2NET_WORKERS, then cores)
    bool include_merges = true;
    std::optional<int> max_modifications_per_commit;
    std::optional<double> entropy_filter_threshold; // drop rows above this entropy
    bool collect_branches = false;
    std::optional<std::size_t> stop_after; // process at most this many new commits
};

struct MiningStats {
    std::uint64_t commits_processed = 0;
    std::uint64_t commits_skipped = 0;
    std::uint64_t commits_failed = 0;
    std::uint64_t coedits_written = 0;
    double wall_time_seconds = 0;
};

/// True if `path` matches any exclude pattern (exact path, fnmatch glob,
/// or directory prefix, in that precedence).
bool path_excluded(const std::string& path, const std::vector<std::string>& patterns);

/// Work units (one commit each) in stable chronological order, skipping
/// already-processed hashes.
std::vector<CommitRecord> plan_work(const std::vector<CommitRecord>& all_commits,
                                    const std::set<std::string>& processed);

/// Extracts the co-edit rows of a single commit. The commit's modification
/// count is written back into `commit`. Per-file analysis errors are logged
/// to stderr and skip that file only.
std::vector<CoEditRecord> analyze_commit(GitRepository& repo, CommitRecord& commit,
                                         const MiningOptions& options);

/// Runs the full mining pipeline: fan-out over commits to `worker_count`
/// analysis workers (each with a private repository handle), fan-in to the
/// single store writer. Resumable: already-processed commits are skipped.
MiningStats mine(const std::string& repo_path, Store& store, const MiningOptions& options);

/// Worker count resolution: explicit > GIT2NET_WORKERS > hardware threads.
unsigned resolve_worker_count(unsigned requested);

} // namespace gitnet
