#include "gitnet/orchestrator.hpp"

#include "gitnet/coedit.hpp"
#include "gitnet/diff.hpp"
#include "gitnet/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <iostream>
#include <memory>
#include <mutex>
#include <thread>

#include <fnmatch.h>

namespace gitnet {

bool path_excluded(const std::string& path, const std::vector<std::string>& patterns)
{
    for (const auto& pat : patterns) {
        if (pat.empty())
            continue;
        if (path == pat)
            return true;
        if (fnmatch(pat.c_str(), path.c_str(), 0) == 0)
            return true;
        // directory prefix, with or without trailing slash
        std::string prefix = pat;
        if (prefix.back() != '/')
            prefix += '/';
        if (path.size() > prefix.size() && path.compare(0, prefix.size(), prefix) == 0)
            return true;
    }
    return false;
}

std::vector<CommitRecord> plan_work(const std::vector<CommitRecord>& all_commits,
                                    const std::set<std::string>& processed)
{
    std::vector<CommitRecord> work;
    for (const auto& c : all_commits)
        if (!processed.count(c.hash))
            work.push_back(c);
    return work;
}

unsigned resolve_worker_count(unsigned requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("GIT2NET_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0)
            return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace {

bool row_above_entropy_threshold(const CoEditRecord& r, double threshold)
{
    double max_entropy = 0;
    for (const auto& e :
         {r.pre_line_text_entropy, r.post_line_text_entropy, r.pre_block_text_entropy,
          r.post_block_text_entropy})
        if (e)
            max_entropy = std::max(max_entropy, *e);
    return max_entropy > threshold;
}

} // namespace

std::vector<CoEditRecord> analyze_commit(GitRepository& repo, CommitRecord& commit,
                                         const MiningOptions& options)
{
    std::vector<CoEditRecord> records;
    auto mods = repo.extract_modifications(commit);
    commit.modifications = static_cast<int>(mods.size());

    if (commit.merge && !options.include_merges)
        return records;
    if (options.max_modifications_per_commit &&
        static_cast<int>(mods.size()) > *options.max_modifications_per_commit)
        return records;

    const std::string parent = commit.parents.empty() ? "" : commit.parents.front();
    for (const auto& mod : mods) {
        const std::string& analysis_path =
            mod.new_path ? *mod.new_path : mod.old_path.value_or("");
        if (path_excluded(analysis_path, options.exclude_patterns) ||
            (mod.old_path && path_excluded(*mod.old_path, options.exclude_patterns)))
            continue;
        if (mod.binary)
            continue;
        try {
            const auto parsed = parse_diff(mod.diff_text);
            const auto groups = group_edits(parsed.deleted, parsed.added);
            std::vector<EditEvent> events;
            for (const auto& g : groups) {
                auto matched = options.granularity == Granularity::Line
                                   ? match_line_based(g)
                                   : match_block_based(g);
                events.insert(events.end(), matched.begin(), matched.end());
            }
            if (events.empty())
                continue;

            LineAttribution blame;
            const bool touches_pre = !parsed.deleted.empty();
            if (touches_pre && !parent.empty() && mod.old_path)
                blame = repo.blame_pre_image(*mod.old_path, parent);

            auto rows = attribute_events(events, blame, commit, mod);
            if (options.entropy_filter_threshold) {
                std::erase_if(rows, [&](const CoEditRecord& r) {
                    return row_above_entropy_threshold(r, *options.entropy_filter_threshold);
                });
            }
            records.insert(records.end(), rows.begin(), rows.end());
        } catch (const std::exception& e) {
            std::cerr << "gitnet: skipping file " << analysis_path << " in "
                      << commit.hash.substr(0, 10) << ": " << e.what() << "\n";
        }
    }
    return records;
}

namespace {

struct Bundle {
    CommitRecord commit;
    std::vector<CoEditRecord> records;
    bool failed = false;
    std::string error;
};

// Fan-in channel, bounded to cap memory between workers and the writer.
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

    void push(Bundle bundle)
    {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return queue_.size() < capacity_; });
        queue_.push_back(std::move(bundle));
        not_empty_.notify_one();
    }

    Bundle pop()
    {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return !queue_.empty(); });
        Bundle bundle = std::move(queue_.front());
        queue_.pop_front();
        not_full_.notify_one();
        return bundle;
    }

private:
    std::size_t capacity_;
    std::mutex mutex_;
    std::condition_variable not_full_, not_empty_;
    std::deque<Bundle> queue_;
};

} // namespace

MiningStats mine(const std::string& repo_path, Store& store, const MiningOptions& options)
{
    const auto t0 = std::chrono::steady_clock::now();
    if (store.mode() != options.granularity)
        throw ModeMismatch(to_string(store.mode()), to_string(options.granularity));

    GitRepository repo(repo_path);
    const auto all = repo.list_commits(CommitOrder::Chronological, options.collect_branches);
    const auto processed = store.processed_commits();
    auto work = plan_work(all, processed);

    MiningStats stats;
    stats.commits_skipped = all.size() - work.size();
    if (options.stop_after && work.size() > *options.stop_after)
        work.resize(*options.stop_after);

    if (store.get_meta("repository").value_or(repo.project_name()) != repo.project_name())
        throw IoFailure("store was mined from a different repository");
    store.set_meta("repository", repo.project_name());

    const unsigned workers =
        std::max<unsigned>(1, std::min<std::size_t>(resolve_worker_count(options.worker_count),
                                                    std::max<std::size_t>(work.size(), 1)));
    BoundedQueue queue(2 * workers);
    std::atomic<std::size_t> next_unit{0};

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            std::unique_ptr<GitRepository> worker_repo;
            std::string open_error;
            try {
                worker_repo = std::make_unique<GitRepository>(repo_path);
            } catch (const std::exception& e) {
                open_error = e.what();
            }
            for (;;) {
                const std::size_t i = next_unit.fetch_add(1);
                if (i >= work.size())
                    return;
                Bundle bundle;
                bundle.commit = work[i];
                if (!worker_repo) {
                    bundle.failed = true;
                    bundle.error = open_error;
                } else {
                    try {
                        bundle.records = analyze_commit(*worker_repo, bundle.commit, options);
                    } catch (const std::exception& e) {
                        bundle.failed = true;
                        bundle.error = e.what();
                    }
                }
                queue.push(std::move(bundle));
            }
        });
    }

    std::vector<Bundle> failed;
    for (std::size_t done = 0; done < work.size(); ++done) {
        Bundle bundle = queue.pop();
        if (bundle.failed) {
            failed.push_back(std::move(bundle));
            continue;
        }
        store.write_commit(bundle.commit, bundle.records);
        ++stats.commits_processed;
        stats.coedits_written += bundle.records.size();
        if (stats.commits_processed % 100 == 0)
            std::cerr << "gitnet: " << stats.commits_processed << "/" << work.size()
                      << " commits\n";
    }
    for (auto& t : pool)
        t.join();

    // failed commits get one single-threaded retry, then the failures table
    for (auto& bundle : failed) {
        try {
            bundle.commit.modifications = 0;
            bundle.records = analyze_commit(repo, bundle.commit, options);
            store.write_commit(bundle.commit, bundle.records);
            ++stats.commits_processed;
            stats.coedits_written += bundle.records.size();
        } catch (const std::exception& e) {
            std::cerr << "gitnet: commit " << bundle.commit.hash << " failed twice: "
                      << e.what() << "\n";
            store.record_failure(bundle.commit.hash, e.what());
            ++stats.commits_failed;
        }
    }

    stats.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return stats;
}

} // namespace gitnet
