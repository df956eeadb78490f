#include "gitnet/errors.hpp"
#include "gitnet/network.hpp"
#include "gitnet/orchestrator.hpp"
#include "gitnet/process.hpp"
#include "gitnet/store.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace gitnet;

namespace {

std::vector<std::string> read_exclude_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read exclude file: " + path);
    std::vector<std::string> patterns;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        const auto last = line.find_last_not_of(" \t\r");
        patterns.push_back(line.substr(first, last - first + 1));
    }
    return patterns;
}

std::int64_t parse_date(const std::string& s)
{
    std::tm tm{};
    if (s.size() != 10 || sscanf(s.c_str(), "%4d-%2d-%2d", &tm.tm_year, &tm.tm_mon,
                                 &tm.tm_mday) != 3)
        throw UsageError("dates must be YYYY-MM-DD: " + s);
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return static_cast<std::int64_t>(timegm(&tm));
}

// Remote URLs are cloned into a cache directory keyed by a URL hash.
std::string resolve_repo(const std::string& repo, bool fresh_clone)
{
    std::error_code ec;
    if (fs::is_directory(repo, ec))
        return repo;
    const bool looks_like_url = repo.find("://") != std::string::npos ||
                                repo.find('@') != std::string::npos;
    if (!looks_like_url)
        throw NotARepository(repo);

    const char* home = std::getenv("HOME");
    fs::path cache = fs::path(home ? home : "/tmp") / ".cache" / "gitnet";
    fs::create_directories(cache, ec);
    const auto key = std::to_string(std::hash<std::string>{}(repo));
    const fs::path target = cache / key;
    if (fresh_clone)
        fs::remove_all(target, ec);
    if (!fs::exists(target)) {
        const auto result = run_process({"git", "clone", repo, target.string()});
        if (result.exit_code != 0) {
            fs::remove_all(target, ec);
            throw RepositoryError("clone failed: " + result.err);
        }
    }
    return target.string();
}

std::optional<TimeWindow> window_from_flags(const std::string& from, const std::string& to)
{
    if (from.empty() && to.empty())
        return std::nullopt;
    TimeWindow w;
    w.start = from.empty() ? std::numeric_limits<std::int64_t>::min() : parse_date(from);
    w.end = to.empty() ? std::numeric_limits<std::int64_t>::max() : parse_date(to);
    return w;
}

int run(int argc, char** argv)
{
    CLI::App app{"gitnet - mine time-stamped co-editing networks from git repositories"};
    app.require_subcommand(1);

    // mine
    std::string mine_repo, mine_db, exclude_file;
    bool use_blocks = false, no_parallel = false, branches = false, fresh_clone = false;
    bool include_merges = true;
    unsigned numprocesses = 0;
    std::optional<double> entropy_threshold;
    std::optional<int> max_modifications;
    auto* mine_cmd = app.add_subcommand("mine", "Mine a repository into a co-editing store");
    mine_cmd->add_option("repo", mine_repo, "Local repository path or clone URL")->required();
    mine_cmd->add_option("db", mine_db, "Output store file")->required();
    mine_cmd->add_option("--exclude", exclude_file,
                         "File with path prefixes/globs to exclude, one per line");
    mine_cmd->add_flag("--use-blocks", use_blocks,
                       "Block-based co-edit extraction instead of line-based");
    mine_cmd->add_flag("--no-parallel", no_parallel, "Single worker");
    mine_cmd->add_option("--numprocesses", numprocesses, "Worker count (default: auto)");
    mine_cmd->add_flag("--include-merges,!--no-include-merges", include_merges,
                       "Extract co-edits from merge commits (default: on)");
    mine_cmd->add_flag("--branches", branches, "Record containing branch names per commit");
    mine_cmd->add_option("--entropy-threshold", entropy_threshold,
                         "Drop co-edit rows whose text entropy exceeds this value [0,8]")
        ->check(CLI::Range(0.0, 8.0));
    mine_cmd->add_option("--max-modifications", max_modifications,
                         "Skip co-edit extraction for commits touching more files");
    mine_cmd->add_flag("--fresh-clone", fresh_clone, "Re-clone a cached remote repository");

    // graph
    std::string graph_db, graph_out, graph_from, graph_to, dag_file;
    std::string weighting = "count", format = "csv";
    bool type_coedit = false, type_bipartite = false, type_dag = false;
    bool include_self = false, include_deletions = false, temporal = false;
    auto* graph_cmd = app.add_subcommand("graph", "Export a network projection");
    auto* f_coedit = graph_cmd->add_flag("--coedit", type_coedit, "Co-editing network");
    auto* f_bip = graph_cmd->add_flag("--bipartite", type_bipartite,
                                      "Developer-file bipartite network");
    auto* f_dag = graph_cmd->add_flag("--dag", type_dag, "Per-file commit DAG");
    f_coedit->excludes(f_bip)->excludes(f_dag);
    f_bip->excludes(f_dag);
    graph_cmd->add_option("db", graph_db, "Mined store file")->required();
    graph_cmd->add_option("out", graph_out, "Output file")->required();
    graph_cmd->add_option("--from", graph_from, "Window start, YYYY-MM-DD (UTC midnight)");
    graph_cmd->add_option("--to", graph_to, "Window end, YYYY-MM-DD (UTC midnight)");
    graph_cmd->add_option("--weighting", weighting, "count|levenshtein")
        ->check(CLI::IsMember({"count", "levenshtein"}));
    graph_cmd->add_option("--file", dag_file, "File path for --dag");
    graph_cmd->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    graph_cmd->add_flag("--include-self", include_self, "Keep same-author co-edits");
    graph_cmd->add_flag("--include-deletions", include_deletions,
                        "Count deletions with weight 1 (count weighting only)");
    graph_cmd->add_flag("--temporal", temporal,
                        "Export time-stamped edges instead of the aggregated network");

    // analyze
    std::string an_db, an_out;
    bool m_rolling = false, m_ownership = false, m_delta = false;
    int window_days = 0, step_days = 0;
    auto* an_cmd = app.add_subcommand("analyze", "Rolling-window time series");
    auto* f_roll = an_cmd->add_flag("--rolling", m_rolling,
                                    "Developers/edges/out-degree/centralization");
    auto* f_own = an_cmd->add_flag("--ownership", m_ownership,
                                   "Own vs foreign Levenshtein effort");
    auto* f_delta = an_cmd->add_flag("--delta", m_delta,
                                     "File-based vs line-based link counts");
    f_roll->excludes(f_own)->excludes(f_delta);
    f_own->excludes(f_delta);
    an_cmd->add_option("db", an_db, "Mined store file")->required();
    an_cmd->add_option("out", an_out, "Output CSV file")->required();
    an_cmd->add_option("--window", window_days, "Window length in days")
        ->check(CLI::PositiveNumber);
    an_cmd->add_option("--step", step_days, "Step in days")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (mine_cmd->parsed()) {
        MiningOptions options;
        options.granularity = use_blocks ? Granularity::Block : Granularity::Line;
        if (!exclude_file.empty())
            options.exclude_patterns = read_exclude_file(exclude_file);
        options.worker_count = no_parallel ? 1 : numprocesses;
        options.include_merges = include_merges;
        options.collect_branches = branches;
        options.entropy_filter_threshold = entropy_threshold;
        options.max_modifications_per_commit = max_modifications;

        const auto repo_path = resolve_repo(mine_repo, fresh_clone);
        auto store = Store::open(mine_db, options.granularity);
        const auto stats = mine(repo_path, store, options);
        nlohmann::json j{{"commits_processed", stats.commits_processed},
                         {"commits_skipped", stats.commits_skipped},
                         {"commits_failed", stats.commits_failed},
                         {"coedits_written", stats.coedits_written},
                         {"wall_time_seconds", stats.wall_time_seconds}};
        std::cout << j.dump() << "\n";
        return 0;
    }

    if (graph_cmd->parsed()) {
        if (!type_coedit && !type_bipartite && !type_dag)
            throw UsageError("graph requires one of --coedit, --bipartite, --dag");
        if (type_dag && dag_file.empty())
            throw UsageError("--dag requires --file PATH");
        const auto fmt = format == "json" ? ExportFormat::Json : ExportFormat::Csv;
        const auto window = window_from_flags(graph_from, graph_to);
        auto store = Store::open_reader(graph_db);
        if (type_coedit) {
            CoEditEdgeOptions options;
            options.weighting = weighting == "levenshtein" ? EdgeWeighting::Levenshtein
                                                           : EdgeWeighting::Count;
            options.include_self = include_self;
            options.include_deletions = include_deletions;
            auto edges = coedit_edges(store, options);
            if (temporal) {
                if (window)
                    std::erase_if(edges, [&](const TemporalEdge& e) {
                        return e.timestamp < window->start || e.timestamp >= window->end;
                    });
                export_temporal_edges(edges, fmt, graph_out);
            } else {
                export_aggregated(aggregate(edges, window), fmt, graph_out);
            }
        } else if (type_bipartite) {
            export_bipartite(bipartite_edges(store, window), fmt, graph_out);
        } else {
            export_dag(commit_dag(store, dag_file), fmt, graph_out);
        }
        return 0;
    }

    if (!m_rolling && !m_ownership && !m_delta)
        throw UsageError("analyze requires one of --rolling, --ownership, --delta");
    auto store = Store::open_reader(an_db);
    WindowSeries series;
    if (m_rolling)
        series = rolling_metrics(store, window_days ? window_days : 365,
                                 step_days ? step_days : 30);
    else if (m_ownership)
        series = ownership_series(store, window_days ? window_days : 90,
                                  step_days ? step_days : 30);
    else
        series = delta_series(store, window_days ? window_days : 90,
                              step_days ? step_days : 30);
    export_series(series, an_out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "gitnet: " << e.what() << "\n";
        return 1;
    } catch (const RepositoryError& e) {
        std::cerr << "gitnet: " << e.what() << "\n";
        return 2;
    } catch (const StoreError& e) {
        std::cerr << "gitnet: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "gitnet: " << e.what() << "\n";
        return 3;
    }
}
