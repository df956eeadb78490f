#pragma once

#include "gitnet/store.hpp"
#include "gitnet/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gitnet {

/// (A, B; t, w): at time t, author A edited w units of code originally
/// written by author B.
struct TemporalEdge {
    std::string source; // editing author (post-commit)
    std::string target; // original author (pre-commit)
    std::int64_t timestamp = 0;
    double weight = 1.0;
};

struct WeightedEdge {
    std::string source;
    std::string target;
    double weight = 0.0;
};

struct AggregatedGraph {
    bool directed = true;
    std::vector<std::string> nodes;
    std::vector<WeightedEdge> edges;
};

struct TimeWindow {
    std::int64_t start = 0; // inclusive
    std::int64_t end = 0;   // exclusive
};

/// Time-indexed metric values from a rolling-window analysis. Metrics are
/// stored per point in `metric_names` order; absent values stay nullopt.
struct WindowSeries {
    int window_days = 0;
    int step_days = 0;
    std::vector<std::string> metric_names;
    struct Point {
        std::int64_t window_start = 0;
        std::int64_t window_end = 0;
        std::map<std::string, std::optional<double>> values;
    };
    std::vector<Point> points;
};

enum class EdgeWeighting { Count, Levenshtein };

struct CoEditEdgeOptions {
    EdgeWeighting weighting = EdgeWeighting::Count;
    bool include_self = false;
    bool include_deletions = false; // weight 1, count weighting only
};

/// Temporal co-editing edges from the store. Block rows spanning several
/// origins carry their block Levenshtein apportioned by attributed line
/// count (largest remainder, exact integer total).
std::vector<TemporalEdge> coedit_edges(const Store& store,
                                       const CoEditEdgeOptions& options = {});

/// Sums edges per (source, target) inside the half-open window, or over the
/// whole history when no window is given.
AggregatedGraph aggregate(const std::vector<TemporalEdge>& edges,
                          std::optional<TimeWindow> window = std::nullopt);

/// Directed developer -> file links; weight = number of distinct commits by
/// the developer touching the file within the window.
AggregatedGraph bipartite_edges(const Store& store,
                                std::optional<TimeWindow> window = std::nullopt);

/// Per-file DAG of commits: edge (pre_commit, post_commit) for every co-edit
/// row on the path. Acyclic by ancestry.
AggregatedGraph commit_dag(const Store& store, const std::string& path);

/// Per-window {developers, unique_edges, mean_out_degree,
/// degree_centralization} over the directed simple co-edit graph
/// (self-edges excluded).
WindowSeries rolling_metrics(const Store& store, int window_days = 365, int step_days = 30);

/// Per-window {own_levenshtein, foreign_levenshtein, own_fraction,
/// coedit_count}; deletions counted but excluded from the sums.
WindowSeries ownership_series(const Store& store, int window_days = 90, int step_days = 30);

/// Per-window {m_f, m_l, delta}: file-based co-authorship link count vs
/// collapsed co-editing link count, delta = m_f / m_l.
WindowSeries delta_series(const Store& store, int window_days = 90, int step_days = 30);

/// Freeman total-degree centralization of the undirected simple graph given
/// by `degrees`; 0 for fewer than 3 nodes. In [0, 1].
double degree_centralization(const std::vector<int>& degrees);

enum class ExportFormat { Csv, Json };

// Exports per docs/formats.md: header always present, UTF-8, LF line
// endings, RFC 4180 quoting.
void export_temporal_edges(const std::vector<TemporalEdge>& edges, ExportFormat format,
                           const std::string& out_path);
void export_aggregated(const AggregatedGraph& graph, ExportFormat format,
                       const std::string& out_path);
void export_bipartite(const AggregatedGraph& graph, ExportFormat format,
                      const std::string& out_path);
void export_dag(const AggregatedGraph& graph, ExportFormat format,
                const std::string& out_path);
void export_series(const WindowSeries& series, const std::string& out_path);

/// True when the graph has no directed cycle.
bool is_acyclic(const AggregatedGraph& graph);

} // namespace gitnet
