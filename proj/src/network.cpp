#include "gitnet/network.hpp"

#include "gitnet/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace gitnet {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string row_file(const CoEditRecord& r)
{
    return r.mod_new_path ? *r.mod_new_path : r.mod_old_path.value_or("");
}

bool is_coedit_row(const JoinedCoEdit& j)
{
    return j.record.kind != EditKind::Addition && j.pre_author_email.has_value();
}

bool is_self(const JoinedCoEdit& j)
{
    return j.pre_author_email && lower(*j.pre_author_email) == lower(j.post_author_email);
}

/// Largest-remainder split of `total` proportional to `counts`; sums exactly
/// to total.
std::vector<std::int64_t> apportion(std::int64_t total, const std::vector<int>& counts)
{
    const std::int64_t denom = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    std::vector<std::int64_t> shares(counts.size(), 0);
    if (denom == 0)
        return shares;
    std::int64_t assigned = 0;
    std::vector<std::pair<std::int64_t, std::size_t>> remainders; // (-remainder, index)
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const std::int64_t num = total * counts[i];
        shares[i] = num / denom;
        assigned += shares[i];
        remainders.emplace_back(-(num % denom), i);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned)
        ++shares[remainders[k].second];
    return shares;
}

/// Levenshtein weight per row id, with block rows sharing one event
/// apportioned by attributed_line_count. Rows of one event are adjacent in
/// id order.
std::unordered_map<std::int64_t, std::int64_t>
apportioned_weights(const std::vector<JoinedCoEdit>& rows)
{
    std::unordered_map<std::int64_t, std::int64_t> weights;
    std::vector<const JoinedCoEdit*> group;
    const auto same_event = [](const JoinedCoEdit& a, const JoinedCoEdit& b) {
        return a.record.post_commit == b.record.post_commit &&
               a.record.kind == b.record.kind &&
               a.record.mod_new_path == b.record.mod_new_path &&
               a.record.mod_old_path == b.record.mod_old_path &&
               a.record.pre_block_starting_line_num == b.record.pre_block_starting_line_num &&
               a.record.post_block_starting_line_num == b.record.post_block_starting_line_num;
    };
    const auto flush = [&] {
        if (group.empty())
            return;
        const auto lev = group.front()->record.levenshtein_dist;
        if (lev) {
            std::vector<int> counts;
            counts.reserve(group.size());
            for (const auto* j : group)
                counts.push_back(j->record.attributed_line_count);
            const auto shares = apportion(*lev, counts);
            for (std::size_t i = 0; i < group.size(); ++i)
                weights[group[i]->id] = shares[i];
        }
        group.clear();
    };
    std::vector<const JoinedCoEdit*> sorted;
    sorted.reserve(rows.size());
    for (const auto& j : rows)
        sorted.push_back(&j);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return a->id < b->id; });
    for (const auto* j : sorted) {
        if (j->record.granularity != Granularity::Block) {
            if (j->record.levenshtein_dist)
                weights[j->id] = *j->record.levenshtein_dist;
            continue;
        }
        if (!group.empty() && !same_event(*group.back(), *j))
            flush();
        group.push_back(j);
    }
    flush();
    return weights;
}

} // namespace

std::vector<TemporalEdge> coedit_edges(const Store& store, const CoEditEdgeOptions& options)
{
    const auto rows = store.query_coedits();
    const auto weights = apportioned_weights(rows);

    std::vector<TemporalEdge> edges;
    for (const auto& j : rows) {
        if (!is_coedit_row(j))
            continue;
        if (is_self(j) && !options.include_self)
            continue;
        TemporalEdge edge;
        edge.source = lower(j.post_author_email);
        edge.target = lower(*j.pre_author_email);
        edge.timestamp = j.post_author_date;
        if (j.record.kind == EditKind::Deletion) {
            if (!(options.include_deletions && options.weighting == EdgeWeighting::Count))
                continue;
            edge.weight = 1.0;
        } else if (options.weighting == EdgeWeighting::Count) {
            edge.weight = 1.0;
        } else {
            const auto it = weights.find(j.id);
            if (it == weights.end())
                continue;
            edge.weight = static_cast<double>(it->second);
            if (edge.weight <= 0)
                continue; // zero-effort share carries no edge weight
        }
        edges.push_back(std::move(edge));
    }
    return edges;
}

AggregatedGraph aggregate(const std::vector<TemporalEdge>& edges,
                          std::optional<TimeWindow> window)
{
    if (window && window->end <= window->start)
        throw InvalidWindow();
    std::map<std::pair<std::string, std::string>, double> sums;
    for (const auto& e : edges) {
        if (window && (e.timestamp < window->start || e.timestamp >= window->end))
            continue;
        sums[{e.source, e.target}] += e.weight;
    }
    AggregatedGraph graph;
    graph.directed = true;
    std::set<std::string> nodes;
    for (const auto& [key, w] : sums) {
        graph.edges.push_back({key.first, key.second, w});
        nodes.insert(key.first);
        nodes.insert(key.second);
    }
    graph.nodes.assign(nodes.begin(), nodes.end());
    return graph;
}

AggregatedGraph bipartite_edges(const Store& store, std::optional<TimeWindow> window)
{
    if (window && window->end <= window->start)
        throw InvalidWindow();
    CoEditFilters filters;
    if (window) {
        filters.from_time = window->start;
        filters.to_time = window->end;
    }
    // one link per (developer, file); weight = distinct commits
    std::map<std::pair<std::string, std::string>, std::set<std::string>> commits;
    for (const auto& j : store.query_coedits(filters)) {
        const auto file = row_file(j.record);
        if (file.empty())
            continue;
        commits[{lower(j.post_author_email), file}].insert(j.record.post_commit);
    }
    AggregatedGraph graph;
    graph.directed = true;
    std::set<std::string> nodes;
    for (const auto& [key, hashes] : commits) {
        graph.edges.push_back({key.first, key.second, static_cast<double>(hashes.size())});
        nodes.insert(key.first);
        nodes.insert(key.second);
    }
    graph.nodes.assign(nodes.begin(), nodes.end());
    return graph;
}

AggregatedGraph commit_dag(const Store& store, const std::string& path)
{
    std::set<std::string> nodes;
    std::map<std::pair<std::string, std::string>, double> edges;
    bool seen = false;
    for (const auto& j : store.query_coedits()) {
        const auto& r = j.record;
        if (r.mod_new_path != path && r.mod_old_path != path)
            continue;
        seen = true;
        nodes.insert(r.post_commit);
        if (r.pre_commit && *r.pre_commit != r.post_commit) {
            nodes.insert(*r.pre_commit);
            edges[{*r.pre_commit, r.post_commit}] += 1.0;
        }
    }
    if (!seen)
        throw PathNotFound(path);
    AggregatedGraph graph;
    graph.directed = true;
    graph.nodes.assign(nodes.begin(), nodes.end());
    for (const auto& [key, w] : edges)
        graph.edges.push_back({key.first, key.second, w});
    return graph;
}

double degree_centralization(const std::vector<int>& degrees)
{
    const auto n = degrees.size();
    if (n < 3)
        return 0.0;
    const int d_max = *std::max_element(degrees.begin(), degrees.end());
    double sum = 0;
    for (int d : degrees)
        sum += d_max - d;
    return sum / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
}

namespace {

constexpr std::int64_t kDay = 86400;

std::int64_t midnight_utc(std::int64_t ts)
{
    return ts - ((ts % kDay) + kDay) % kDay;
}

struct WindowFrame {
    std::int64_t first = 0;
    std::int64_t last = 0;
    bool empty = true;
};

WindowFrame series_frame(const std::vector<JoinedCoEdit>& rows)
{
    WindowFrame frame;
    for (const auto& j : rows) {
        if (frame.empty || j.post_author_date < frame.first)
            frame.first = j.post_author_date;
        if (frame.empty || j.post_author_date > frame.last)
            frame.last = j.post_author_date;
        frame.empty = false;
    }
    return frame;
}

template <typename Fn>
WindowSeries build_series(const std::vector<JoinedCoEdit>& rows, int window_days,
                          int step_days, std::vector<std::string> metric_names, Fn&& metrics)
{
    if (window_days <= 0 || step_days <= 0)
        throw UsageError("window and step must be positive");
    WindowSeries series;
    series.window_days = window_days;
    series.step_days = step_days;
    series.metric_names = std::move(metric_names);
    const auto frame = series_frame(rows);
    if (frame.empty)
        return series;
    // windows advance from the first commit's midnight UTC
    for (std::int64_t start = midnight_utc(frame.first); start <= frame.last;
         start += step_days * kDay) {
        WindowSeries::Point point;
        point.window_start = start;
        point.window_end = start + window_days * kDay;
        std::vector<const JoinedCoEdit*> in_window;
        for (const auto& j : rows)
            if (j.post_author_date >= start && j.post_author_date < point.window_end)
                in_window.push_back(&j);
        point.values = metrics(in_window);
        series.points.push_back(std::move(point));
    }
    return series;
}

} // namespace

WindowSeries rolling_metrics(const Store& store, int window_days, int step_days)
{
    const auto rows = store.query_coedits();
    return build_series(
        rows, window_days, step_days,
        {"developers", "unique_edges", "mean_out_degree", "degree_centralization"},
        [](const std::vector<const JoinedCoEdit*>& in_window) {
            std::set<std::pair<std::string, std::string>> directed;
            std::set<std::string> devs;
            for (const auto* j : in_window) {
                if (!is_coedit_row(*j) || is_self(*j))
                    continue;
                const auto src = lower(j->post_author_email);
                const auto tgt = lower(*j->pre_author_email);
                directed.insert({src, tgt});
                devs.insert(src);
                devs.insert(tgt);
            }
            std::map<std::string, int> degree;
            std::set<std::pair<std::string, std::string>> undirected;
            for (const auto& [a, b] : directed) {
                auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
                if (undirected.insert(key).second) {
                    ++degree[key.first];
                    ++degree[key.second];
                }
            }
            std::vector<int> degrees;
            degrees.reserve(devs.size());
            for (const auto& d : devs)
                degrees.push_back(degree.count(d) ? degree[d] : 0);

            std::map<std::string, std::optional<double>> out;
            out["developers"] = static_cast<double>(devs.size());
            out["unique_edges"] = static_cast<double>(directed.size());
            out["mean_out_degree"] =
                devs.empty() ? 0.0
                             : static_cast<double>(directed.size()) /
                                   static_cast<double>(devs.size());
            out["degree_centralization"] = degree_centralization(degrees);
            return out;
        });
}

WindowSeries ownership_series(const Store& store, int window_days, int step_days)
{
    const auto rows = store.query_coedits();
    const auto weights = apportioned_weights(rows);
    return build_series(
        rows, window_days, step_days,
        {"own_levenshtein", "foreign_levenshtein", "own_fraction", "coedit_count"},
        [&](const std::vector<const JoinedCoEdit*>& in_window) {
            double own = 0, foreign = 0;
            std::int64_t count = 0;
            for (const auto* j : in_window) {
                if (!is_coedit_row(*j))
                    continue;
                ++count;
                if (j->record.kind == EditKind::Deletion)
                    continue; // no Levenshtein for deletions
                const auto it = weights.find(j->id);
                if (it == weights.end())
                    continue;
                (is_self(*j) ? own : foreign) += static_cast<double>(it->second);
            }
            std::map<std::string, std::optional<double>> out;
            out["own_levenshtein"] = own;
            out["foreign_levenshtein"] = foreign;
            out["own_fraction"] = (own + foreign) > 0
                                      ? std::optional<double>(own / (own + foreign))
                                      : std::nullopt;
            out["coedit_count"] = static_cast<double>(count);
            return out;
        });
}

WindowSeries delta_series(const Store& store, int window_days, int step_days)
{
    const auto rows = store.query_coedits();
    return build_series(
        rows, window_days, step_days, {"m_f", "m_l", "delta"},
        [](const std::vector<const JoinedCoEdit*>& in_window) {
            // m_f: developers linked by committing modifications to a common
            // file within the window (counted once per pair)
            std::map<std::string, std::set<std::string>> devs_per_file;
            for (const auto* j : in_window) {
                const auto file = row_file(j->record);
                if (!file.empty())
                    devs_per_file[file].insert(lower(j->post_author_email));
            }
            std::set<std::pair<std::string, std::string>> file_pairs;
            for (const auto& [file, devs] : devs_per_file)
                for (auto a = devs.begin(); a != devs.end(); ++a)
                    for (auto b = std::next(a); b != devs.end(); ++b)
                        file_pairs.insert({*a, *b});

            // m_l: undirected collapse of the window's co-editing network
            std::set<std::pair<std::string, std::string>> line_pairs;
            for (const auto* j : in_window) {
                if (!is_coedit_row(*j) || is_self(*j))
                    continue;
                auto a = lower(j->post_author_email);
                auto b = lower(*j->pre_author_email);
                if (b < a)
                    std::swap(a, b);
                line_pairs.insert({a, b});
            }
            std::map<std::string, std::optional<double>> out;
            out["m_f"] = static_cast<double>(file_pairs.size());
            out["m_l"] = static_cast<double>(line_pairs.size());
            out["delta"] = line_pairs.empty()
                               ? std::nullopt
                               : std::optional<double>(static_cast<double>(file_pairs.size()) /
                                                       static_cast<double>(line_pairs.size()));
            return out;
        });
}

namespace {

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double v)
{
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string iso_date(std::int64_t ts)
{
    std::time_t t = static_cast<std::time_t>(ts);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot write to " + path);
    return out;
}

void write_edge_json(const std::string& out_path, bool directed,
                     const std::vector<std::string>& nodes, nlohmann::json edges)
{
    nlohmann::json doc;
    doc["directed"] = directed;
    doc["nodes"] = nodes;
    doc["edges"] = std::move(edges);
    auto out = open_out(out_path);
    out << doc.dump(2) << "\n";
}

std::vector<WeightedEdge> sorted_edges(const AggregatedGraph& graph)
{
    auto edges = graph.edges;
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
    return edges;
}

} // namespace

void export_temporal_edges(const std::vector<TemporalEdge>& edges, ExportFormat format,
                           const std::string& out_path)
{
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return std::tie(a.timestamp, a.source, a.target, a.weight) <
               std::tie(b.timestamp, b.source, b.target, b.weight);
    });
    if (format == ExportFormat::Csv) {
        auto out = open_out(out_path);
        out << "source,target,timestamp,weight\n";
        for (const auto& e : sorted)
            out << csv_escape(e.source) << "," << csv_escape(e.target) << ","
                << e.timestamp << "," << format_number(e.weight) << "\n";
        return;
    }
    std::set<std::string> nodes;
    nlohmann::json jedges = nlohmann::json::array();
    for (const auto& e : sorted) {
        nodes.insert(e.source);
        nodes.insert(e.target);
        jedges.push_back({{"source", e.source},
                          {"target", e.target},
                          {"timestamp", e.timestamp},
                          {"weight", e.weight}});
    }
    write_edge_json(out_path, true, {nodes.begin(), nodes.end()}, std::move(jedges));
}

namespace {

void export_weighted(const AggregatedGraph& graph, ExportFormat format,
                     const std::string& out_path, const char* col_u, const char* col_v,
                     bool with_weight)
{
    const auto edges = sorted_edges(graph);
    if (format == ExportFormat::Csv) {
        auto out = open_out(out_path);
        out << col_u << "," << col_v;
        if (with_weight)
            out << ",weight";
        out << "\n";
        for (const auto& e : edges) {
            out << csv_escape(e.source) << "," << csv_escape(e.target);
            if (with_weight)
                out << "," << format_number(e.weight);
            out << "\n";
        }
        return;
    }
    nlohmann::json jedges = nlohmann::json::array();
    for (const auto& e : edges) {
        nlohmann::json je{{col_u, e.source}, {col_v, e.target}};
        if (with_weight)
            je["weight"] = e.weight;
        jedges.push_back(std::move(je));
    }
    write_edge_json(out_path, graph.directed, graph.nodes, std::move(jedges));
}

} // namespace

void export_aggregated(const AggregatedGraph& graph, ExportFormat format,
                       const std::string& out_path)
{
    export_weighted(graph, format, out_path, "source", "target", true);
}

void export_bipartite(const AggregatedGraph& graph, ExportFormat format,
                      const std::string& out_path)
{
    export_weighted(graph, format, out_path, "developer", "file", true);
}

void export_dag(const AggregatedGraph& graph, ExportFormat format,
                const std::string& out_path)
{
    export_weighted(graph, format, out_path, "pre_commit", "post_commit", false);
}

void export_series(const WindowSeries& series, const std::string& out_path)
{
    auto out = open_out(out_path);
    out << "window_start,window_end";
    for (const auto& name : series.metric_names)
        out << "," << name;
    out << "\n";
    for (const auto& point : series.points) {
        out << iso_date(point.window_start) << "," << iso_date(point.window_end);
        for (const auto& name : series.metric_names) {
            out << ",";
            const auto it = point.values.find(name);
            if (it != point.values.end() && it->second)
                out << format_number(*it->second);
        }
        out << "\n";
    }
}

bool is_acyclic(const AggregatedGraph& graph)
{
    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> adjacency;
    for (const auto& n : graph.nodes)
        indegree[n] = 0;
    for (const auto& e : graph.edges) {
        adjacency[e.source].push_back(e.target);
        ++indegree[e.target];
    }
    std::vector<std::string> ready;
    for (const auto& [n, d] : indegree)
        if (d == 0)
            ready.push_back(n);
    std::size_t visited = 0;
    while (!ready.empty()) {
        const auto n = ready.back();
        ready.pop_back();
        ++visited;
        for (const auto& m : adjacency[n])
            if (--indegree[m] == 0)
                ready.push_back(m);
    }
    return visited == indegree.size();
}

} // namespace gitnet
