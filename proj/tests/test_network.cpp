#include "gitnet/network.hpp"

#include "gitnet/errors.hpp"
#include "gitnet/orchestrator.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

using namespace gitnet;
using namespace gitnet::testing;

namespace {

CommitRecord commit(const std::string& hash, std::int64_t date, const std::string& email,
                    const std::string& name)
{
    CommitRecord c;
    c.hash = hash;
    c.author_date = date;
    c.committer_date = date;
    c.author_name = name;
    c.author_email = email;
    c.committer_name = name;
    c.committer_email = email;
    c.project_name = "proj";
    return c;
}

CoEditRecord row(const std::string& pre, const std::string& post, EditKind kind,
                 std::optional<std::int64_t> lev, const std::string& path = "f.txt")
{
    CoEditRecord r;
    r.mod_filename = path;
    r.mod_new_path = path;
    r.mod_old_path = path;
    if (!pre.empty())
        r.pre_commit = pre;
    r.post_commit = post;
    r.kind = kind;
    r.levenshtein_dist = lev;
    return r;
}

/// Store with commits by alice (a1, t0), bob (b2, t0+1d), carol (c3, t0+40d)
/// and rows: bob edits alice (lev 4), carol edits alice (lev 6), carol edits
/// bob (deletion), plus an addition by bob.
Store make_small_store(const std::string& path)
{
    auto store = Store::open(path, Granularity::Line);
    store.write_commit(commit("a1", kT0, "alice@example.com", "Alice"),
                       {row("", "a1", EditKind::Addition, 5)});
    store.write_commit(commit("b2", kT0 + kDay, "bob@example.com", "Bob"),
                       {row("a1", "b2", EditKind::Replacement, 4)});
    store.write_commit(commit("c3", kT0 + 40 * kDay, "carol@example.com", "Carol"),
                       {row("a1", "c3", EditKind::Replacement, 6),
                        row("b2", "c3", EditKind::Deletion, std::nullopt)});
    return store;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace

TEST_CASE("coedit_edges: directions, self-edges, deletions")
{
    TempDir tmp;
    auto store = make_small_store(tmp.sub("s.db"));

    auto edges = coedit_edges(store);
    REQUIRE(edges.size() == 2); // addition and deletion excluded
    CHECK(edges[0].source == "bob@example.com");
    CHECK(edges[0].target == "alice@example.com");
    CHECK(edges[0].timestamp == kT0 + kDay);
    CHECK(edges[0].weight == 1.0);
    CHECK(edges[1].source == "carol@example.com");

    CoEditEdgeOptions with_del;
    with_del.include_deletions = true;
    edges = coedit_edges(store, with_del);
    CHECK(edges.size() == 3);

    CoEditEdgeOptions lev;
    lev.weighting = EdgeWeighting::Levenshtein;
    edges = coedit_edges(store, lev);
    REQUIRE(edges.size() == 2);
    CHECK(edges[0].weight == 4.0);
    CHECK(edges[1].weight == 6.0);
}

TEST_CASE("coedit_edges: self-edits are excluded unless requested")
{
    TempDir tmp;
    auto store = Store::open(tmp.sub("s.db"), Granularity::Line);
    store.write_commit(commit("a1", kT0, "alice@example.com", "Alice"), {});
    store.write_commit(commit("a2", kT0 + kDay, "alice@example.com", "Alice"),
                       {row("a1", "a2", EditKind::Replacement, 2)});
    CHECK(coedit_edges(store).empty());
    CoEditEdgeOptions incl;
    incl.include_self = true;
    const auto edges = coedit_edges(store, incl);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].source == edges[0].target);
}

TEST_CASE("block apportionment conserves the event's levenshtein exactly")
{
    TempDir tmp;
    auto store = Store::open(tmp.sub("s.db"), Granularity::Block);
    store.write_commit(commit("a1", kT0, "alice@example.com", "Alice"), {});
    store.write_commit(commit("b2", kT0, "bob@example.com", "Bob"), {});

    // one block event over origins a1 (2 lines) and b2 (1 line), lev 7
    auto r1 = row("a1", "d4", EditKind::Replacement, 7);
    auto r2 = row("b2", "d4", EditKind::Replacement, 7);
    for (auto* r : {&r1, &r2}) {
        r->granularity = Granularity::Block;
        r->pre_block_starting_line_num = 4;
        r->pre_block_len_in_lines = 3;
        r->post_block_starting_line_num = 4;
        r->post_block_len_in_lines = 2;
    }
    r1.attributed_line_count = 2;
    r2.attributed_line_count = 1;
    store.write_commit(commit("d4", kT0 + kDay, "dana@example.com", "Dana"), {r1, r2});

    CoEditEdgeOptions lev;
    lev.weighting = EdgeWeighting::Levenshtein;
    const auto edges = coedit_edges(store, lev);
    REQUIRE(edges.size() == 2);
    double total = 0;
    for (const auto& e : edges) {
        CHECK(e.weight == static_cast<std::int64_t>(e.weight)); // integral shares
        total += e.weight;
    }
    CHECK(total == 7.0);
    // larger attributed count gets the larger share
    CHECK(edges[0].weight >= edges[1].weight);
}

TEST_CASE("aggregate sums parallel edges and honors the window")
{
    std::vector<TemporalEdge> edges = {
        {"b", "a", kT0, 2.0},
        {"b", "a", kT0 + kDay, 3.0},
        {"c", "a", kT0 + 10 * kDay, 1.0},
    };
    auto g = aggregate(edges);
    CHECK(g.directed);
    CHECK(g.nodes == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].source == "b");
    CHECK(g.edges[0].weight == 5.0);
    CHECK(g.edges[1].weight == 1.0);

    g = aggregate(edges, TimeWindow{kT0, kT0 + kDay}); // end exclusive
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].weight == 2.0);

    CHECK_THROWS_AS(aggregate(edges, TimeWindow{kT0, kT0}), InvalidWindow);
}

TEST_CASE("bipartite edges count distinct commits per developer and file")
{
    TempDir tmp;
    auto store = Store::open(tmp.sub("s.db"), Granularity::Line);
    store.write_commit(commit("a1", kT0, "alice@example.com", "Alice"),
                       {row("", "a1", EditKind::Addition, 1),
                        row("", "a1", EditKind::Addition, 1)});
    store.write_commit(commit("a2", kT0 + kDay, "Alice@Example.com", "Alice"),
                       {row("a1", "a2", EditKind::Replacement, 1, "g.txt")});
    const auto g = bipartite_edges(store);
    CHECK(g.directed); // developer -> file
    REQUIRE(g.edges.size() == 2);
    // two rows in one commit still count once; emails are lowercased
    CHECK(g.edges[0].source == "alice@example.com");
    CHECK(g.edges[0].target == "f.txt");
    CHECK(g.edges[0].weight == 1.0);
    CHECK(g.edges[1].target == "g.txt");
}

TEST_CASE("commit DAG per file is acyclic; unknown path throws")
{
    TempDir tmp;
    const auto repo_dir = tmp.sub("repo");
    make_six_commit_repo(repo_dir);
    auto store = Store::open(tmp.sub("s.db"), Granularity::Line);
    MiningOptions opts;
    opts.worker_count = 1;
    mine(repo_dir, store, opts);

    const auto dag = commit_dag(store, "a.txt");
    CHECK_FALSE(dag.edges.empty());
    CHECK(is_acyclic(dag));
    CHECK_THROWS_AS(commit_dag(store, "nope.txt"), PathNotFound);
}

TEST_CASE("degree centralization: star is 1, cycle is 0")
{
    // star K_{1,4}: center degree 4, leaves degree 1
    CHECK(degree_centralization({4, 1, 1, 1, 1}) == doctest::Approx(1.0));
    // 5-cycle: all degrees 2
    CHECK(degree_centralization({2, 2, 2, 2, 2}) == doctest::Approx(0.0));
    CHECK(degree_centralization({}) == 0.0);
    CHECK(degree_centralization({1, 1}) == 0.0);
    // path a-b-c
    CHECK(degree_centralization({1, 2, 1}) == doctest::Approx(1.0));
}

TEST_CASE("rolling metrics windows advance by step from the first midnight")
{
    TempDir tmp;
    auto store = make_small_store(tmp.sub("s.db"));
    const auto series = rolling_metrics(store, 30, 10);
    CHECK(series.window_days == 30);
    REQUIRE_FALSE(series.points.empty());
    CHECK(series.points[0].window_start == kT0); // t0 is already midnight UTC
    for (std::size_t i = 1; i < series.points.size(); ++i)
        CHECK(series.points[i].window_start ==
              series.points[i - 1].window_start + 10 * kDay);
    // first window [t0, t0+30d): only bob->alice
    const auto& first = series.points[0].values;
    CHECK(first.at("developers") == 2.0);
    CHECK(first.at("unique_edges") == 1.0);
    CHECK(first.at("mean_out_degree") == 0.5);
    // last window contains carol's two edits
    bool saw_carol_window = false;
    for (const auto& p : series.points) {
        if (p.window_start <= kT0 + 40 * kDay && kT0 + 40 * kDay < p.window_end &&
            p.window_start > kT0 + kDay) {
            saw_carol_window = true;
            CHECK(p.values.at("developers") == 3.0);
            CHECK(p.values.at("unique_edges") == 2.0);
        }
    }
    CHECK(saw_carol_window);
}

TEST_CASE("ownership series splits own and foreign levenshtein")
{
    TempDir tmp;
    auto store = Store::open(tmp.sub("s.db"), Granularity::Line);
    store.write_commit(commit("a1", kT0, "alice@example.com", "Alice"), {});
    // bob edits alice's code (foreign, lev 4) and his own (own, lev 3)
    store.write_commit(commit("b2", kT0 + kDay, "bob@example.com", "Bob"),
                       {row("a1", "b2", EditKind::Replacement, 4)});
    store.write_commit(commit("b3", kT0 + 2 * kDay, "BOB@example.com", "Bob"),
                       {row("b2", "b3", EditKind::Replacement, 3),
                        row("a1", "b3", EditKind::Deletion, std::nullopt)});

    const auto series = ownership_series(store, 90, 90);
    REQUIRE_FALSE(series.points.empty());
    const auto& v = series.points[0].values;
    CHECK(v.at("own_levenshtein") == 3.0);
    CHECK(v.at("foreign_levenshtein") == 4.0);
    CHECK(v.at("own_fraction") == doctest::Approx(3.0 / 7.0));
    CHECK(v.at("coedit_count") == 3.0); // deletion counted, excluded from sums
}

TEST_CASE("delta series: directional edits collapse in m_l but not m_f")
{
    TempDir tmp;
    auto store = Store::open(tmp.sub("s.db"), Granularity::Line);
    store.write_commit(commit("a1", kT0, "alice@example.com", "Alice"),
                       {row("", "a1", EditKind::Addition, 1)});
    store.write_commit(commit("b2", kT0 + kDay, "bob@example.com", "Bob"),
                       {row("a1", "b2", EditKind::Replacement, 2)});
    store.write_commit(commit("a3", kT0 + 2 * kDay, "alice@example.com", "Alice"),
                       {row("b2", "a3", EditKind::Replacement, 2)});

    const auto series = delta_series(store, 90, 90);
    REQUIRE_FALSE(series.points.empty());
    const auto& v = series.points[0].values;
    // two directed co-edits alice<->bob collapse to one undirected link;
    // they also share one file, so one co-authorship link
    CHECK(v.at("m_l") == 1.0);
    CHECK(v.at("m_f") == 1.0);
    CHECK(v.at("delta") == 1.0);
}

TEST_CASE("delta is undefined when a window has no co-edit links")
{
    TempDir tmp;
    auto store = Store::open(tmp.sub("s.db"), Granularity::Line);
    // two developers touch the same file but never edit each other's lines
    store.write_commit(commit("a1", kT0, "alice@example.com", "Alice"),
                       {row("", "a1", EditKind::Addition, 1)});
    store.write_commit(commit("b2", kT0 + kDay, "bob@example.com", "Bob"),
                       {row("", "b2", EditKind::Addition, 1)});
    const auto series = delta_series(store, 90, 90);
    REQUIRE_FALSE(series.points.empty());
    const auto& v = series.points[0].values;
    CHECK(v.at("m_f") == 1.0);
    CHECK(v.at("m_l") == 0.0);
    CHECK_FALSE(v.at("delta").has_value());
}

TEST_CASE("csv export: headers, quoting, LF endings")
{
    TempDir tmp;
    std::vector<TemporalEdge> edges = {{"a\"x", "b,y", kT0, 1.5}};
    const auto path = tmp.sub("edges.csv");
    export_temporal_edges(edges, ExportFormat::Csv, path);
    const auto text = slurp(path);
    CHECK(text == "source,target,timestamp,weight\n\"a\"\"x\",\"b,y\",1577836800,1.5\n");
}

TEST_CASE("json export: directed flag, nodes, edges")
{
    TempDir tmp;
    AggregatedGraph g;
    g.nodes = {"a", "b"};
    g.edges = {{"b", "a", 5.0}};
    const auto path = tmp.sub("graph.json");
    export_aggregated(g, ExportFormat::Json, path);
    const auto doc = nlohmann::json::parse(slurp(path));
    CHECK(doc["directed"] == true);
    CHECK(doc["nodes"] == nlohmann::json({"a", "b"}));
    REQUIRE(doc["edges"].size() == 1);
    CHECK(doc["edges"][0]["source"] == "b");
    CHECK(doc["edges"][0]["target"] == "a");
    CHECK(doc["edges"][0]["weight"] == 5.0);
}

TEST_CASE("series export: ISO dates and empty cells for absent values")
{
    TempDir tmp;
    WindowSeries s;
    s.window_days = 90;
    s.step_days = 90;
    s.metric_names = {"m_f", "m_l", "delta"};
    WindowSeries::Point p;
    p.window_start = kT0;
    p.window_end = kT0 + 90 * kDay;
    p.values["m_f"] = 1.0;
    p.values["m_l"] = 0.0;
    p.values["delta"] = std::nullopt;
    s.points.push_back(p);
    const auto path = tmp.sub("series.csv");
    export_series(s, path);
    CHECK(slurp(path) ==
          "window_start,window_end,m_f,m_l,delta\n2020-01-01,2020-03-31,1,0,\n");
}

TEST_CASE("dag export omits the weight column")
{
    TempDir tmp;
    AggregatedGraph g;
    g.nodes = {"a1", "b2"};
    g.edges = {{"a1", "b2", 1.0}};
    const auto path = tmp.sub("dag.csv");
    export_dag(g, ExportFormat::Csv, path);
    CHECK(slurp(path) == "pre_commit,post_commit\na1,b2\n");
}

TEST_CASE("whole-history delta on a mined repository is at least 1")
{
    TempDir tmp;
    const auto repo_dir = tmp.sub("repo");
    make_six_commit_repo(repo_dir);
    auto store = Store::open(tmp.sub("s.db"), Granularity::Line);
    MiningOptions opts;
    opts.worker_count = 1;
    mine(repo_dir, store, opts);

    const auto series = delta_series(store, 100000, 100000);
    REQUIRE(series.points.size() == 1);
    const auto& v = series.points[0].values;
    REQUIRE(v.at("delta").has_value());
    CHECK(*v.at("delta") >= 1.0);
}
