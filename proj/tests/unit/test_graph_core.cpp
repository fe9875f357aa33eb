#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "psgraph/graph.hpp"
#include "psgraph/stream_io.hpp"
#include "support/test_graphs.hpp"

using namespace psgraph;

TEST_CASE("temporal parse groups edges by distinct raw timestamp") {
  GraphStream s = parse_temporal_edges("0 1 1\n1 2 1\n0 2 2");
  REQUIRE(s.snapshots.size() == 2);
  CHECK(s.snapshots[0].timestamp == 1);
  CHECK(s.snapshots[0].edges == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK(s.snapshots[1].edges == std::vector<Edge>{{0, 2}});
  // cumulative universe: all three nodes stay present at t=2
  CHECK(s.snapshots[0].num_nodes == 3);
  CHECK(s.snapshots[1].num_nodes == 3);
}

TEST_CASE("self-loop line keeps the node but drops the edge") {
  GraphStream s = parse_temporal_edges("0 0 1");
  REQUIRE(s.snapshots.size() == 1);
  CHECK(s.snapshots[0].edges.empty());
  CHECK(s.snapshots[0].num_nodes == 1);
}

TEST_CASE("duplicate edges within a snapshot are deduplicated") {
  GraphStream s = parse_temporal_edges("0 1 1\n1 0 1\n0 1 1");
  CHECK(s.snapshots[0].edges == std::vector<Edge>{{0, 1}});
}

TEST_CASE("comment lines and blank lines are ignored") {
  GraphStream s = parse_temporal_edges("# header\n\n0 1 1\n# trailing\n");
  REQUIRE(s.snapshots.size() == 1);
  CHECK(s.snapshots[0].edges.size() == 1);
}

TEST_CASE("parse errors carry the line number") {
  CHECK_THROWS_WITH(parse_temporal_edges("0 1 1\n0 x 2"),
                    Catch::Matchers::ContainsSubstring("line 2"));
  CHECK_THROWS_AS(parse_temporal_edges(""), ParseError);
  CHECK_THROWS_AS(parse_temporal_edges("# only comments\n"), ParseError);
  CHECK_THROWS_AS(parse_temporal_edges("0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_temporal_edges("-1 2 1\n"), ParseError);
}

TEST_CASE("node ids are remapped to a dense range") {
  GraphStream s = parse_temporal_edges("1000000 5 1\n5 70 2");
  CHECK(s.snapshots[1].num_nodes == 3);
  std::set<NodeId> seen;
  for (const auto& snap : s.snapshots)
    for (const auto& [u, v] : snap.edges) {
      seen.insert(u);
      seen.insert(v);
    }
  CHECK(seen == std::set<NodeId>{0, 1, 2});
}

TEST_CASE("fixed-width bucketing merges raw timestamps") {
  GraphStream s =
      parse_temporal_edges("0 1 10\n1 2 14\n2 3 25", WindowRule{10});
  REQUIRE(s.snapshots.size() == 2);
  CHECK(s.snapshots[0].edges.size() == 2);
  CHECK(s.snapshots[1].edges.size() == 1);
}

TEST_CASE("snapshots format assigns timestamps by file order") {
  GraphStream s = parse_snapshot_texts({"0 1\n1 2\n", "0 2\n"});
  REQUIRE(s.snapshots.size() == 2);
  CHECK(s.snapshots[0].edges.size() == 2);
  CHECK(s.snapshots[1].edges.size() == 1);
  CHECK(s.snapshots[1].num_nodes == 3);
}

TEST_CASE("degrees sum to twice the edge count") {
  auto check = [](const Snapshot& s, const DegreeVector& expected) {
    auto d = degrees(s);
    CHECK(d == expected);
    double sum = 0;
    for (double x : d) sum += x;
    CHECK(sum == 2.0 * edge_count(s));
  };
  check(testsupport::triangle(), {2, 2, 2});
  check(make_snapshot(1, 3, {{0, 1}}), {1, 1, 0});
  check(testsupport::path4(), {1, 2, 2, 1});

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = testsupport::er_graph(30, 0.2, seed);
    double sum = 0;
    for (double x : degrees(g)) sum += x;
    CHECK(sum == 2.0 * edge_count(g));
  }
}

TEST_CASE("edge and node counts") {
  Snapshot empty = make_snapshot(1, 0, {});
  CHECK(edge_count(empty) == 0);
  CHECK(node_count(empty) == 0);
  CHECK(edge_count(testsupport::triangle()) == 3);
  CHECK(node_count(testsupport::triangle()) == 3);
  CHECK(edge_count(testsupport::path4()) == 3);
  CHECK(node_count(testsupport::path4()) == 4);
}

TEST_CASE("make_snapshot enforces the simple-graph invariants") {
  Snapshot s = make_snapshot(1, 3, {{2, 1}, {1, 2}, {0, 0}});
  CHECK(s.edges == std::vector<Edge>{{1, 2}});
  CHECK_THROWS_AS(make_snapshot(1, 2, {{0, 5}}), ContractError);
}

TEST_CASE("serialize/parse round-trip reproduces the stream") {
  // includes a node that is isolated in its first snapshot (self-loop
  // mention) and edges whose sorted order differs from insertion order
  GraphStream original =
      parse_temporal_edges("3 4 1\n9 9 1\n1 2 2\n3 9 2\n5 6 3\n4 1 3");
  GraphStream round = parse_temporal_edges(serialize_temporal(original));
  CHECK(round == original);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    psgraph::NoiseSource ns(seed);
    GraphStream stream;
    NodeId n = 6 + static_cast<NodeId>(ns.uniform_int(10));
    for (int t = 1; t <= 4; ++t) {
      n += static_cast<NodeId>(ns.uniform_int(3));
      std::vector<Edge> edges;
      for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
          if (ns.bernoulli(0.15)) edges.emplace_back(u, v);
      stream.snapshots.push_back(make_snapshot(t, n, std::move(edges)));
    }
    GraphStream reparsed = parse_temporal_edges(serialize_temporal(stream));
    CHECK(reparsed == stream);
  }
}

TEST_CASE("snapshot manifest resolves relative paths") {
  namespace fs = std::filesystem;
  fs::path dir = fs::path("unit_tmp") / "manifest";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "t1.txt") << "0 1\n1 2\n";
    std::ofstream(dir / "t2.txt") << "# comment\n0 2\n";
    std::ofstream(dir / "list.txt") << "t1.txt\nt2.txt\n";
  }
  GraphStream s = parse_snapshot_manifest((dir / "list.txt").string());
  REQUIRE(s.snapshots.size() == 2);
  CHECK(s.snapshots[0].edges.size() == 2);
  CHECK(s.snapshots[1].edges == std::vector<Edge>{{0, 2}});
  CHECK_THROWS_AS(parse_snapshot_manifest((dir / "missing.txt").string()),
                  IoError);
}

// Requires the real dataset; points PSGRAPH_AS733 at a temporal-format file.
TEST_CASE("as-733 ingestion statistics", "[.external]") {
  const char* path = std::getenv("PSGRAPH_AS733");
  REQUIRE(path != nullptr);
  GraphStream s = parse_temporal_edges(read_file(path));
  CHECK(s.snapshots.size() == 147);
  CHECK(s.snapshots.back().num_nodes == 7473);
  std::set<Edge> distinct;
  for (const auto& snap : s.snapshots)
    distinct.insert(snap.edges.begin(), snap.edges.end());
  CHECK(distinct.size() == 22705);
}
