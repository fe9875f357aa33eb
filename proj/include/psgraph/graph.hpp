#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "psgraph/errors.hpp"

namespace psgraph {

using NodeId = std::uint32_t;

// Canonical undirected edge: first < second.
using Edge = std::pair<NodeId, NodeId>;

// Per-node values indexed by NodeId. Real-valued because noisy and fused
// degrees are fractional.
using DegreeVector = std::vector<double>;

// One undirected simple graph at a timestamp. Nodes are the dense range
// [0, num_nodes); edges are canonical, sorted and unique.
struct Snapshot {
  int timestamp = 1;
  NodeId num_nodes = 0;
  std::vector<Edge> edges;

  bool operator==(const Snapshot&) const = default;
};

// Canonicalizes raw edges: orients u < v, drops self-loops, deduplicates.
// Throws if an endpoint falls outside [0, num_nodes).
inline Snapshot make_snapshot(int timestamp, NodeId num_nodes,
                              std::vector<Edge> raw_edges) {
  Snapshot s;
  s.timestamp = timestamp;
  s.num_nodes = num_nodes;
  s.edges.reserve(raw_edges.size());
  for (auto [u, v] : raw_edges) {
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (v >= num_nodes) throw ContractError("edge endpoint out of node range");
    s.edges.emplace_back(u, v);
  }
  std::sort(s.edges.begin(), s.edges.end());
  s.edges.erase(std::unique(s.edges.begin(), s.edges.end()), s.edges.end());
  return s;
}

// Ordered sequence of snapshots, timestamps 1..T contiguous.
struct GraphStream {
  std::vector<Snapshot> snapshots;

  bool operator==(const GraphStream&) const = default;
};

inline std::size_t edge_count(const Snapshot& s) { return s.edges.size(); }
inline std::size_t node_count(const Snapshot& s) { return s.num_nodes; }

inline std::vector<std::vector<NodeId>> adjacency(const Snapshot& s) {
  std::vector<std::vector<NodeId>> adj(s.num_nodes);
  for (const auto& [u, v] : s.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

// Edge-endpoint counts per node; sums to 2 * edge_count.
inline DegreeVector degrees(const Snapshot& s) {
  DegreeVector d(s.num_nodes, 0.0);
  for (const auto& [u, v] : s.edges) {
    d[u] += 1.0;
    d[v] += 1.0;
  }
  return d;
}

}  // namespace psgraph
