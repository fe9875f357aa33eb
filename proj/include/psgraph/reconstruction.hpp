#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "psgraph/community.hpp"
#include "psgraph/dp.hpp"
#include "psgraph/errors.hpp"
#include "psgraph/graph.hpp"
#include "psgraph/perturbation.hpp"

namespace psgraph {

// Snapshot plus the provenance of the run that generated it.
struct SyntheticSnapshot {
  Snapshot graph;
  std::uint64_t seed = 0;
  std::string variant;
};

namespace detail {
inline double clamp_prob(double p) { return std::clamp(p, 0.0, 1.0); }
}  // namespace detail

// Connection probability of two distinct nodes of one community under the
// CL model: d_x * d_y / sum(d), clamped into [0, 1]. Zero denominator means
// no information, hence probability 0.
inline double intra_prob(std::size_t x, std::size_t y,
                         const DegreeVector& community_degrees) {
  if (x == y) throw ContractError("intra_prob: x == y");
  double sum = 0.0;
  for (double d : community_degrees) sum += d;
  if (sum <= 0.0) return 0.0;
  return detail::clamp_prob(community_degrees[x] * community_degrees[y] / sum);
}

// Expected number of edges from node x in community a toward community b:
// h_x scaled by b's share of a's total cross-community edge mass.
inline double expected_cross(NodeId x, std::uint32_t a, std::uint32_t b,
                             const DegreeVector& h_hat,
                             const CommunityEdgeMatrix& v_hat) {
  if (a == b) throw ContractError("expected_cross: a == b");
  double row_sum = 0.0;
  for (std::uint32_t g = 0; g < v_hat.size(); ++g)
    if (g != a) row_sum += v_hat.at(a, g);
  if (row_sum <= 0.0) return 0.0;
  return h_hat[x] * v_hat.at(a, b) / row_sum;
}

// Cross-community connection probability from the expected edge counts;
// e_sum_b is the sum of e_z^a over all z in C_b.
inline double inter_prob(double e_xb, double e_ya, double e_sum_b) {
  if (e_sum_b <= 0.0) return 0.0;
  return detail::clamp_prob(e_xb * e_ya / e_sum_b);
}

// Intra-community edges: one Bernoulli trial per unordered node pair inside
// each community. Zero-degree nodes are skipped (probability 0 for every
// pair they belong to).
inline std::vector<Edge> gen_intra(const CommunityPartition& part,
                                   const DegreeVector& d_in_hat,
                                   NoiseSource& ns) {
  std::vector<Edge> edges;
  auto members = community_members(part);
  for (const auto& community : members) {
    double sum = 0.0;
    for (NodeId v : community) sum += d_in_hat[v];
    if (sum <= 0.0) continue;
    std::vector<NodeId> active;
    for (NodeId v : community)
      if (d_in_hat[v] > 0.0) active.push_back(v);
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        double p = detail::clamp_prob(d_in_hat[active[i]] *
                                      d_in_hat[active[j]] / sum);
        if (ns.bernoulli(p)) edges.emplace_back(active[i], active[j]);
      }
  }
  return edges;
}

// Inter-community edges: for each community pair with positive perturbed
// edge count, one Bernoulli trial per cross pair with the expected-edge
// probability. Nodes with zero expected edges toward the pair are skipped.
inline std::vector<Edge> gen_inter(const CommunityPartition& part,
                                   const DegreeVector& d_out_hat,
                                   const CommunityEdgeMatrix& v_hat,
                                   NoiseSource& ns) {
  std::vector<Edge> edges;
  std::uint32_t k = part.num_communities;
  if (k < 2) return edges;
  auto members = community_members(part);

  std::vector<double> row_sum(k, 0.0);
  for (std::uint32_t a = 0; a < k; ++a)
    for (std::uint32_t g = 0; g < k; ++g)
      if (g != a) row_sum[a] += v_hat.at(a, g);

  std::vector<double> e_xb, e_ya;
  for (std::uint32_t a = 0; a < k; ++a)
    for (std::uint32_t b = a + 1; b < k; ++b) {
      double v_ab = v_hat.at(a, b);
      if (v_ab <= 0.0) continue;

      e_xb.assign(members[a].size(), 0.0);
      for (std::size_t i = 0; i < members[a].size(); ++i)
        e_xb[i] = d_out_hat[members[a][i]] * v_ab / row_sum[a];
      e_ya.assign(members[b].size(), 0.0);
      double e_sum_b = 0.0;
      for (std::size_t j = 0; j < members[b].size(); ++j) {
        e_ya[j] = d_out_hat[members[b][j]] * v_ab / row_sum[b];
        e_sum_b += e_ya[j];
      }
      if (e_sum_b <= 0.0) continue;

      for (std::size_t i = 0; i < members[a].size(); ++i) {
        if (e_xb[i] <= 0.0) continue;
        for (std::size_t j = 0; j < members[b].size(); ++j) {
          if (e_ya[j] <= 0.0) continue;
          double p = detail::clamp_prob(e_xb[i] * e_ya[j] / e_sum_b);
          if (ns.bernoulli(p)) {
            NodeId u = members[a][i];
            NodeId v = members[b][j];
            edges.emplace_back(std::min(u, v), std::max(u, v));
          }
        }
      }
    }
  return edges;
}

namespace detail {

struct DeltaEntry {
  double value;
  NodeId node;
  int side;  // 0 = intra, 1 = inter
};

// Degree of u on one side under the current adjacency.
inline double side_degree(const std::vector<std::unordered_set<NodeId>>& adj,
                          const CommunityPartition& part, NodeId u, int side) {
  double h = 0.0;
  for (NodeId w : adj[u])
    if ((part.assignment[w] == part.assignment[u]) == (side == 0)) h += 1.0;
  return h;
}

}  // namespace detail

// Edge post-processing: drives the generated edge total toward the
// perturbed target by adding (or removing) edges at the nodes with the
// largest degree deficits (or surpluses), one side at a time. The loop
// stops the moment the running difference crosses zero, so the final count
// matches the rounded target unless candidates run out.
inline Snapshot post_process(const Snapshot& g, const DegreeVector& d_in_hat,
                             const DegreeVector& d_out_hat, double m_pert,
                             const CommunityPartition& part, NoiseSource& ns) {
  if (part.assignment.size() != g.num_nodes)
    throw ContractError("post_process: partition does not cover the graph");
  if (d_in_hat.size() != g.num_nodes || d_out_hat.size() != g.num_nodes)
    throw ContractError("post_process: degree vector size mismatch");

  long long target = std::llround(std::max(m_pert, 0.0));
  long long delta_m = target - static_cast<long long>(g.edges.size());
  if (delta_m == 0) return g;

  std::vector<std::unordered_set<NodeId>> adj(g.num_nodes);
  for (const auto& [u, v] : g.edges) {
    adj[u].insert(v);
    adj[v].insert(u);
  }
  auto members = community_members(part);

  // deviations of perturbed degree targets from the generated graph
  std::vector<detail::DeltaEntry> deltas;
  deltas.reserve(2 * static_cast<std::size_t>(g.num_nodes));
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    deltas.push_back(
        {d_in_hat[u] - detail::side_degree(adj, part, u, 0), u, 0});
    deltas.push_back(
        {d_out_hat[u] - detail::side_degree(adj, part, u, 1), u, 1});
  }

  bool adding = delta_m > 0;
  std::sort(deltas.begin(), deltas.end(),
            [adding](const detail::DeltaEntry& a, const detail::DeltaEntry& b) {
              if (a.value != b.value)
                return adding ? a.value > b.value : a.value < b.value;
              if (a.node != b.node) return a.node < b.node;
              return a.side < b.side;
            });

  for (const auto& entry : deltas) {
    if (delta_m == 0) break;
    NodeId u = entry.node;
    const DegreeVector& want = entry.side == 0 ? d_in_hat : d_out_hat;
    double have = detail::side_degree(adj, part, u, entry.side);

    long long m_u;
    std::vector<NodeId> candidates;
    if (adding) {
      m_u = std::llround(std::max(want[u] - have, 0.0));
      if (m_u <= 0) continue;
      if (entry.side == 0) {
        for (NodeId w : members[part.assignment[u]])
          if (w != u && !adj[u].count(w)) candidates.push_back(w);
      } else {
        for (NodeId w = 0; w < g.num_nodes; ++w)
          if (part.assignment[w] != part.assignment[u] && !adj[u].count(w))
            candidates.push_back(w);
      }
    } else {
      m_u = std::llround(std::max(have - want[u], 0.0));
      if (m_u <= 0) continue;
      for (NodeId w : adj[u])
        if ((part.assignment[w] == part.assignment[u]) == (entry.side == 0))
          candidates.push_back(w);
      std::sort(candidates.begin(), candidates.end());
    }

    long long steps = std::min<long long>(
        {m_u, std::llabs(delta_m), static_cast<long long>(candidates.size())});
    for (long long i = 0; i < steps; ++i) {
      std::size_t pick =
          static_cast<std::size_t>(i) +
          ns.uniform_int(candidates.size() - static_cast<std::size_t>(i));
      std::swap(candidates[i], candidates[pick]);
      NodeId w = candidates[i];
      if (adding) {
        adj[u].insert(w);
        adj[w].insert(u);
        --delta_m;
      } else {
        adj[u].erase(w);
        adj[w].erase(u);
        ++delta_m;
      }
    }
  }

  std::vector<Edge> edges;
  for (NodeId u = 0; u < g.num_nodes; ++u)
    for (NodeId w : adj[u])
      if (u < w) edges.emplace_back(u, w);
  return make_snapshot(g.timestamp, g.num_nodes, std::move(edges));
}

// Full phase-3 reconstruction from a perturbed profile.
inline Snapshot reconstruct(const Snapshot& original,
                            const CommunityPartition& part,
                            const PerturbedProfile& profile,
                            bool apply_post_processing, NoiseSource& ns) {
  std::vector<Edge> edges = gen_intra(part, profile.d_in_hat, ns);
  std::vector<Edge> inter = gen_inter(part, profile.d_out_hat, profile.v_hat, ns);
  edges.insert(edges.end(), inter.begin(), inter.end());
  Snapshot g = make_snapshot(original.timestamp, original.num_nodes,
                             std::move(edges));
  if (apply_post_processing)
    g = post_process(g, profile.d_in_hat, profile.d_out_hat, profile.m_pert,
                     part, ns);
  return g;
}

}  // namespace psgraph
