#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "psgraph/errors.hpp"
#include "psgraph/graph.hpp"

namespace psgraph {

enum class Metric {
  kEigenOverlap,
  kDegreeKl,
  kAssortativityRe,
  kDensityRe,
  kClusteringRe,
};

inline const std::vector<Metric>& all_metrics() {
  static const std::vector<Metric> metrics = {
      Metric::kEigenOverlap, Metric::kDegreeKl, Metric::kAssortativityRe,
      Metric::kDensityRe, Metric::kClusteringRe};
  return metrics;
}

inline std::string metric_name(Metric m) {
  switch (m) {
    case Metric::kEigenOverlap: return "eigen_overlap";
    case Metric::kDegreeKl: return "degree_kl";
    case Metric::kAssortativityRe: return "assortativity_re";
    case Metric::kDensityRe: return "density_re";
    case Metric::kClusteringRe: return "clustering_re";
  }
  throw ContractError("unknown metric");
}

inline std::optional<Metric> metric_from_name(const std::string& name) {
  for (Metric m : all_metrics())
    if (metric_name(m) == name) return m;
  return std::nullopt;
}

struct MetricValue {
  std::string name;
  double value = 0.0;
  int timestamp = 0;
  // Set when the original-side statistic was undefined and the value is an
  // absolute difference instead of a relative error.
  bool flagged = false;
};

// Principal-eigenvector centrality by power iteration (shift by +I keeps
// bipartite spectra from oscillating; the eigenvector is unchanged).
inline std::vector<double> eigenvector_centrality(const Snapshot& s,
                                                  int max_iters = 1000,
                                                  double tol = 1e-9) {
  std::vector<double> v(s.num_nodes,
                        s.num_nodes ? 1.0 / std::sqrt(double(s.num_nodes)) : 0.0);
  if (s.edges.empty()) return std::vector<double>(s.num_nodes, 0.0);
  auto adj = adjacency(s);
  std::vector<double> next(s.num_nodes, 0.0);
  for (int it = 0; it < max_iters; ++it) {
    for (NodeId u = 0; u < s.num_nodes; ++u) {
      double sum = v[u];
      for (NodeId w : adj[u]) sum += v[w];
      next[u] = sum;
    }
    double norm = 0.0;
    for (double x : next) norm += x * x;
    norm = std::sqrt(norm);
    double change = 0.0;
    for (NodeId u = 0; u < s.num_nodes; ++u) {
      next[u] /= norm;
      change += (next[u] - v[u]) * (next[u] - v[u]);
    }
    std::swap(v, next);
    if (std::sqrt(change) < tol) break;
  }
  return v;
}

// Overlap ratio of the top ceil(fraction * N) nodes by eigenvector
// centrality. Graphs without edges have no influential nodes: defined as 0.
inline double eigen_node_overlap(const Snapshot& orig, const Snapshot& syn,
                                 double fraction = 0.01) {
  if (orig.num_nodes != syn.num_nodes)
    throw ContractError("eigen_node_overlap: node universe mismatch");
  if (orig.num_nodes == 0) return 0.0;
  if (orig.edges.empty() || syn.edges.empty()) return 0.0;

  std::size_t k = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(orig.num_nodes)));
  k = std::max<std::size_t>(k, 1);

  auto top_k = [k](const Snapshot& s) {
    auto cent = eigenvector_centrality(s);
    std::vector<NodeId> idx(s.num_nodes);
    for (NodeId i = 0; i < s.num_nodes; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](NodeId a, NodeId b) {
      if (cent[a] != cent[b]) return cent[a] > cent[b];
      return a < b;
    });
    idx.resize(k);
    return std::unordered_set<NodeId>(idx.begin(), idx.end());
  };

  auto a = top_k(orig);
  auto b = top_k(syn);
  std::size_t common = 0;
  for (NodeId n : a) common += b.count(n);
  return static_cast<double>(common) / static_cast<double>(k);
}

// KL divergence of the degree histograms, with 1e-9 smoothing mass per bin
// so missing bins in the synthetic graph stay finite.
inline double degree_kl(const Snapshot& orig, const Snapshot& syn) {
  if (orig.num_nodes != syn.num_nodes)
    throw ContractError("degree_kl: node universe mismatch");
  if (orig.num_nodes == 0) return 0.0;
  constexpr double kSmoothing = 1e-9;

  auto histogram = [](const Snapshot& s, std::size_t bins) {
    std::vector<double> h(bins, 0.0);
    for (double d : degrees(s)) h[static_cast<std::size_t>(d)] += 1.0;
    return h;
  };

  std::size_t max_degree = 0;
  for (double d : degrees(orig))
    max_degree = std::max(max_degree, static_cast<std::size_t>(d));
  for (double d : degrees(syn))
    max_degree = std::max(max_degree, static_cast<std::size_t>(d));

  auto p = histogram(orig, max_degree + 1);
  auto q = histogram(syn, max_degree + 1);
  double p_total = 0.0, q_total = 0.0;
  for (std::size_t i = 0; i <= max_degree; ++i) {
    p[i] += kSmoothing;
    q[i] += kSmoothing;
    p_total += p[i];
    q_total += q[i];
  }
  double kl = 0.0;
  for (std::size_t i = 0; i <= max_degree; ++i)
    kl += (p[i] / p_total) * std::log((p[i] / p_total) / (q[i] / q_total));
  return kl;
}

// Pearson degree correlation over edge endpoints; nullopt when undefined
// (no edges or constant endpoint degrees).
inline std::optional<double> assortativity(const Snapshot& s) {
  if (s.edges.empty()) return std::nullopt;
  auto d = degrees(s);
  double n = 2.0 * static_cast<double>(s.edges.size());
  double sum_x = 0.0, sum_xx = 0.0, sum_xy = 0.0;
  for (const auto& [u, v] : s.edges) {
    sum_x += d[u] + d[v];
    sum_xx += d[u] * d[u] + d[v] * d[v];
    sum_xy += 2.0 * d[u] * d[v];
  }
  double mean = sum_x / n;
  double var = sum_xx / n - mean * mean;
  if (var <= 1e-12) return std::nullopt;
  return (sum_xy / n - mean * mean) / var;
}

inline double graph_density(const Snapshot& s) {
  if (s.num_nodes < 2) return 0.0;
  double n = static_cast<double>(s.num_nodes);
  return 2.0 * static_cast<double>(s.edges.size()) / (n * (n - 1.0));
}

// Global transitivity: 3 * triangles / connected triads.
inline double transitivity(const Snapshot& s) {
  auto adj = adjacency(s);
  std::vector<std::unordered_set<NodeId>> sets(s.num_nodes);
  for (NodeId u = 0; u < s.num_nodes; ++u)
    sets[u] = std::unordered_set<NodeId>(adj[u].begin(), adj[u].end());

  double triangles3 = 0.0;  // each triangle counted once per edge = 3 times
  for (const auto& [u, v] : s.edges) {
    const auto& small = adj[u].size() < adj[v].size() ? adj[u] : adj[v];
    const auto& other = adj[u].size() < adj[v].size() ? sets[v] : sets[u];
    for (NodeId w : small)
      if (w != u && w != v && other.count(w)) triangles3 += 1.0;
  }

  double triads = 0.0;
  for (const auto& neighbors : adj) {
    double deg = static_cast<double>(neighbors.size());
    triads += deg * (deg - 1.0) / 2.0;
  }
  if (triads <= 0.0) return 0.0;
  return triangles3 / triads;
}

namespace detail {
inline double relative_error(double orig, double syn) {
  return std::abs(orig - syn) / std::max(std::abs(orig), 1e-12);
}
}  // namespace detail

inline double density_re(const Snapshot& orig, const Snapshot& syn) {
  return detail::relative_error(graph_density(orig), graph_density(syn));
}

inline double clustering_re(const Snapshot& orig, const Snapshot& syn) {
  return detail::relative_error(transitivity(orig), transitivity(syn));
}

// Relative error of the assortativity coefficients. When the original value
// is undefined (zero-variance endpoint degrees) the record is flagged and
// carries the absolute difference instead, with undefined values taken as 0.
inline MetricValue assortativity_re(const Snapshot& orig, const Snapshot& syn,
                                    int timestamp = 0) {
  auto a_orig = assortativity(orig);
  auto a_syn = assortativity(syn);
  MetricValue out;
  out.name = metric_name(Metric::kAssortativityRe);
  out.timestamp = timestamp;
  if (!a_orig.has_value()) {
    out.flagged = true;
    out.value = std::abs(a_syn.value_or(0.0));
  } else {
    out.flagged = !a_syn.has_value();
    out.value = detail::relative_error(*a_orig, a_syn.value_or(0.0));
  }
  return out;
}

inline MetricValue evaluate_metric(Metric m, const Snapshot& orig,
                                   const Snapshot& syn, int timestamp) {
  switch (m) {
    case Metric::kAssortativityRe:
      return assortativity_re(orig, syn, timestamp);
    case Metric::kEigenOverlap:
      return {metric_name(m), eigen_node_overlap(orig, syn), timestamp, false};
    case Metric::kDegreeKl:
      return {metric_name(m), degree_kl(orig, syn), timestamp, false};
    case Metric::kDensityRe:
      return {metric_name(m), density_re(orig, syn), timestamp, false};
    case Metric::kClusteringRe:
      return {metric_name(m), clustering_re(orig, syn), timestamp, false};
  }
  throw ContractError("unknown metric");
}

}  // namespace psgraph
