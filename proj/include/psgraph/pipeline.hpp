#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "psgraph/accountant.hpp"
#include "psgraph/community.hpp"
#include "psgraph/dp.hpp"
#include "psgraph/errors.hpp"
#include "psgraph/graph.hpp"
#include "psgraph/metrics.hpp"
#include "psgraph/perturbation.hpp"
#include "psgraph/reconstruction.hpp"
#include "psgraph/stream_io.hpp"

namespace psgraph {

// Default cap on the edge-count perturbation budget per timestamp. The true
// edge count is usually large and has sensitivity 1, so a small slice is
// enough; overridable from the run configuration.
inline constexpr double kDefaultEpsECap = 0.01;

// Per-timestamp budget split. eps_e + eps_c + eps_i = eps_s and
// eps_i1 + eps_i2 = eps_i, both exact up to floating-point rounding.
struct BudgetPlan {
  double eps_total = 0.0;
  int window = 1;
  bool repartitioning = false;
  double eps_s = 0.0;
  double eps_e = 0.0;
  double eps_r = 0.0;
  double eps_c = 0.0;
  double eps_i = 0.0;
  double eps_i1 = 0.0;
  double eps_i2 = 0.0;
};

inline BudgetPlan plan_budget(double eps_total, int window,
                              bool repartitioning,
                              double eps_e_cap = kDefaultEpsECap) {
  if (!(eps_total > 0.0)) throw ContractError("plan_budget: eps_total <= 0");
  if (window < 1) throw ContractError("plan_budget: window < 1");
  if (!(eps_e_cap > 0.0)) throw ContractError("plan_budget: eps_e_cap <= 0");

  BudgetPlan p;
  p.eps_total = eps_total;
  p.window = window;
  p.repartitioning = repartitioning;
  p.eps_s = eps_total / window;
  p.eps_e = std::min(eps_e_cap, 0.5 * p.eps_s);
  p.eps_r = p.eps_s - p.eps_e;
  if (repartitioning) {
    p.eps_c = 0.5 * p.eps_r;
    p.eps_i = p.eps_r - p.eps_c;
  } else {
    p.eps_c = 0.0;
    p.eps_i = p.eps_r;
  }
  p.eps_i1 = 0.5 * p.eps_i;
  p.eps_i2 = p.eps_i - p.eps_i1;
  return p;
}

enum class Variant {
  kPsgraph,
  kR1,
  kAblation1,
  kAblation2,
  kAblation3,
  kAblation4,
  kRandomEdges,
};

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kPsgraph: return "psgraph";
    case Variant::kR1: return "r1";
    case Variant::kAblation1: return "ablation1";
    case Variant::kAblation2: return "ablation2";
    case Variant::kAblation3: return "ablation3";
    case Variant::kAblation4: return "ablation4";
    case Variant::kRandomEdges: return "random-edges";
  }
  throw ContractError("unknown variant");
}

inline std::optional<Variant> variant_from_name(const std::string& name) {
  for (Variant v : {Variant::kPsgraph, Variant::kR1, Variant::kAblation1,
                    Variant::kAblation2, Variant::kAblation3,
                    Variant::kAblation4, Variant::kRandomEdges})
    if (variant_name(v) == name) return v;
  return std::nullopt;
}

// Which pipeline steps a variant enables. R1 re-partitions every timestamp;
// fusion can then never trigger because no partition is ever reused.
struct VariantFlags {
  bool adaptive = true;  // community judgment (false forces re-partitioning)
  bool fusion = true;
  bool post_processing = true;
};

inline VariantFlags variant_flags(Variant v) {
  switch (v) {
    case Variant::kPsgraph: return {true, true, true};
    case Variant::kR1: return {false, true, true};
    case Variant::kAblation1: return {true, false, false};
    case Variant::kAblation2: return {true, true, false};
    case Variant::kAblation3: return {true, false, true};
    case Variant::kAblation4: return {true, true, true};
    case Variant::kRandomEdges: return {true, true, true};
  }
  throw ContractError("unknown variant");
}

enum class InputFormat { kTemporal, kSnapshots };

struct RunConfig {
  std::string input_path;
  InputFormat format = InputFormat::kTemporal;
  double epsilon = 1.0;
  int window = 5;
  double threshold_mult = 1.0;
  int repeats = 10;
  std::uint64_t seed = 1;
  Variant variant = Variant::kPsgraph;
  std::vector<Metric> metrics = all_metrics();
  std::string out_path;
  std::string emit_graphs_dir;
  bool noiseless = false;
  bool unsafe_debug = false;
  long long bucket_width = 0;  // temporal format: 0 = distinct raw values
  double eps_e_cap = kDefaultEpsECap;
  std::uint32_t group_size = kDefaultGroupSize;

  void validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (window < 1) throw ConfigError("window must be >= 1");
    if (repeats < 1) throw ConfigError("repeats must be >= 1");
    if (!(threshold_mult > 0.0))
      throw ConfigError("threshold multiplier must be positive");
    if (!(eps_e_cap > 0.0)) throw ConfigError("eps-e-cap must be positive");
    if (group_size < 1) throw ConfigError("group size must be >= 1");
    if (metrics.empty()) throw ConfigError("metric list is empty");
    if (noiseless && !unsafe_debug)
      throw ConfigError("--noiseless is refused without --unsafe-debug");
  }
};

struct SynthesisResult {
  std::vector<SyntheticSnapshot> snapshots;
  std::vector<PrivacySpend> ledger;
  std::vector<DecisionKind> decisions;
};

// Runs the full per-timestamp pipeline: perturb the edge count, decide
// between re-partitioning and reuse, split the remaining budget, perturb
// and (on reuse) fuse the extracted information, then reconstruct. The
// accountant checks every sliding window; by construction the per-timestamp
// spend is always eps_s, so a violation indicates a bug.
inline SynthesisResult synthesize_stream(const GraphStream& stream,
                                         const RunConfig& cfg,
                                         NoiseSource& ns) {
  const VariantFlags flags = variant_flags(cfg.variant);
  WindowAccountant accountant(cfg.window, cfg.epsilon);
  SynthesisResult result;

  std::optional<CommunityPartition> prev_partition;
  std::optional<PerturbedProfile> prev_profile;
  double prev_m_pert = 0.0;

  int t = 0;
  for (const Snapshot& s : stream.snapshots) {
    ++t;
    if (s.timestamp != t)
      throw ContractError("synthesize_stream: timestamps must be 1..T");
    BudgetPlan repart_plan =
        plan_budget(cfg.epsilon, cfg.window, true, cfg.eps_e_cap);
    double m_pert = laplace_perturb(static_cast<double>(edge_count(s)),
                                    repart_plan.eps_e, 1.0, ns);

    CommunityDecision decision;
    if (t == 1) {
      decision = determine(t, m_pert, 0.0, s, nullptr, 0.0, repart_plan.eps_c,
                           cfg.group_size, ns);
    } else if (!flags.adaptive) {
      decision.kind = DecisionKind::kRepartition;
      decision.delta_e = std::abs(m_pert - prev_m_pert);
      decision.partition = comm_div(s, repart_plan.eps_c, cfg.group_size, ns);
    } else {
      double threshold = cfg.threshold_mult * static_cast<double>(node_count(s));
      decision = determine(t, m_pert, prev_m_pert, s, &*prev_partition,
                           threshold, repart_plan.eps_c, cfg.group_size, ns);
    }

    bool repartitioned = decision.kind != DecisionKind::kReuse;
    BudgetPlan plan =
        plan_budget(cfg.epsilon, cfg.window, repartitioned, cfg.eps_e_cap);
    if (!repartitioned && !(plan.eps_i > 0.5 * plan.eps_r))
      throw ContractError("reuse must leave more than half the remaining "
                          "budget for information perturbation");

    auto [profile, v] = extract(s, decision.partition);
    PerturbedProfile pert = perturb(profile, v, plan.eps_i, plan.eps_i1, ns);
    pert.m_pert = m_pert;
    if (decision.kind == DecisionKind::kReuse && flags.fusion &&
        prev_profile.has_value())
      pert = fuse(pert, *prev_profile, true);

    Snapshot g =
        reconstruct(s, decision.partition, pert, flags.post_processing, ns);

    accountant.record({t, plan.eps_e, plan.eps_c, plan.eps_i});
    result.snapshots.push_back({std::move(g), cfg.seed, variant_name(cfg.variant)});
    result.decisions.push_back(decision.kind);

    prev_partition = std::move(decision.partition);
    prev_profile = std::move(pert);
    prev_m_pert = m_pert;
  }
  result.ledger = accountant.ledger();
  return result;
}

// Naive baseline: spends the whole per-timestamp budget on the edge count
// and places that many uniformly random distinct edges (truncated at the
// complete graph).
inline SynthesisResult random_edges_baseline(const GraphStream& stream,
                                             const RunConfig& cfg,
                                             NoiseSource& ns) {
  WindowAccountant accountant(cfg.window, cfg.epsilon);
  SynthesisResult result;
  double eps_s = cfg.epsilon / cfg.window;

  for (const Snapshot& s : stream.snapshots) {
    double m_pert = laplace_perturb(static_cast<double>(edge_count(s)), eps_s,
                                    1.0, ns);
    long long want = std::llround(std::max(m_pert, 0.0));
    unsigned long long n = s.num_nodes;
    unsigned long long total_pairs = n < 2 ? 0 : n * (n - 1) / 2;
    unsigned long long k =
        std::min<unsigned long long>(static_cast<unsigned long long>(want),
                                     total_pairs);

    std::vector<Edge> edges;
    if (k == total_pairs) {
      for (NodeId u = 0; u < s.num_nodes; ++u)
        for (NodeId v = u + 1; v < s.num_nodes; ++v) edges.emplace_back(u, v);
    } else if (k > total_pairs / 2) {
      // dense request: shuffle all pairs and take a prefix
      std::vector<Edge> all;
      all.reserve(total_pairs);
      for (NodeId u = 0; u < s.num_nodes; ++u)
        for (NodeId v = u + 1; v < s.num_nodes; ++v) all.emplace_back(u, v);
      for (unsigned long long i = 0; i < k; ++i) {
        std::size_t pick = static_cast<std::size_t>(i) +
                           ns.uniform_int(all.size() - static_cast<std::size_t>(i));
        std::swap(all[i], all[pick]);
        edges.push_back(all[i]);
      }
    } else {
      std::unordered_set<std::uint64_t> seen;
      while (edges.size() < k) {
        NodeId u = static_cast<NodeId>(ns.uniform_int(n));
        NodeId v = static_cast<NodeId>(ns.uniform_int(n));
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
        if (seen.insert(key).second) edges.emplace_back(u, v);
      }
    }

    accountant.record({s.timestamp, eps_s, 0.0, 0.0});
    result.snapshots.push_back(
        {make_snapshot(s.timestamp, s.num_nodes, std::move(edges)), cfg.seed,
         variant_name(cfg.variant)});
    result.decisions.push_back(DecisionKind::kInitial);
  }
  result.ledger = accountant.ledger();
  return result;
}

struct MetricRecord {
  int run = 0;
  std::uint64_t seed = 0;
  int timestamp = 0;
  std::string metric;
  double value = 0.0;
  bool flagged = false;
};

struct MetricAggregate {
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
};

struct MetricsReport {
  std::vector<MetricRecord> records;
  std::vector<MetricAggregate> aggregates;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::uint64_t run_seed(std::uint64_t base_seed, int run) {
  return splitmix64(base_seed ^
                    splitmix64(static_cast<std::uint64_t>(run) + 1));
}

}  // namespace detail

// CSV schema: run,seed,timestamp,variant,epsilon,window,metric,value.
// Aggregate rows use run = -1, timestamp = -1 and suffix the metric name
// with _mean / _std.
inline void write_csv(std::ostream& out, const MetricsReport& report,
                      const RunConfig& cfg) {
  out << "run,seed,timestamp,variant,epsilon,window,metric,value\n";
  std::string prefix_tail = "," + variant_name(cfg.variant) + "," +
                            detail::format_double(cfg.epsilon) + "," +
                            std::to_string(cfg.window) + ",";
  for (const auto& r : report.records)
    out << r.run << ',' << r.seed << ',' << r.timestamp << prefix_tail
        << r.metric << ',' << detail::format_double(r.value) << '\n';
  for (const auto& a : report.aggregates) {
    out << -1 << ',' << cfg.seed << ',' << -1 << prefix_tail << a.metric
        << "_mean," << detail::format_double(a.mean) << '\n';
    out << -1 << ',' << cfg.seed << ',' << -1 << prefix_tail << a.metric
        << "_std," << detail::format_double(a.stddev) << '\n';
  }
}

inline GraphStream load_stream(const RunConfig& cfg) {
  if (cfg.format == InputFormat::kTemporal)
    return parse_temporal_edges(read_file(cfg.input_path),
                                WindowRule{cfg.bucket_width});
  return parse_snapshot_manifest(cfg.input_path);
}

namespace detail {
struct RunOutput {
  std::vector<MetricRecord> records;
  std::vector<double> means;  // per metric, averaged over timestamps
};
}  // namespace detail

// Seeded repetitions of the synthesis pipeline plus per-timestamp metric
// evaluation. Repeats run in parallel, each on an independent child noise
// source and accountant; outputs are joined in run order so the report is
// deterministic. Aggregates follow the reporting convention of averaging
// each run across timestamps first, then taking mean and standard deviation
// across runs.
inline MetricsReport run_experiment(const RunConfig& cfg,
                                    const GraphStream& stream) {
  cfg.validate();
  std::size_t t_count = stream.snapshots.size();
  if (!cfg.emit_graphs_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.emit_graphs_dir, ec);
    if (ec) throw IoError("cannot create " + cfg.emit_graphs_dir);
  }

  auto run_one = [&](int run) {
    std::uint64_t seed = detail::run_seed(cfg.seed, run);
    NoiseSource ns(seed, cfg.noiseless);
    SynthesisResult result = cfg.variant == Variant::kRandomEdges
                                 ? random_edges_baseline(stream, cfg, ns)
                                 : synthesize_stream(stream, cfg, ns);
    detail::RunOutput out;
    out.means.assign(cfg.metrics.size(), 0.0);
    for (std::size_t ti = 0; ti < t_count; ++ti) {
      const Snapshot& orig = stream.snapshots[ti];
      const Snapshot& syn = result.snapshots[ti].graph;
      for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi) {
        MetricValue mv =
            evaluate_metric(cfg.metrics[mi], orig, syn, orig.timestamp);
        out.records.push_back(
            {run, seed, mv.timestamp, mv.name, mv.value, mv.flagged});
        out.means[mi] += mv.value;
      }
    }
    if (t_count > 0)
      for (double& m : out.means) m /= static_cast<double>(t_count);

    if (!cfg.emit_graphs_dir.empty()) {
      GraphStream synthetic;
      for (auto& snap : result.snapshots)
        synthetic.snapshots.push_back(snap.graph);
      std::string path =
          cfg.emit_graphs_dir + "/run_" + std::to_string(run) + ".txt";
      std::ofstream file(path, std::ios::binary);
      if (!file) throw IoError("cannot write " + path);
      file << serialize_temporal(synthetic);
      if (!file) throw IoError("error writing " + path);
    }
    return out;
  };

  std::vector<std::future<detail::RunOutput>> futures;
  futures.reserve(cfg.repeats);
  for (int run = 0; run < cfg.repeats; ++run)
    futures.push_back(std::async(std::launch::async, run_one, run));

  MetricsReport report;
  std::vector<std::vector<double>> run_means(
      cfg.metrics.size(), std::vector<double>(cfg.repeats, 0.0));
  for (int run = 0; run < cfg.repeats; ++run) {
    detail::RunOutput out = futures[run].get();
    report.records.insert(report.records.end(), out.records.begin(),
                          out.records.end());
    for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi)
      run_means[mi][run] = out.means[mi];
  }

  for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi) {
    double mean = 0.0;
    for (double m : run_means[mi]) mean += m;
    mean /= static_cast<double>(cfg.repeats);
    double var = 0.0;
    for (double m : run_means[mi]) var += (m - mean) * (m - mean);
    var /= static_cast<double>(cfg.repeats);
    report.aggregates.push_back(
        {metric_name(cfg.metrics[mi]), mean, std::sqrt(var)});
  }

  if (!cfg.out_path.empty()) {
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + cfg.out_path);
    write_csv(out, report, cfg);
    if (!out) throw IoError("error writing " + cfg.out_path);
  }
  return report;
}

inline MetricsReport run_experiment(const RunConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, load_stream(cfg));
}

}  // namespace psgraph
