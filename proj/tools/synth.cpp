// Command-line front end: synthesizes a differentially private stream from
// a temporal edge list (or per-snapshot files), evaluates utility metrics
// against the original, and writes a CSV report.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psgraph/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

std::vector<psgraph::Metric> parse_metric_list(const std::string& list) {
  std::vector<psgraph::Metric> metrics;
  std::stringstream ss(list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    auto m = psgraph::metric_from_name(token);
    if (!m.has_value())
      throw psgraph::ConfigError("unknown metric: " + token);
    metrics.push_back(*m);
  }
  if (metrics.empty()) throw psgraph::ConfigError("empty metric list");
  return metrics;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"w-event differentially private streaming graph synthesis"};
  app.name("synth");

  psgraph::RunConfig cfg;
  std::string format = "temporal";
  std::string variant = "psgraph";
  std::string metric_list;
  long long seed = 1;

  app.add_option("--input", cfg.input_path, "input edge stream")->required();
  app.add_option("--format", format,
                 "input format: temporal ('u v t' lines) or snapshots "
                 "(manifest of per-snapshot files)")
      ->check(CLI::IsMember({"temporal", "snapshots"}));
  app.add_option("--epsilon", cfg.epsilon, "total privacy budget per window")
      ->required();
  app.add_option("--window", cfg.window, "w-event window size (default 5)");
  app.add_option("--threshold-mult", cfg.threshold_mult,
                 "re-partition threshold as a multiple of the node count");
  app.add_option("--repeats", cfg.repeats, "seeded repetitions (default 10)");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--variant", variant,
                 "psgraph | r1 | ablation1..4 | random-edges");
  app.add_option("--metrics", metric_list,
                 "comma-separated metric subset (default: all)");
  app.add_option("--out", cfg.out_path, "output CSV path")->required();
  app.add_option("--emit-graphs", cfg.emit_graphs_dir,
                 "directory for synthetic streams in temporal format");
  app.add_flag("--noiseless", cfg.noiseless,
               "debug: stub all noise to zero (requires --unsafe-debug)");
  app.add_flag("--unsafe-debug", cfg.unsafe_debug,
               "acknowledge that debug output is not private");
  app.add_option("--bucket-width", cfg.bucket_width,
                 "temporal format: bucket raw timestamps into fixed-width "
                 "windows (0 = one snapshot per distinct value)");
  app.add_option("--eps-e-cap", cfg.eps_e_cap,
                 "cap on the per-timestamp edge-count budget (default 0.01)");
  app.add_option("--group-size", cfg.group_size,
                 "supernode group size for community division (default 20)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    cfg.format = format == "temporal" ? psgraph::InputFormat::kTemporal
                                      : psgraph::InputFormat::kSnapshots;
    auto v = psgraph::variant_from_name(variant);
    if (!v.has_value()) throw psgraph::ConfigError("unknown variant: " + variant);
    cfg.variant = *v;
    if (!metric_list.empty()) cfg.metrics = parse_metric_list(metric_list);
    if (seed < 0) throw psgraph::ConfigError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.validate();
  } catch (const psgraph::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const psgraph::ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    psgraph::MetricsReport report = psgraph::run_experiment(cfg);
    for (const auto& a : report.aggregates)
      std::cout << a.metric << ": mean " << a.mean << ", std " << a.stddev
                << "\n";
  } catch (const psgraph::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const psgraph::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
