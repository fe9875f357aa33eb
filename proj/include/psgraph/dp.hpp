#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "psgraph/errors.hpp"

namespace psgraph {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Seeded randomness handle. All pipeline randomness flows through one of
// these per run, so runs are bit-reproducible. Workers must not share a
// source; derive independent children with child(salt) instead.
//
// In noiseless mode (debug only) laplace() returns 0 and the exponential
// mechanism degenerates to argmax; uniform draws are unaffected so graph
// sampling still works.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed, bool noiseless = false)
      : seed_(seed), noiseless_(noiseless), rng_(detail::splitmix64(seed)) {}

  bool noiseless() const { return noiseless_; }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  // Lap(scale) sample via inverse CDF. The uniform is shifted into (0, 1)
  // so the log never sees 0.
  double laplace(double scale) {
    if (noiseless_) return 0.0;
    double u = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    if (u < 0.5) return scale * std::log(2.0 * u);
    return -scale * std::log(2.0 * (1.0 - u));
  }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw ContractError("uniform_int: n must be positive");
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = rng_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[uniform_int(i)]);
  }

  // Independent child stream; deterministic function of (seed, salt).
  NoiseSource child(std::uint64_t salt) const {
    return NoiseSource(detail::splitmix64(seed_ ^ detail::splitmix64(salt + 1)),
                       noiseless_);
  }

 private:
  std::uint64_t seed_;
  bool noiseless_;
  std::mt19937_64 rng_;
};

// Laplace mechanism: value + Lap(sensitivity / epsilon).
inline double laplace_perturb(double value, double epsilon, double sensitivity,
                              NoiseSource& ns) {
  if (!(epsilon > 0.0)) throw ContractError("laplace_perturb: epsilon <= 0");
  if (!(sensitivity > 0.0))
    throw ContractError("laplace_perturb: sensitivity <= 0");
  return value + ns.laplace(sensitivity / epsilon);
}

// Exponential mechanism over scores: candidate i is drawn with probability
// proportional to exp(epsilon * score_i / (2 * sensitivity)). Stabilized by
// subtracting the max score before exponentiation. Returns the index.
inline std::size_t exponential_choose_index(const std::vector<double>& scores,
                                            double epsilon, double sensitivity,
                                            NoiseSource& ns) {
  if (scores.empty())
    throw ContractError("exponential_choose: empty candidate set");
  if (!(epsilon > 0.0))
    throw ContractError("exponential_choose: epsilon <= 0");
  if (!(sensitivity > 0.0))
    throw ContractError("exponential_choose: sensitivity <= 0");
  for (double s : scores)
    if (!std::isfinite(s))
      throw ContractError("exponential_choose: non-finite score");

  std::size_t argmax = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[argmax]) argmax = i;
  if (ns.noiseless()) return argmax;

  double max_score = scores[argmax];
  double factor = epsilon / (2.0 * sensitivity);
  std::vector<double> weights(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    weights[i] = std::exp(factor * (scores[i] - max_score));
    total += weights[i];
  }
  double r = ns.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    acc += weights[i];
    if (r < acc) return i;
  }
  return scores.size() - 1;
}

template <typename T>
const T& exponential_choose(const std::vector<T>& candidates,
                            const std::vector<double>& scores, double epsilon,
                            double sensitivity, NoiseSource& ns) {
  if (candidates.size() != scores.size())
    throw ContractError("exponential_choose: candidates/scores size mismatch");
  return candidates[exponential_choose_index(scores, epsilon, sensitivity, ns)];
}

namespace detail {

// Sum_a max(v_a + delta, 0) evaluated in O(log n) from a descending sort
// and prefix sums: entries with v_a > -delta contribute v_a + delta.
class NormSubObjective {
 public:
  explicit NormSubObjective(const std::vector<double>& v)
      : sorted_(v), prefix_(v.size() + 1, 0.0) {
    std::sort(sorted_.begin(), sorted_.end(), std::greater<double>());
    for (std::size_t i = 0; i < sorted_.size(); ++i)
      prefix_[i + 1] = prefix_[i] + sorted_[i];
    total_ = prefix_[sorted_.size()];
  }

  double total() const { return total_; }

  double adjusted_sum(double delta) const {
    // count of entries strictly greater than -delta
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), -delta,
                               std::greater<double>());
    std::size_t k = static_cast<std::size_t>(it - sorted_.begin());
    return prefix_[k] + delta * static_cast<double>(k);
  }

  double gap(double delta) const {
    return std::abs(adjusted_sum(delta) - total_);
  }

 private:
  std::vector<double> sorted_;
  std::vector<double> prefix_;
  double total_ = 0.0;
};

}  // namespace detail

// Consistency post-processing: finds the integer delta* minimizing
// |sum_a max(v_a + delta, 0) - sum_a v_a| and returns max(v_a + delta*, 0)
// element-wise. The search covers [-ceil(max|v|)-1, ceil(max|v|)+1]; outside
// that range the objective is monotone. Ties break to the smallest |delta|,
// negative before positive.
inline std::vector<double> normsub(const std::vector<double>& v) {
  if (v.empty()) return {};
  detail::NormSubObjective obj(v);

  double max_abs = 0.0;
  for (double x : v) max_abs = std::max(max_abs, std::abs(x));
  long long radius = static_cast<long long>(std::ceil(max_abs)) + 1;

  // Scan in tie-break preference order (0, -1, +1, -2, +2, ...) keeping the
  // first strict improvement, which realizes the tie-break exactly.
  long long best_delta = 0;
  double best_gap = obj.gap(0.0);
  for (long long mag = 1; mag <= radius; ++mag) {
    for (long long delta : {-mag, mag}) {
      double gap = obj.gap(static_cast<double>(delta));
      if (gap < best_gap) {
        best_gap = gap;
        best_delta = delta;
      }
    }
  }

  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = std::max(v[i] + static_cast<double>(best_delta), 0.0);
  return out;
}

}  // namespace psgraph
