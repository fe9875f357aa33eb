#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "psgraph/accountant.hpp"
#include "psgraph/dp.hpp"

using namespace psgraph;

namespace {

// Brute-force reference: scans every integer delta in [-radius, radius] in
// tie-break preference order. Independent of the library implementation.
struct NormSubOracle {
  long long delta = 0;
  double gap = 0.0;
};

NormSubOracle normsub_oracle(const std::vector<double>& v, long long radius) {
  double total = 0.0;
  for (double x : v) total += x;
  auto gap_of = [&](long long delta) {
    double sum = 0.0;
    for (double x : v) sum += std::max(x + static_cast<double>(delta), 0.0);
    return std::abs(sum - total);
  };
  NormSubOracle best{0, gap_of(0)};
  for (long long mag = 1; mag <= radius; ++mag)
    for (long long delta : {-mag, mag})
      if (double g = gap_of(delta); g < best.gap) best = {delta, g};
  return best;
}

double sample_variance(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return var / (xs.size() - 1);
}

double laplace_cdf(double x, double beta) {
  return x < 0 ? 0.5 * std::exp(x / beta) : 1.0 - 0.5 * std::exp(-x / beta);
}

}  // namespace

TEST_CASE("laplace_perturb is the identity under a zero-noise stub") {
  NoiseSource ns(7, /*noiseless=*/true);
  CHECK(laplace_perturb(5.0, 1.0, 1.0, ns) == 5.0);
}

TEST_CASE("laplace_perturb contract violations") {
  NoiseSource ns(7);
  CHECK_THROWS_AS(laplace_perturb(0.0, 0.0, 1.0, ns), ContractError);
  CHECK_THROWS_AS(laplace_perturb(0.0, -1.0, 1.0, ns), ContractError);
  CHECK_THROWS_AS(laplace_perturb(0.0, 1.0, 0.0, ns), ContractError);
}

TEST_CASE("laplace sample variance matches 2 beta^2") {
  NoiseSource ns(42);
  std::vector<double> xs(100000);
  for (double& x : xs) x = laplace_perturb(0.0, 1.0, 1.0, ns);
  CHECK_THAT(sample_variance(xs),
             Catch::Matchers::WithinRel(2.0, 0.10));  // Var(Lap(1)) = 2
}

TEST_CASE("laplace perturbation is unbiased at tiny epsilon") {
  NoiseSource ns(43);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += laplace_perturb(100.0, 0.01, 1.0, ns);
  CHECK_THAT(sum / n, Catch::Matchers::WithinAbs(100.0, 3.0));
}

TEST_CASE("laplace samples pass a KS check against the CDF") {
  const double beta = 2.0 / 0.5;  // sensitivity 2, epsilon 0.5
  NoiseSource ns(44);
  const int n = 100000;
  std::vector<double> xs(n);
  for (double& x : xs) x = ns.laplace(beta);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    double f = laplace_cdf(xs[i], beta);
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - f));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("identical seeds reproduce identical draw sequences") {
  NoiseSource a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.laplace(1.0) == b.laplace(1.0));
  NoiseSource c = a.child(5), d = b.child(5);
  for (int i = 0; i < 100; ++i) CHECK(c.uniform() == d.uniform());
}

TEST_CASE("exponential mechanism is symmetric for equal scores") {
  NoiseSource ns(1);
  int first = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i)
    if (exponential_choose_index({1.0, 1.0}, 1.0, 1.0, ns) == 0) ++first;
  CHECK_THAT(static_cast<double>(first) / trials,
             Catch::Matchers::WithinAbs(0.5, 0.02));
}

TEST_CASE("exponential mechanism concentrates on dominant scores") {
  // exp(eps * 10 / 2) : exp(0) = e^10 : 1, so the winner takes >= 0.999
  NoiseSource ns(2);
  int second = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i)
    if (exponential_choose_index({0.0, 10.0}, 2.0, 1.0, ns) == 1) ++second;
  CHECK(second >= static_cast<int>(0.999 * trials));
}

TEST_CASE("exponential mechanism edge cases") {
  NoiseSource ns(3);
  CHECK(exponential_choose_index({4.2}, 1.0, 1.0, ns) == 0);
  CHECK_THROWS_AS(exponential_choose_index({}, 1.0, 1.0, ns), ContractError);
  std::vector<int> candidates{10, 20};
  CHECK_THROWS_AS(
      exponential_choose(candidates, {1.0}, 1.0, 1.0, ns), ContractError);

  // stabilization: huge score spans must not overflow
  for (int i = 0; i < 100; ++i) {
    std::size_t pick =
        exponential_choose_index({-1e6, 0.0, 1e6}, 1.0, 1.0, ns);
    CHECK(pick == 2);
  }
}

TEST_CASE("exponential mechanism degenerates to argmax when noiseless") {
  NoiseSource ns(4, /*noiseless=*/true);
  CHECK(exponential_choose_index({0.5, 3.0, 1.0}, 1.0, 1.0, ns) == 1);
}

TEST_CASE("normsub worked examples") {
  CHECK(normsub({3, -2, 4}) == std::vector<double>{2, 0, 3});  // delta* = -1
  CHECK(normsub({1, 2}) == std::vector<double>{1, 2});         // delta* = 0
  CHECK(normsub({-1, -1}) == std::vector<double>{0, 0});       // delta* = 0
  CHECK(normsub({}).empty());
}

TEST_CASE("normsub matches the brute-force oracle") {
  NoiseSource ns(99);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t len = 1 + ns.uniform_int(10);
    std::vector<double> v(len);
    for (double& x : v)
      x = static_cast<double>(static_cast<long long>(ns.uniform_int(11)) - 5);
    auto oracle = normsub_oracle(v, 10);
    auto out = normsub(v);

    double total = 0.0, adjusted = 0.0;
    for (double x : v) total += x;
    for (double x : out) {
      CHECK(x >= 0.0);
      adjusted += x;
    }
    CHECK(std::abs(adjusted - total) == oracle.gap);
  }
}

TEST_CASE("normsub output is non-negative for real-valued inputs") {
  NoiseSource ns(100);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + ns.uniform_int(20));
    for (double& x : v) x = ns.laplace(3.0);
    for (double x : normsub(v)) CHECK(x >= 0.0);
  }
}

TEST_CASE("accountant accepts spends that fit every window") {
  WindowAccountant acct(5, 2.5);
  for (int t = 1; t <= 5; ++t) acct.record({t, 0.5, 0.0, 0.0});
  CHECK_NOTHROW(acct.record({6, 0.5, 0.0, 0.0}));  // window slides
  CHECK(acct.window_sum_ending_at(6) == Catch::Approx(2.5));
}

TEST_CASE("accountant raises on a window violation") {
  WindowAccountant acct(2, 1.0);
  acct.record({1, 0.6, 0.0, 0.0});
  CHECK_THROWS_AS(acct.record({2, 0.6, 0.0, 0.0}), BudgetError);
}

TEST_CASE("accountant degenerates to event-level at w = 1") {
  WindowAccountant acct(1, 1.0);
  for (int t = 1; t <= 10; ++t) CHECK_NOTHROW(acct.record({t, 1.0, 0.0, 0.0}));
}

TEST_CASE("accountant rejects out-of-order and negative spends") {
  WindowAccountant acct(3, 1.0);
  CHECK_THROWS_AS(acct.record({2, 0.1, 0.0, 0.0}), ContractError);
  CHECK_THROWS_AS(acct.record({1, -0.1, 0.0, 0.0}), ContractError);
}

TEST_CASE("per-timestamp caps never trip the accountant") {
  NoiseSource ns(7);
  for (int trial = 0; trial < 50; ++trial) {
    int w = 1 + static_cast<int>(ns.uniform_int(8));
    double eps = 0.5 + ns.uniform();
    WindowAccountant acct(w, eps);
    double eps_s = eps / w;
    for (int t = 1; t <= 100; ++t) {
      double a = ns.uniform() * eps_s;
      double b = ns.uniform() * (eps_s - a);
      CHECK_NOTHROW(acct.record({t, a, b, eps_s - a - b}));
    }
  }
}
