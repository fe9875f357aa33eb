#pragma once

#include <string>
#include <vector>

#include "psgraph/errors.hpp"

namespace psgraph {

// Budget consumed at one timestamp, split by phase.
struct PrivacySpend {
  int timestamp = 0;
  double edge_count = 0.0;   // eps_e: perturbing the total edge count
  double community = 0.0;    // eps_c: community division
  double information = 0.0;  // eps_i: degree / cross-community perturbation

  double total() const { return edge_count + community + information; }
};

// Sliding-window accountant enforcing w-event privacy: the total spend of
// every window of w consecutive timestamps must stay within the cap.
class WindowAccountant {
 public:
  static constexpr double kTolerance = 1e-9;

  WindowAccountant(int window, double cap) : window_(window), cap_(cap) {
    if (window < 1) throw ContractError("accountant: window must be >= 1");
    if (!(cap > 0.0)) throw ContractError("accountant: cap must be positive");
  }

  int window() const { return window_; }
  double cap() const { return cap_; }
  const std::vector<PrivacySpend>& ledger() const { return ledger_; }

  // Appends the spend for the next timestamp. Throws BudgetError if the
  // window ending at this timestamp would exceed the cap.
  void record(const PrivacySpend& spend) {
    int expected = static_cast<int>(ledger_.size()) + 1;
    if (spend.timestamp != expected)
      throw ContractError("accountant: expected timestamp " +
                          std::to_string(expected) + ", got " +
                          std::to_string(spend.timestamp));
    if (spend.edge_count < 0.0 || spend.community < 0.0 ||
        spend.information < 0.0)
      throw ContractError("accountant: negative spend part");

    double window_sum = spend.total();
    std::size_t have = ledger_.size();
    for (std::size_t back = 1;
         back < static_cast<std::size_t>(window_) && back <= have; ++back)
      window_sum += ledger_[have - back].total();
    if (window_sum > cap_ + kTolerance)
      throw BudgetError("w-event budget violation at timestamp " +
                        std::to_string(spend.timestamp) + ": window spend " +
                        std::to_string(window_sum) + " exceeds cap " +
                        std::to_string(cap_));
    ledger_.push_back(spend);
  }

  // Total spend of the window of w timestamps ending at `end` (1-based).
  double window_sum_ending_at(int end) const {
    if (end < 1 || end > static_cast<int>(ledger_.size()))
      throw ContractError("accountant: window end out of range");
    double sum = 0.0;
    for (int t = std::max(1, end - window_ + 1); t <= end; ++t)
      sum += ledger_[t - 1].total();
    return sum;
  }

 private:
  int window_;
  double cap_;
  std::vector<PrivacySpend> ledger_;
};

}  // namespace psgraph
