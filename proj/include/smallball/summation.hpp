#pragma once

#include <span>

namespace smallball {

/// Neumaier's variant of Kahan summation. Accumulation order is the call
/// order, so results are reproducible for a fixed traversal.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> values) noexcept;

}  // namespace smallball
