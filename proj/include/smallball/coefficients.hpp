#pragma once

#include <cstddef>
#include <vector>

namespace smallball {

/// k x n real matrix a[j][m] mapping n integration variables to the
/// arguments of k functions: the argument of f_j is sum_m a[j][m] x_m.
class CoefficientMatrix {
 public:
  CoefficientMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  CoefficientMatrix(std::vector<std::vector<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t j, std::size_t m) const { return entries_[j * cols_ + m]; }
  const std::vector<double>& entries() const { return entries_; }

  bool operator==(const CoefficientMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// (n+1) x n matrix: identity on top, a row of ones below. Turns the
/// probability that x_1 + ... + x_n lands in S into a product integral of
/// p_1(x_1) ... p_n(x_n) 1_S(x_1 + ... + x_n).
CoefficientMatrix theorem3_coefficients(std::size_t n);

}  // namespace smallball
