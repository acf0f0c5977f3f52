#pragma once

#include <cstddef>
#include <vector>

namespace smallball {

/// Piecewise polynomial on [breakpoints.front(), breakpoints.back()], zero
/// outside. Piece i holds coefficients c0, c1, ... in the local variable
/// t = x - breakpoints[i].
class PiecewisePolynomial {
 public:
  PiecewisePolynomial(std::vector<double> breakpoints, std::vector<std::vector<double>> pieces);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<std::vector<double>>& pieces() const { return pieces_; }
  std::size_t piece_count() const { return pieces_.size(); }
  double support_lo() const { return breakpoints_.front(); }
  double support_hi() const { return breakpoints_.back(); }

  double operator()(double x) const;
  double integral() const;
  /// Integral over [a, b] (zero outside the support).
  double integral(double a, double b) const;

  /// Smallest value seen when sampling every piece at `per_piece` interior
  /// points plus both endpoints.
  double sampled_min(std::size_t per_piece = 64) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<std::vector<double>> pieces_;
};

/// Density 1/width on [-width/2, width/2].
PiecewisePolynomial centered_uniform(double width);

/// Exact density of X + U where X has density `p` and U is uniform on
/// [-width/2, width/2], independent. The degree grows by one.
PiecewisePolynomial convolve_with_uniform(const PiecewisePolynomial& p, double width);

}  // namespace smallball
