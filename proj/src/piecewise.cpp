#include "smallball/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smallball/error.hpp"
#include "smallball/summation.hpp"

namespace smallball {
namespace {

double horner(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
  return acc;
}

// Coefficients of q(t) = p(t + shift).
std::vector<double> taylor_shift(const std::vector<double>& c, double shift) {
  std::vector<double> out(c.begin(), c.end());
  const std::size_t n = out.size();
  // Repeated synthetic division (Horner shift), O(n^2).
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = n - 1; k > i; --k) out[k - 1] += shift * out[k];
  }
  return out;
}

}  // namespace

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> breakpoints,
                                         std::vector<std::vector<double>> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (breakpoints_.size() < 2) throw PreconditionError("piecewise polynomial needs two breakpoints");
  if (pieces_.size() + 1 != breakpoints_.size()) {
    throw ShapeError("piecewise polynomial needs one piece per breakpoint interval");
  }
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) {
      throw PreconditionError("piecewise polynomial breakpoints must be strictly increasing");
    }
  }
  for (auto& p : pieces_) {
    if (p.empty()) p.push_back(0.0);
  }
}

double PiecewisePolynomial::operator()(double x) const {
  if (x < breakpoints_.front() || x > breakpoints_.back()) return 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin());
  i = std::min(i == 0 ? 0 : i - 1, pieces_.size() - 1);
  return horner(pieces_[i], x - breakpoints_[i]);
}

double PiecewisePolynomial::integral() const {
  CompensatedSum acc;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double len = breakpoints_[i + 1] - breakpoints_[i];
    double power = len;
    for (std::size_t k = 0; k < pieces_[i].size(); ++k) {
      acc.add(pieces_[i][k] * power / static_cast<double>(k + 1));
      power *= len;
    }
  }
  return acc.value();
}

double PiecewisePolynomial::integral(double a, double b) const {
  if (!(a < b)) return 0.0;
  CompensatedSum acc;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double x0 = breakpoints_[i];
    const double lo = std::max(a, x0);
    const double hi = std::min(b, breakpoints_[i + 1]);
    if (!(lo < hi)) continue;
    const double t0 = lo - x0;
    const double t1 = hi - x0;
    double p0 = t0, p1 = t1;
    for (std::size_t k = 0; k < pieces_[i].size(); ++k) {
      acc.add(pieces_[i][k] * (p1 - p0) / static_cast<double>(k + 1));
      p0 *= t0;
      p1 *= t1;
    }
  }
  return acc.value();
}

double PiecewisePolynomial::sampled_min(std::size_t per_piece) const {
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double len = breakpoints_[i + 1] - breakpoints_[i];
    for (std::size_t s = 0; s <= per_piece + 1; ++s) {
      const double t = len * static_cast<double>(s) / static_cast<double>(per_piece + 1);
      lowest = std::min(lowest, horner(pieces_[i], t));
    }
  }
  return lowest;
}

PiecewisePolynomial centered_uniform(double width) {
  if (!(width > 0.0)) throw PreconditionError("uniform width must be positive");
  return PiecewisePolynomial({-0.5 * width, 0.5 * width}, {{1.0 / width}});
}

PiecewisePolynomial convolve_with_uniform(const PiecewisePolynomial& p, double width) {
  if (!(width > 0.0)) throw PreconditionError("uniform width must be positive");
  const auto& b = p.breakpoints();
  const std::size_t m = p.piece_count();

  // Antiderivative pieces A_i(s) = C_i + sum_k c_k s^(k+1) / (k+1).
  std::vector<std::vector<double>> anti(m);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = p.pieces()[i];
    anti[i].assign(c.size() + 1, 0.0);
    anti[i][0] = cumulative;
    for (std::size_t k = 0; k < c.size(); ++k) anti[i][k + 1] = c[k] / static_cast<double>(k + 1);
    cumulative = horner(anti[i], b[i + 1] - b[i]);
  }
  const double total = cumulative;

  // Antiderivative P(x0 + t) as a polynomial in t, for x0 + t inside one
  // region of P (located by a probe point).
  auto cumulative_at = [&](double x0, double probe) -> std::vector<double> {
    if (probe <= b.front()) return {0.0};
    if (probe >= b.back()) return {total};
    auto it = std::upper_bound(b.begin(), b.end(), probe);
    const std::size_t i = static_cast<std::size_t>(it - b.begin()) - 1;
    return taylor_shift(anti[i], x0 - b[i]);
  };

  const double half = 0.5 * width;
  std::vector<double> nb;
  nb.reserve(2 * b.size());
  for (double x : b) {
    nb.push_back(x - half);
    nb.push_back(x + half);
  }
  std::sort(nb.begin(), nb.end());
  const double scale = std::max(std::abs(nb.front()), std::abs(nb.back()));
  std::vector<double> merged;
  for (double x : nb) {
    if (merged.empty() || x - merged.back() > 1e-13 * scale) merged.push_back(x);
  }

  std::vector<std::vector<double>> pieces;
  pieces.reserve(merged.size() - 1);
  for (std::size_t l = 0; l + 1 < merged.size(); ++l) {
    const double x0 = merged[l];
    const double mid = 0.5 * (merged[l] + merged[l + 1]);
    std::vector<double> upper = cumulative_at(x0 + half, mid + half);
    std::vector<double> lower = cumulative_at(x0 - half, mid - half);
    const std::size_t n = std::max(upper.size(), lower.size());
    upper.resize(n, 0.0);
    lower.resize(n, 0.0);
    std::vector<double> piece(n);
    for (std::size_t k = 0; k < n; ++k) piece[k] = (upper[k] - lower[k]) / width;
    pieces.push_back(std::move(piece));
  }
  return PiecewisePolynomial(std::move(merged), std::move(pieces));
}

}  // namespace smallball
