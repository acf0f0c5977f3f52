#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "smallball/error.hpp"
#include "smallball/summation.hpp"
#include "smallball/sumdist.hpp"

namespace smallball {

CoefficientMatrix::CoefficientMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw PreconditionError("coefficient matrix must be at least 1 x 1");
  if (entries_.size() != rows_ * cols_) throw ShapeError("coefficient matrix entry count mismatch");
}

CoefficientMatrix::CoefficientMatrix(std::vector<std::vector<double>> rows) {
  rows_ = rows.size();
  cols_ = rows.empty() ? 0 : rows.front().size();
  if (rows_ == 0 || cols_ == 0) throw PreconditionError("coefficient matrix must be at least 1 x 1");
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("coefficient matrix rows differ in length");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

CoefficientMatrix theorem3_coefficients(std::size_t n) {
  if (n == 0) throw PreconditionError("theorem3_coefficients needs n >= 1");
  std::vector<double> e((n + 1) * n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    e[m * n + m] = 1.0;
    e[n * n + m] = 1.0;
  }
  return CoefficientMatrix(n + 1, n, std::move(e));
}

namespace {

struct Factor {
  GridDensity exact;   // zero-padded f_j
  GridDensity lowest;  // min over the quadrature cell
  GridDensity highest; // max over the quadrature cell (widened by extra_cells)
  std::vector<double> coeffs;  // a[j][*]
  std::ptrdiff_t last_col = -1;
};

class Quadrature {
 public:
  Quadrature(std::vector<Factor> factors, std::size_t n, std::size_t d,
             std::vector<std::vector<double>> nodes)
      : factors_(std::move(factors)), n_(n), d_(d), nodes_(std::move(nodes)), x_(n * d, 0.0) {
    for (std::size_t j = 0; j < factors_.size(); ++j) {
      const auto col = factors_[j].last_col;
      if (col < 0) {
        constants_.push_back(j);
      } else {
        by_col_.resize(n_);
        by_col_[static_cast<std::size_t>(col)].push_back(j);
      }
    }
    by_col_.resize(n_);
  }

  BllBracket run() {
    double v = 1.0, lo = 1.0, hi = 1.0;
    for (std::size_t j : constants_) {
      if (!lookup(j, v, lo, hi)) return {};
    }
    visit(0, v, lo, hi);
    return {value_.value(), lower_.value(), upper_.value(), visited_};
  }

 private:
  // Multiplies the three running products by factor j at the current point.
  // Returns false when the upper factor vanishes (the subtree contributes 0).
  bool lookup(std::size_t j, double& v, double& lo, double& hi) const {
    const Factor& f = factors_[j];
    const GridSpec& spec = f.exact.spec();
    std::size_t flat = 0;
    for (std::size_t a = 0; a < d_; ++a) {
      double arg = 0.0;
      for (std::size_t m = 0; m < n_; ++m) {
        if (f.coeffs[m] != 0.0) arg += f.coeffs[m] * x_[m * d_ + a];
      }
      const double u = std::floor((arg - spec.extents()[a].lo) / spec.cell_width(a));
      if (u < 0.0 || u >= static_cast<double>(spec.counts()[a])) return false;
      flat = flat * spec.counts()[a] + static_cast<std::size_t>(u);
    }
    const double up = f.highest[flat];
    if (up == 0.0) return false;
    v *= f.exact[flat];
    lo *= f.lowest[flat];
    hi *= up;
    return true;
  }

  void visit(std::size_t m, double v, double lo, double hi) {
    if (m == n_) {
      ++visited_;
      value_.add(v);
      lower_.add(lo);
      upper_.add(hi);
      return;
    }
    std::vector<std::size_t> cur(d_, 0);
    while (true) {
      for (std::size_t a = 0; a < d_; ++a) x_[m * d_ + a] = nodes_[m * d_ + a][cur[a]];
      double v2 = v, lo2 = lo, hi2 = hi;
      bool alive = true;
      for (std::size_t j : by_col_[m]) {
        if (!lookup(j, v2, lo2, hi2)) {
          alive = false;
          break;
        }
      }
      if (alive) visit(m + 1, v2, lo2, hi2);
      std::size_t a = d_;
      while (a-- > 0) {
        if (cur[a] + 1 < nodes_[m * d_ + a].size()) {
          ++cur[a];
          break;
        }
        cur[a] = 0;
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }
  }

  std::vector<Factor> factors_;
  std::size_t n_;
  std::size_t d_;
  std::vector<std::vector<double>> nodes_;  // per (variable, axis)
  std::vector<double> x_;
  std::vector<std::size_t> constants_;
  std::vector<std::vector<std::size_t>> by_col_;
  CompensatedSum value_, lower_, upper_;
  std::size_t visited_ = 0;
};

bool is_integer(double x) { return std::floor(x) == x; }

}  // namespace

BllBracket bll_bracket(std::span<const GridDensity> fs, const CoefficientMatrix& a, std::size_t n,
                       std::size_t extra_cells) {
  const std::size_t k = fs.size();
  if (k == 0) throw PreconditionError("bll_integral needs at least one function");
  if (a.rows() != k) {
    throw ShapeError("coefficient matrix has " + std::to_string(a.rows()) + " rows for " +
                     std::to_string(k) + " functions");
  }
  if (a.cols() != n || n == 0) {
    throw ShapeError("coefficient matrix has " + std::to_string(a.cols()) + " columns for n = " +
                     std::to_string(n));
  }
  const GridSpec& ref = fs[0].spec();
  const std::size_t d = ref.dim();
  for (const auto& f : fs) {
    if (f.spec().dim() != d) throw ShapeError("bll_integral: functions differ in dimension");
    if (!same_cell_size(f.spec(), ref)) throw ShapeError("bll_integral: cell sizes differ");
  }
  if (n * d > kBllMaxVariableDims) {
    throw PreconditionError("bll_integral: n*d = " + std::to_string(n * d) + " exceeds the brute-force limit " +
                            std::to_string(kBllMaxVariableDims));
  }
  for (const auto& f : fs) {
    for (std::size_t c : f.spec().counts()) {
      if (c > kBllMaxCellsPerAxis) {
        throw PreconditionError("bll_integral: " + std::to_string(c) + " cells on an axis exceeds " +
                                std::to_string(kBllMaxCellsPerAxis));
      }
    }
  }

  Eigen::MatrixXd A(k, n);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t m = 0; m < n; ++m) A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = a(j, m);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  if (static_cast<std::size_t>(cod.rank()) < n) {
    throw PreconditionError("bll_integral: coefficient matrix must have full column rank (the integral is infinite otherwise)");
  }
  const Eigen::MatrixXd pinv = cod.pseudoInverse();

  std::vector<double> h(d);
  for (std::size_t ax = 0; ax < d; ++ax) h[ax] = ref.cell_width(ax);

  // Lattice offsets: a variable fed alone into some f_j sits on f_j's cell centers.
  std::vector<double> offset(n * d, 0.0);
  std::vector<bool> anchored(n, false);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t nonzero = 0, col = 0;
    for (std::size_t m = 0; m < n; ++m) {
      if (a(j, m) != 0.0) {
        ++nonzero;
        col = m;
      }
    }
    if (nonzero == 1 && std::abs(a(j, col)) == 1.0 && !anchored[col]) {
      anchored[col] = true;
      for (std::size_t ax = 0; ax < d; ++ax) {
        offset[col * d + ax] = a(j, col) * (fs[j].spec().extents()[ax].lo + 0.5 * h[ax]);
      }
    }
  }

  std::vector<Factor> factors;
  factors.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    double spread = 0.0;
    bool integral_coeffs = true;
    std::vector<double> coeffs(n);
    std::ptrdiff_t last = -1;
    for (std::size_t m = 0; m < n; ++m) {
      coeffs[m] = a(j, m);
      spread += std::abs(coeffs[m]);
      integral_coeffs = integral_coeffs && is_integer(coeffs[m]);
      if (coeffs[m] != 0.0) last = static_cast<std::ptrdiff_t>(m);
    }
    bool aligned = integral_coeffs;
    for (std::size_t ax = 0; ax < d && aligned; ++ax) {
      double shift = -(fs[j].spec().extents()[ax].lo + 0.5 * h[ax]);
      for (std::size_t m = 0; m < n; ++m) shift += coeffs[m] * offset[m * d + ax];
      const double t = shift / h[ax];
      aligned = std::abs(t - std::round(t)) <= 1e-9;
    }
    // The argument moves by at most spread*h/2 per axis inside a quadrature cell.
    auto base = static_cast<std::size_t>(std::ceil((spread + 1.0) / 2.0 - 1e-12)) - 1;
    if (!aligned) base += 1;
    const std::size_t widen = base + extra_cells;
    GridDensity padded = pad(fs[j], widen);
    GridDensity lowest = min_filter(padded, base);
    GridDensity highest = max_filter(padded, widen);
    factors.push_back({std::move(padded), std::move(lowest), std::move(highest), std::move(coeffs), last});
  }

  // Bounding box of the integrand's support: x = pinv * (A x).
  std::vector<std::vector<double>> nodes(n * d);
  double cost = 1.0;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t ax = 0; ax < d; ++ax) {
      double bound = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const auto& e = factors[j].exact.spec().extents()[ax];
        bound += std::abs(pinv(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j))) *
                 std::max(std::abs(e.lo), std::abs(e.hi));
      }
      double lo = -bound, hi = bound;
      for (std::size_t j = 0; j < k; ++j) {
        std::size_t nonzero = 0;
        for (std::size_t mm = 0; mm < n; ++mm) nonzero += factors[j].coeffs[mm] != 0.0;
        const double c = factors[j].coeffs[m];
        if (nonzero == 1 && c != 0.0) {
          const auto& e = factors[j].exact.spec().extents()[ax];
          lo = std::max(lo, std::min(e.lo / c, e.hi / c));
          hi = std::min(hi, std::max(e.lo / c, e.hi / c));
        }
      }
      const double o = offset[m * d + ax];
      const double first = std::ceil((lo - o) / h[ax]) - 1.0;
      const double last = std::floor((hi - o) / h[ax]) + 1.0;
      auto& axis_nodes = nodes[m * d + ax];
      for (double i = first; i <= last; i += 1.0) axis_nodes.push_back(o + i * h[ax]);
      cost *= static_cast<double>(axis_nodes.size());
    }
  }
  if (cost * static_cast<double>(k) > 7e10) {
    throw PreconditionError("bll_integral: estimated " + std::to_string(cost * static_cast<double>(k)) +
                            " evaluations exceeds the brute-force budget");
  }

  Quadrature q(std::move(factors), n, d, std::move(nodes));
  BllBracket out = q.run();
  const double weight = std::pow(ref.cell_volume(), static_cast<double>(n));
  out.value *= weight;
  out.lower *= weight;
  out.upper *= weight;
  return out;
}

double bll_integral(std::span<const GridDensity> fs, const CoefficientMatrix& a, std::size_t n) {
  return bll_bracket(fs, a, n).value;
}

}  // namespace smallball
