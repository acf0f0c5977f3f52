#include "smallball/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "smallball/error.hpp"
#include "smallball/summation.hpp"

namespace smallball {

GridSpec::GridSpec(std::vector<Interval> extents, std::vector<std::size_t> counts)
    : extents_(std::move(extents)), counts_(std::move(counts)) {
  if (counts_.empty()) throw PreconditionError("grid dimension must be at least 1");
  if (extents_.size() != counts_.size()) {
    throw ShapeError("grid has " + std::to_string(extents_.size()) + " extents but " +
                     std::to_string(counts_.size()) + " counts");
  }
  size_ = 1;
  cell_volume_ = 1.0;
  widths_.resize(counts_.size());
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    const auto [lo, hi] = extents_[a];
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw PreconditionError("axis " + std::to_string(a) + " needs lo < hi");
    }
    if (counts_[a] == 0) throw PreconditionError("axis " + std::to_string(a) + " has no cells");
    if (size_ > std::numeric_limits<std::size_t>::max() / counts_[a]) {
      throw PreconditionError("total cell count overflows the addressable range");
    }
    size_ *= counts_[a];
    widths_[a] = (hi - lo) / static_cast<double>(counts_[a]);
    cell_volume_ *= widths_[a];
  }
  if (!(cell_volume_ > 0.0) || !std::isfinite(cell_volume_)) {
    throw PreconditionError("cell volume must be positive and finite");
  }
}

GridSpec GridSpec::centered(std::vector<std::size_t> counts, double cell_width) {
  std::vector<Interval> extents;
  extents.reserve(counts.size());
  for (std::size_t n : counts) {
    const double half = 0.5 * cell_width * static_cast<double>(n);
    extents.push_back({-half, half});
  }
  return GridSpec(std::move(extents), std::move(counts));
}

GridSpec GridSpec::centered_cube(std::size_t dim, std::size_t count, double cell_width) {
  return centered(std::vector<std::size_t>(dim, count), cell_width);
}

bool GridSpec::isotropic() const {
  return std::all_of(widths_.begin(), widths_.end(), [&](double w) { return w == widths_[0]; });
}

double GridSpec::center(std::size_t axis, std::size_t i) const {
  return extents_[axis].lo + (static_cast<double>(i) + 0.5) * widths_[axis];
}

bool GridSpec::origin_centered() const {
  for (const auto& [lo, hi] : extents_) {
    if (std::abs(lo + hi) > 1e-12 * (hi - lo)) return false;
  }
  return true;
}

void GridSpec::unravel(std::size_t flat, std::span<std::size_t> index) const {
  for (std::size_t a = counts_.size(); a-- > 0;) {
    index[a] = flat % counts_[a];
    flat /= counts_[a];
  }
}

std::size_t GridSpec::ravel(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < counts_.size(); ++a) flat = flat * counts_[a] + index[a];
  return flat;
}

std::vector<double> GridSpec::cell_center(std::size_t flat) const {
  std::vector<std::size_t> idx(dim());
  unravel(flat, idx);
  std::vector<double> c(dim());
  for (std::size_t a = 0; a < dim(); ++a) c[a] = center(a, idx[a]);
  return c;
}

bool same_cell_size(const GridSpec& a, const GridSpec& b) {
  if (a.dim() != b.dim()) return false;
  for (std::size_t ax = 0; ax < a.dim(); ++ax) {
    const double wa = a.cell_width(ax);
    const double wb = b.cell_width(ax);
    if (std::abs(wa - wb) > 1e-9 * std::max(wa, wb)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

GridDensity::GridDensity(GridSpec spec, std::vector<double> values)
    : spec_(std::move(spec)), values_(std::move(values)) {
  if (values_.size() != spec_.size()) {
    throw ShapeError("density has " + std::to_string(values_.size()) + " values for " +
                     std::to_string(spec_.size()) + " cells");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw PreconditionError("density value at cell " + std::to_string(i) +
                              " is negative or not finite");
    }
  }
}

GridDensity::GridDensity(GridSpec spec) : spec_(std::move(spec)), values_(spec_.size(), 0.0) {}

GridDensity GridDensity::probability(GridSpec spec, std::vector<double> values) {
  GridDensity f(std::move(spec), std::move(values));
  const double mass = integral(f);
  if (std::abs(mass - 1.0) > kUnitMassTolerance) {
    throw PreconditionError("density mass " + std::to_string(mass) +
                            " is not 1 within 1e-9 (normalize explicitly)");
  }
  return f;
}

RegionMask::RegionMask(GridSpec spec, std::vector<std::uint8_t> included)
    : spec_(std::move(spec)), included_(std::move(included)) {
  if (included_.size() != spec_.size()) {
    throw ShapeError("mask has " + std::to_string(included_.size()) + " entries for " +
                     std::to_string(spec_.size()) + " cells");
  }
  for (auto& b : included_) b = b ? 1 : 0;
}

RegionMask::RegionMask(GridSpec spec) : spec_(std::move(spec)), included_(spec_.size(), 0) {}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(std::count(included_.begin(), included_.end(), 1));
}

GridDensity RegionMask::indicator(double height) const {
  std::vector<double> v(included_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = included_[i] ? height : 0.0;
  return GridDensity(spec_, std::move(v));
}

// ---------------------------------------------------------------------------

double integral(const GridDensity& f) {
  return compensated_sum(f.values()) * f.spec().cell_volume();
}

double ess_sup(const GridDensity& f) {
  const auto& v = f.values();
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double mass_on(const GridDensity& f, const RegionMask& s) {
  if (!(f.spec() == s.spec())) throw ShapeError("mass_on: density and mask specs differ");
  CompensatedSum acc;
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    if (s.contains(i)) acc.add(f[i]);
  }
  return acc.value() * f.spec().cell_volume();
}

std::size_t superlevel_count(const GridDensity& f, double y, bool strict) {
  if (y < 0.0) throw PreconditionError("superlevel threshold must be non-negative");
  const auto& v = f.values();
  if (strict) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [y](double x) { return x > y; }));
  }
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [y](double x) { return x >= y; }));
}

double superlevel_measure(const GridDensity& f, double y, bool strict) {
  return static_cast<double>(superlevel_count(f, y, strict)) * f.spec().cell_volume();
}

GridDensity normalize(const GridDensity& f) {
  const double mass = integral(f);
  if (!(mass > 0.0)) throw PreconditionError("cannot normalize a density with zero mass");
  std::vector<double> v = f.values();
  for (double& x : v) x /= mass;
  return GridDensity(f.spec(), std::move(v));
}

double unit_ball_volume(std::size_t d) {
  const double half = 0.5 * static_cast<double>(d);
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double ball_volume(std::size_t d, double r) {
  return unit_ball_volume(d) * std::pow(r, static_cast<double>(d));
}

double ball_radius_for_volume(std::size_t d, double v) {
  if (d == 0) throw PreconditionError("ball dimension must be at least 1");
  if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError("ball volume must be positive");
  return std::pow(v / unit_ball_volume(d), 1.0 / static_cast<double>(d));
}

std::vector<double> distance_keys(const GridSpec& spec) {
  const std::size_t d = spec.dim();
  std::vector<double> keys(spec.size());
  std::vector<std::size_t> idx(d);
  const bool iso = spec.isotropic();
  for (std::size_t flat = 0; flat < spec.size(); ++flat) {
    spec.unravel(flat, idx);
    double key = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double off = static_cast<double>(GridSpec::doubled_offset(idx[a], spec.counts()[a]));
      if (iso) {
        key += off * off;
      } else {
        const double x = 0.5 * off * spec.cell_width(a);
        key += x * x;
      }
    }
    keys[flat] = key;
  }
  return keys;
}

std::vector<std::size_t> distance_order(const GridSpec& spec) {
  const std::vector<double> keys = distance_keys(spec);
  std::vector<std::size_t> order(spec.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return order;
}

RegionMask centered_ball_mask(const GridSpec& spec, double v) {
  if (!spec.origin_centered()) throw PreconditionError("centered_ball_mask: grid is not origin-centered");
  if (!(v >= 0.0)) throw PreconditionError("centered_ball_mask: volume must be non-negative");
  if (v > spec.volume() * (1.0 + 1e-12)) {
    throw PreconditionError("centered_ball_mask: volume " + std::to_string(v) +
                            " exceeds grid volume " + std::to_string(spec.volume()));
  }
  const auto k = std::min(spec.size(), static_cast<std::size_t>(std::llround(v / spec.cell_volume())));
  const std::vector<std::size_t> order = distance_order(spec);
  std::vector<std::uint8_t> inc(spec.size(), 0);
  for (std::size_t i = 0; i < k; ++i) inc[order[i]] = 1;
  return RegionMask(spec, std::move(inc));
}

RadialRange cell_radial_range(const GridSpec& spec, std::size_t flat) {
  std::vector<std::size_t> idx(spec.dim());
  spec.unravel(flat, idx);
  double near2 = 0.0;
  double far2 = 0.0;
  for (std::size_t a = 0; a < spec.dim(); ++a) {
    const double lo = spec.extents()[a].lo + static_cast<double>(idx[a]) * spec.cell_width(a);
    const double hi = lo + spec.cell_width(a);
    const double near = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
    const double far = std::max(std::abs(lo), std::abs(hi));
    near2 += near * near;
    far2 += far * far;
  }
  return {std::sqrt(near2), std::sqrt(far2)};
}

}  // namespace smallball
