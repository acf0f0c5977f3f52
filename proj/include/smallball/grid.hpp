#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace smallball {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

/// Axis-aligned box in R^d split into a regular grid of cells. Values living
/// on a grid are stored flat in row-major order (last axis fastest).
class GridSpec {
 public:
  GridSpec(std::vector<Interval> extents, std::vector<std::size_t> counts);

  /// Origin-centered grid with `counts[a]` cells of width `cell_width` on axis a.
  static GridSpec centered(std::vector<std::size_t> counts, double cell_width);
  /// Origin-centered cube with the same cell count on each of `dim` axes.
  static GridSpec centered_cube(std::size_t dim, std::size_t count, double cell_width);

  std::size_t dim() const { return counts_.size(); }
  const std::vector<Interval>& extents() const { return extents_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t size() const { return size_; }

  double cell_width(std::size_t axis) const { return widths_[axis]; }
  double cell_volume() const { return cell_volume_; }
  double volume() const { return cell_volume_ * static_cast<double>(size_); }
  bool isotropic() const;

  /// Center coordinate of cell i along `axis`.
  double center(std::size_t axis, std::size_t i) const;
  /// Twice the cell-center offset from the box midpoint, in cell units: 2i + 1 - count.
  static std::int64_t doubled_offset(std::size_t i, std::size_t count) {
    return 2 * static_cast<std::int64_t>(i) + 1 - static_cast<std::int64_t>(count);
  }

  /// lo == -hi on every axis (up to 1e-12 of the axis length).
  bool origin_centered() const;

  void unravel(std::size_t flat, std::span<std::size_t> index) const;
  std::size_t ravel(std::span<const std::size_t> index) const;
  std::vector<double> cell_center(std::size_t flat) const;

  bool operator==(const GridSpec& other) const {
    return extents_ == other.extents_ && counts_ == other.counts_;
  }

 private:
  std::vector<Interval> extents_;
  std::vector<std::size_t> counts_;
  std::vector<double> widths_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

/// Per-axis cell widths agree within 1e-9 relative (extents may differ).
bool same_cell_size(const GridSpec& a, const GridSpec& b);

/// Non-negative piecewise-constant function, one value per cell (units 1/volume).
class GridDensity {
 public:
  GridDensity(GridSpec spec, std::vector<double> values);
  /// All-zero density on `spec`.
  explicit GridDensity(GridSpec spec);

  /// Same as the constructor, additionally requiring unit mass within 1e-9.
  static GridDensity probability(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Measurable set as a union of grid cells.
class RegionMask {
 public:
  RegionMask(GridSpec spec, std::vector<std::uint8_t> included);
  explicit RegionMask(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  const std::vector<std::uint8_t>& included() const { return included_; }
  bool contains(std::size_t i) const { return included_[i] != 0; }
  std::size_t count() const;
  double measure() const { return static_cast<double>(count()) * spec_.cell_volume(); }

  /// Indicator function of the set, with value `height` on included cells.
  GridDensity indicator(double height = 1.0) const;

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> included_;
};

inline constexpr double kUnitMassTolerance = 1e-9;

double integral(const GridDensity& f);
double ess_sup(const GridDensity& f);
double mass_on(const GridDensity& f, const RegionMask& s);
/// Number of cells with f >= y (f > y when strict).
std::size_t superlevel_count(const GridDensity& f, double y, bool strict = false);
double superlevel_measure(const GridDensity& f, double y, bool strict = false);

/// Rescale to unit mass. Rejects densities with zero mass.
GridDensity normalize(const GridDensity& f);

double unit_ball_volume(std::size_t d);
double ball_volume(std::size_t d, double r);
double ball_radius_for_volume(std::size_t d, double v);

/// Flat cell indices ordered by cell-center distance from the origin, ties
/// broken by row-major index. This is the canonical order shared by the
/// rearrangement and the centered ball.
std::vector<std::size_t> distance_order(const GridSpec& spec);

/// Squared cell-center distances in the canonical order, as exact integers
/// for isotropic grids (units of (cell_width/2)^2) and doubles otherwise.
/// Two cells are at equal distance iff their keys compare equal.
std::vector<double> distance_keys(const GridSpec& spec);

/// The k = round(v / cell_volume) cells nearest the origin.
RegionMask centered_ball_mask(const GridSpec& spec, double v);

/// Minimum and maximum Euclidean distance from the origin to points of cell `flat`.
struct RadialRange {
  double min = 0.0;
  double max = 0.0;
};
RadialRange cell_radial_range(const GridSpec& spec, std::size_t flat);

}  // namespace smallball
