#pragma once

#include <vector>

#include "smallball/grid.hpp"

namespace testing {

inline smallball::GridSpec line(double lo, double hi, std::size_t count) {
  return smallball::GridSpec({{lo, hi}}, {count});
}

// Height-1 box on [-1/2, 1/2] with `count` cells.
inline smallball::GridDensity unit_box(std::size_t count) {
  return smallball::GridDensity(line(-0.5, 0.5, count), std::vector<double>(count, 1.0));
}

// Indicator of cells whose centers lie in [a, b], scaled to unit mass.
inline smallball::GridDensity box_on(const smallball::GridSpec& spec, double a, double b) {
  std::vector<double> v(spec.size(), 0.0);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double c = spec.center(0, i);
    if (c >= a && c <= b) v[i] = 1.0;
  }
  return smallball::normalize(smallball::GridDensity(spec, std::move(v)));
}

inline double sup_diff(const smallball::GridDensity& a, const smallball::GridDensity& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testing
