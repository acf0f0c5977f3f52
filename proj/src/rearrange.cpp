#include "smallball/rearrange.hpp"

#include <algorithm>
#include <numeric>

#include "smallball/error.hpp"

namespace smallball {

GridDensity symmetric_decreasing_rearrangement(const GridDensity& f) {
  const GridSpec& spec = f.spec();
  if (!spec.origin_centered()) throw PreconditionError("rearrangement needs an origin-centered grid");
  const std::vector<std::size_t> slots = distance_order(spec);
  std::vector<std::size_t> by_value(spec.size());
  std::iota(by_value.begin(), by_value.end(), std::size_t{0});
  const auto& v = f.values();
  std::stable_sort(by_value.begin(), by_value.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  std::vector<double> out(spec.size());
  for (std::size_t r = 0; r < slots.size(); ++r) out[slots[r]] = v[by_value[r]];
  return GridDensity(spec, std::move(out));
}

VerificationReport verify_rearrangement_properties(const GridDensity& f, const GridDensity& g) {
  if (!(f.spec() == g.spec())) throw ShapeError("rearrangement check: specs differ");
  if (!f.spec().origin_centered()) {
    throw PreconditionError("rearrangement check needs an origin-centered grid");
  }
  const std::vector<std::size_t> order = distance_order(g.spec());
  const std::vector<double> keys = distance_keys(g.spec());

  bool shell_ok = true;
  bool radial_ok = true;
  for (std::size_t r = 1; r < order.size(); ++r) {
    const std::size_t prev = order[r - 1];
    const std::size_t cur = order[r];
    if (g[cur] > g[prev]) {
      if (keys[cur] == keys[prev]) {
        shell_ok = false;
      } else {
        radial_ok = false;
      }
    }
  }

  // Identical superlevel counts at every threshold <=> identical value multisets.
  std::vector<double> fv = f.values();
  std::vector<double> gv = g.values();
  std::sort(fv.begin(), fv.end());
  std::sort(gv.begin(), gv.end());
  const bool level_ok = fv == gv;

  std::string detail;
  int failures = 0;
  if (!shell_ok) {
    detail += "(a) not constant-then-decreasing on an equidistant shell; ";
    ++failures;
  }
  if (!radial_ok) {
    detail += "(b) increases with shell distance; ";
    ++failures;
  }
  if (!level_ok) {
    detail += "(c) superlevel cell counts differ; ";
    ++failures;
  }
  if (failures == 0) detail = "(a) (b) (c) hold";
  return make_report("rearrangement", failures, 0.0, 0.0, detail);
}

}  // namespace smallball
