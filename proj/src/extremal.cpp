#include "smallball/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smallball/error.hpp"
#include "smallball/summation.hpp"
#include "smallball/sumdist.hpp"

namespace smallball {

UniformBall make_uniform_ball(std::size_t d, double K, const GridSpec& spec) {
  if (spec.dim() != d) throw ShapeError("uniform_ball_density: grid dimension differs from d");
  if (!(K > 0.0) || !std::isfinite(K)) throw PreconditionError("uniform_ball_density: K must be positive");
  if (!spec.origin_centered()) throw PreconditionError("uniform_ball_density: grid is not origin-centered");
  const double r = ball_radius_for_volume(d, 1.0 / K);
  for (std::size_t a = 0; a < d; ++a) {
    if (r > spec.extents()[a].hi) {
      throw PreconditionError("uniform_ball_density: ball of radius " + std::to_string(r) +
                              " does not fit in the grid");
    }
  }

  std::vector<double> v(spec.size(), 0.0);
  std::vector<std::size_t> idx(d);
  std::size_t inside = 0, boundary = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    // centers from integer offsets, so mirrored cells get identical distances
    spec.unravel(i, idx);
    double r2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double x = 0.5 * spec.cell_width(a) * static_cast<double>(GridSpec::doubled_offset(idx[a], spec.counts()[a]));
      r2 += x * x;
    }
    if (r2 <= r * r) {
      v[i] = 1.0;
      ++inside;
    }
    const RadialRange rr = cell_radial_range(spec, i);
    if (rr.min < r && r < rr.max) ++boundary;
  }
  const double cv = spec.cell_volume();
  if (inside == 0) {
    throw PreconditionError("uniform_ball_density: no cell center inside the ball; increase the resolution");
  }
  // Height K on `inside` cells has mass K * inside * cv.
  const double height = 1.0 / (static_cast<double>(inside) * cv);
  const double rescale = height / K;
  const double allowed = 2.0 * static_cast<double>(boundary) * cv * K;
  if (std::abs(rescale - 1.0) > allowed) {
    const double ratio = std::abs(rescale - 1.0) / std::max(allowed, 1e-300);
    throw PreconditionError("uniform_ball_density: rescale factor " + std::to_string(rescale) +
                            " outside the boundary budget; refine the grid about " +
                            std::to_string(std::ceil(ratio)) + "x per axis");
  }
  for (double& x : v) x *= height;
  return {GridDensity(spec, std::move(v)), r, rescale, boundary};
}

GridDensity uniform_ball_density(std::size_t d, double K, const GridSpec& spec) {
  return make_uniform_ball(d, K, spec).density;
}

std::size_t default_resolution(std::size_t d) {
  if (d <= 1) return 512;
  if (d == 2) return 128;
  return 32;
}

double extremal_cell_width(std::size_t d, std::span<const double> Ks, std::size_t resolution) {
  if (d == 0) throw PreconditionError("dimension d must be at least 1");
  if (Ks.empty()) throw PreconditionError("need at least one K");
  if (resolution == 0) throw PreconditionError("resolution must be positive");
  double r_max = 0.0;
  for (double K : Ks) {
    if (!(K > 0.0) || !std::isfinite(K)) throw PreconditionError("every K must be positive and finite");
    r_max = std::max(r_max, ball_radius_for_volume(d, 1.0 / K));
  }
  return 2.0 * r_max / static_cast<double>(resolution);
}

GridSpec extremal_spec(std::size_t d, double K, double cell_width) {
  const double r = ball_radius_for_volume(d, 1.0 / K);
  const auto c = static_cast<std::size_t>(std::ceil(r / cell_width + 0.5));
  return GridSpec::centered_cube(d, 2 * c + 1, cell_width);
}

ExtremalSum extremal_sum(std::size_t d, std::span<const double> Ks, std::size_t resolution) {
  const double h = extremal_cell_width(d, Ks, resolution);
  std::vector<UniformBall> balls;
  std::vector<GridDensity> ds;
  std::vector<double> l1;
  for (double K : Ks) {
    UniformBall b = make_uniform_ball(d, K, extremal_spec(d, K, h));
    const double cv = b.density.spec().cell_volume();
    const double khat = K * b.rescale;
    const double in_cells = static_cast<double>(superlevel_count(b.density, 0.0, true));
    l1.push_back(std::abs(khat - K) * in_cells * cv +
                 std::max(K, khat) * static_cast<double>(b.boundary_cells) * cv);
    ds.push_back(b.density);
    balls.push_back(std::move(b));
  }
  GridDensity sum = sum_density(ds);
  return {d, std::vector<double>(Ks.begin(), Ks.end()), std::move(balls), std::move(sum), std::move(l1)};
}

namespace {

std::vector<double> widths_of(std::span<const double> Ks) {
  std::vector<double> w;
  for (double K : Ks) w.push_back(1.0 / K);
  return w;
}

double half_l1(const ExtremalSum& ex) {
  CompensatedSum acc;
  for (double x : ex.l1) acc.add(0.5 * x);
  return acc.value();
}

}  // namespace

BoundResult rogozin_bound_prob(const ExtremalSum& ex, double set_volume, bool exact_check) {
  if (!(set_volume > 0.0) || !std::isfinite(set_volume)) {
    throw PreconditionError("set volume must be positive and finite");
  }
  if (exact_check && ex.d != 1) throw PreconditionError("the exact oracle is only available for d = 1");
  const GridDensity& sum = ex.sum;
  const GridSpec& spec = sum.spec();
  const RegionMask mask = centered_ball_mask(spec, std::min(set_volume, spec.volume()));
  const double rho = ball_radius_for_volume(ex.d, set_volume);
  const double half = 0.5 * static_cast<double>(ex.balls.size()) * spec.cell_width(0);

  CompensatedSum value, missed, overcounted;
  std::vector<double> c;
  for (std::size_t z = 0; z < spec.size(); ++z) {
    if (sum[z] == 0.0) continue;
    c = spec.cell_center(z);
    double near2 = 0.0, far2 = 0.0;
    for (double x : c) {
      const double n = std::max(0.0, std::abs(x) - half);
      const double f = std::abs(x) + half;
      near2 += n * n;
      far2 += f * f;
    }
    const bool meets = near2 <= rho * rho;
    const bool inside = far2 <= rho * rho;
    if (mask.contains(z)) {
      value.add(sum[z]);
      if (!inside) overcounted.add(sum[z]);
    } else if (meets) {
      missed.add(sum[z]);
    }
  }
  const double cv = spec.cell_volume();
  const double tv = half_l1(ex);
  BoundResult out;
  out.value = value.value() * cv;
  out.upper_gap = missed.value() * cv + tv;
  out.lower_gap = overcounted.value() * cv + tv;
  out.budget = std::max(out.lower_gap, out.upper_gap);
  if (exact_check) {
    const PiecewisePolynomial p = oracle1d_sum_of_uniforms(widths_of(ex.Ks));
    out.exact = p.integral(-0.5 * set_volume, 0.5 * set_volume);
    out.exact_consistent = *out.exact >= out.value - out.lower_gap - 1e-12 &&
                           *out.exact <= out.value + out.upper_gap + 1e-12;
  }
  return out;
}

namespace {

// |{rho - t <= |x| <= rho + t}| bounded by its odd binomial terms when rho >= t.
double shell_volume(std::size_t d, double rho, double t) {
  const double vd = unit_ball_volume(d);
  if (rho < t) return vd * std::pow(rho + t, static_cast<double>(d));
  double acc = 0.0;
  double binom = 1.0;
  for (std::size_t k = 1; k <= d; ++k) {
    binom = binom * static_cast<double>(d - k + 1) / static_cast<double>(k);
    if (k % 2 == 1) {
      acc += 2.0 * binom * std::pow(rho, static_cast<double>(d - k)) * std::pow(t, static_cast<double>(k));
    }
  }
  return vd * acc;
}

}  // namespace

double a_priori_prob_budget(const ExtremalSum& ex, double set_volume) {
  const std::size_t d = ex.d;
  const std::size_t n = ex.balls.size();
  const double dd = static_cast<double>(d);
  const double h = ex.sum.spec().cell_width(0);
  const double cv = ex.sum.spec().cell_volume();
  const double vd = unit_ball_volume(d);
  const double diag = std::sqrt(dd) * h;

  // Every grid ball covers B(r - diag/2), so its height is at most
  // 1 / |B(r - diag/2)|, and so is every value of the grid sum.
  double pmax = INFINITY;
  double swap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ex.balls[i].radius;
    if (!(r > 0.5 * diag)) return INFINITY;
    pmax = std::min(pmax, 1.0 / (vd * std::pow(r - 0.5 * diag, dd)));
    swap += ex.Ks[i] * shell_volume(d, r, 0.5 * diag);
  }
  const double rho = ball_radius_for_volume(d, set_volume);
  // The mask holds round(v / cv) cells; its radius moves by at most eps.
  const double eps = cv / (dd * vd * std::pow(0.5 * rho, dd - 1.0));
  if (!(eps <= 0.5 * rho)) return INFINITY;
  const double t = (0.5 * static_cast<double>(n) + 2.0) * diag + eps;
  const double ring = pmax * shell_volume(d, rho, t);
  return 2.0 * ring + swap;
}

BoundResult rogozin_bound_prob(std::size_t d, std::span<const double> Ks, double set_volume,
                               std::size_t resolution, bool exact_check) {
  if (!(set_volume > 0.0) || !std::isfinite(set_volume)) {
    throw PreconditionError("set volume must be positive and finite");
  }
  return rogozin_bound_prob(extremal_sum(d, Ks, resolution), set_volume, exact_check);
}

BoundResult rogozin_bound_density(const ExtremalSum& ex, bool exact_check) {
  if (exact_check && ex.d != 1) throw PreconditionError("the exact oracle is only available for d = 1");
  const std::size_t n = ex.balls.size();
  BoundResult out;
  out.value = ess_sup(ex.sum);
  if (n == 1) {
    const double khat = ex.Ks[0] * ex.balls[0].rescale;
    out.upper_gap = std::max(0.0, ex.Ks[0] - khat);
    out.lower_gap = std::max(0.0, khat - ex.Ks[0]);
  } else {
    // Swapping one exact ball for its grid version moves the density of the sum
    // by at most L1_i times the sup of any other factor.
    CompensatedSum swap;
    for (std::size_t i = 0; i < n; ++i) {
      double sup_other = INFINITY;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) sup_other = std::min(sup_other, std::max(ex.Ks[j], ex.Ks[j] * ex.balls[j].rescale));
      }
      swap.add(ex.l1[i] * sup_other);
    }
    // The grid sum spread by the cell-uniform jitter is a B-spline average of
    // the grid values: it never exceeds the grid max and, at a cell center, is
    // at least the minimum over the spline's lattice support.
    const GridDensity floor = min_filter(ex.sum, (n - 1) / 2);
    out.upper_gap = swap.value();
    out.lower_gap = (out.value - ess_sup(floor)) + swap.value();
  }
  out.budget = std::max(out.lower_gap, out.upper_gap);
  if (exact_check) {
    const PiecewisePolynomial p = oracle1d_sum_of_uniforms(widths_of(ex.Ks));
    out.exact = p(0.0);
    out.exact_consistent = *out.exact >= out.value - out.lower_gap - 1e-12 &&
                           *out.exact <= out.value + out.upper_gap + 1e-12;
  }
  return out;
}

BoundResult rogozin_bound_density(std::size_t d, std::span<const double> Ks, std::size_t resolution,
                                  bool exact_check) {
  return rogozin_bound_density(extremal_sum(d, Ks, resolution), exact_check);
}

PiecewisePolynomial oracle1d_sum_of_uniforms(std::span<const double> widths) {
  if (widths.empty()) throw PreconditionError("oracle1d needs at least one width");
  for (double w : widths) {
    if (!(w > 0.0) || !std::isfinite(w)) throw PreconditionError("oracle1d widths must be positive");
  }
  PiecewisePolynomial p = centered_uniform(widths[0]);
  for (std::size_t i = 1; i < widths.size(); ++i) p = convolve_with_uniform(p, widths[i]);
  return p;
}

}  // namespace smallball
