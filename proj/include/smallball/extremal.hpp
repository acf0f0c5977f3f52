#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "smallball/grid.hpp"
#include "smallball/piecewise.hpp"

namespace smallball {

/// Grid version of K times the indicator of the origin-centered ball of
/// volume 1/K (radius forced by unit mass: K * V_d * r^d = 1).
///
/// Cells whose centers lie in the closed ball get height K; the result is
/// then scaled once so the mass is exactly 1. `rescale` is that factor and
/// `boundary_cells` counts cells the sphere cuts through.
struct UniformBall {
  GridDensity density;
  double radius = 0.0;
  double rescale = 1.0;
  std::size_t boundary_cells = 0;
};
UniformBall make_uniform_ball(std::size_t d, double K, const GridSpec& spec);
GridDensity uniform_ball_density(std::size_t d, double K, const GridSpec& spec);

/// Default cells per axis across the widest ball: 512 (d=1), 128 (d=2), 32 (d>=3).
std::size_t default_resolution(std::size_t d);

/// Common cell width for a family of balls: the widest diameter split into
/// `resolution` cells.
double extremal_cell_width(std::size_t d, std::span<const double> Ks, std::size_t resolution);

/// Odd origin-centered cube (2c+1 cells per axis) holding the ball for K with
/// at least one free cell beyond the radius.
GridSpec extremal_spec(std::size_t d, double K, double cell_width);

/// The uniform balls for Ks on a common cell width, their grid sum, and an
/// upper bound on the L1 distance between each grid ball and the exact one.
struct ExtremalSum {
  std::size_t d = 0;
  std::vector<double> Ks;
  std::vector<UniformBall> balls;
  GridDensity sum;
  std::vector<double> l1;
};
ExtremalSum extremal_sum(std::size_t d, std::span<const double> Ks, std::size_t resolution);

/// A grid value with one-sided error bounds relative to the exact quantity:
///   value - lower_gap <= exact <= value + upper_gap.
/// `budget` is the larger gap. With an exact oracle (d = 1) the oracle value
/// and whether it falls inside the bracket are reported too.
struct BoundResult {
  double value = 0.0;
  double budget = 0.0;
  double lower_gap = 0.0;
  double upper_gap = 0.0;
  std::optional<double> exact;
  bool exact_consistent = true;
};

/// P(U_1 + ... + U_n in B) for B the origin-centered ball of the given volume.
BoundResult rogozin_bound_prob(std::size_t d, std::span<const double> Ks, double set_volume,
                               std::size_t resolution, bool exact_check = false);
BoundResult rogozin_bound_prob(const ExtremalSum& ex, double set_volume, bool exact_check = false);

/// A-priori bound on both gaps of rogozin_bound_prob(ex, v) and of the grid
/// small-ball bracket of the grid balls on the centered ball mask of volume v,
/// from shell volumes alone (no data-dependent terms): with h the cell width,
///   ring  = max grid sum density * |shell(rho_v, (n/2 + 2) sqrt(d) h + eps)|
///   swap  = sum_i K_i |shell(r_i, sqrt(d) h / 2)|
///   total = 2 ring + swap
/// where eps covers the mask's volume rounding. Leading terms are linear in h
/// and higher-order terms are non-negative, so halving h at least halves it.
double a_priori_prob_budget(const ExtremalSum& ex, double set_volume);

/// Maximum density M(U_1 + ... + U_n).
BoundResult rogozin_bound_density(std::size_t d, std::span<const double> Ks, std::size_t resolution,
                                  bool exact_check = false);
BoundResult rogozin_bound_density(const ExtremalSum& ex, bool exact_check = false);

/// Exact density of a sum of independent uniforms on [-w_i/2, w_i/2].
PiecewisePolynomial oracle1d_sum_of_uniforms(std::span<const double> widths);

}  // namespace smallball
