#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "smallball/coefficients.hpp"
#include "smallball/grid.hpp"
#include "smallball/report.hpp"

namespace smallball {

enum class DensityShape { multi_bump, random_cells, indicator_union };

std::string_view shape_name(DensityShape s);
/// Accepts "multi-bump", "random-cells", "indicator-union".
DensityShape parse_shape(std::string_view name);

struct RandomDensitySpec {
  std::size_t d = 1;
  double K = 1.0;
  GridSpec spec;
  std::uint64_t seed = 0;
  DensityShape shape = DensityShape::multi_bump;
};

/// Seeded random member of S_K on `spec`: non-negative, ess_sup <= K exactly,
/// unit mass within 1e-9.
///
/// A raw shape g is scaled until min(s*g, K) carries mass >= 1 (adding a 5%
/// floor to g when its support is too small to ever get there), clamped at K, then
/// divided by its mass. That last factor is <= 1, so the clamp survives.
/// K * volume = 1 forces the constant K. K * volume < 1 is infeasible.
GridDensity generate_bounded_density(const RandomDensitySpec& rds);

/// P(sum X_i in S) <= P(sum U_i in B), B the centered ball with |B| = |S|.
/// lhs is the grid value, rhs the extremal bound; the budget is the sum of the
/// two brackets' gaps on the unfavourable sides.
VerificationReport check_theorem1(std::span<const GridDensity> fs, std::span<const double> Ks,
                                  const RegionMask& s, std::size_t resolution);

/// M(sum X_i) <= M(sum U_i). lhs is the grid max of the sum; its budget term
/// is the one-cell smoothing gap between the grid max and the smallest value
/// the continuous density can take near it.
VerificationReport check_corollary(std::span<const GridDensity> fs, std::span<const double> Ks,
                                   std::size_t resolution);

/// Product integral of the f_j against that of their rearrangements.
/// Grids must be origin-centered.
VerificationReport check_bll(std::span<const GridDensity> fs, const CoefficientMatrix& a, std::size_t n);

/// Cells (at most 1.5 diagonals away, rounded up) by which the grid
/// rearrangement may lag the continuous one.
std::size_t rearrangement_slack_cells(const GridSpec& spec);

/// Product integral with the n+1 row bridge matrix against the grid
/// small-ball probability. lhs = |difference|, rhs = 0, budget 1e-9.
VerificationReport check_bridge(const GridDensity& p1, const GridDensity& p2, const RegionMask& s);

/// Splits a non-extremal f in S_K into p1 != p2 in S_K with (p1 + p2) / 2 = f.
///
/// X = {0 < f < y} is split greedily in row-major order into X1 (until its
/// mass first reaches half of X's) and X2. p1 = (1-delta) f on X1,
/// (1+delta) f on X2, f elsewhere; p2 the other way round. On each cell the
/// shrunk value is computed as 2f minus the grown one, which is exact, so the
/// midpoint identity holds bit for bit.
///
/// The report has lhs = mass defect max_i |integral(p_i) - integral(f)| plus
/// one per violated exact contract (midpoint, ess_sup <= K), rhs =
/// delta * imbalance, budget = rounding allowance.
struct Decomposition {
  GridDensity p1;
  GridDensity p2;
  double imbalance = 0.0;  // |mass(X1) - mass(X2)|
  VerificationReport report;
};
Decomposition extreme_point_decompose(const GridDensity& f, double K, double y, double delta);

/// Monte Carlo estimate of P(sum X_i in S): each X_i is a cell drawn with
/// probability proportional to its value, then a uniform point in that cell.
/// One SplitMix64 stream seeded with `seed`.
struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};
MonteCarloEstimate monte_carlo_sum_prob(std::span<const GridDensity> fs, const RegionMask& s,
                                        std::size_t samples, std::uint64_t seed);

}  // namespace smallball
