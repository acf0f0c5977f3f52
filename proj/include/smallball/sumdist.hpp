#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "smallball/coefficients.hpp"
#include "smallball/grid.hpp"

namespace smallball {

enum class ConvolutionMethod { automatic, direct, fft };

/// Density of X + Y for independent X ~ f, Y ~ g on grids with equal cell
/// widths. Per axis the output has count_f + count_g - 1 cells spanning
/// [lo_f + lo_g + w/2, hi_f + hi_g - w/2], so its cell centers are exactly the
/// sums of input cell centers. Output values are the discrete convolution of
/// the cell values times the cell volume, which equals the exact density of
/// X + Y sampled at the output cell centers. Linear (zero-padded), never circular.
GridDensity convolve(const GridDensity& f, const GridDensity& g,
                     ConvolutionMethod method = ConvolutionMethod::automatic);

/// Grid holding convolve(f, g) for densities on `f` and `g`.
GridSpec sum_spec(const GridSpec& f, const GridSpec& g);

/// Left fold of convolve in list order.
GridDensity sum_density(std::span<const GridDensity> fs,
                        ConvolutionMethod method = ConvolutionMethod::automatic);

/// Cells of `target` whose centers fall in an included cell of `s`.
RegionMask resample_mask(const RegionMask& s, const GridSpec& target);

/// P(X_1 + ... + X_n in S) evaluated on the grid: mass of sum_density(fs) on
/// `s` resampled onto the sum grid by cell-center membership.
double small_ball_prob(std::span<const GridDensity> fs, const RegionMask& s);

/// Grid value of the small-ball probability together with rigorous bounds on
/// the exact probability for the piecewise-constant inputs.
///
/// Writing X_i = C_i + V_i (C_i the cell center, V_i uniform in the cell), the
/// grid sum density is the law of C = sum C_i, and sum V_i stays within a box
/// of half-width n*w/2 per axis. Hence
///   lower = P(box(C) inside S) <= P(sum X_i in S) <= P(box(C) meets S) = upper.
struct SmallBallBracket {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double resampled_measure = 0.0;  // measure of s on the sum grid
};
SmallBallBracket small_ball_bracket(std::span<const GridDensity> fs, const RegionMask& s);
/// Same, for a precomputed sum of `summands` grid densities.
SmallBallBracket small_ball_bracket(const GridDensity& sum, std::size_t summands, const RegionMask& s);

// ---------------------------------------------------------------------------
// Brute-force product integrals
//   I = integral over R^{nd} of prod_j f_j(sum_m a[j][m] x_m)

/// Size limits for the brute-force quadrature.
inline constexpr std::size_t kBllMaxVariableDims = 6;   // n * d
inline constexpr std::size_t kBllMaxCellsPerAxis = 64;

/// Midpoint quadrature on the lattice of cell centers, with rigorous
/// lower/upper brackets on the exact integral of the piecewise-constant
/// integrand (min/max of each factor over its quadrature cell).
///
/// `extra_cells` widens the upper bracket's max-filter (and zero padding) by
/// that many cells on every axis; check_bll uses it to cover the continuous
/// rearrangement by the grid one.
struct BllBracket {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t nodes = 0;  // lattice nodes visited after pruning
};
BllBracket bll_bracket(std::span<const GridDensity> fs, const CoefficientMatrix& a, std::size_t n,
                       std::size_t extra_cells = 0);

double bll_integral(std::span<const GridDensity> fs, const CoefficientMatrix& a, std::size_t n);

/// Separable box filters over (2r+1)^d windows; cells outside the grid count as 0.
GridDensity max_filter(const GridDensity& f, std::size_t radius);
GridDensity min_filter(const GridDensity& f, std::size_t radius);

/// Zero-pad by `cells` on both sides of every axis.
GridDensity pad(const GridDensity& f, std::size_t cells);

}  // namespace smallball
