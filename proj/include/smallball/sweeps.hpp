#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "smallball/coefficients.hpp"
#include "smallball/grid.hpp"
#include "smallball/report.hpp"

namespace smallball {

/// Worker threads for sweeps: SMALLBALL_THREADS if set to a positive
/// integer, else the hardware concurrency. Never changes results.
std::size_t sweep_threads();

/// Runs fn(0..count-1) on up to `threads` workers (0 = sweep_threads()).
/// Each index writes only its own slot; the first exception (by index) is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, std::size_t threads = 0);

/// Random K_i from {0.5, 1, 4} when `fixed` is empty.
struct SmallBallInstance {
  std::vector<GridDensity> fs;
  std::vector<double> Ks;
  RegionMask s;
};
SmallBallInstance make_small_ball_instance(std::size_t d, std::size_t n, std::uint64_t seed,
                                           const std::vector<double>& fixed = {});

struct BllInstance {
  std::vector<GridDensity> fs;
  CoefficientMatrix a;
  std::size_t n;
};
/// n*d <= 4, at most 16 cells per axis, coefficients in {-1, 0, 1}, full column rank.
BllInstance make_bll_instance(std::uint64_t seed);

struct BridgeInstance {
  GridDensity p1;
  GridDensity p2;
  RegionMask s;
};
BridgeInstance make_bridge_instance(std::uint64_t seed);

struct DecomposeInstance {
  GridDensity f;
  double K;
  double y;
  double delta;
};
DecomposeInstance make_decompose_instance(std::uint64_t seed);

/// Instance i of every sweep uses derive_seed(base_seed, i) and records it.
std::vector<VerificationReport> sweep_theorem1(std::size_t d, std::size_t n, std::size_t count,
                                               std::uint64_t base_seed, std::size_t resolution,
                                               const std::vector<double>& Ks = {}, std::size_t threads = 0);
std::vector<VerificationReport> sweep_corollary(std::size_t d, std::size_t n, std::size_t count,
                                                std::uint64_t base_seed, std::size_t resolution,
                                                const std::vector<double>& Ks = {}, std::size_t threads = 0);
std::vector<VerificationReport> sweep_bll(std::size_t count, std::uint64_t base_seed, std::size_t threads = 0);
std::vector<VerificationReport> sweep_bridge(std::size_t count, std::uint64_t base_seed, std::size_t threads = 0);
std::vector<VerificationReport> sweep_decompose(std::size_t count, std::uint64_t base_seed,
                                                std::size_t threads = 0);

/// The grid uniform balls against the centered ball of volume mean(1/K_i),
/// both sides computed on the same sum grid. lhs is the small-ball value of
/// the grid balls, rhs the extremal bound; budget is a_priori_prob_budget.
/// The data-driven budget (lhs lower gap plus bound upper gap) is in detail.
VerificationReport extremal_equality(std::size_t d, const std::vector<double>& Ks, std::size_t resolution);

}  // namespace smallball
