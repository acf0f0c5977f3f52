#include "smallball/sweeps.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>

#include "smallball/error.hpp"
#include "smallball/extremal.hpp"
#include "smallball/rng.hpp"
#include "smallball/sumdist.hpp"
#include "smallball/verify.hpp"

namespace smallball {

std::size_t sweep_threads() {
  if (const char* env = std::getenv("SMALLBALL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, std::size_t threads) {
  if (threads == 0) threads = sweep_threads();
  threads = std::min(threads, count);
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < count; i += threads) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

DensityShape random_shape(SplitMix64& rng) { return static_cast<DensityShape>(rng.below(3)); }

std::size_t between(SplitMix64& rng, std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }

GridSpec shifted_cube(std::size_t d, std::size_t count, double w, SplitMix64& rng, std::size_t max_shift) {
  std::vector<Interval> ext(d);
  for (std::size_t a = 0; a < d; ++a) {
    const auto shift = static_cast<double>(rng.below(2 * max_shift + 1)) - static_cast<double>(max_shift);
    const double lo = (-0.5 * static_cast<double>(count) + shift) * w;
    ext[a] = {lo, lo + static_cast<double>(count) * w};
  }
  return GridSpec(std::move(ext), std::vector<std::size_t>(d, count));
}

RegionMask random_mask(const GridSpec& spec, SplitMix64& rng) {
  const std::size_t d = spec.dim();
  const std::size_t kind = rng.below(3);
  if (kind == 1) {
    return centered_ball_mask(spec, std::min(rng.uniform(0.05, 3.0), spec.volume()));
  }
  // boxes, or sparse cells inside one box
  const std::size_t boxes = kind == 0 ? between(rng, 1, 3) : 1;
  const double p = kind == 0 ? 1.0 : rng.uniform(0.3, 0.8);
  std::vector<std::vector<Interval>> bs(boxes, std::vector<Interval>(d));
  for (auto& box : bs) {
    for (std::size_t a = 0; a < d; ++a) {
      const double c = rng.uniform(-2.0, 2.0);
      const double r = rng.uniform(0.1, 1.5);
      box[a] = {c - r, c + r};
    }
  }
  std::vector<std::uint8_t> inc(spec.size(), 0);
  std::vector<double> c;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    c = spec.cell_center(i);
    bool in = false;
    for (const auto& box : bs) {
      bool b = true;
      for (std::size_t a = 0; a < d && b; ++a) b = c[a] >= box[a].lo && c[a] <= box[a].hi;
      in = in || b;
    }
    const double u = rng.uniform();
    inc[i] = in && u < p;
  }
  return RegionMask(spec, std::move(inc));
}

std::vector<double> random_ks(std::size_t n, SplitMix64& rng) {
  static constexpr double kChoices[] = {0.5, 1.0, 4.0};
  std::vector<double> ks(n);
  for (double& k : ks) k = kChoices[rng.below(3)];
  return ks;
}

}  // namespace

SmallBallInstance make_small_ball_instance(std::size_t d, std::size_t n, std::uint64_t seed,
                                           const std::vector<double>& fixed) {
  if (d < 1 || d > 2) throw PreconditionError("random small-ball instances support d = 1 or 2");
  if (n == 0) throw PreconditionError("n must be at least 1");
  if (!fixed.empty() && fixed.size() != n) throw PreconditionError("need one K per variable");
  SplitMix64 rng(seed);
  std::vector<double> ks = fixed.empty() ? random_ks(n, rng) : fixed;
  // Cell width and counts keep every grid roomy enough for K = 0.5.
  const double w = d == 1 ? 1.0 / 16.0 : 1.0 / 8.0;
  const std::size_t lo = d == 1 ? 48 : 16;
  const std::size_t hi = d == 1 ? 64 : 32;
  std::vector<GridDensity> fs;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = between(rng, lo, hi);
    const GridSpec spec = shifted_cube(d, m, w, rng, m / 4);
    const std::uint64_t fseed = rng.next();
    fs.push_back(generate_bounded_density({d, ks[i], spec, fseed, random_shape(rng)}));
  }
  const std::size_t sc = static_cast<std::size_t>(std::llround(12.0 / w));
  RegionMask s = random_mask(GridSpec::centered_cube(d, sc, w), rng);
  return {std::move(fs), std::move(ks), std::move(s)};
}

BllInstance make_bll_instance(std::uint64_t seed) {
  SplitMix64 rng(seed);
  const std::size_t d = between(rng, 1, 2);
  const std::size_t n = d == 1 ? between(rng, 1, 4) : between(rng, 1, 2);
  const std::size_t k = n + rng.below(3);
  std::vector<double> entries(k * n);
  for (int attempt = 0;; ++attempt) {
    if (attempt == 1000) throw PreconditionError("could not draw a full-rank coefficient matrix");
    for (double& e : entries) e = static_cast<double>(rng.below(3)) - 1.0;
    bool zero_row = false;
    for (std::size_t j = 0; j < k; ++j) {
      bool all0 = true;
      for (std::size_t m = 0; m < n; ++m) all0 = all0 && entries[j * n + m] == 0.0;
      zero_row = zero_row || all0;
    }
    if (zero_row) continue;
    Eigen::MatrixXd A(k, n);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t m = 0; m < n; ++m) {
        A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) = entries[j * n + m];
      }
    }
    if (static_cast<std::size_t>(Eigen::FullPivLU<Eigen::MatrixXd>(A).rank()) == n) break;
  }
  const double w = 0.25;
  std::vector<GridDensity> fs;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t m = between(rng, 4, 16);
    const GridSpec spec = GridSpec::centered_cube(d, m, w);
    const double K = rng.uniform(1.5, 4.0);
    const std::uint64_t fseed = rng.next();
    fs.push_back(generate_bounded_density({d, K, spec, fseed, random_shape(rng)}));
  }
  return {std::move(fs), CoefficientMatrix(k, n, std::move(entries)), n};
}

BridgeInstance make_bridge_instance(std::uint64_t seed) {
  SplitMix64 rng(seed);
  const std::size_t d = between(rng, 1, 2);
  const double w = d == 1 ? 0.125 : 0.25;
  const std::size_t top = d == 1 ? 16 : 7;
  auto odd = [&] { return 2 * between(rng, 2, top) + 1; };
  const std::size_t m1 = odd(), m2 = odd();
  const std::uint64_t s1 = rng.next(), s2 = rng.next();
  GridDensity p1 = generate_bounded_density({d, 4.0, GridSpec::centered_cube(d, m1, w), s1, random_shape(rng)});
  GridDensity p2 = generate_bounded_density({d, 4.0, GridSpec::centered_cube(d, m2, w), s2, random_shape(rng)});
  // odd, origin-centered: sums of centers land on mask cell centers
  const std::size_t ms = std::min<std::size_t>(m1 + m2 - 1, kBllMaxCellsPerAxis - 1) | 1;
  RegionMask s = random_mask(GridSpec::centered_cube(d, ms, w), rng);
  return {std::move(p1), std::move(p2), std::move(s)};
}

DecomposeInstance make_decompose_instance(std::uint64_t seed) {
  SplitMix64 rng(seed);
  const std::size_t d = between(rng, 1, 2);
  const std::size_t m = d == 1 ? between(rng, 8, 64) : between(rng, 4, 16);
  const GridSpec spec = GridSpec::centered_cube(d, m, d == 1 ? 0.125 : 0.25);
  const double K = rng.uniform(1.0, 4.0);
  const DensityShape shape = rng.below(2) == 0 ? DensityShape::multi_bump : DensityShape::random_cells;
  // Clamping can leave only the values 0 and K (an extreme point); redraw then.
  for (int attempt = 0; attempt < 100; ++attempt) {
    GridDensity f = generate_bounded_density({d, K, spec, rng.next(), shape});
    double lo = INFINITY, hi = 0.0;
    for (double v : f.values()) {
      if (v > 0.0) lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(lo < hi)) continue;
    const double y = lo + rng.uniform(0.2, 0.9) * (hi - lo);
    const double delta = rng.uniform(0.1, 0.9) * std::min(K / y - 1.0, 1.0);
    return {std::move(f), K, y, delta};
  }
  throw PreconditionError("decompose instance: every draw was flat on its support");
}

namespace {

template <typename Make>
std::vector<VerificationReport> sweep(std::size_t count, std::uint64_t base_seed, std::size_t threads, Make make) {
  std::vector<VerificationReport> out(count);
  parallel_for(
      count,
      [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(base_seed, i);
        out[i] = make(seed);
        out[i].seed = seed;
      },
      threads);
  return out;
}

}  // namespace

std::vector<VerificationReport> sweep_theorem1(std::size_t d, std::size_t n, std::size_t count,
                                               std::uint64_t base_seed, std::size_t resolution,
                                               const std::vector<double>& Ks, std::size_t threads) {
  return sweep(count, base_seed, threads, [&](std::uint64_t seed) {
    const SmallBallInstance inst = make_small_ball_instance(d, n, seed, Ks);
    return check_theorem1(inst.fs, inst.Ks, inst.s, resolution);
  });
}

std::vector<VerificationReport> sweep_corollary(std::size_t d, std::size_t n, std::size_t count,
                                                std::uint64_t base_seed, std::size_t resolution,
                                                const std::vector<double>& Ks, std::size_t threads) {
  return sweep(count, base_seed, threads, [&](std::uint64_t seed) {
    const SmallBallInstance inst = make_small_ball_instance(d, n, seed, Ks);
    return check_corollary(inst.fs, inst.Ks, resolution);
  });
}

std::vector<VerificationReport> sweep_bll(std::size_t count, std::uint64_t base_seed, std::size_t threads) {
  return sweep(count, base_seed, threads, [](std::uint64_t seed) {
    const BllInstance inst = make_bll_instance(seed);
    return check_bll(inst.fs, inst.a, inst.n);
  });
}

std::vector<VerificationReport> sweep_bridge(std::size_t count, std::uint64_t base_seed, std::size_t threads) {
  return sweep(count, base_seed, threads, [](std::uint64_t seed) {
    const BridgeInstance inst = make_bridge_instance(seed);
    return check_bridge(inst.p1, inst.p2, inst.s);
  });
}

std::vector<VerificationReport> sweep_decompose(std::size_t count, std::uint64_t base_seed,
                                                std::size_t threads) {
  return sweep(count, base_seed, threads, [](std::uint64_t seed) {
    const DecomposeInstance inst = make_decompose_instance(seed);
    return extreme_point_decompose(inst.f, inst.K, inst.y, inst.delta).report;
  });
}

VerificationReport extremal_equality(std::size_t d, const std::vector<double>& Ks, std::size_t resolution) {
  const ExtremalSum ex = extremal_sum(d, Ks, resolution);
  double v = 0.0;
  for (double K : Ks) v += 1.0 / K;
  v /= static_cast<double>(Ks.size());
  const RegionMask s = centered_ball_mask(ex.sum.spec(), std::min(v, ex.sum.spec().volume()));
  const SmallBallBracket lhs = small_ball_bracket(ex.sum, Ks.size(), s);
  const BoundResult rhs = rogozin_bound_prob(ex, s.measure());
  const double measured = std::max(0.0, lhs.value - lhs.lower) + rhs.upper_gap;
  const double budget = a_priori_prob_budget(ex, v);
  char detail[256];
  std::snprintf(detail, sizeof detail,
                "d=%zu n=%zu resolution=%zu set_volume=%.17g lhs_lower=%.17g measured_budget=%.17g", d, Ks.size(),
                resolution, s.measure(), lhs.lower, measured);
  return make_report("extremal", lhs.value, rhs.value, budget, detail);
}

}  // namespace smallball
