#include "smallball/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "smallball/error.hpp"
#include "smallball/extremal.hpp"
#include "smallball/rearrange.hpp"
#include "smallball/rng.hpp"
#include "smallball/summation.hpp"
#include "smallball/sumdist.hpp"

namespace smallball {
namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

std::vector<double> raw_multi_bump(const GridSpec& spec, SplitMix64& rng) {
  const std::size_t d = spec.dim();
  const std::size_t bumps = 1 + rng.below(4);
  std::vector<std::vector<double>> centers(bumps, std::vector<double>(d));
  std::vector<std::vector<double>> sigmas(bumps, std::vector<double>(d));
  std::vector<double> weights(bumps);
  for (std::size_t b = 0; b < bumps; ++b) {
    for (std::size_t a = 0; a < d; ++a) {
      const auto [lo, hi] = spec.extents()[a];
      centers[b][a] = rng.uniform(lo, hi);
      sigmas[b][a] = rng.uniform(0.05, 0.3) * (hi - lo);
    }
    weights[b] = rng.uniform(0.2, 1.0);
  }
  std::vector<double> g(spec.size());
  std::vector<double> c;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    c = spec.cell_center(i);
    double v = 0.0;
    for (std::size_t b = 0; b < bumps; ++b) {
      double q = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double t = (c[a] - centers[b][a]) / sigmas[b][a];
        q += t * t;
      }
      v += weights[b] * std::exp(-0.5 * q);
    }
    g[i] = v;
  }
  return g;
}

std::vector<double> raw_random_cells(const GridSpec& spec, SplitMix64& rng) {
  const double p = rng.uniform(0.2, 1.0);
  std::vector<double> g(spec.size());
  for (double& v : g) v = rng.uniform() < p ? rng.uniform() : 0.0;
  return g;
}

std::vector<double> raw_indicator_union(const GridSpec& spec, SplitMix64& rng) {
  const std::size_t d = spec.dim();
  const std::size_t boxes = 1 + rng.below(3);
  std::vector<std::vector<Interval>> bs(boxes, std::vector<Interval>(d));
  for (auto& box : bs) {
    for (std::size_t a = 0; a < d; ++a) {
      const auto [lo, hi] = spec.extents()[a];
      double x = rng.uniform(lo, hi), y = rng.uniform(lo, hi);
      if (x > y) std::swap(x, y);
      // at least one cell wide so the box always catches a center
      y = std::max(y, x + spec.cell_width(a));
      box[a] = {x, y};
    }
  }
  std::vector<double> g(spec.size(), 0.0);
  std::vector<double> c;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    c = spec.cell_center(i);
    for (const auto& box : bs) {
      bool in = true;
      for (std::size_t a = 0; a < d && in; ++a) in = c[a] >= box[a].lo && c[a] <= box[a].hi;
      if (in) {
        g[i] = 1.0;
        break;
      }
    }
  }
  return g;
}

double cell_mass(const std::vector<double>& v, double cv) { return compensated_sum(v) * cv; }

void check_hypotheses(std::span<const GridDensity> fs, std::span<const double> Ks) {
  if (fs.empty()) throw PreconditionError("need at least one density");
  if (fs.size() != Ks.size()) {
    throw PreconditionError("got " + std::to_string(fs.size()) + " densities but " + std::to_string(Ks.size()) +
                            " values of K");
  }
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (!(Ks[i] > 0.0) || !std::isfinite(Ks[i])) throw PreconditionError("every K must be positive and finite");
    const double m = ess_sup(fs[i]);
    if (m > Ks[i]) {
      throw PreconditionError(fmt("hypothesis violated: ess_sup(f_%zu) = %.17g exceeds K_%zu = %.17g", i + 1, m,
                                  i + 1, Ks[i]));
    }
  }
}

}  // namespace

std::string_view shape_name(DensityShape s) {
  switch (s) {
    case DensityShape::multi_bump: return "multi-bump";
    case DensityShape::random_cells: return "random-cells";
    case DensityShape::indicator_union: return "indicator-union";
  }
  return "?";
}

DensityShape parse_shape(std::string_view name) {
  if (name == "multi-bump") return DensityShape::multi_bump;
  if (name == "random-cells") return DensityShape::random_cells;
  if (name == "indicator-union") return DensityShape::indicator_union;
  throw PreconditionError("unknown shape '" + std::string(name) + "'");
}

GridDensity generate_bounded_density(const RandomDensitySpec& rds) {
  const GridSpec& spec = rds.spec;
  if (spec.dim() != rds.d) throw ShapeError("generator: grid dimension differs from d");
  if (!(rds.K > 0.0) || !std::isfinite(rds.K)) throw PreconditionError("generator: K must be positive");
  const double K = rds.K;
  const double kv = K * spec.volume();
  if (kv < 1.0 - 1e-12) {
    throw PreconditionError(fmt("infeasible: K * grid volume = %.17g < 1, no density bounded by K fits", kv));
  }
  if (kv <= 1.0 + 1e-9) return GridDensity(spec, std::vector<double>(spec.size(), K));

  const double cv = spec.cell_volume();
  SplitMix64 rng(rds.seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> g;
    switch (rds.shape) {
      case DensityShape::multi_bump: g = raw_multi_bump(spec, rng); break;
      case DensityShape::random_cells: g = raw_random_cells(spec, rng); break;
      case DensityShape::indicator_union: g = raw_indicator_union(spec, rng); break;
    }
    const double gmax = *std::max_element(g.begin(), g.end());
    if (!(gmax > 0.0)) continue;
    const double tau = rng.uniform(1.0, 3.0);
    // A support too small for S_K gets a 5% floor on every cell, which always
    // leaves room since K * volume > 1.
    for (int floored = 0; floored < 2; ++floored) {
      if (floored) {
        for (double& x : g) x += 0.05 * gmax;
      }
      double scale = K * tau / gmax;
      std::vector<double> h(g.size());
      double mass = 0.0;
      for (int doubling = 0; doubling < 200; ++doubling) {
        for (std::size_t i = 0; i < g.size(); ++i) h[i] = std::min(scale * g[i], K);
        mass = cell_mass(h, cv);
        if (mass >= 1.0) break;
        scale *= 2.0;
      }
      if (!(mass >= 1.0)) continue;
      for (double& x : h) x = std::min(x / mass, K);
      return GridDensity(spec, std::move(h));
    }
  }
  throw PreconditionError("generator: no feasible draw in 100 attempts (support too small for this K)");
}

VerificationReport check_theorem1(std::span<const GridDensity> fs, std::span<const double> Ks,
                                  const RegionMask& s, std::size_t resolution) {
  check_hypotheses(fs, Ks);
  const std::size_t d = fs[0].spec().dim();
  const SmallBallBracket lhs = small_ball_bracket(fs, s);
  const double v = s.measure();
  double rhs = 0.0, rhs_gap = 0.0;
  if (v > 0.0) {
    const BoundResult r = rogozin_bound_prob(d, Ks, v, resolution);
    rhs = r.value;
    rhs_gap = r.upper_gap;
  }
  const double lhs_gap = std::max(0.0, lhs.value - lhs.lower);
  return make_report("theorem1", lhs.value, rhs, lhs_gap + rhs_gap,
                     fmt("d=%zu n=%zu set_volume=%.17g lhs_bracket=[%.17g;%.17g] rhs_upper_gap=%.17g", d, fs.size(),
                         v, lhs.lower, lhs.upper, rhs_gap));
}

VerificationReport check_corollary(std::span<const GridDensity> fs, std::span<const double> Ks,
                                   std::size_t resolution) {
  check_hypotheses(fs, Ks);
  const std::size_t d = fs[0].spec().dim();
  const std::size_t n = fs.size();
  const GridDensity sum = sum_density(fs);
  const double lhs = ess_sup(sum);
  const double lhs_floor = n >= 2 ? ess_sup(min_filter(sum, (n - 1) / 2)) : lhs;
  const BoundResult r = rogozin_bound_density(d, Ks, resolution);
  const double lhs_gap = lhs - lhs_floor;
  return make_report("corollary", lhs, r.value, lhs_gap + r.upper_gap,
                     fmt("d=%zu n=%zu lhs_floor=%.17g rhs_upper_gap=%.17g", d, n, lhs_floor, r.upper_gap));
}

std::size_t rearrangement_slack_cells(const GridSpec& spec) {
  double diag2 = 0.0, w_min = INFINITY;
  for (std::size_t a = 0; a < spec.dim(); ++a) {
    diag2 += spec.cell_width(a) * spec.cell_width(a);
    w_min = std::min(w_min, spec.cell_width(a));
  }
  return static_cast<std::size_t>(std::floor(1.5 * std::sqrt(diag2) / w_min)) + 1;
}

VerificationReport check_bll(std::span<const GridDensity> fs, const CoefficientMatrix& a, std::size_t n) {
  std::vector<GridDensity> gs;
  std::size_t slack = 0;
  for (const auto& f : fs) {
    if (!f.spec().origin_centered()) throw PreconditionError("check_bll: every grid must be origin-centered");
    gs.push_back(symmetric_decreasing_rearrangement(f));
    slack = std::max(slack, rearrangement_slack_cells(f.spec()));
  }
  const BllBracket lhs = bll_bracket(fs, a, n);
  const BllBracket rhs = bll_bracket(gs, a, n, slack);
  const double budget = std::max(0.0, lhs.value - lhs.lower) + std::max(0.0, rhs.upper - rhs.value) + 1e-9;
  return make_report("bll", lhs.value, rhs.value, budget,
                     fmt("k=%zu n=%zu d=%zu lhs_lower=%.17g rhs_upper=%.17g nodes=%zu", a.rows(), n,
                         fs.empty() ? 0 : fs[0].spec().dim(), lhs.lower, rhs.upper, lhs.nodes + rhs.nodes));
}

VerificationReport check_bridge(const GridDensity& p1, const GridDensity& p2, const RegionMask& s) {
  const std::vector<GridDensity> fs{p1, p2, s.indicator(1.0)};
  const double bll = bll_integral(fs, theorem3_coefficients(2), 2);
  const std::vector<GridDensity> ps{p1, p2};
  const double prob = small_ball_prob(ps, s);
  return make_report("bridge", std::abs(bll - prob), 0.0, 1e-9,
                     fmt("bll=%.17g small_ball=%.17g", bll, prob));
}

Decomposition extreme_point_decompose(const GridDensity& f, double K, double y, double delta) {
  if (!(K > 0.0) || !std::isfinite(K)) throw PreconditionError("decompose: K must be positive");
  const double top = ess_sup(f);
  if (top > K) throw PreconditionError(fmt("decompose: ess_sup(f) = %.17g exceeds K = %.17g", top, K));
  const auto& v = f.values();
  if (std::all_of(v.begin(), v.end(), [K](double x) { return x == 0.0 || x == K; })) {
    throw PreconditionError("decompose: f is extremal (values only 0 and K), it admits no decomposition");
  }
  if (!(y > 0.0 && y < K)) throw PreconditionError("decompose: y must lie in (0, K)");
  const double dmax = std::min(K / y - 1.0, 1.0);
  if (!(delta > 0.0 && delta < dmax)) {
    throw PreconditionError(fmt("decompose: delta must lie in (0, min(K/y - 1, 1)) = (0, %.17g)", dmax));
  }
  std::vector<std::size_t> x;
  CompensatedSum total;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0 && v[i] < y) {
      x.push_back(i);
      total.add(v[i]);
    }
  }
  if (x.empty()) throw PreconditionError("decompose: no cells with 0 < f < y (support(f) minus A_y is null)");

  const double cv = f.spec().cell_volume();
  const double half = 0.5 * total.value();
  std::vector<double> p1 = v, p2 = v;
  CompensatedSum m1, m2;
  bool first = true;
  for (std::size_t i : x) {
    const double grown = (1.0 + delta) * v[i];
    if (grown > K) throw PreconditionError("decompose: (1 + delta) f exceeds K after rounding; pick a smaller delta");
    // 2f - grown is exact (Sterbenz), so grown + shrunk == 2f.
    const double shrunk = 2.0 * v[i] - grown;
    if (first) {
      p1[i] = shrunk;
      p2[i] = grown;
      m1.add(v[i]);
      if (m1.value() >= half) first = false;
    } else {
      p1[i] = grown;
      p2[i] = shrunk;
      m2.add(v[i]);
    }
  }
  const double imbalance = std::abs(m1.value() - m2.value()) * cv;

  GridDensity g1(f.spec(), std::move(p1));
  GridDensity g2(f.spec(), std::move(p2));
  std::size_t midpoint_failures = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if ((g1[i] + g2[i]) / 2.0 != v[i]) ++midpoint_failures;
  }
  const bool bounded = ess_sup(g1) <= K && ess_sup(g2) <= K;
  const double mf = integral(f);
  const double defect = std::max(std::abs(integral(g1) - mf), std::abs(integral(g2) - mf));
  const double violations = (midpoint_failures == 0 ? 0.0 : 1.0) + (bounded ? 0.0 : 1.0);
  VerificationReport rep = make_report(
      "decompose", defect + violations, delta * imbalance, 1e-12,
      fmt("cells_X=%zu imbalance=%.17g midpoint_failures=%zu bounded=%d", x.size(), imbalance, midpoint_failures,
          bounded ? 1 : 0));
  return {std::move(g1), std::move(g2), imbalance, std::move(rep)};
}

MonteCarloEstimate monte_carlo_sum_prob(std::span<const GridDensity> fs, const RegionMask& s,
                                        std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw PreconditionError("samples must be at least 1");
  if (fs.empty()) throw PreconditionError("need at least one density");
  const GridSpec& sp = s.spec();
  const std::size_t d = sp.dim();
  std::vector<std::vector<double>> cdfs;
  for (const auto& f : fs) {
    if (f.spec().dim() != d) throw ShapeError("monte_carlo: dimension mismatch");
    std::vector<double> cdf(f.values().size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = acc += f[i];
    if (!(acc > 0.0)) throw PreconditionError("monte_carlo: density with zero mass");
    cdfs.push_back(std::move(cdf));
  }

  SplitMix64 rng(seed);
  std::vector<std::size_t> idx(d), cell(d);
  std::vector<double> x(d);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < samples; ++t) {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto& cdf = cdfs[i];
      const double u = rng.uniform() * cdf.back();
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      const GridSpec& g = fs[i].spec();
      g.unravel(static_cast<std::size_t>(it - cdf.begin()), idx);
      for (std::size_t a = 0; a < d; ++a) {
        x[a] += g.extents()[a].lo + (static_cast<double>(idx[a]) + rng.uniform()) * g.cell_width(a);
      }
    }
    bool in = true;
    for (std::size_t a = 0; a < d && in; ++a) {
      const double u = std::floor((x[a] - sp.extents()[a].lo) / sp.cell_width(a));
      in = u >= 0.0 && u < static_cast<double>(sp.counts()[a]);
      if (in) cell[a] = static_cast<std::size_t>(u);
    }
    if (in && s.contains(sp.ravel(cell))) ++hits;
  }
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace smallball
