#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "smallball/error.hpp"
#include "smallball/rearrange.hpp"
#include "smallball/sumdist.hpp"
#include "smallball/verify.hpp"

using namespace smallball;
using testing::line;
using testing::sup_diff;
using testing::unit_box;

namespace {

GridDensity random_density(const GridSpec& spec, std::uint64_t seed, double K = 3.0) {
  return generate_bounded_density({spec.dim(), K, spec, seed, static_cast<DensityShape>(seed % 3)});
}

}  // namespace

TEST_CASE("box convolved with itself is the triangle") {
  const GridDensity box = unit_box(64);
  const GridDensity tri = convolve(box, box);
  CHECK(tri.spec().counts()[0] == 127);
  CHECK(tri.spec().extents()[0].lo == doctest::Approx(-1.0 + 1.0 / 128));
  CHECK(ess_sup(tri) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tri[63] == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < 127; ++i) {
    const double t = tri.spec().center(0, i);
    CHECK(std::abs(tri[i] - (1.0 - std::abs(t))) <= 1e-12);
  }
  CHECK(std::abs(integral(tri) - 1.0) <= 1e-12);
}

TEST_CASE("output centers are sums of input centers") {
  const GridDensity f(GridSpec({{0.3, 1.3}}, {10}), std::vector<double>(10, 1.0));
  const GridDensity g(GridSpec({{-2.0, -1.5}}, {5}), std::vector<double>(5, 2.0));
  const GridDensity h = convolve(f, g);
  CHECK(h.spec().counts()[0] == 14);
  CHECK(h.spec().center(0, 0) == doctest::Approx(f.spec().center(0, 0) + g.spec().center(0, 0)).epsilon(1e-14));
  CHECK(h.spec().center(0, 13) == doctest::Approx(f.spec().center(0, 9) + g.spec().center(0, 4)).epsilon(1e-14));
}

TEST_CASE("convolution with a one-cell delta is the identity") {
  const GridSpec spec = GridSpec::centered_cube(2, 12, 0.25);
  const GridDensity delta(GridSpec::centered_cube(2, 1, 0.25), {16.0});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GridDensity f = random_density(spec, seed);
    const GridDensity g = convolve(f, delta);
    CHECK(g.spec() == f.spec());
    CHECK(sup_diff(f, g) <= 1e-14);
  }
}

TEST_CASE("convolution preconditions") {
  CHECK_THROWS_AS(convolve(unit_box(8), unit_box(16)), ShapeError);
  CHECK_THROWS_AS(convolve(unit_box(8), GridDensity(GridSpec::centered_cube(2, 8, 0.125))), ShapeError);
}

TEST_CASE("convolution properties") {
  const std::vector<GridSpec> specs{GridSpec::centered_cube(1, 50, 0.05), GridSpec::centered({12, 7}, 0.125),
                                    GridSpec::centered_cube(3, 6, 0.25)};
  for (const GridSpec& spec : specs) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const GridDensity f = random_density(spec, seed);
      const GridDensity g = random_density(spec, seed + 50, 5.0);
      const GridDensity h = random_density(spec, seed + 99, 2.0);

      const GridDensity direct = convolve(f, g, ConvolutionMethod::direct);
      const GridDensity fft = convolve(f, g, ConvolutionMethod::fft);
      CHECK(sup_diff(direct, fft) <= 1e-9);
      CHECK(std::abs(integral(direct) - integral(f) * integral(g)) <= 1e-9);
      CHECK(sup_diff(direct, convolve(g, f, ConvolutionMethod::direct)) <= 1e-9);

      const GridDensity left = convolve(convolve(f, g), h);
      const GridDensity right = convolve(f, convolve(g, h));
      CHECK(left.spec().counts() == right.spec().counts());
      CHECK(sup_diff(left, right) <= 1e-9);
    }
  }
}

TEST_CASE("sum_density") {
  const GridDensity box = unit_box(65);
  const std::vector<GridDensity> one{box};
  CHECK(sum_density(one).values() == box.values());
  const std::vector<GridDensity> three{box, box, box};
  const GridDensity s = sum_density(three);
  CHECK(s.spec().counts()[0] == 193);
  CHECK(std::abs(s[96] - 0.75) <= 1e-3);
  CHECK(std::abs(integral(s) - 1.0) <= 1e-12);
}

TEST_CASE("small-ball probability of two boxes") {
  const GridDensity box = unit_box(65);
  const std::vector<GridDensity> fs{box, box};
  const GridSpec mask_spec = GridSpec::centered_cube(1, 131, 1.0 / 65);
  const RegionMask s = centered_ball_mask(mask_spec, 1.0);
  CHECK(std::abs(small_ball_prob(fs, s) - 0.75) <= 1e-3);
  const SmallBallBracket b = small_ball_bracket(fs, s);
  CHECK(b.lower <= 0.75);
  CHECK(b.upper >= 0.75);
  CHECK(b.lower <= b.value);
  CHECK(b.value <= b.upper);

  CHECK(small_ball_prob(fs, RegionMask(mask_spec)) == 0.0);
  const RegionMask all(mask_spec, std::vector<std::uint8_t>(mask_spec.size(), 1));
  CHECK(std::abs(small_ball_prob(fs, all) - 1.0) <= 1e-9);
}

TEST_CASE("bridge coefficient matrix") {
  CHECK(theorem3_coefficients(1) == CoefficientMatrix({{1}, {1}}));
  CHECK(theorem3_coefficients(2) == CoefficientMatrix({{1, 0}, {0, 1}, {1, 1}}));
  CHECK(theorem3_coefficients(3) == CoefficientMatrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}}));
  CHECK_THROWS_AS(theorem3_coefficients(0), PreconditionError);
}

TEST_CASE("brute-force product integral examples") {
  const GridDensity box = unit_box(16);
  const std::vector<GridDensity> one{box};
  CHECK(std::abs(bll_integral(one, CoefficientMatrix(1, 1, {1.0}), 1) - 1.0) <= 1e-9);
  const std::vector<GridDensity> two{box, box};
  CHECK(std::abs(bll_integral(two, CoefficientMatrix({{1}, {1}}), 1) - 1.0) <= 1e-9);

  const GridSpec spec = GridSpec::centered_cube(1, 9, 0.25);
  const GridDensity p1 = random_density(spec, 4);
  const GridDensity p2 = random_density(spec, 7);
  const RegionMask s = centered_ball_mask(GridSpec::centered_cube(1, 17, 0.25), 1.0);
  const std::vector<GridDensity> bridge{p1, p2, s.indicator()};
  const std::vector<GridDensity> ps{p1, p2};
  CHECK(std::abs(bll_integral(bridge, theorem3_coefficients(2), 2) - small_ball_prob(ps, s)) <= 1e-9);

  const BllBracket br = bll_bracket(two, CoefficientMatrix({{1}, {1}}), 1);
  CHECK(br.lower <= br.value);
  CHECK(br.value <= br.upper);
}

TEST_CASE("brute-force guards") {
  const GridDensity big = unit_box(65);
  const std::vector<GridDensity> one{big};
  CHECK_THROWS_AS(bll_integral(one, CoefficientMatrix(1, 1, {1.0}), 1), PreconditionError);
  const GridDensity f(GridSpec::centered_cube(2, 4, 0.25), std::vector<double>(16, 1.0));
  const std::vector<GridDensity> fs{f, f, f, f};
  CHECK_THROWS_AS(bll_integral(fs, CoefficientMatrix({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}), 4),
                  PreconditionError);
  const std::vector<GridDensity> two{f, f};
  CHECK_THROWS_AS(bll_integral(two, CoefficientMatrix({{1, 1}, {1, 1}}), 2), PreconditionError);
  CHECK_THROWS_AS(bll_integral(two, CoefficientMatrix({{1, 1}}), 2), ShapeError);
}

TEST_CASE("rearranged side dominates on small instances") {
  const GridSpec spec = GridSpec::centered_cube(1, 12, 0.25);
  const CoefficientMatrix a({{1, 0}, {0, 1}, {1, -1}});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<GridDensity> fs{random_density(spec, seed), random_density(spec, seed + 10),
                                random_density(spec, seed + 20)};
    const VerificationReport r = check_bll(fs, a, 2);
    CHECK(r.passed);
    std::vector<GridDensity> sym;
    for (const auto& f : fs) sym.push_back(symmetric_decreasing_rearrangement(f));
    const VerificationReport fixed = check_bll(sym, a, 2);
    CHECK(fixed.passed);
    CHECK(std::abs(fixed.lhs - bll_integral(sym, a, 2)) <= 1e-9);
  }
}

TEST_CASE("min and max filters bracket the density") {
  const GridSpec spec = GridSpec::centered_cube(2, 10, 0.1);
  const GridDensity f = random_density(spec, 1);
  const GridDensity lo = min_filter(f, 1), hi = max_filter(f, 1);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    CHECK(lo[i] <= f[i]);
    CHECK(f[i] <= hi[i]);
  }
  const GridDensity p = pad(f, 2);
  CHECK(p.spec().counts()[0] == 14);
  CHECK(std::abs(integral(p) - integral(f)) <= 1e-15);
}
