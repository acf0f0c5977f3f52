#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "smallball/error.hpp"
#include "smallball/extremal.hpp"
#include "smallball/sumdist.hpp"
#include "smallball/sweeps.hpp"
#include "smallball/verify.hpp"

using namespace smallball;
using testing::line;
using testing::unit_box;

TEST_CASE("generator contract") {
  const GridSpec spec = GridSpec::centered_cube(2, 16, 1.0 / 16);  // unit volume
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto shape = static_cast<DensityShape>(seed % 3);
    const GridDensity f = generate_bounded_density({2, 2.0, spec, seed, shape});
    CHECK(ess_sup(f) <= 2.0);
    CHECK(std::abs(integral(f) - 1.0) <= 1e-9);
  }
  const GridDensity a = generate_bounded_density({2, 2.0, spec, 77, DensityShape::multi_bump});
  const GridDensity b = generate_bounded_density({2, 2.0, spec, 77, DensityShape::multi_bump});
  CHECK(a.values() == b.values());

  const GridDensity forced = generate_bounded_density({2, 1.0, spec, 3, DensityShape::random_cells});
  for (double v : forced.values()) CHECK(v == 1.0);
  CHECK_THROWS_AS(generate_bounded_density({2, 0.9, spec, 3, DensityShape::random_cells}), PreconditionError);

  CHECK(parse_shape("indicator-union") == DensityShape::indicator_union);
  CHECK(shape_name(DensityShape::random_cells) == "random-cells");
  CHECK_THROWS_AS(parse_shape("blob"), PreconditionError);
}

TEST_CASE("small-ball inequality harness") {
  SUBCASE("equality case") {
    const std::vector<double> ks{1.0, 2.0};
    const ExtremalSum ex = extremal_sum(1, ks, 512);
    const std::vector<GridDensity> fs{ex.balls[0].density, ex.balls[1].density};
    const RegionMask s = centered_ball_mask(ex.sum.spec(), 0.75);
    std::vector<double> kk{ess_sup(fs[0]), ess_sup(fs[1])};
    const VerificationReport r = check_theorem1(fs, kk, s, 512);
    CHECK(r.passed);
    CHECK(std::abs(r.lhs - r.rhs) <= r.error_budget + 1e-3);
  }
  SUBCASE("single variable") {
    const GridSpec spec = GridSpec::centered_cube(1, 40, 0.05);
    const GridDensity f = generate_bounded_density({1, 2.0, spec, 5, DensityShape::multi_bump});
    const RegionMask s = centered_ball_mask(spec, 0.3);
    const std::vector<GridDensity> fs{f};
    const std::vector<double> ks{2.0};
    const VerificationReport r = check_theorem1(fs, ks, s, 512);
    CHECK(r.passed);
    CHECK(r.lhs <= 2.0 * s.measure() + 1e-12);
    CHECK(std::abs(r.rhs - std::min(1.0, 2.0 * s.measure())) <= r.error_budget + 1e-12);
  }
  SUBCASE("shifted boxes") {
    const GridSpec spec = line(0, 1, 64);
    const GridDensity box(spec, std::vector<double>(64, 1.0));
    const std::vector<GridDensity> fs{box, box};
    // mask cells centered on the sum grid's centers j/64; S = (1/2, 3/2]
    const GridSpec mask_spec({{1.0 / 128, 2.0 - 1.0 / 128}}, {127});
    std::vector<std::uint8_t> in(127, 0);
    for (std::size_t i = 32; i < 96; ++i) in[i] = 1;
    const std::vector<double> ks{1.0, 1.0};
    const VerificationReport r = check_theorem1(fs, ks, RegionMask(mask_spec, in), 1024);
    CHECK(r.passed);
    CHECK(std::abs(r.lhs - 0.75) <= 2e-2);
    CHECK(std::abs(r.rhs - 0.75) <= 2e-3);
  }
  SUBCASE("hypothesis violation names the variable") {
    const std::vector<GridDensity> fs{unit_box(8), unit_box(8)};
    const std::vector<double> ks{1.0, 0.5};
    try {
      check_theorem1(fs, ks, RegionMask(line(-1, 1, 8)), 64);
      FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
      CHECK(std::string(e.what()).find("K_2") != std::string::npos);
    }
  }
}

TEST_CASE("maximum-density harness") {
  const std::vector<double> ks{1.0, 1.0};
  const std::vector<GridDensity> boxes{unit_box(64), unit_box(64)};
  const VerificationReport r = check_corollary(boxes, ks, 1024);
  CHECK(r.passed);
  CHECK(std::abs(r.lhs - 1.0) <= 1e-3);
  CHECK(std::abs(r.rhs - 1.0) <= 1e-3);

  const GridSpec spec = GridSpec::centered_cube(2, 12, 0.125);
  const GridDensity f = generate_bounded_density({2, 4.0, spec, 1, DensityShape::indicator_union});
  const std::vector<GridDensity> one{f};
  const std::vector<double> k4{4.0};
  const VerificationReport s = check_corollary(one, k4, 64);
  CHECK(s.passed);
  CHECK(s.lhs <= 4.0);
}

TEST_CASE("bll and bridge harnesses") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const BllInstance inst = make_bll_instance(seed);
    CHECK(check_bll(inst.fs, inst.a, inst.n).passed);
    const BridgeInstance b = make_bridge_instance(seed);
    const VerificationReport r = check_bridge(b.p1, b.p2, b.s);
    CHECK(r.passed);
    CHECK(r.lhs <= 1e-9);
  }
  CHECK_THROWS_AS(check_bll(std::vector<GridDensity>{GridDensity(line(0, 1, 4), {1, 1, 1, 1})},
                            CoefficientMatrix(1, 1, {1.0}), 1),
                  PreconditionError);
}

TEST_CASE("extreme point decomposition") {
  SUBCASE("four-cell instance") {
    const double scale = 1.0 / (2.0 + 3 * (2.0 / 3.0));
    const GridDensity f(line(0, 4, 4), {2.0 * scale, 2.0 / 3.0 * scale, 2.0 / 3.0 * scale, 2.0 / 3.0 * scale});
    const double K = 2.0 * scale;
    const double y = 1.0 * scale;
    const Decomposition dec = extreme_point_decompose(f, K, y, 0.5);
    CHECK(dec.p1.values() != dec.p2.values());
    for (std::size_t i = 0; i < 4; ++i) CHECK((dec.p1[i] + dec.p2[i]) / 2.0 == f[i]);
    CHECK(ess_sup(dec.p1) <= K);
    CHECK(ess_sup(dec.p2) <= K);
    CHECK(dec.report.passed);
    CHECK(dec.p1[0] == f[0]);
    CHECK(std::abs(integral(dec.p1) - integral(f)) <= 0.5 * dec.imbalance + 1e-12);
  }
  SUBCASE("extremal input is rejected") {
    const GridSpec spec = GridSpec::centered_cube(2, 9, 0.25);
    const RegionMask ball = centered_ball_mask(spec, 0.5);
    CHECK_THROWS_AS(extreme_point_decompose(ball.indicator(2.0), 2.0, 1.0, 0.5), PreconditionError);
  }
  SUBCASE("bad parameters") {
    const GridDensity f(line(0, 4, 4), {0.5, 0.25, 0.125, 0.125});
    CHECK_THROWS_AS(extreme_point_decompose(f, 0.4, 0.2, 0.1), PreconditionError);
    CHECK_THROWS_AS(extreme_point_decompose(f, 1.0, 1.0, 0.1), PreconditionError);
    CHECK_THROWS_AS(extreme_point_decompose(f, 1.0, 0.6, 0.9), PreconditionError);
    CHECK_THROWS_AS(extreme_point_decompose(f, 1.0, 0.1, 0.5), PreconditionError);
    CHECK_NOTHROW(extreme_point_decompose(f, 1.0, 0.3, 0.5));
  }
  SUBCASE("random instances") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const DecomposeInstance inst = make_decompose_instance(seed);
      const Decomposition dec = extreme_point_decompose(inst.f, inst.K, inst.y, inst.delta);
      CHECK(dec.report.passed);
      for (std::size_t i = 0; i < inst.f.values().size(); ++i) CHECK((dec.p1[i] + dec.p2[i]) / 2.0 == inst.f[i]);
      CHECK(ess_sup(dec.p1) <= inst.K);
      CHECK(ess_sup(dec.p2) <= inst.K);
    }
  }
}

TEST_CASE("monte carlo estimate") {
  const GridDensity box = unit_box(64);
  const std::vector<GridDensity> fs{box, box};
  const GridSpec mask_spec = GridSpec::centered_cube(1, 64, 1.0 / 32);
  const RegionMask all(mask_spec, std::vector<std::uint8_t>(64, 1));
  const MonteCarloEstimate e = monte_carlo_sum_prob(fs, all, 1000, 1);
  CHECK(e.estimate == 1.0);
  CHECK(e.standard_error == 0.0);

  const RegionMask s = centered_ball_mask(mask_spec, 1.0);
  const MonteCarloEstimate a = monte_carlo_sum_prob(fs, s, 200000, 9);
  const MonteCarloEstimate b = monte_carlo_sum_prob(fs, s, 200000, 9);
  CHECK(a.estimate == b.estimate);
  CHECK(std::abs(a.estimate - 0.75) <= 4 * a.standard_error);
  CHECK_THROWS_AS(monte_carlo_sum_prob(fs, s, 0, 1), PreconditionError);
}

TEST_CASE("reports and csv") {
  const VerificationReport r = make_report("x", 1.0, 0.5, 0.25, "a,b");
  CHECK_FALSE(r.passed);
  CHECK(r.margin == -0.25);
  CHECK(to_csv(r).find("a;b") != std::string::npos);
  CHECK(make_report("x", 1.0, 0.75, 0.25, "").passed);
}

TEST_CASE("sweeps do not depend on the thread count") {
  const auto a = sweep_theorem1(1, 2, 6, 42, 128, {}, 1);
  const auto b = sweep_theorem1(1, 2, 6, 42, 128, {}, 3);
  CHECK(to_csv(a) == to_csv(b));
  const auto c = sweep_decompose(8, 5, 1);
  const auto d = sweep_decompose(8, 5, 4);
  CHECK(to_csv(c) == to_csv(d));
  for (const auto& r : a) CHECK(r.passed);
}
