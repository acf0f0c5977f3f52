#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "smallball/error.hpp"
#include "smallball/extremal.hpp"
#include "smallball/rng.hpp"
#include "smallball/sumdist.hpp"

using namespace smallball;
using testing::line;

namespace {

// Density of a sum of independent uniforms on [-w_i/2, w_i/2] by the
// truncated-power formula: sum over vertex subsets of the box of widths.
double truncated_power_density(const std::vector<double>& w, double x) {
  const std::size_t n = w.size();
  const double half = std::accumulate(w.begin(), w.end(), 0.0) / 2.0;
  double prod = 1.0, fact = 1.0;
  for (std::size_t i = 0; i < n; ++i) prod *= w[i];
  for (std::size_t i = 2; i < n; ++i) fact *= static_cast<double>(i);
  double acc = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double shift = 0.0;
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        shift += w[i];
        sign = -sign;
      }
    }
    const double t = x + half - shift;
    if (t > 0) acc += sign * std::pow(t, static_cast<double>(n - 1));
  }
  return acc / (fact * prod);
}

// Irwin-Hall density for n unit widths, recentered at 0.
double irwin_hall(std::size_t n, double x) {
  const double u = x + n / 2.0;
  double acc = 0.0, fact = 1.0;
  for (std::size_t i = 2; i < n; ++i) fact *= static_cast<double>(i);
  double binom = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (u - k > 0) acc += (k % 2 ? -1.0 : 1.0) * binom * std::pow(u - k, static_cast<double>(n - 1));
    binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  return acc / fact;
}

}  // namespace

TEST_CASE("oracle matches independent closed forms") {
  for (std::size_t n = 1; n <= 5; ++n) {
    const std::vector<double> w(n, 1.0);
    const PiecewisePolynomial p = oracle1d_sum_of_uniforms(w);
    for (double x = -n / 2.0 + 0.013; x < n / 2.0; x += 0.0517) {
      CHECK(std::abs(p(x) - irwin_hall(n, x)) <= 1e-10);
    }
  }
  SplitMix64 rng(11);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + rng.below(5);
    std::vector<double> w(n);
    for (double& v : w) v = 1.0 / rng.uniform(0.5, 4.0);
    const PiecewisePolynomial p = oracle1d_sum_of_uniforms(w);
    CHECK(std::abs(p.integral() - 1.0) <= 1e-12);
    CHECK(p.sampled_min() >= -1e-12);
    const double half = std::accumulate(w.begin(), w.end(), 0.0) / 2.0;
    CHECK(p.support_lo() == doctest::Approx(-half).epsilon(1e-14));
    CHECK(p.support_hi() == doctest::Approx(half).epsilon(1e-14));
    for (int k = 0; k < 50; ++k) {
      const double x = rng.uniform(-half, half);
      CHECK(std::abs(p(x) - truncated_power_density(w, x)) <= 1e-9);
      CHECK(p(x) <= p(0.0) + 1e-12);
    }
  }
}

TEST_CASE("oracle examples") {
  const std::vector<double> two{1.0, 1.0};
  CHECK(oracle1d_sum_of_uniforms(two)(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  const std::vector<double> trap{1.0, 2.0};
  const PiecewisePolynomial p = oracle1d_sum_of_uniforms(trap);
  for (double x : {-0.5, -0.2, 0.0, 0.3, 0.5}) CHECK(p(x) == doctest::Approx(0.5).epsilon(1e-14));
  const std::vector<double> one{1.0};
  CHECK(oracle1d_sum_of_uniforms(one)(0.2) == doctest::Approx(1.0));
  CHECK(oracle1d_sum_of_uniforms(one)(0.7) == 0.0);

  // doubling every K halves the widths and doubles the peak
  const std::vector<double> w{1.0, 0.5, 0.3}, half{0.5, 0.25, 0.15};
  CHECK(oracle1d_sum_of_uniforms(half)(0.0) == doctest::Approx(2.0 * oracle1d_sum_of_uniforms(w)(0.0)).epsilon(1e-13));
}

TEST_CASE("uniform ball construction") {
  const UniformBall b = make_uniform_ball(1, 1.0, line(-1, 1, 16));
  CHECK(b.rescale == 1.0);
  CHECK(b.density.values() == std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0});
  CHECK(b.radius == doctest::Approx(0.5));

  double prev = INFINITY;
  for (std::size_t res : {32, 64, 128, 256}) {
    const double w = 2 * ball_radius_for_volume(2, 1.0) / res;
    const UniformBall disk = make_uniform_ball(2, 1.0, extremal_spec(2, 1.0, w));
    CHECK(disk.radius == doctest::Approx(0.5641895835).epsilon(1e-10));
    CHECK(std::abs(integral(disk.density) - 1.0) <= 1e-12);
    CHECK(ess_sup(disk.density) == doctest::Approx(1.0 * disk.rescale).epsilon(1e-15));
    const double err = std::abs(disk.rescale - 1.0);
    CHECK(err <= 2.0 * disk.boundary_cells * disk.density.spec().cell_volume());
    CHECK(err < prev * 1.5);
    prev = err;
  }
  CHECK(prev < 2e-3);

  CHECK_THROWS_AS(make_uniform_ball(1, 0.25, line(-1, 1, 16)), PreconditionError);
  CHECK_THROWS_AS(make_uniform_ball(1, 1.0, line(0, 2, 16)), PreconditionError);
}

TEST_CASE("bounds on the extremal sum") {
  const std::vector<double> k11{1.0, 1.0}, k111{1.0, 1.0, 1.0}, k1{1.0};

  const BoundResult p = rogozin_bound_prob(1, k11, 1.0, 4096, true);
  CHECK(std::abs(p.value - 0.75) <= p.budget);
  REQUIRE(p.exact);
  CHECK(*p.exact == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(p.exact_consistent);

  const BoundResult single = rogozin_bound_prob(1, k1, 0.5, 512, true);
  CHECK(std::abs(single.value - 0.5) <= single.budget + 1e-12);

  const BoundResult full = rogozin_bound_prob(2, k11, 4.0, 64);
  CHECK(std::abs(full.value - 1.0) <= full.budget + 1e-9);

  const BoundResult m2 = rogozin_bound_density(1, k11, 4096, true);
  CHECK(std::abs(m2.value - 1.0) <= 1e-3);
  CHECK(m2.exact_consistent);
  const BoundResult m3 = rogozin_bound_density(1, k111, 4096, true);
  CHECK(std::abs(m3.value - 0.75) <= 1e-3);
  CHECK(m3.exact_consistent);
  const BoundResult m1 = rogozin_bound_density(1, k1, 512, true);
  CHECK(std::abs(m1.value - 1.0) <= m1.budget);
  CHECK(m1.exact_consistent);

  CHECK_THROWS_AS(rogozin_bound_prob(2, k11, 1.0, 64, true), PreconditionError);
  CHECK_THROWS_AS(rogozin_bound_prob(1, k11, 0.0, 64), PreconditionError);
}

TEST_CASE("bound is non-decreasing in set volume") {
  const std::vector<double> ks{0.5, 2.0, 1.0};
  const ExtremalSum ex = extremal_sum(2, ks, 48);
  double prev = 0.0;
  for (double v = 0.05; v < 6.0; v *= 1.3) {
    const double val = rogozin_bound_prob(ex, v).value;
    CHECK(val >= prev);
    prev = val;
  }
}

TEST_CASE("odd grids give a sign-symmetric extremal sum") {
  for (std::size_t d : {1, 2}) {
    const std::vector<double> ks{0.7, 1.9, 3.1};
    const ExtremalSum ex = extremal_sum(d, ks, d == 1 ? 300 : 40);
    const GridSpec& spec = ex.sum.spec();
    for (std::size_t c : spec.counts()) CHECK(c % 2 == 1);
    std::vector<std::size_t> idx(d);
    double worst = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      spec.unravel(i, idx);
      for (std::size_t a = 0; a < d; ++a) idx[a] = spec.counts()[a] - 1 - idx[a];
      worst = std::max(worst, std::abs(ex.sum[i] - ex.sum[spec.ravel(idx)]));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("d=1 density bound converges to the oracle maximum") {
  SplitMix64 rng(2024);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 1 + rng.below(4);
    std::vector<double> ks(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      ks[i] = rng.uniform(0.5, 4.0);
      w[i] = 1.0 / ks[i];
    }
    const double exact = oracle1d_sum_of_uniforms(w)(0.0);
    const BoundResult b = rogozin_bound_density(1, ks, 4096, true);
    CHECK(std::abs(b.value - exact) <= 5e-3);
    CHECK(b.exact_consistent);
  }
}

TEST_CASE("a-priori budget halves with the cell width") {
  for (std::size_t d : {1, 2}) {
    const std::vector<double> ks{1.0, 2.0};
    const double v = 0.75;
    const std::size_t res = d == 1 ? 256 : 64;
    const double coarse = a_priori_prob_budget(extremal_sum(d, ks, res), v);
    const double fine = a_priori_prob_budget(extremal_sum(d, ks, 2 * res), v);
    CHECK(std::isfinite(fine));
    CHECK(coarse >= 2.0 * fine);
  }
}
