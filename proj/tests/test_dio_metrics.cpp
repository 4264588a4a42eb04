#include <catch_amalgamated.hpp>

#include "skewlab/angle_forge.hpp"
#include "skewlab/dio_metrics.hpp"

using namespace skewlab;

TEST_CASE("linear scan of the golden angle") {
  auto rep = gamma_l_estimate({golden_angle(200)}, 100);
  CHECK(rep.exponent == Catch::Approx(1.0).margin(0.15));
  for (std::int64_t m = 2; m <= rep.K; ++m) CHECK(rep.cum_min[m] <= rep.cum_min[m - 1]);
}

TEST_CASE("linear and simultaneous scans coincide for d = 1") {
  auto a = angle_with_type(2.0, 12, 0);
  auto l = gamma_l_estimate({a}, 300);
  auto s = gamma_s_estimate({a}, 300);
  for (std::int64_t m = 1; m <= 300; ++m) CHECK(l.shell_lo[m] == s.shell_lo[m]);
  CHECK(l.exponent == s.exponent);
}

TEST_CASE("degenerate single-shell fit is flagged") {
  auto rep = gamma_s_estimate({golden_angle(200)}, 1);
  CHECK(rep.degenerate);
}

TEST_CASE("Dirichlet floors") {
  auto g = golden_angle(200);
  std::vector<BigInt> v(200, BigInt(2));
  v[0] = 0;
  CFAngle s2(v);
  // two angles: linear type >= 2, simultaneous type >= 1/2
  auto lin = gamma_l_estimate({g, s2}, 200);
  CHECK(lin.exponent >= 2 * 0.8);
  auto sim = gamma_s_estimate({g, s2}, 5000);
  CHECK(sim.exponent >= 0.5 * 0.8);
}

TEST_CASE("intertwined pair linear scan") {
  auto pr = build_intertwined(4, 4, 0);
  auto rep = gamma_l_estimate({pr.alpha, pr.alpha_prime}, 300);
  CHECK(rep.exponent >= 4.5);
  CHECK(rep.exponent <= 16.0);
}

TEST_CASE("one-dimensional discrepancy") {
  CHECK(discrepancy_1d(std::vector<Rational>{Rational(0)}) == 1);
  CHECK(discrepancy_1d(std::vector<Rational>{Rational(0), Rational(1, 2)}) == Rational(1, 2));
  std::vector<Rational> eq;
  for (int k = 0; k < 7; ++k) eq.emplace_back(k, 7);
  CHECK(discrepancy_1d(eq) == Rational(1, 7));
  CHECK_THROWS_AS(discrepancy_1d(std::vector<Rational>{}), PreconditionError);
  // order independence
  std::vector<Rational> pts{Rational(3, 10), Rational(1, 10), Rational(9, 10)};
  auto d1 = discrepancy_1d(pts);
  std::reverse(pts.begin(), pts.end());
  CHECK(discrepancy_1d(pts) == d1);
}

namespace {

// brute force over intervals with endpoints at points, 0 and 1 (all four closure types,
// including degenerate [a, a])
Rational brute(const std::vector<Rational>& pts) {
  std::vector<Rational> ends = pts;
  ends.push_back(1);
  ends.push_back(0);
  Rational best = 0;
  const Rational n(static_cast<long>(pts.size()));
  for (const auto& a : ends) {
    for (const auto& b : ends) {
      if (b < a) continue;
      long in_half = 0, in_closed = 0;
      for (const auto& x : pts) {
        if (a <= x && x < b) ++in_half;
        if (a <= x && x <= b) ++in_closed;
      }
      // [a, b) and the limit of [a, b + eps) = [a, b]
      best = std::max(best, Rational(abs(Rational(Rational(in_half) / n - (b - a)))));
      best = std::max(best, Rational(abs(Rational(Rational(in_closed) / n - (b - a)))));
      // open (a, b): limit of [a + eps, b)
      long in_open = in_half - (std::count(pts.begin(), pts.end(), a));
      best = std::max(best, Rational(abs(Rational(Rational(in_open) / n - (b - a)))));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("sorted-points formula matches brute force") {
  Rng rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<Rational> pts;
    const int n = 1 + static_cast<int>(rng.below(8));
    for (int i = 0; i < n; ++i) {
      Rational q(static_cast<long>(rng.below(16)), 16);
      q.canonicalize();
      pts.push_back(q);
    }
    CHECK(discrepancy_1d(pts) == brute(pts));
  }
}

TEST_CASE("grid discrepancy") {
  auto pts = rotation_orbit({golden_angle(200)}, 1000);
  auto exact = discrepancy_1d(pts);
  auto grid = discrepancy_grid(pts, 4096);
  CHECK(abs(Rational(grid.value - exact)) <= grid.error_bound);
  CHECK(grid.error_bound == Rational(2, 4096));
  // golden orbit: D_n ~ log n / n
  CHECK(exact.get_d() * 1000 < 3 * std::log(1000.0));
  // all grid corners, G = 8, d = 2
  std::vector<TorusPoint> corners;
  for (std::uint64_t i = 0; i < 8; ++i) {
    for (std::uint64_t j = 0; j < 8; ++j) corners.push_back(TorusPoint::from_top({i << 61, j << 61}, 64));
  }
  CHECK(discrepancy_grid(corners, 8).value == 0);
  CHECK_THROWS_AS(discrepancy_grid(corners, 1 << 13), PreconditionError);
}

TEST_CASE("ETK inequality") {
  FourierMagnitudes zero;
  for (int h = -9; h <= 9; ++h) {
    if (h) zero[{h}] = 0;
  }
  CHECK(etk_bound(zero, 9, 1) == Rational(3, 5));
  FourierMagnitudes ones;
  for (int h = -2; h <= 2; ++h) {
    if (h) ones[{h}] = 1;
  }
  // both signs of h: 3 (2/3 + 1 + 1 + 1/2 + 1/2)
  CHECK(etk_bound(ones, 2, 1) == 11);
  FourierMagnitudes positive{{{1}, Rational(1)}, {{2}, Rational(1)}};
  CHECK_THROWS_AS(etk_bound(positive, 2, 1), PreconditionError);
  // a zero shell only shrinks 2/(H+1)
  FourierMagnitudes z10 = zero;
  z10[{10}] = 0;
  z10[{-10}] = 0;
  CHECK(etk_bound(z10, 10, 1) < etk_bound(zero, 9, 1));
}

TEST_CASE("ETK bounds the grid discrepancy of random clouds") {
  Rng rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 1 + rep % 2;
    std::vector<TorusPoint> pts;
    const int n = 5 + static_cast<int>(rng.below(30));
    for (int i = 0; i < n; ++i) {
      std::vector<std::uint64_t> c;
      for (std::size_t j = 0; j < d; ++j) c.push_back(rng.next());
      pts.push_back(TorusPoint::from_top(c, 64));
    }
    const std::uint64_t G = d == 1 ? 256 : 16;
    auto grid = discrepancy_grid(pts, G);
    auto bound = etk_bound(empirical_fourier(pts, 6), 6, d);
    CHECK(grid.value <= bound + grid.error_bound);
  }
}

TEST_CASE("random walk discrepancy") {
  auto sys = SkewSystem::doubling_golden();
  auto w0 = random_walk_discrepancy(sys, 0, 200, 1);
  CHECK(w0.value == Catch::Approx(1.0 - 1.0 / 4096).margin(1e-12));
  // phi = 1 everywhere: the walk is the rotation itself
  SkewSystem all(MarkovBase::uniform(2), {golden_angle(200)}, {true, true}, 256, SystemKind::skew, false);
  auto w = random_walk_discrepancy(all, 50, 200, 1);
  auto one = rotation_orbit({golden_angle(200)}, 51).back();
  CHECK(w.value == Catch::Approx(1.0 - 1.0 / 4096).margin(1e-12));
  (void)one;
  // Monte Carlo against the exact binomial law
  auto mc = random_walk_discrepancy(sys, 64, 4000, 7, 4096, 20);
  const double ex = walk_discrepancy_exact_1d(sys, 64);
  CHECK(std::abs(mc.value - ex) < 2.0 / std::sqrt(4000.0) + mc.grid_error);
}
