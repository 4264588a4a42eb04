#include <catch_amalgamated.hpp>

#include <cmath>

#include "skewlab/angle_forge.hpp"
#include "skewlab/rec_lab.hpp"

using namespace skewlab;

TEST_CASE("whole-space radius is hit at the first step") {
  auto sys = SkewSystem::doubling_golden();
  SymbolicOrbit o(sys.base(), 1);
  Rng rng(1);
  auto t0 = random_torus_point(1, 256, rng);
  CHECK(return_times(sys, &o, t0, {1.0}, 10)[0] == 1);
  auto rot = SkewSystem::rotation({golden_angle(200)});
  CHECK(return_times(rot, nullptr, t0, {2.0}, 10)[0] == 1);
}

TEST_CASE("envelope fits on synthetic data") {
  auto r = dyadic_radii(2, 12);
  std::vector<std::int64_t> sq, alt;
  for (std::size_t j = 0; j < r.size(); ++j) {
    sq.push_back(static_cast<std::int64_t>(std::llround(std::pow(r[j], -2))));
    alt.push_back(static_cast<std::int64_t>(std::llround(std::pow(r[j], j % 2 ? -3.0 : -1.0))));
  }
  auto f = fit_exponents(r, sq);
  CHECK(f.lower_slope == Catch::Approx(2.0));
  CHECK(f.upper_slope == Catch::Approx(2.0));
  CHECK(f.lower_ratio == Catch::Approx(2.0));
  CHECK(f.ls.slope == Catch::Approx(2.0));
  CHECK(f.monotone);
  auto g = fit_exponents(r, alt);
  CHECK(g.lower_slope == Catch::Approx(1.0));
  CHECK(g.upper_slope == Catch::Approx(3.0));
  CHECK(g.lower_ratio == Catch::Approx(1.0));
  CHECK(g.upper_ratio == Catch::Approx(3.0));
  CHECK(!g.monotone);
  auto h = fit_exponents({0.5, 0.25}, {2, 4});
  CHECK(h.degenerate);
}

TEST_CASE("censored radii are excluded from fits") {
  auto r = dyadic_radii(1, 6);
  auto f = fit_exponents(r, {2, 4, 8, 16, kTimeout, kTimeout});
  CHECK(f.used == 4);
  CHECK(f.ls.slope == Catch::Approx(1.0));
}

TEST_CASE("hitting times are monotone in the radius") {
  auto sys = SkewSystem::doubling_golden();
  auto r = dyadic_radii(1, 9);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SymbolicOrbit o(sys.base(), seed);
    Rng rng(seed);
    auto t0 = random_torus_point(1, 256, rng);
    auto y = random_target(sys, 64, 100 + seed);
    auto tau = hitting_times(sys, &o, t0, y, r, 2000000);
    // each radius separately gives the same answer
    for (std::size_t j = 0; j < r.size(); ++j) {
      SymbolicOrbit o2(sys.base(), seed);
      CHECK(hitting_times(sys, &o2, t0, y, {r[j]}, 2000000)[0] == tau[j]);
    }
    for (std::size_t j = 1; j < r.size(); ++j) {
      if (tau[j] != kTimeout) CHECK(tau[j] >= tau[j - 1]);
    }
  }
}

TEST_CASE("golden rotation exponents are near 1") {
  auto rot = SkewSystem::rotation({golden_angle(200)});
  auto r = dyadic_radii(4, 18);
  Rng rng(4);
  std::vector<double> up, rec;
  for (int i = 0; i < 9; ++i) {
    auto t0 = random_torus_point(1, 256, rng);
    Target y{{}, random_torus_point(1, 256, rng)};
    auto f = fit_exponents(r, hitting_times(rot, nullptr, t0, y, r, 10000000));
    up.push_back(f.upper_slope);
    auto g = fit_exponents(r, return_times(rot, nullptr, t0, r, 10000000));
    rec.push_back(g.ls.slope);
  }
  CHECK(median(up) == Catch::Approx(1.0).margin(0.2));
  CHECK(median(rec) == Catch::Approx(1.0).margin(0.2));
}

TEST_CASE("observed times with phi = 1 are rotation times") {
  auto b = MarkovBase::uniform(2);
  SkewSystem all(b, {golden_angle(200)}, {true, true}, 256, SystemKind::skew, false);
  auto rot = SkewSystem::rotation({golden_angle(200)});
  Rng rng(8);
  auto t0 = random_torus_point(1, 256, rng);
  auto tp = random_torus_point(1, 256, rng);
  auto r = dyadic_radii(2, 14);
  SymbolicOrbit o(b, 3);
  auto obs = observed_times(all, &o, t0, r, 0, 1000000, tp);
  auto direct = hitting_times(rot, nullptr, t0, Target{{}, tp}, r, 1000000);
  CHECK(obs == direct);
  // non-instantaneous returns skip the first p steps
  SymbolicOrbit o2(b, 3);
  auto skip = observed_times(all, &o2, t0, {0.5}, 5, 100);
  CHECK(skip[0] == 6);
}

TEST_CASE("rescaling by the ball measure") {
  auto base = SkewSystem::base_only(MarkovBase::uniform(2));
  auto y = random_target(base, 40, 5);
  CHECK(ball_measure(base, y, 1.0 / 1024) == Catch::Approx(1.0 / 1024));
  auto st = time_statistics(base, y, 1.0 / 64, 300, StatMode::hitting, 1, 100000);
  // doubling nu(B_r) doubles every rescaled time
  TimeStats st2 = st;
  st2.nu_ball *= 2;
  for (auto& v : st2.rescaled) v *= 2;
  for (double s : {0.5, 1.0, 2.0}) CHECK(st2.cdf(2 * s) == st.cdf(s));
  auto skew = SkewSystem::doubling_golden();
  auto ys = random_target(skew, 40, 5);
  CHECK(ball_measure(skew, ys, 1.0 / 8) == Catch::Approx((1.0 / 8) * (1.0 / 4)));
}

TEST_CASE("shrinking targets") {
  auto base = SkewSystem::base_only(MarkovBase::uniform(2));
  auto y = random_target(base, 40, 2);
  auto all = mstp_check(base, y, [](std::uint64_t) { return 1.0; }, 1, 1000, 3, 1);
  for (auto h : all.hits) CHECK(h == 1000);
  auto bc = mstp_check(base, y, [](std::uint64_t i) { return 4.0 / i; }, 8, 200000, 31, 3);
  CHECK(bc.median_ratio >= 0.5);
  CHECK(bc.median_ratio <= 2.0);
}
