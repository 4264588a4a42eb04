#include <catch_amalgamated.hpp>

#include "skewlab/cf_core.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/torus.hpp"

using namespace skewlab;

namespace {

std::vector<long> qs(const CFAngle& a) {
  std::vector<long> v;
  for (const auto& q : a.denominators()) v.push_back(q.get_si());
  return v;
}

}  // namespace

TEST_CASE("all-ones expansion gives Fibonacci denominators") {
  auto a = CFAngle::from({0, 1, 1, 1, 1, 1, 1});
  CHECK(qs(a) == std::vector<long>{1, 1, 2, 3, 5, 8, 13});
}

TEST_CASE("sqrt2 - 1 denominators") {
  auto a = CFAngle::from({0, 2, 2, 2, 2});
  CHECK(qs(a) == std::vector<long>{1, 2, 5, 12, 29});
}

TEST_CASE("single step expansion") {
  auto a = CFAngle::from({0, 1});
  CHECK(a.convergent(1) == Rational(1));
  CHECK(a.q(1) == 1);
}

TEST_CASE("malformed partial quotients are rejected") {
  CHECK_THROWS_AS(CFAngle::from({0, 1, 0, 2}), PreconditionError);
  CHECK_THROWS_AS(CFAngle::from({0, -3}), PreconditionError);
  CHECK_THROWS_AS(CFAngle(std::vector<BigInt>{}), PreconditionError);
}

TEST_CASE("recurrence bounds and coprimality on random expansions") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<BigInt> v{0};
    for (int k = 0; k < 40; ++k) v.emplace_back(static_cast<unsigned long>(1 + rng.below(50)));
    CFAngle a(v);
    for (std::size_t k = 1; k + 1 <= a.depth(); ++k) {
      BigInt g;
      mpz_gcd(g.get_mpz_t(), a.p(k).get_mpz_t(), a.q(k).get_mpz_t());
      REQUIRE(g == 1);
      if (k + 1 <= a.depth()) {
        REQUIRE(a.a(k + 1) * a.q(k) < a.q(k + 1));
        REQUIRE(a.q(k + 1) <= (a.a(k + 1) + 1) * a.q(k));
      }
    }
  }
}

TEST_CASE("enclosure of ||q_n alpha|| for the golden angle") {
  auto g = golden_angle(40);
  // q_4 = 5, q_5 = 8
  REQUIRE(g.q(5) == 8);
  auto e = dist_to_int(g, 5);
  CHECK(e.lo > 0);
  CHECK(e.hi <= Rational(1, 8));
  // midpoint is |q_n alpha - p_n|
  auto e2 = dist_to_int(g, g.q(20));
  Rational mid = e2.mid();
  Rational direct = g.enclosure().mid() * g.q(20) - g.p(20);
  if (direct < 0) direct = -direct;
  CHECK(abs(Rational(mid - direct)) <= e2.width());
}

TEST_CASE("||3 (sqrt2 - 1)|| enclosure") {
  std::vector<BigInt> v(30, BigInt(2));
  v[0] = 0;
  CFAngle a(v);
  auto e = dist_to_int(a, 3);
  // oracle: integer square root of 2 * 10^80 brackets sqrt2 to 10^-40
  BigInt s;
  BigInt two = BigInt(2) * BigInt("1" + std::string(80, '0'));
  mpz_sqrt(s.get_mpz_t(), two.get_mpz_t());
  BigInt ten40("1" + std::string(40, '0'));
  Rational lo = Rational(3 * s, ten40) - 4, hi = Rational(3 * (s + 1), ten40) - 4;
  lo.canonicalize();
  hi.canonicalize();
  CHECK(e.lo <= hi);
  CHECK(e.hi >= lo);
  CHECK(e.width().get_d() < 1e-20);
  CHECK(e.lo.get_d() == Catch::Approx(0.24264068711928).epsilon(1e-12));
}

TEST_CASE("dist_to_int reports insufficient depth") {
  auto a = CFAngle::from({0, 1, 1});
  CHECK_THROWS_AS(dist_to_int(a, 2), InsufficientDepthError);
  auto g = golden_angle(40);
  CHECK_THROWS_AS(dist_to_int(g, 7, Rational(1, BigInt("1000000000000000000000000000000"))),
                  InsufficientDepthError);
}

TEST_CASE("type estimate") {
  CHECK(type_estimate(golden_angle(40), 30) == Catch::Approx(1.0).margin(0.05));
  // a_{n+1} = q_n makes q_{n+1} ~ q_n^2
  std::vector<BigInt> v{0, 2};
  BigInt qm1 = 1, q = 2;
  for (int k = 0; k < 9; ++k) {
    v.push_back(q);
    BigInt nq = q * q + qm1;
    qm1 = q;
    q = nq;
  }
  CFAngle sq(v);
  CHECK(type_estimate(sq, 10) == Catch::Approx(2.0).margin(0.05));
}

TEST_CASE("type estimate over all indices is monotone in depth") {
  Rng rng(3);
  std::vector<BigInt> v{0};
  for (int k = 0; k < 30; ++k) v.emplace_back(static_cast<unsigned long>(1 + rng.below(1000)));
  CFAngle a(v);
  double prev = 0;
  for (std::size_t d = 3; d <= a.depth(); ++d) {
    double t = type_estimate(a, d, TypeWindow::all);
    CHECK(t >= prev);
    prev = t;
  }
  // appending ones keeps the running max once the ratios fall below it
  CFAngle b = a.extended(std::vector<BigInt>(10, BigInt(1)));
  CHECK(type_estimate(b, b.depth(), TypeWindow::all) == Catch::Approx(prev));
}

TEST_CASE("fixed point conversion") {
  CHECK(to_fixed_point(CFAngle::from({0, 2}), 8, FixedSource::truncation) == 128);
  CHECK_THROWS_AS(to_fixed_point(CFAngle::from({0, 2}), 8), InsufficientDepthError);
  CHECK(to_fixed_point(golden_angle(40), 16) == 40503);
  BigInt z = to_fixed_point(golden_angle(40), 0);
  CHECK((z == 0 || z == 1));
  CHECK_THROWS_AS(to_fixed_point(golden_angle(10), 64), InsufficientDepthError);
}

TEST_CASE("text round trips") {
  auto a = CFAngle::parse("cf: 0 3 1 4 1 5");
  CHECK(a.to_string() == "cf: 0 3 1 4 1 5");
  CHECK_THROWS_AS(CFAngle::parse("0 1 2"), ParseError);
  CHECK_THROWS_AS(CFAngle::parse("cf: 0 x"), ParseError);
  auto [v, b] = fixed_from_string(fixed_to_string(BigInt(40503), 16));
  CHECK(v == 40503);
  CHECK(b == 16);
}

TEST_CASE("torus arithmetic is exact modulo 2^B") {
  auto g = golden_angle(200);
  auto t = TorusPoint::from_angles({g}, 256);
  TorusPoint acc(1, 256);
  for (int i = 0; i < 3; ++i) acc += t;
  CHECK(acc == t.times(3));
  BigInt mod = BigInt(1) << 256;
  CHECK(acc.coord(0) == (3 * to_fixed_point(g, 256)) % mod);
  auto back = acc - t - t - t;
  CHECK(back == TorusPoint(1, 256));
}

TEST_CASE("toroidal distance at dyadic radii") {
  auto a = TorusPoint::from_top({0}, 128);
  auto b = TorusPoint::from_top({std::uint64_t{1} << 60}, 128);  // 1/16
  CHECK(!a.within(b, radius_threshold_dyadic(4)));
  CHECK(a.within(b, radius_threshold_dyadic(3)));
  auto c = TorusPoint::from_top({~std::uint64_t{0}}, 128);  // just below 1, near 0
  CHECK(a.within(c, radius_threshold_dyadic(40)));
}
