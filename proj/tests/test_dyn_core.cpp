#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "skewlab/dyn_core.hpp"

using namespace skewlab;

TEST_CASE("base measure validation") {
  CHECK_THROWS_AS(MarkovBase(2, {Rational(1), Rational(0)}), PreconditionError);
  CHECK_THROWS_AS(MarkovBase(2, {Rational(1, 2), Rational(1, 3)}), PreconditionError);
  CHECK_NOTHROW(MarkovBase(4, {Rational(1, 2), Rational(1, 2), Rational(0), Rational(0)}));
}

TEST_CASE("local dimension") {
  CHECK(MarkovBase::uniform(2).local_dimension() == 1.0);
  CHECK(MarkovBase::uniform(3).local_dimension() == 1.0);
  MarkovBase b(2, {Rational(3, 4), Rational(1, 4)});
  // -(3/4)log(3/4) - (1/4)log(1/4) over log 2
  CHECK(b.local_dimension() == Catch::Approx(0.8112781244591328).epsilon(1e-12));
  MarkovBase h(4, {Rational(1, 2), Rational(1, 2), Rational(0), Rational(0)});
  CHECK(h.local_dimension() == Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("symbol frequencies") {
  MarkovBase b(3, {Rational(1, 2), Rational(1, 3), Rational(1, 6)});
  auto o = sample_base_orbit(b, 1000000, 42);
  std::vector<double> cnt(3, 0);
  for (auto s : o.symbols()) cnt[s] += 1;
  const double n = 1e6;
  for (int i = 0; i < 3; ++i) {
    const double p = b.prob(i);
    CHECK(std::abs(cnt[i] / n - p) < 4 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("orbits are reproducible however they are extended") {
  auto b = MarkovBase::uniform(2);
  SymbolicOrbit a(b, 9), c(b, 9);
  a.ensure(1000);
  for (int i = 0; i < 10; ++i) c.ensure(100 * (i + 1));
  CHECK(a.symbols() == c.symbols());
}

TEST_CASE("NA condition on I") {
  auto b = MarkovBase::uniform(2);
  CHECK_THROWS_AS(SkewSystem(b, {golden_angle(200)}, {true, true}), PreconditionError);
  CHECK_THROWS_AS(SkewSystem(b, {golden_angle(200)}, {false, false}), PreconditionError);
  MarkovBase z(3, {Rational(1, 2), Rational(1, 2), Rational(0)});
  // the only symbol outside I has no mass
  CHECK_THROWS_AS(SkewSystem(z, {golden_angle(200)}, {true, true, false}), PreconditionError);
  CHECK_NOTHROW(SkewSystem(b, {golden_angle(200)}, {true, true}, 256, SystemKind::skew, false));
}

TEST_CASE("Birkhoff sums") {
  auto b = MarkovBase::uniform(2);
  SkewSystem all(b, {golden_angle(200)}, {true, true}, 256, SystemKind::skew, false);
  SymbolicOrbit o(b, 1);
  CHECK(birkhoff_phi(all, o, 500) == 500);
  auto sys = SkewSystem::doubling_golden();
  SymbolicOrbit o2(sys.base(), 2);
  const double n = 1e5;
  const double s = static_cast<double>(birkhoff_phi(sys, o2, 100000));
  CHECK(std::abs(s / n - 0.5) < 4 * 0.5 / std::sqrt(n));
}

TEST_CASE("skew iteration is exact") {
  auto sys = SkewSystem::doubling_golden();
  SymbolicOrbit o(sys.base(), 0, {1, 1, 1, 0, 0, 0});
  Rng rng(5);
  auto t0 = random_torus_point(1, 256, rng);
  auto ts = iterate_skew(sys, o, t0, 3);
  CHECK(ts[3] == t0);  // symbol 1 is outside I
  SymbolicOrbit o2(sys.base(), 0, {0, 0, 0});
  auto us = iterate_skew(sys, o2, t0, 3);
  CHECK(us[3] == t0 + sys.alpha_fixed().times(3));
  SymbolicOrbit o3(sys.base(), 77);
  auto vs = iterate_skew(sys, o3, t0, 10000);
  SymbolicOrbit o4(sys.base(), 77);
  CHECK(vs.back() - t0 == sys.alpha_fixed().times(birkhoff_phi(sys, o4, 10000)));
}

TEST_CASE("64-bit and 256-bit paths agree") {
  auto s64 = SkewSystem(MarkovBase::uniform(2), {golden_angle(200)}, {true, false}, 64);
  auto s256 = SkewSystem::doubling_golden(256);
  SymbolicOrbit o1(s64.base(), 3), o2(s256.base(), 3);
  auto a = iterate_skew(s64, o1, TorusPoint(1, 64), 10000, 1e-9);
  auto b = iterate_skew(s256, o2, TorusPoint(1, 256), 10000);
  for (std::size_t k = 0; k < a.size(); k += 97) {
    double diff = std::abs(a[k].as_double(0) - b[k].as_double(0));
    diff = std::min(diff, 1 - diff);
    CHECK(diff < std::ldexp(1.0, -50));
  }
}

TEST_CASE("precision contract") {
  auto s64 = SkewSystem(MarkovBase::uniform(2), {golden_angle(200)}, {true, false}, 64);
  SymbolicOrbit o(s64.base(), 3);
  CHECK_THROWS_AS(iterate_skew(s64, o, TorusPoint(1, 64), 1000000, 1e-12), PrecisionContractError);
}

TEST_CASE("fibre marginal stays uniform") {
  auto sys = SkewSystem::doubling_golden();
  for (std::size_t n : {100u, 10000u}) {
    std::vector<double> xs;
    Rng rng(n);
    for (int i = 0; i < 10000; ++i) {
      SymbolicOrbit o(sys.base(), derive_seed(n, i));
      auto t0 = random_torus_point(1, 256, rng);
      TorusPoint t = t0 + sys.alpha_fixed().times(birkhoff_phi(sys, o, n));
      xs.push_back(t.as_double(0));
    }
    std::sort(xs.begin(), xs.end());
    double ks = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      ks = std::max({ks, (i + 1) / 1e4 - xs[i], xs[i] - i / 1e4});
    }
    // 1% critical value of the one-sample KS statistic
    CHECK(ks < 1.63 / std::sqrt(1e4));
  }
}

TEST_CASE("cylinder and metric balls agree away from boundaries") {
  auto b = MarkovBase::uniform(2);
  for (unsigned m : {4u, 10u, 20u, 40u}) {
    SymbolicOrbit o(b, m);
    o.ensure(200000 + 64);
    const double x = o.point(0);
    std::size_t disagree = 0, total = 20000;
    for (std::size_t k = 1; k <= total; ++k) {
      bool sym = std::equal(o.data(), o.data() + m, o.data() + k);
      bool met = std::abs(o.point(k) - x) < std::ldexp(1.0, -static_cast<int>(m));
      if (sym && !met) ++disagree;  // cylinders sit inside the metric ball
      if (met && !sym) ++disagree;
    }
    CHECK(static_cast<double>(disagree) / total <= 2 * std::ldexp(1.0, -static_cast<int>(m)) + 3.0 / std::sqrt(total) * std::ldexp(1.0, -static_cast<int>(m) / 2));
  }
}

TEST_CASE("descriptor round trip") {
  auto sys = SkewSystem(MarkovBase(2, {Rational(3, 4), Rational(1, 4)}), {golden_angle(100)},
                        {true, false}, 128);
  auto back = SkewSystem::parse(sys.descriptor());
  CHECK(back.descriptor() == sys.descriptor());
  CHECK(back.hash() == sys.hash());
  CHECK_THROWS_AS(SkewSystem::parse("p = 2\nd = 1\n"), ParseError);
  CHECK_THROWS_AS(SkewSystem::parse("colour = red\n"), ParseError);
}
