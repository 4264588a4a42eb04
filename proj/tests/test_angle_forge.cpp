#include <catch_amalgamated.hpp>

#include <sstream>

#include "skewlab/angle_forge.hpp"

using namespace skewlab;

TEST_CASE("congruence sub-step") {
  // 3 * 3 = 9 = -1 mod 5
  CHECK(detail::solve_tau(3, 1, 5) == 3);
  CHECK(detail::solve_tau(7, 4, 1) == 0);
}

TEST_CASE("first levels of the xi = 4 construction") {
  auto pr = build_intertwined(4, 3, 0);
  const auto& a = pr.alpha;
  const auto& b = pr.alpha_prime;
  CHECK(a.q(1) == 1);
  CHECK(b.q(1) == 1);
  CHECK(a.q(2) == 2);
  CHECK(b.q(2) == 19);
  CHECK(pr.audit[1].tau_p == 1);
  CHECK(pr.audit[1].rho_p == 17);
  CHECK(pr.audit[2].tau == 9);
  CHECK(pr.audit[2].rho == 65161);
  CHECK(a.q(3) == 130341);
  for (const auto& au : pr.audit) {
    CHECK(au.item1);
    CHECK(au.item2);
    CHECK(au.item3);
    CHECK(au.item4);
  }
}

TEST_CASE("construction is deterministic and seeds move rho") {
  auto p1 = build_intertwined(4, 3, 11);
  auto p2 = build_intertwined(4, 3, 11);
  CHECK(p1.alpha.to_string() == p2.alpha.to_string());
  CHECK(p1.alpha_prime.to_string() == p2.alpha_prime.to_string());
  CHECK(p1.all_items_hold());
}

TEST_CASE("digit guard") {
  CHECK_THROWS_AS(build_intertwined(4, 4, 0, 50), PreconditionError);
  CHECK_NOTHROW(build_intertwined(4, 4, 0, 2000));
}

TEST_CASE("coordinate types reach xi^2") {
  auto pr = build_intertwined(4, 4, 0);
  // log q'_n / log q_{n-1}... each coordinate: q_{n+1} ~ q_n^16
  const auto& a = pr.alpha;
  const double t = log_big(a.q(4)) / log_big(a.q(3));
  CHECK(t >= 14.0);
  CHECK(type_estimate(a, 4) >= 14.0);
  CHECK(type_estimate(pr.alpha_prime, 4) >= 14.0);
}

TEST_CASE("infeasible rho window is reported") {
  // target 4, q = 3: window [2, 2]; 2 shares a factor with 2
  CHECK_THROWS_AS(detail::choose_rho(4, 3, 2, 0), InfeasibleRhoError);
}

TEST_CASE("linear bound scan on a small radius") {
  auto pr = build_intertwined(4, 4, 0);
  auto rep = check_linear_bound(pr, 60);
  CHECK(rep.points == static_cast<std::size_t>(2 * 60 * 61));
  CHECK(rep.K0 <= 50);
  // l = 0 reduces to the one-dimensional problem in alpha
  for (const auto& v : rep.axis_violators) CHECK((v.k == 0 || v.l == 0));
  std::ostringstream os;
  rep.write_csv(os);
  CHECK(os.str().rfind("k,l,enclosure_lo", 0) == 0);
}

TEST_CASE("angles of prescribed type") {
  auto g = angle_with_type(1.0, 40, 5);
  for (std::size_t k = 1; k <= g.depth(); ++k) CHECK(g.a(k) == 1);
  for (double gamma : {2.0, 3.0}) {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
      auto a = angle_with_type(gamma, 10, seed);
      const double t = type_estimate(a, 10);
      CHECK(t >= 0.9 * gamma);
      CHECK(t <= 1.1 * gamma);
    }
  }
  auto h = angle_with_type(16.0, 6, 0);
  CHECK(type_estimate(h, 6) == Catch::Approx(16.0).epsilon(0.1));
}
