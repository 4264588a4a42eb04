#include <catch_amalgamated.hpp>

#include <cmath>

#include "skewlab/corr_lab.hpp"

using namespace skewlab;

namespace {

double golden_frac() { return (std::sqrt(5.0) - 1) / 2; }

Observable cell_observable(std::vector<cplx> f, std::vector<std::int64_t> k = {0}) {
  Observable o;
  o.p = 2;
  o.m = 1;
  while (o.words() < f.size()) {
    o.m++;
  }
  o.d = k.size();
  o.add(k, f);
  return o;
}

}  // namespace

TEST_CASE("fibre characters match the closed form") {
  auto sys = SkewSystem::doubling_golden();
  auto A = Observable::fourier(2, 1, {1});
  auto B = Observable::fourier(2, 1, {-1});
  const cplx z = (1.0 + std::polar(1.0, -2 * M_PI * golden_frac())) / 2.0;
  for (std::size_t n : {0u, 1u, 5u, 40u}) {
    auto c = corr_fourier(sys, A, B, n);
    CHECK(std::abs(c.value - std::pow(z, static_cast<double>(n))) < 1e-12);
  }
  // no matching frequency
  CHECK(std::abs(corr_fourier(sys, A, A, 3).value) == 0.0);
}

TEST_CASE("base-only observables decorrelate after the cylinder length") {
  auto sys = SkewSystem::doubling_golden();
  auto A = cell_observable({1.0, -1.0, 2.0, 0.0}).centered(sys.base());
  auto B = cell_observable({0.5, -0.5});
  CHECK(std::abs(A.mean(sys.base())) < 1e-15);
  // B o T^n only sees symbol n, independent of symbols 0, 1 once n >= 2
  CHECK(std::abs(corr_fourier(sys, A, B, 2).value) < 1e-15);
  CHECK(std::abs(corr_fourier(sys, A, B, 7).value) < 1e-15);
  // centered A is (0.5, -1.5, 1.5, -0.5); n = 1 pairs it with B(s1)
  CHECK(corr_fourier(sys, A, B, 1).value.real() == Catch::Approx(0.5));
  CHECK(A.l2(sys.base()) == Catch::Approx(std::sqrt(1.25)));
}

TEST_CASE("Monte Carlo agrees with the exact correlation") {
  auto sys = SkewSystem::doubling_golden(128);
  auto A = Observable::fourier(2, 1, {1});
  A.add({2}, {0.5, -0.25});
  auto B = Observable::fourier(2, 1, {-1});
  B.add({-2}, {1.0, 0.3});
  for (std::size_t n : {1u, 3u, 8u}) {
    auto exact = corr_fourier(sys, A, B, n).value;
    auto mc = corr_mc(sys, A, B, n, 4000, 17 + n);
    CHECK(std::abs(mc.value - exact) < 4 * mc.err + 1e-12);
    CHECK(mc.err > 0);
  }
}

TEST_CASE("untwisted Galerkin matrix fixes constants") {
  auto sys = SkewSystem::doubling_golden();
  auto T = transfer_matrix(sys, 0.0, 16);
  const int z = T.index(0);
  for (int r = 0; r < T.A.rows(); ++r) CHECK(T.A(r, z) == (r == z ? cplx(1.0) : cplx(0.0)));
  auto s = spectral_estimate(T);
  CHECK(s.eig_max == Catch::Approx(1.0).epsilon(1e-10));
  // every other eigenvalue is tiny: odd modes are annihilated at u = 0
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(T.A, false);
  int near_one = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double a = std::abs(es.eigenvalues()(i));
    if (a > 0.5 + T.tail_max) near_one++;
  }
  CHECK(near_one == 1);
  CHECK(T.tail_max < 1.0 / (M_PI * 8));
}

TEST_CASE("leading eigenvalue of the twisted operator") {
  auto sys = SkewSystem::doubling_golden();
  for (double u : {0.1, 0.4, 0.7}) {
    auto T = transfer_matrix(sys, u, 32);
    auto s = spectral_estimate(T, 3);
    const cplx exact = (1.0 + std::polar(1.0, u)) / 2.0;
    CHECK(s.eig_max == Catch::Approx(std::abs(exact)).epsilon(1e-9));
    CHECK(std::abs(s.leading - exact) < 1e-9);
    CHECK(s.power == Catch::Approx(s.eig_max).epsilon(0.02));
    CHECK(s.gelfand_upper >= s.eig_max - 1e-9);
  }
  // at larger u the odd modes (weight |sin(u/2)|) overtake the constant mode
  auto big = spectral_estimate(transfer_matrix(sys, 2.0, 32));
  CHECK(big.eig_max >= std::abs((1.0 + std::polar(1.0, 2.0)) / 2.0) - 1e-12);
  auto pi = spectral_estimate(transfer_matrix(sys, M_PI, 64));
  CHECK(pi.eig_max < 1.0);
}

TEST_CASE("decay rate scales like u^2") {
  auto sys = SkewSystem::doubling_golden();
  for (double u : {0.1, 0.2, 0.4}) {
    const double a = -std::log(spectral_estimate(transfer_matrix(sys, u, 64)).eig_max);
    const double b = -std::log(spectral_estimate(transfer_matrix(sys, u / 2, 64)).eig_max);
    CHECK(a / b >= 3.0);
    CHECK(a / b <= 5.0);
  }
}

TEST_CASE("decay fits") {
  std::vector<double> n, poly, expo, floored;
  for (int i = 1; i <= 12; ++i) {
    const double x = std::pow(2.0, i);
    n.push_back(x);
    poly.push_back(3 * std::pow(x, -2.0));
    expo.push_back(std::exp(-x / 50));
    floored.push_back(i > 9 ? 1e-9 : std::pow(x, -1.0));
  }
  auto p = decay_fit(n, poly);
  CHECK(p.ls.slope == Catch::Approx(2.0));
  CHECK(p.lower_slope == Catch::Approx(2.0));
  CHECK(!p.superpolynomial);
  CHECK(decay_fit(n, expo).superpolynomial);
  auto f = decay_fit(n, floored, 1e-6);
  CHECK(f.below_floor[11]);
  CHECK(!f.below_floor[0]);
  CHECK(f.ls.slope == Catch::Approx(1.0));
  CHECK(decay_fit({1, 2, 3}, {1, 1, 1}).degenerate);
}

TEST_CASE("bound calculators") {
  CHECK(lemma_cr_exponent(1, 1, 1, 2, Rational(1)) == Rational(2));
  CHECK(lemma_cr_exponent(2, 2, 2, 2, Rational(3)) == Rational(3));
  CHECK_THROWS_AS(lemma_cr_exponent(1, 1, 2, 2, Rational(1)), PreconditionError);
  CHECK(pro_doc_rate(1, 1, 1, Rational(1)) == Rational(1, 2));
  CHECK(pro_doc_rate(3, 2, 1, Rational(2)) == Rational(1));
  CHECK(decorrangle_bound(Rational(1), Rational(4)) == Rational(4, 3));
  CHECK_THROWS_AS(decorrangle_bound(Rational(2), Rational(2)), PreconditionError);
  CHECK_THROWS_AS(transfer_matrix(SkewSystem::rotation({golden_angle(200)}), 0.1, 4), UnsupportedBaseError);
}
