#pragma once

// Transfer-operator checks: Monte Carlo against the exact Fourier sum, u^2 contraction,
// non-arithmetic spectral radius and the untwisted fixed constant.

#include <cmath>

#include "skewlab/corr_lab.hpp"
#include "skewlab/xp/experiment.hpp"

namespace skewlab::xp {

namespace corr {

/// Random observable with fibre frequencies in [-kmax, kmax] and base parts on m-cylinders.
inline Observable random_observable(unsigned p, unsigned m, std::int64_t kmax, Rng& rng, int sign) {
  Observable o;
  o.p = p;
  o.m = m;
  o.d = 1;
  const std::size_t terms = 1 + rng.below(2);
  for (std::size_t t = 0; t < terms; ++t) {
    const std::int64_t k = sign * (1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(kmax))));
    std::vector<cplx> f(o.words());
    for (auto& v : f) v = cplx(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1);
    o.add({k}, f);
  }
  return o;
}

inline std::vector<Record> operator_suite(const Context& ctx) {
  Emitter em("operator-suite", ctx);
  const auto sys = ctx.system.value_or(SkewSystem::doubling_golden(std::max(ctx.bits, 128u)));
  require(sys.base().p() == 2 && sys.d() == 1, "operator-suite: needs a binary base and d = 1");
  em.set_hash(sys.hash());
  const auto cases = ctx.cfg.u64("cases", 20);
  const auto samples = ctx.cfg.u64("samples", 4000);
  const int M = static_cast<int>(ctx.cfg.u64("M", 64));

  struct Case {
    double exact_re, exact_im, mc_re, mc_im, err;
    std::size_t n;
  };
  auto res = parallel_map<Case>(cases, ctx.workers, [&](std::size_t i) {
    Rng rng(derive_seed(ctx.seed, i));
    const unsigned m = 1 + static_cast<unsigned>(rng.below(2));
    const auto A = random_observable(2, m, 3, rng, +1);
    auto B = random_observable(2, 1 + static_cast<unsigned>(rng.below(2)), 3, rng, -1);
    // make sure at least one frequency pairs up
    B.add({-A.coeffs.begin()->first[0]}, std::vector<cplx>(B.words(), cplx(1.0, 0.5)));
    const std::size_t n = rng.below(12);
    const auto ex = corr_fourier(sys, A, B, n);
    const auto mc = corr_mc(sys, A, B, n, samples, derive_seed(ctx.seed, 1000 + i));
    return Case{ex.value.real(), ex.value.imag(), mc.value.real(), mc.value.imag(), mc.err, n};
  });
  std::vector<double> z;
  for (const auto& c : res) z.push_back(std::hypot(c.mc_re - c.exact_re, c.mc_im - c.exact_im) / c.err);
  em.emit("mc_vs_fourier_sigma", z, {{"cases", std::to_string(cases)}, {"samples", std::to_string(samples)}});

  const std::vector<double> us = ctx.cfg.nums("u", {0.1, 0.2, 0.4});
  std::vector<double> ratios;
  std::string u_list;
  for (double u : us) {
    u_list += (u_list.empty() ? "" : " ") + fmt(u, 17);
    const double a = -std::log(spectral_estimate(transfer_matrix(sys, u, M)).eig_max);
    const double b = -std::log(spectral_estimate(transfer_matrix(sys, u / 2, M)).eig_max);
    ratios.push_back(a / b);
  }
  em.emit("contraction_ratio", ratios, {{"M", std::to_string(M)}, {"u", u_list}});

  const auto T_pi = transfer_matrix(sys, M_PI, M);
  const auto s_pi = spectral_estimate(T_pi);
  em.emit("spectral_radius_pi", {s_pi.eig_max, s_pi.power, s_pi.gelfand_upper},
          {{"M", std::to_string(M)}, {"fields", "eig power gelfand"}}, T_pi.tail_max);

  // u = 0: the constant column and the cylinder operator both fix 1 exactly
  const auto T0 = transfer_matrix(sys, 0.0, M);
  bool fixed = true;
  for (Eigen::Index r = 0; r < T0.A.rows(); ++r) {
    fixed = fixed && T0.A(r, T0.index(0)) == (r == T0.index(0) ? cplx(1.0) : cplx(0.0));
  }
  for (unsigned m = 1; m <= 4; ++m) {
    std::size_t words = 1;
    for (unsigned i = 0; i < m; ++i) words *= 2;
    for (const auto& v : apply_cylinder_operator(sys, 0.0, m, std::vector<cplx>(words, 1.0))) {
      fixed = fixed && v == cplx(1.0);
    }
  }
  em.emit("untwisted_fixes_constants", {double(fixed)}, {{"M", std::to_string(M)}});
  return em.take();
}

inline std::vector<Verdict> judge_operator_suite(const std::vector<Record>& rs) {
  std::vector<Verdict> v;
  const auto& z = one(rs, "mc_vs_fourier_sigma").values;
  const double zmax = *std::max_element(z.begin(), z.end());
  v.push_back({"corr_mc vs corr_fourier within 4 sigma (" + std::to_string(z.size()) + " cases)", zmax <= 4,
               "max " + fmt(zmax) + " sigma"});
  const auto& c = one(rs, "contraction_ratio").values;
  bool ok = true;
  std::string d;
  for (double x : c) {
    ok = ok && x >= 3 && x <= 5;
    d += fmt(x) + " ";
  }
  v.push_back({"u^2 contraction ratio in [3, 5]", ok, d});
  const double rho = one(rs, "spectral_radius_pi").values[0];
  v.push_back({"spectral radius < 1 at u = pi", rho < 1, fmt(rho)});
  v.push_back({"L_0 1 = 1 exactly", one(rs, "untwisted_fixes_constants").values[0] == 1, ""});
  return v;
}

}  // namespace corr

}  // namespace skewlab::xp
