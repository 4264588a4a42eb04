#pragma once

// Exact-arithmetic experiments: continued fractions, the intertwined construction,
// its linear-form certificate and the closed-form exponent calculators.

#include "skewlab/angle_forge.hpp"
#include "skewlab/corr_lab.hpp"
#include "skewlab/xp/experiment.hpp"

namespace skewlab::xp {

namespace arith {

inline std::vector<Record> cf_exact(const Context& ctx) {
  Emitter em("cf-exact", ctx);
  const auto fib_depth = ctx.cfg.u64("fib_depth", 60);

  // p_n = F_n, q_n = F_{n+1} for [0; 1, 1, ...]
  std::vector<BigInt> ones(fib_depth + 1, 1);
  ones[0] = 0;
  CFAngle golden(ones);
  BigInt f0 = 0, f1 = 1;
  std::uint64_t fib_bad = 0;
  for (std::size_t n = 0; n <= fib_depth; ++n) {
    if (golden.p(n) != f0 || golden.q(n) != f1) ++fib_bad;
    BigInt f2 = f0 + f1;
    f0 = f1;
    f1 = f2;
  }
  em.emit("fibonacci_mismatches", {static_cast<double>(fib_bad)}, {{"depth", std::to_string(fib_depth)}});

  const auto expansions = ctx.cfg.u64("gcd_expansions", 100);
  const auto gcd_depth = ctx.cfg.u64("gcd_depth", 50);
  Rng rng(derive_seed(ctx.seed, 1));
  std::uint64_t gcd_bad = 0;
  for (std::uint64_t e = 0; e < expansions; ++e) {
    std::vector<BigInt> a{BigInt(static_cast<unsigned long>(rng.below(3)))};
    for (std::size_t k = 1; k <= gcd_depth; ++k) a.push_back(BigInt(static_cast<unsigned long>(1 + rng.below(1000))));
    CFAngle x(a);
    for (std::size_t n = 0; n <= gcd_depth; ++n) {
      if (detail::gcd(x.p(n), x.q(n)) != 1) ++gcd_bad;
    }
  }
  em.emit("gcd_failures", {static_cast<double>(gcd_bad)},
          {{"expansions", std::to_string(expansions)}, {"depth", std::to_string(gcd_depth)}});

  // Best approximations of the second kind: the record minima of ||q alpha|| over
  // 1 <= q <= qmax are exactly the convergent denominators.
  const auto qmax = ctx.cfg.u64("best_qmax", 10000);
  std::vector<BigInt> silver(41, 2);
  silver[0] = 0;
  std::vector<CFAngle> angles{golden_angle(40), CFAngle(silver)};
  for (int i = 0; i < 18; ++i) {
    std::vector<BigInt> a{0};
    for (int k = 0; k < 40; ++k) a.push_back(BigInt(static_cast<unsigned long>(1 + rng.below(50))));
    angles.emplace_back(a);
  }
  std::uint64_t best_bad = 0;
  for (const auto& x : angles) {
    const std::size_t D = x.depth();
    const BigInt P = x.p(D), Q = x.q(D);
    require(Q > qmax, "cf-exact: truncation too shallow for best_qmax");
    std::vector<std::uint64_t> records;
    BigInt best = Q;  // larger than any ||q alpha|| * Q
    BigInt r;
    for (std::uint64_t q = 1; q <= qmax; ++q) {
      BigInt qq(static_cast<unsigned long>(q));
      BigInt num = qq * P;
      mpz_fdiv_r(r.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
      BigInt dist = std::min(r, BigInt(Q - r));
      if (dist < best) {
        best = dist;
        records.push_back(q);
      }
    }
    std::vector<std::uint64_t> conv;
    for (std::size_t n = 0; n <= D && x.q(n) <= qmax; ++n) {
      const auto qn = x.q(n).get_ui();
      if (conv.empty() || conv.back() != qn) conv.push_back(qn);
    }
    // q_1 = 1 when a_1 = 1; then q_0 = q_1 and the first record is still 1
    if (records != conv) ++best_bad;
  }
  em.emit("best_approximation_failures", {static_cast<double>(best_bad)},
          {{"angles", std::to_string(angles.size())}, {"qmax", std::to_string(qmax)}});
  return em.take();
}

inline std::vector<Verdict> judge_cf_exact(const std::vector<Record>& rs) {
  std::vector<Verdict> v;
  for (const char* m : {"fibonacci_mismatches", "gcd_failures", "best_approximation_failures"}) {
    const double x = one(rs, m).values.at(0);
    v.push_back({m, x == 0, fmt(x) + " == 0"});
  }
  return v;
}

inline std::vector<Record> diofalin1(const Context& ctx) {
  Emitter em("prop-diofalin1", ctx);
  const auto xi = static_cast<unsigned>(ctx.cfg.u64("xi", 4));
  const auto levels = ctx.cfg.u64("levels", 4);
  const auto budget = ctx.cfg.u64("digit_budget", 1000000);
  auto pr = build_intertwined(xi, levels, ctx.cfg.u64("construction_seed", 0), budget);
  em.set_hash(fnv1a(pr.alpha.to_string() + "\n" + pr.alpha_prime.to_string()));
  const std::map<std::string, std::string> base{{"xi", std::to_string(xi)}, {"levels", std::to_string(levels)}};
  std::size_t max_digits = 0;
  for (const auto& a : pr.audit) {
    auto p = base;
    p["level"] = std::to_string(a.n);
    p["tau"] = a.tau.get_str();
    p["rho"] = a.rho.get_str();
    p["tau_p"] = a.tau_p.get_str();
    p["rho_p"] = a.rho_p.get_str();
    em.emit("items", {double(a.item1), double(a.item2), double(a.item3), double(a.item4)}, p);
    max_digits = std::max({max_digits, a.digits_q, a.digits_qp});
  }
  em.emit("max_digits", {static_cast<double>(max_digits), static_cast<double>(budget)}, base);
  // the guard must stop a build whose budget is one digit short
  bool tripped = false;
  try {
    build_intertwined(xi, levels, ctx.cfg.u64("construction_seed", 0), max_digits - 1);
  } catch (const PreconditionError&) {
    tripped = true;
  }
  em.emit("guard_trips_below_need", {double(tripped)}, base);
  em.emit("type_alpha", {type_estimate(pr.alpha, pr.alpha.depth(), TypeWindow::all)}, base);
  em.emit("type_alpha_prime", {type_estimate(pr.alpha_prime, pr.alpha_prime.depth(), TypeWindow::all)}, base);
  return em.take();
}

inline std::vector<Verdict> judge_diofalin1(const std::vector<Record>& rs) {
  std::vector<Verdict> v;
  bool all = true;
  auto items = select(rs, "items");
  for (const auto* r : items) {
    for (double x : r->values) all = all && x == 1;
  }
  v.push_back({"items 1-4 at every level", all && !items.empty(), std::to_string(items.size()) + " levels"});
  const auto& d = one(rs, "max_digits");
  v.push_back({"digit budget respected", d.values[0] <= d.values[1],
               fmt(d.values[0]) + " <= " + fmt(d.values[1], 10)});
  v.push_back({"guard trips below need", one(rs, "guard_trips_below_need").values[0] == 1, ""});
  return v;
}

inline std::vector<Record> diofalin2(const Context& ctx) {
  Emitter em("prop-diofalin2", ctx);
  const auto levels = ctx.cfg.u64("levels", 4);
  const auto K = static_cast<std::int64_t>(ctx.cfg.u64("K", 500));
  auto pr = build_intertwined(4, levels, ctx.cfg.u64("construction_seed", 0));
  em.set_hash(fnv1a(pr.alpha.to_string() + "\n" + pr.alpha_prime.to_string()));
  auto rep = check_linear_bound(pr, K);
  const std::map<std::string, std::string> p{{"K", std::to_string(K)}, {"levels", std::to_string(levels)}};
  em.emit("K0", {static_cast<double>(rep.K0)}, p);
  em.emit("min_slack", {rep.min_slack, double(rep.argmin_k), double(rep.argmin_l)}, p);
  std::uint64_t beyond = 0;
  for (const auto& lp : rep.violators) {
    if (std::max(std::llabs(lp.k), std::llabs(lp.l)) >= rep.K0) ++beyond;
  }
  em.emit("violators_beyond_K0", {static_cast<double>(beyond)}, p);
  em.emit("axis_violators", {static_cast<double>(rep.axis_violators.size())}, p);
  em.emit("points", {static_cast<double>(rep.points)}, p);
  return em.take();
}

inline std::vector<Verdict> judge_diofalin2(const std::vector<Record>& rs) {
  const double K0 = one(rs, "K0").values[0];
  const double beyond = one(rs, "violators_beyond_K0").values[0];
  return {{"K0 <= 50", K0 <= 50, "K0 = " + fmt(K0)},
          {"slack >= 1 beyond K0", beyond == 0, fmt(beyond) + " off-axis violators"}};
}

inline std::string qstr(const Rational& q) { return q.get_str(); }

inline std::vector<Record> bounds(const Context& ctx) {
  Emitter em("bound-calculators", ctx);
  for (const Rational& base : {Rational(1), Rational(1, 2), Rational(7, 3)}) {
    Rational ratio = lemma_cr_exponent(2, 2, 1, 1, base) / base;
    ratio.canonicalize();
    em.emit("lemma_cr_ratio", {ratio.get_d()}, {{"base", qstr(base)}, {"exact", qstr(ratio)}});
  }
  auto r1 = pro_doc_rate(1, 1, 1, Rational(1));
  em.emit("pro_doc_rate", {r1.get_d()}, {{"args", "1,1,1,1"}, {"exact", qstr(r1)}});
  auto r16 = pro_doc_rate(1, 1, 1, Rational(16));
  em.emit("pro_doc_rate", {r16.get_d()}, {{"args", "1,1,1,16"}, {"exact", qstr(r16)}});
  auto d = decorrangle_bound(Rational(3), Rational(16));
  em.emit("decorrangle_bound", {d.get_d()}, {{"args", "3,16"}, {"exact", qstr(d)}});
  return em.take();
}

inline std::vector<Verdict> judge_bounds(const std::vector<Record>& rs) {
  std::vector<Verdict> v;
  bool third = true;
  for (const auto* r : select(rs, "lemma_cr_ratio")) third = third && param(*r, "exact") == "1/3";
  v.push_back({"lemma_cr_exponent(2,2,1,1,.) scales by 1/3", third, ""});
  for (const auto* r : select(rs, "pro_doc_rate")) {
    if (param(*r, "args") == "1,1,1,1") {
      v.push_back({"pro_doc_rate(1,1,1,1) = 1/2", param(*r, "exact") == "1/2", param(*r, "exact")});
    }
  }
  const auto& d = one(rs, "decorrangle_bound");
  v.push_back({"decorrangle_bound(3,16) = 8/13", param(d, "exact") == "8/13", param(d, "exact")});
  return v;
}

}  // namespace arith

}  // namespace skewlab::xp
