#pragma once

// Discrepancy decay of the golden rotation orbit and of the skew-product random walk.

#include <cmath>

#include "skewlab/dio_metrics.hpp"
#include "skewlab/xp/experiment.hpp"

namespace skewlab::xp {

namespace disc {

inline std::vector<double> dyadic_times(std::uint64_t k_min, std::uint64_t k_max) {
  std::vector<double> n;
  for (auto k = k_min; k <= k_max; ++k) n.push_back(std::ldexp(1.0, static_cast<int>(k)));
  return n;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt(x, 17);
  return s;
}

inline std::vector<Record> prop_discrepancy(const Context& ctx) {
  Emitter em("prop-discrepancy", ctx);
  const auto n = dyadic_times(ctx.cfg.u64("k_min", 4), ctx.cfg.u64("k_max", 14));
  const std::vector<CFAngle> alpha{golden_angle(200)};
  em.set_hash(fnv1a(alpha[0].to_string()));
  auto D = parallel_map<double>(n.size(), ctx.workers, [&](std::size_t i) {
    return rotation_discrepancy(alpha, static_cast<std::size_t>(n[i]), std::max(ctx.bits, 128u)).get_d();
  });
  const auto fit = decay_exponent(n, D);
  std::map<std::string, std::string> p{{"alpha", "golden"}, {"n", join(n)}};
  em.emit("D_n", D, p);
  em.emit("decay_exponent", {fit.slope}, p);
  return em.take();
}

inline std::vector<Verdict> judge_prop_discrepancy(const std::vector<Record>& rs) {
  const double e = one(rs, "decay_exponent").values[0];
  return {{"orbit decay exponent 1 +- 0.15", std::abs(e - 1) <= 0.15, fmt(e)}};
}

inline std::vector<Record> prop_dnmu(const Context& ctx) {
  Emitter em("prop-dnmu", ctx);
  const auto n = dyadic_times(ctx.cfg.u64("k_min", 4), ctx.cfg.u64("k_max", 14));
  const auto walkers = ctx.cfg.u64("walkers", 10000);
  const auto G = ctx.cfg.u64("grid", 4096);
  const auto sys = ctx.system.value_or(SkewSystem::doubling_golden(std::max(ctx.bits, 128u)));
  em.set_hash(sys.hash());
  auto W = parallel_map<WalkDiscrepancy>(n.size(), ctx.workers, [&](std::size_t i) {
    return random_walk_discrepancy(sys, static_cast<std::size_t>(n[i]), walkers, derive_seed(ctx.seed, i), G);
  });
  std::vector<double> D, err, exact;
  for (std::size_t i = 0; i < n.size(); ++i) {
    D.push_back(W[i].value);
    err.push_back(W[i].stderr_);
    if (sys.d() == 1) exact.push_back(walk_discrepancy_exact_1d(sys, static_cast<std::size_t>(n[i])));
  }
  const auto fit = decay_exponent(n, D);
  std::map<std::string, std::string> p{{"walkers", std::to_string(walkers)}, {"grid", std::to_string(G)}, {"n", join(n)}};
  em.emit("D_n_mu", D, p, *std::max_element(err.begin(), err.end()));
  em.emit("decay_exponent", {fit.slope}, p);
  if (!exact.empty()) {
    em.emit("D_n_mu_exact", exact, p);
    em.emit("decay_exponent_exact", {decay_exponent(n, exact).slope}, p);
  }
  return em.take();
}

inline std::vector<Verdict> judge_prop_dnmu(const std::vector<Record>& rs) {
  const double e = one(rs, "decay_exponent").values[0];
  return {{"random-walk decay exponent 1/2 +- 0.2", std::abs(e - 0.5) <= 0.2, fmt(e)}};
}

}  // namespace disc

}  // namespace skewlab::xp
