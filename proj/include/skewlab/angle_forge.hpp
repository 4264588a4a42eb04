#pragma once

// Constructions of angles with prescribed arithmetic: the intertwined pair
// (alpha, alpha') whose denominators alternate q'_{n-1}^xi ~ q_n, q_n^xi ~ q'_n,
// and one-dimensional angles of a given type.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "skewlab/cf_core.hpp"
#include "skewlab/lattice.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {

struct LevelAudit {
  std::size_t n = 0;
  BigInt tau, rho, tau_p, rho_p;
  bool item1 = false;  // q'_{n-1}^xi <= q_n <= 4 q'_{n-1}^xi
  bool item2 = false;  // q_n^xi <= q'_n <= 4 q_n^xi
  bool item3 = false;  // gcd(q_n, q'_{n-1}) = 1
  bool item4 = false;  // gcd(q'_n, q_n) = 1
  std::size_t digits_q = 0, digits_qp = 0;

  bool ok() const { return item1 && item2 && item3 && item4; }
};

struct IntertwinedPair {
  CFAngle alpha;
  CFAngle alpha_prime;
  unsigned xi = 4;
  std::size_t levels = 0;
  std::uint64_t seed = 0;
  std::vector<LevelAudit> audit;

  bool all_items_hold() const {
    for (const auto& a : audit) {
      if (!a.ok()) return false;
    }
    return !audit.empty();
  }

  void write(std::ostream& os) const {
    os << alpha.to_string() << '\n' << alpha_prime.to_string() << '\n';
    os << "audit xi=" << xi << " levels=" << levels << " seed=" << seed << '\n';
    for (const auto& a : audit) {
      os << "level " << a.n << " tau=" << a.tau << " rho=" << a.rho << " tau'=" << a.tau_p
         << " rho'=" << a.rho_p << " items=" << a.item1 << a.item2 << a.item3 << a.item4
         << " digits=" << a.digits_q << ',' << a.digits_qp << '\n';
    }
  }
};

namespace detail {

inline std::size_t decimal_digits(const BigInt& x) { return x.get_str(10).size(); }

/// Least tau in [0, mod) with tau * a == -b (mod mod). Requires gcd(a, mod) = 1.
inline BigInt solve_tau(const BigInt& a, const BigInt& b, const BigInt& mod) {
  if (mod == 1) return 0;
  BigInt inv;
  if (mpz_invert(inv.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0) {
    throw InfeasibleRhoError("congruence has no solution: gcd(" + a.get_str() + ", " +
                             mod.get_str() + ") != 1");
  }
  BigInt t = (-b * inv) % mod;
  if (t < 0) t += mod;
  return t;
}

/// Coprime rho with target <= rho * q <= 2 target. Candidates are scanned upward from
/// the window start; the seed picks among the first few admissible values.
inline BigInt choose_rho(const BigInt& target, const BigInt& q, const BigInt& coprime_to,
                         std::uint64_t seed) {
  BigInt lo, hi;
  mpz_cdiv_q(lo.get_mpz_t(), target.get_mpz_t(), q.get_mpz_t());
  BigInt twice = 2 * target;
  mpz_fdiv_q(hi.get_mpz_t(), twice.get_mpz_t(), q.get_mpz_t());
  if (lo < 1) lo = 1;
  std::vector<BigInt> found;
  for (BigInt r = lo; r <= hi && found.size() < 8; ++r) {
    BigInt g;
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), coprime_to.get_mpz_t());
    if (g == 1) found.push_back(r);
    // Window may be huge; coprime values are dense, so this loop stays short.
    if (r - lo > 100000 && found.empty()) break;
  }
  if (found.empty()) {
    throw InfeasibleRhoError("no rho coprime to " + coprime_to.get_str() + " in [" + lo.get_str() +
                             ", " + hi.get_str() + "]");
  }
  return found[(seed % 8) % found.size()];
}

inline BigInt ipow(const BigInt& b, unsigned e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

inline BigInt gcd(const BigInt& a, const BigInt& b) {
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

}  // namespace detail

/// Inductive construction of the pair with q_0 = q'_0 = 1, q_{-1} = q'_{-1} = 0.
/// Throws InfeasibleRhoError if a window has no admissible rho, and
/// PreconditionError if a level would exceed `digit_budget` decimal digits.
inline IntertwinedPair build_intertwined(unsigned xi, std::size_t levels, std::uint64_t seed,
                                         std::size_t digit_budget = 1000000) {
  require(levels >= 1, "build_intertwined: levels must be >= 1");
  require(xi >= 2, "build_intertwined: xi must be >= 2");
  std::vector<BigInt> a{0}, ap{0};
  BigInt q_m2 = 0, q_m1 = 1;    // q_{n-2}, q_{n-1}
  BigInt qp_m2 = 0, qp_m1 = 1;  // q'_{n-2}, q'_{n-1}
  IntertwinedPair out;
  out.xi = xi;
  out.levels = levels;
  out.seed = seed;
  for (std::size_t n = 1; n <= levels; ++n) {
    LevelAudit au;
    au.n = n;
    const std::uint64_t s = derive_seed(seed, 2 * n);
    const std::uint64_t sp = derive_seed(seed, 2 * n + 1);
    // The next denominators have about xi times the digits of the previous partner.
    const double est = xi * (log_big(qp_m1) / std::log(10.0)) + 1;
    if (est > static_cast<double>(digit_budget)) {
      throw PreconditionError("build_intertwined: level " + std::to_string(n) + " needs ~" +
                              std::to_string(static_cast<long long>(est)) +
                              " digits, over the budget of " + std::to_string(digit_budget));
    }

    const BigInt target = detail::ipow(qp_m1, xi);
    au.tau = detail::solve_tau(q_m1, q_m2, qp_m1);
    au.rho = detail::choose_rho(target, q_m1, qp_m1, seed == 0 ? 0 : s);
    const BigInt an = au.tau + au.rho;
    const BigInt qn = an * q_m1 + q_m2;

    const double est_p = xi * (log_big(qn) / std::log(10.0)) + 1;
    if (est_p > static_cast<double>(digit_budget)) {
      throw PreconditionError("build_intertwined: level " + std::to_string(n) +
                              " (alpha') needs ~" + std::to_string(static_cast<long long>(est_p)) +
                              " digits, over the budget of " + std::to_string(digit_budget));
    }
    const BigInt target_p = detail::ipow(qn, xi);
    au.tau_p = detail::solve_tau(qp_m1, qp_m2, qn);
    au.rho_p = detail::choose_rho(target_p, qp_m1, qn, seed == 0 ? 0 : sp);
    const BigInt apn = au.tau_p + au.rho_p;
    const BigInt qpn = apn * qp_m1 + qp_m2;

    au.item1 = target <= qn && qn <= 4 * target;
    au.item2 = target_p <= qpn && qpn <= 4 * target_p;
    au.item3 = detail::gcd(qn, qp_m1) == 1;
    au.item4 = detail::gcd(qpn, qn) == 1;
    au.digits_q = detail::decimal_digits(qn);
    au.digits_qp = detail::decimal_digits(qpn);

    a.push_back(an);
    ap.push_back(apn);
    q_m2 = q_m1;
    q_m1 = qn;
    qp_m2 = qp_m1;
    qp_m1 = qpn;
    out.audit.push_back(std::move(au));
  }
  out.alpha = CFAngle(std::move(a));
  out.alpha_prime = CFAngle(std::move(ap));
  for (const auto& au : out.audit) {
    if (!au.ok()) {
      throw PreconditionError("build_intertwined: construction items fail at level " +
                              std::to_string(au.n));
    }
  }
  return out;
}

struct LatticePoint {
  std::int64_t k = 0, l = 0;
  double lo = 0, hi = 0;  // enclosure of ||k alpha + l alpha'||
  double slack = 0;       // lo * 8 m^5
};

struct LinearBoundReport {
  std::int64_t K = 0;
  double min_slack = 0;  // over off-axis points
  std::int64_t argmin_k = 0, argmin_l = 0;
  std::vector<LatticePoint> violators;       // off-axis, slack < 1
  std::vector<LatticePoint> axis_violators;  // k = 0 or l = 0, checked against 1/(8m^5) too
  std::int64_t K0 = 1;                       // all off-axis points with m >= K0 have slack >= 1
  std::vector<double> shell_min;             // per m: min over the shell of ||k alpha + l alpha'||
  std::size_t points = 0;

  void write_csv(std::ostream& os) const {
    os << "k,l,enclosure_lo,enclosure_hi,slack,axis\n";
    for (const auto& v : violators) {
      os << v.k << ',' << v.l << ',' << v.lo << ',' << v.hi << ',' << v.slack << ",0\n";
    }
    for (const auto& v : axis_violators) {
      os << v.k << ',' << v.l << ',' << v.lo << ',' << v.hi << ',' << v.slack << ",1\n";
    }
  }
};

/// Exhaustive scan of 0 < max(|k|,|l|) <= K (one representative per +-(k,l)).
/// Slack is lo * 8 max(|k|,|l|)^5; the comparison with 1 is made exactly.
inline LinearBoundReport check_linear_bound(const IntertwinedPair& pair, std::int64_t K) {
  require(K >= 1, "check_linear_bound: K must be >= 1");
  const Rational width = pair.alpha.enclosure().width();
  const Rational width_p = pair.alpha_prime.enclosure().width();
  if (std::max(width, width_p) * BigInt(K) * 2 * 16 * detail::ipow(BigInt(K), 5) >= 1) {
    throw InsufficientDepthError("check_linear_bound: pair is not deep enough for K = " +
                                 std::to_string(K));
  }
  const std::vector<u128> fx{angle_fixed128(pair.alpha), angle_fixed128(pair.alpha_prime)};
  LinearBoundReport rep;
  rep.K = K;
  rep.min_slack = INFINITY;
  rep.shell_min.assign(static_cast<std::size_t>(K) + 1, 1.0);
  std::int64_t worst_m = 0;
  auto visit = [&](std::int64_t k, std::int64_t l) {
    const std::int64_t m = std::max(std::abs(k), std::abs(l));
    const FormEnclosure e = form_enclosure(fx, {k, l});
    const double m5 = 8.0 * std::pow(static_cast<double>(m), 5);
    LatticePoint pt{k, l, u128_to_unit(e.lo), u128_to_unit(e.hi), u128_to_unit(e.lo) * m5};
    // exact comparison lo * 8 m^5 >= 2^128 when the double is close to 1
    bool ok = pt.slack >= 1.0;
    if (std::abs(pt.slack - 1.0) < 1e-9) {
      BigInt lhs = u128_to_big(e.lo) * 8 * detail::ipow(BigInt(m), 5);
      ok = lhs >= (BigInt(1) << 128);
    }
    rep.shell_min[m] = std::min(rep.shell_min[m], pt.lo);
    ++rep.points;
    const bool axis = k == 0 || l == 0;
    if (axis) {
      if (!ok) rep.axis_violators.push_back(pt);
      return;
    }
    if (pt.slack < rep.min_slack) {
      rep.min_slack = pt.slack;
      rep.argmin_k = k;
      rep.argmin_l = l;
    }
    if (!ok) {
      rep.violators.push_back(pt);
      worst_m = std::max(worst_m, m);
    }
  };
  for (std::int64_t m = 1; m <= K; ++m) {
    // shell max(|k|,|l|) = m, half plane l > 0 or (l = 0, k > 0)
    for (std::int64_t k = -m; k <= m; ++k) visit(k, m);
    for (std::int64_t l = 1; l < m; ++l) {
      visit(m, l);
      visit(-m, l);
    }
    visit(m, 0);
  }
  rep.K0 = worst_m + 1;
  return rep;
}

namespace detail {

/// q^gamma as an integer, to about 12 significant digits (only its logarithm matters).
inline BigInt approx_pow(const BigInt& q, double gamma) {
  const double l2 = gamma * log_big(q) / std::log(2.0);
  const double e = std::floor(l2);
  const double mant = std::ldexp(std::exp2(l2 - e), 52);
  BigInt m(static_cast<unsigned long>(mant));
  const long shift = static_cast<long>(e) - 52;
  if (shift >= 0) return m << static_cast<unsigned long>(shift);
  return m >> static_cast<unsigned long>(-shift);
}

}  // namespace detail

/// Angle in (0,1) with `depth` partial quotients and type about gamma0.
/// Levels with q_n < min_jump_q use a = 1; after that each level is either a jump
/// (q_{n+1} ~ q_n^gamma0) or, by seed, a single a = 1 filler.
inline CFAngle angle_with_type(double gamma0, std::size_t depth, std::uint64_t seed,
                               const BigInt& min_jump_q = 2) {
  require(gamma0 >= 1.0, "angle_with_type: gamma0 must be >= 1");
  require(depth >= 1, "angle_with_type: depth must be >= 1");
  Rng rng(seed);
  std::vector<BigInt> a{0};
  BigInt q_m1 = 0, q = 1;
  bool last_filler = true;
  for (std::size_t n = 0; n < depth; ++n) {
    BigInt an = 1;
    if (q >= min_jump_q) {
      const bool filler = seed != 0 && !last_filler && (rng.next() & 1);
      if (!filler) {
        BigInt target = detail::approx_pow(q, gamma0) - q_m1;
        // round(target / q)
        BigInt r;
        BigInt num = 2 * target + q;
        BigInt den = 2 * q;
        mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        an = r < 1 ? BigInt(1) : r;
      }
      last_filler = filler;
    }
    a.push_back(an);
    BigInt next = an * q + q_m1;
    q_m1 = q;
    q = next;
  }
  return CFAngle(std::move(a));
}

}  // namespace skewlab
