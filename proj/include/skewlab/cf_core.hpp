#pragma once

// Exact continued-fraction arithmetic: convergents, enclosures of ||q alpha||,
// finite-depth Diophantine type, and conversion to fixed point.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "skewlab/error.hpp"

namespace skewlab {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Closed rational interval [lo, hi].
struct Interval {
  Rational lo;
  Rational hi;

  Rational width() const { return Rational(hi - lo); }
  Rational mid() const { return Rational((lo + hi) / 2); }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
};

/// Natural log of a positive big integer, accurate to double precision
/// (mantissa/exponent split, so it works for numbers with millions of digits).
inline double log_big(const BigInt& x) {
  if (sgn(x) <= 0) throw PreconditionError("log_big: argument must be positive");
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

inline double log_rational(const Rational& x) {
  return log_big(x.get_num()) - log_big(x.get_den());
}

/// An irrational angle given by a finite, extendable prefix of its continued
/// fraction [a0; a1, ..., an]. Convergents are filled at construction.
class CFAngle {
 public:
  CFAngle() : CFAngle(std::vector<BigInt>{BigInt(0), BigInt(1)}) {}

  explicit CFAngle(std::vector<BigInt> partial_quotients) : a_(std::move(partial_quotients)) {
    if (a_.empty()) throw PreconditionError("CFAngle: empty partial-quotient sequence");
    for (std::size_t k = 1; k < a_.size(); ++k) {
      if (sgn(a_[k]) <= 0) {
        throw PreconditionError("CFAngle: partial quotient a_" + std::to_string(k) +
                                " must be >= 1 (malformed expansion)");
      }
    }
    p_.reserve(a_.size());
    q_.reserve(a_.size());
    // p_{-1}=1, p_0=a0 (=0 for angles in (0,1)), q_{-1}=0, q_0=1.
    BigInt pm1 = 1, qm1 = 0;
    p_.push_back(a_[0]);
    q_.push_back(BigInt(1));
    for (std::size_t k = 1; k < a_.size(); ++k) {
      BigInt pk = a_[k] * p_[k - 1] + (k >= 2 ? p_[k - 2] : pm1);
      BigInt qk = a_[k] * q_[k - 1] + (k >= 2 ? q_[k - 2] : qm1);
      p_.push_back(std::move(pk));
      q_.push_back(std::move(qk));
    }
  }

  template <typename Int>
  static CFAngle from(std::initializer_list<Int> aq) {
    std::vector<BigInt> v;
    for (auto x : aq) v.emplace_back(x);
    return CFAngle(std::move(v));
  }

  /// Parses `cf: a0 a1 a2 ...`.
  static CFAngle parse(std::string_view line) {
    auto pos = line.find("cf:");
    if (pos == std::string_view::npos) throw ParseError("angle line must start with 'cf:'");
    std::istringstream in(std::string(line.substr(pos + 3)));
    std::vector<BigInt> v;
    std::string tok;
    while (in >> tok) {
      BigInt x;
      if (x.set_str(tok, 10) != 0) throw ParseError("bad partial quotient '" + tok + "'");
      v.push_back(x);
    }
    if (v.empty()) throw ParseError("angle line has no partial quotients");
    return CFAngle(std::move(v));
  }

  std::string to_string() const {
    std::string s = "cf:";
    for (const auto& a : a_) {
      s += ' ';
      s += a.get_str();
    }
    return s;
  }

  CFAngle extended(const std::vector<BigInt>& more) const {
    auto v = a_;
    v.insert(v.end(), more.begin(), more.end());
    return CFAngle(std::move(v));
  }

  /// Index n of the deepest available convergent.
  std::size_t depth() const { return a_.size() - 1; }
  const std::vector<BigInt>& partial_quotients() const { return a_; }
  const BigInt& a(std::size_t k) const { return a_.at(k); }
  const BigInt& p(std::size_t k) const { return p_.at(k); }
  const BigInt& q(std::size_t k) const { return q_.at(k); }
  const std::vector<BigInt>& denominators() const { return q_; }

  Rational convergent(std::size_t k) const {
    Rational r(p_.at(k), q_.at(k));
    r.canonicalize();
    return r;
  }

  /// Interval containing every irrational extension of the expansion: the value
  /// [a0;...,an,x] for x in (1,inf) lies between p_n/q_n and the mediant
  /// (p_n+p_{n-1})/(q_n+q_{n-1}); width 1/(q_n(q_n+q_{n-1})).
  Interval enclosure() const {
    const std::size_t n = depth();
    const BigInt pm1 = n >= 1 ? p_[n - 1] : BigInt(1);
    const BigInt qm1 = n >= 1 ? q_[n - 1] : BigInt(0);
    Rational a = convergent(n);
    Rational b(BigInt(p_[n] + pm1), BigInt(q_[n] + qm1));
    b.canonicalize();
    if (b < a) std::swap(a, b);
    return {a, b};
  }

  /// Decimal approximation (for logging / double-precision paths only).
  double approx() const { return enclosure().mid().get_d(); }

 private:
  std::vector<BigInt> a_;
  std::vector<BigInt> p_;
  std::vector<BigInt> q_;
};

/// The all-ones expansion [0;1,1,...,1] with `n` ones (golden-ratio conjugate 0.618...).
inline CFAngle golden_angle(std::size_t n = 80) {
  std::vector<BigInt> v(n + 1, BigInt(1));
  v[0] = 0;
  return CFAngle(std::move(v));
}

/// ||x|| over an interval: exact enclosure of the distance to the nearest integer.
inline Interval dist_to_int_interval(const Interval& x) {
  auto dist = [](const Rational& v) {
    BigInt f;
    mpz_fdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    Rational frac = v - Rational(f);
    Rational other = 1 - frac;
    return frac < other ? frac : Rational(other);
  };
  if (x.width() >= Rational(1, 2)) return {Rational(0), Rational(1, 2)};
  BigInt flo, fhi;
  mpz_fdiv_q(flo.get_mpz_t(), x.lo.get_num_mpz_t(), x.lo.get_den_mpz_t());
  mpz_fdiv_q(fhi.get_mpz_t(), x.hi.get_num_mpz_t(), x.hi.get_den_mpz_t());
  Rational dlo = dist(x.lo), dhi = dist(x.hi);
  Interval out{std::min(dlo, dhi), std::max(dlo, dhi)};
  // An integer strictly inside (floor changes) forces lo = 0.
  if (flo != fhi || sgn(Rational(x.lo - Rational(flo))) == 0) out.lo = 0;
  // A half-integer inside forces hi = 1/2.
  Rational half_lo = Rational(flo) + Rational(1, 2);
  Rational half_hi = Rational(fhi) + Rational(1, 2);
  if (x.contains(half_lo) || x.contains(half_hi)) out.hi = Rational(1, 2);
  return out;
}

/// Exact enclosure of ||q alpha||. Throws InsufficientDepthError when the
/// enclosure width exceeds `max_width` (if given) or when the enclosure
/// cannot separate ||q alpha|| from 0.
inline Interval dist_to_int(const CFAngle& angle, const BigInt& q,
                            std::optional<Rational> max_width = std::nullopt) {
  if (q < 1) throw PreconditionError("dist_to_int: q must be >= 1");
  const Interval e = angle.enclosure();
  Interval qa{Rational(e.lo * q), Rational(e.hi * q)};
  Interval d = dist_to_int_interval(qa);
  if (max_width && d.width() >= *max_width) {
    throw InsufficientDepthError("dist_to_int: enclosure width " + d.width().get_str() +
                                 " does not reach requested tolerance at depth " +
                                 std::to_string(angle.depth()));
  }
  if (sgn(d.lo) == 0) {
    throw InsufficientDepthError("dist_to_int: enclosure of ||" + q.get_str() +
                                 " alpha|| touches 0; extend the expansion");
  }
  return d;
}

enum class TypeWindow {
  tail,  ///< n in [ceil(3*depth/4), depth): converges to the limsup for regular expansions
  all,   ///< running max over every n with q_n >= 2
};

/// Finite-depth proxy for the type gamma(alpha) = limsup log q_{n+1} / log q_n.
/// Indices with q_n = 1 are skipped (log 1 = 0).
inline double type_estimate(const CFAngle& angle, std::size_t depth,
                            TypeWindow window = TypeWindow::tail) {
  if (depth < 2 || depth > angle.depth()) {
    throw PreconditionError("type_estimate: need 2 <= depth <= available convergents");
  }
  std::size_t start = 1;
  if (window == TypeWindow::tail) start = std::max<std::size_t>(1, (3 * depth + 3) / 4);
  if (start >= depth) start = depth - 1;
  double best = 0.0;
  bool any = false;
  for (std::size_t n = start; n < depth; ++n) {
    if (angle.q(n) < 2) continue;
    best = std::max(best, log_big(angle.q(n + 1)) / log_big(angle.q(n)));
    any = true;
  }
  if (!any) throw PreconditionError("type_estimate: no denominator >= 2 in the window");
  return best;
}

enum class FixedSource {
  enclosure,   ///< any irrational extension; requires enclosure width < 2^-bits
  truncation,  ///< the rational value p_n/q_n of the finite expansion itself
};

/// round(alpha * 2^bits) as an exact integer (ties round up). From the enclosure the
/// error against any extension is < 2^-bits.
inline BigInt to_fixed_point(const CFAngle& angle, unsigned bits,
                             FixedSource src = FixedSource::enclosure) {
  BigInt scale = BigInt(1) << bits;
  Rational x;
  if (src == FixedSource::truncation) {
    x = angle.convergent(angle.depth());
  } else {
    const Interval e = angle.enclosure();
    if (e.width() * scale >= 1) {
      throw InsufficientDepthError("to_fixed_point: enclosure width exceeds 2^-" +
                                   std::to_string(bits) + " at depth " +
                                   std::to_string(angle.depth()));
    }
    x = e.mid();
  }
  Rational m = x * scale + Rational(1, 2);
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), m.get_num_mpz_t(), m.get_den_mpz_t());
  return r;
}

/// Smallest expansion depth whose enclosure is narrower than 2^-bits, if any.
inline std::optional<std::size_t> depth_for_bits(const CFAngle& angle, unsigned bits) {
  BigInt scale = BigInt(1) << bits;
  for (std::size_t n = 1; n <= angle.depth(); ++n) {
    BigInt w = angle.q(n) * (angle.q(n) + angle.q(n - 1));
    if (w > scale) return n;
  }
  return std::nullopt;
}

/// `0x<hex> bits=<B>`
inline std::string fixed_to_string(const BigInt& v, unsigned bits) {
  return "0x" + v.get_str(16) + " bits=" + std::to_string(bits);
}

inline std::pair<BigInt, unsigned> fixed_from_string(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::string hex, b;
  in >> hex >> b;
  if (hex.rfind("0x", 0) != 0 || b.rfind("bits=", 0) != 0) {
    throw ParseError("fixed-point value must look like '0x.. bits=B'");
  }
  BigInt v;
  if (v.set_str(hex.substr(2), 16) != 0) throw ParseError("bad hex digits");
  return {v, static_cast<unsigned>(std::stoul(b.substr(5)))};
}

}  // namespace skewlab
