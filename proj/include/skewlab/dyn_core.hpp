#pragma once

// Skew product S(w, t) = (T w, t + alpha phi(w)) over a full-branch p-ary Bernoulli
// shift, with phi = 1_I depending on the first symbol only.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "skewlab/cf_core.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/torus.hpp"

namespace skewlab {

/// Full-branch map w -> p w mod 1 with a Bernoulli measure on the p branches.
/// Only this linear geometry is simulated; a general Markov base would replace the
/// symbol sampler and the cylinder measure.
class MarkovBase {
 public:
  MarkovBase() : MarkovBase(2, {Rational(1, 2), Rational(1, 2)}) {}

  MarkovBase(unsigned p, std::vector<Rational> probs) : p_(p), probs_(std::move(probs)) {
    require(p >= 2 && p <= 256, "MarkovBase: p must be in [2, 256]");
    require(probs_.size() == p, "MarkovBase: need one probability per branch");
    Rational sum = 0;
    unsigned positive = 0;
    for (auto& q : probs_) {
      q.canonicalize();
      require(q >= 0, "MarkovBase: probabilities must be non-negative");
      sum += q;
      if (q > 0) ++positive;
    }
    require(sum == 1, "MarkovBase: probabilities must sum to 1");
    require(positive >= 2, "MarkovBase: at least two branches need positive mass");
    // cumulative thresholds in units of 2^-64; the last positive symbol takes the rest
    Rational acc = 0;
    const BigInt two64 = BigInt(1) << 64;
    for (unsigned i = 0; i < p_; ++i) {
      acc += probs_[i];
      Rational scaled = acc * two64;
      BigInt f;
      mpz_fdiv_q(f.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
      if (f >= two64) f = two64 - 1;
      cum_.push_back(mpz_get_ui(f.get_mpz_t()));
      if (probs_[i] > 0) last_positive_ = i;
    }
    for (auto& q : probs_) dprobs_.push_back(q.get_d());
  }

  static MarkovBase uniform(unsigned p) {
    return MarkovBase(p, std::vector<Rational>(p, Rational(1, p)));
  }

  unsigned p() const { return p_; }
  const std::vector<Rational>& probs() const { return probs_; }
  double prob(unsigned i) const { return dprobs_[i]; }

  /// Entropy over log p; 1 exactly for the uniform measure.
  double local_dimension() const {
    bool uniform = true;
    for (const auto& q : probs_) uniform = uniform && q == Rational(1, p_);
    if (uniform) return 1.0;
    double h = 0;
    for (double q : dprobs_) {
      if (q > 0) h -= q * std::log(q);
    }
    return h / std::log(static_cast<double>(p_));
  }

  std::uint8_t sample(Rng& rng) const {
    const std::uint64_t u = rng.next();
    for (unsigned i = 0; i < p_; ++i) {
      if (probs_[i] > 0 && u < cum_[i]) return static_cast<std::uint8_t>(i);
    }
    return static_cast<std::uint8_t>(last_positive_);
  }

  Rational cylinder_measure(const std::uint8_t* word, std::size_t m) const {
    Rational r = 1;
    for (std::size_t i = 0; i < m; ++i) r *= probs_.at(word[i]);
    return r;
  }

  double cylinder_measure_d(const std::uint8_t* word, std::size_t m) const {
    double r = 1;
    for (std::size_t i = 0; i < m; ++i) r *= dprobs_.at(word[i]);
    return r;
  }

  /// Least m with p^-m <= r: a cylinder of that length has diameter <= r.
  unsigned cylinder_length(double r) const {
    if (r >= 1.0) return 0;
    const double m = std::log(1.0 / r) / std::log(static_cast<double>(p_));
    unsigned c = static_cast<unsigned>(std::ceil(m - 1e-12));
    return c;
  }

 private:
  unsigned p_;
  std::vector<Rational> probs_;
  std::vector<double> dprobs_;
  std::vector<std::uint64_t> cum_;
  unsigned last_positive_ = 0;
};

enum class SystemKind {
  skew,      ///< full skew product on Omega x T^d
  base_only, ///< d = 0: just the Bernoulli shift
  rotation,  ///< base ignored, t -> t + alpha every step
};

inline const char* kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::skew: return "skew";
    case SystemKind::base_only: return "base";
    case SystemKind::rotation: return "rotation";
  }
  return "?";
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class SkewSystem {
 public:
  SkewSystem() = default;

  /// `in_I[i]` marks the first symbols where phi = 1. With `check_na` the stated
  /// sufficient condition for (NA) is enforced: positive-mass symbols on both sides.
  SkewSystem(MarkovBase base, std::vector<CFAngle> alpha, std::vector<bool> in_I,
             unsigned bits = 256, SystemKind kind = SystemKind::skew, bool check_na = true)
      : base_(std::move(base)), alpha_(std::move(alpha)), in_I_(std::move(in_I)), bits_(bits),
        kind_(kind) {
    if (kind_ == SystemKind::base_only) {
      require(alpha_.empty(), "SkewSystem: base-only system takes no angles");
    } else {
      require(!alpha_.empty(), "SkewSystem: need at least one angle");
    }
    if (in_I_.empty()) in_I_.assign(base_.p(), false);
    require(in_I_.size() == base_.p(), "SkewSystem: I must be given per symbol");
    if (kind_ == SystemKind::skew && check_na) {
      bool in = false, out = false;
      for (unsigned i = 0; i < base_.p(); ++i) {
        if (base_.probs()[i] > 0) (in_I_[i] ? in : out) = true;
      }
      require(in && out,
              "SkewSystem: I and its complement must each contain a symbol of positive mass");
    }
    if (!alpha_.empty()) {
      alpha_fp_ = TorusPoint::from_angles(alpha_, bits_);
      for (const auto& a : alpha_) {
        require(a.depth() >= 1, "SkewSystem: angle needs at least one partial quotient");
      }
    }
    mu_I_ = 0;
    for (unsigned i = 0; i < base_.p(); ++i) {
      if (in_I_[i]) mu_I_ += base_.probs()[i];
    }
  }

  /// Doubling map x golden rotation with I = first 1-cylinder.
  static SkewSystem doubling_golden(unsigned bits = 256) {
    return SkewSystem(MarkovBase::uniform(2), {golden_angle(200)}, {true, false}, bits);
  }

  static SkewSystem rotation(std::vector<CFAngle> alpha, unsigned bits = 256) {
    return SkewSystem(MarkovBase::uniform(2), std::move(alpha), {true, true}, bits,
                      SystemKind::rotation, false);
  }

  static SkewSystem base_only(MarkovBase base) {
    return SkewSystem(std::move(base), {}, {}, 256, SystemKind::base_only, false);
  }

  const MarkovBase& base() const { return base_; }
  const std::vector<CFAngle>& alpha() const { return alpha_; }
  const TorusPoint& alpha_fixed() const { return alpha_fp_; }
  bool in_I(std::uint8_t s) const { return in_I_[s]; }
  const std::vector<bool>& I() const { return in_I_; }
  unsigned bits() const { return bits_; }
  std::size_t d() const { return alpha_.size(); }
  SystemKind kind() const { return kind_; }
  const Rational& mu_I() const { return mu_I_; }

  /// Whether step k moves the fibre (phi(T^k w) = 1).
  bool active(std::uint8_t s) const { return kind_ == SystemKind::rotation || in_I_[s]; }

  std::string descriptor() const {
    std::ostringstream os;
    os << "mode = " << kind_name(kind_) << '\n';
    os << "p = " << base_.p() << '\n';
    os << "probs =";
    for (const auto& q : base_.probs()) os << ' ' << q.get_str();
    os << "\nI =";
    for (unsigned i = 0; i < base_.p(); ++i) {
      if (in_I_[i]) os << ' ' << i;
    }
    os << "\nd = " << d() << "\nbits = " << bits_ << '\n';
    for (const auto& a : alpha_) os << a.to_string() << '\n';
    return os.str();
  }

  std::uint64_t hash() const { return fnv1a(descriptor()); }

  static SkewSystem parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    unsigned p = 2, bits = 256;
    std::size_t d = 0;
    std::vector<Rational> probs;
    std::vector<unsigned> I;
    std::vector<CFAngle> alpha;
    SystemKind kind = SystemKind::skew;
    bool have_probs = false;
    while (std::getline(in, line)) {
      auto hash_pos = line.find('#');
      if (hash_pos != std::string::npos) line.resize(hash_pos);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (line.find("cf:") != std::string::npos) {
        alpha.push_back(CFAngle::parse(line));
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("descriptor line without '=': " + line);
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
      };
      const std::string key = trim(line.substr(0, eq));
      std::istringstream val(trim(line.substr(eq + 1)));
      if (key == "p") {
        val >> p;
      } else if (key == "bits") {
        val >> bits;
      } else if (key == "d") {
        val >> d;
      } else if (key == "probs") {
        std::string tok;
        while (val >> tok) {
          Rational q;
          if (q.set_str(tok, 10) != 0) throw ParseError("bad probability '" + tok + "'");
          q.canonicalize();
          probs.push_back(q);
        }
        have_probs = true;
      } else if (key == "I") {
        unsigned s;
        while (val >> s) I.push_back(s);
      } else if (key == "mode") {
        std::string m;
        val >> m;
        if (m == "skew") kind = SystemKind::skew;
        else if (m == "base") kind = SystemKind::base_only;
        else if (m == "rotation") kind = SystemKind::rotation;
        else throw ParseError("unknown mode '" + m + "'");
      } else {
        throw ParseError("unknown descriptor key '" + key + "'");
      }
    }
    if (!have_probs) probs.assign(p, Rational(1, p));
    if (alpha.size() != d) {
      throw ParseError("descriptor declares d = " + std::to_string(d) + " but has " +
                       std::to_string(alpha.size()) + " cf: lines");
    }
    std::vector<bool> in_I(p, false);
    for (unsigned s : I) {
      if (s >= p) throw ParseError("I contains symbol out of range");
      in_I[s] = true;
    }
    if (kind == SystemKind::skew && d == 0) kind = SystemKind::base_only;
    return SkewSystem(MarkovBase(p, probs), alpha, in_I, bits, kind,
                      kind == SystemKind::skew);
  }

 private:
  MarkovBase base_;
  std::vector<CFAngle> alpha_;
  std::vector<bool> in_I_;
  unsigned bits_ = 256;
  SystemKind kind_ = SystemKind::skew;
  TorusPoint alpha_fp_;
  Rational mu_I_;
};

/// i.i.d. symbol sequence: a mu-sample of w in symbolic coordinates. Extended on demand;
/// the same seed always yields the same symbols regardless of how it is extended.
class SymbolicOrbit {
 public:
  SymbolicOrbit(const MarkovBase& base, std::uint64_t seed) : base_(&base), rng_(seed), seed_(seed) {}

  /// Forces the first symbols (used to start inside a cylinder).
  SymbolicOrbit(const MarkovBase& base, std::uint64_t seed, const std::vector<std::uint8_t>& prefix)
      : SymbolicOrbit(base, seed) {
    s_ = prefix;
  }

  void ensure(std::size_t n) {
    if (s_.size() >= n) return;
    s_.reserve(n);
    while (s_.size() < n) s_.push_back(base_->sample(rng_));
  }

  std::uint8_t operator[](std::size_t k) {
    ensure(k + 1);
    return s_[k];
  }

  const std::uint8_t* data() const { return s_.data(); }
  std::size_t length() const { return s_.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint8_t>& symbols() const { return s_; }

  /// Point of [0,1) with these symbols as p-ary digits (first `digits` of them).
  double point(std::size_t offset = 0, std::size_t digits = 52) {
    ensure(offset + digits);
    double x = 0, scale = 1.0 / base_->p();
    for (std::size_t i = 0; i < digits; ++i) {
      x += s_[offset + i] * scale;
      scale /= base_->p();
    }
    return x;
  }

 private:
  const MarkovBase* base_;
  Rng rng_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> s_;
};

inline SymbolicOrbit sample_base_orbit(const MarkovBase& base, std::size_t length,
                                       std::uint64_t seed) {
  require(length >= 1, "sample_base_orbit: length must be >= 1");
  SymbolicOrbit o(base, seed);
  o.ensure(length);
  return o;
}

/// S_n phi = #{0 <= i < n : s_i in I}.
inline std::uint64_t birkhoff_phi(const SkewSystem& sys, SymbolicOrbit& orbit, std::size_t n) {
  orbit.ensure(n);
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += sys.active(orbit.data()[i]) ? 1 : 0;
  return c;
}

/// Throws PrecisionContractError unless n 2^-B < min_radius / 100.
inline void check_precision(const SkewSystem& sys, std::uint64_t n, double min_radius) {
  if (sys.kind() == SystemKind::base_only) return;
  const double lhs = std::log2(static_cast<double>(std::max<std::uint64_t>(n, 1))) -
                     static_cast<double>(sys.bits());
  const double rhs = std::log2(min_radius / 100.0);
  if (!(lhs < rhs)) {
    throw PrecisionContractError("precision contract: n = " + std::to_string(n) + " steps at B = " +
                                 std::to_string(sys.bits()) + " bits cannot resolve radius " +
                                 std::to_string(min_radius));
  }
}

/// t_0 .. t_n with t_{k+1} = t_k + alpha phi(T^k w), exact modulo 2^B.
inline std::vector<TorusPoint> iterate_skew(const SkewSystem& sys, SymbolicOrbit& orbit,
                                            const TorusPoint& t0, std::size_t n,
                                            double min_radius = 1e-18) {
  require(sys.kind() != SystemKind::base_only, "iterate_skew: system has no fibre");
  check_precision(sys, n, min_radius);
  orbit.ensure(n);
  std::vector<TorusPoint> out;
  out.reserve(n + 1);
  out.push_back(t0);
  TorusPoint t = t0;
  for (std::size_t k = 0; k < n; ++k) {
    if (sys.active(orbit.data()[k])) t += sys.alpha_fixed();
    out.push_back(t);
  }
  return out;
}

/// Uniform point of the B-bit torus.
inline TorusPoint random_torus_point(std::size_t d, unsigned bits, Rng& rng) {
  std::vector<BigInt> c;
  for (std::size_t i = 0; i < d; ++i) {
    BigInt v = 0;
    for (unsigned l = 0; l < bits / 64; ++l) {
      v <<= 64;
      v += BigInt(static_cast<unsigned long>(rng.next()));
    }
    c.push_back(v);
  }
  return TorusPoint::from_integers(c, bits);
}

inline double local_dimension(const MarkovBase& base) { return base.local_dimension(); }

}  // namespace skewlab
