#pragma once

// Hitting and return times for the skew product, their scaling exponents,
// rescaled time statistics and shrinking-target hit counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "skewlab/dio_metrics.hpp"
#include "skewlab/dyn_core.hpp"

namespace skewlab {

inline constexpr std::int64_t kTimeout = -1;

/// Target point y = (w', t'): `word` holds enough symbols of w' for the smallest radius.
struct Target {
  std::vector<std::uint8_t> word;
  TorusPoint t;
};

enum class Test {
  full,        ///< sup metric on Omega x T^d
  torus_only,  ///< observation through the fibre projection
  base_only,   ///< observation through the base projection
};

namespace detail {

inline Test default_test(const SkewSystem& sys) {
  switch (sys.kind()) {
    case SystemKind::rotation: return Test::torus_only;
    case SystemKind::base_only: return Test::base_only;
    default: return Test::full;
  }
}

}  // namespace detail

/// First times k in [min_k, n_max] with d(S^k x, y) < r_j, for radii sorted in
/// decreasing order. Balls are nested, so a single pass resolves them in order;
/// unresolved radii are kTimeout (censored).
inline std::vector<std::int64_t> hitting_times(const SkewSystem& sys, SymbolicOrbit* orbit,
                                               const TorusPoint& t0, const Target& y,
                                               const std::vector<double>& radii,
                                               std::uint64_t n_max, std::uint64_t min_k = 1,
                                               std::optional<Test> test_opt = std::nullopt) {
  require(!radii.empty(), "hitting_times: no radii");
  require(std::is_sorted(radii.rbegin(), radii.rend()), "hitting_times: radii must be decreasing");
  require(n_max >= 1, "hitting_times: n_max must be >= 1");
  const Test test = test_opt.value_or(detail::default_test(sys));
  const bool use_base = test != Test::torus_only;
  const bool use_torus = test != Test::base_only;
  if (use_torus) check_precision(sys, n_max, radii.back());
  const std::size_t J = radii.size();
  std::vector<unsigned> m(J, 0);
  std::vector<std::uint64_t> thr(J, 0);
  for (std::size_t j = 0; j < J; ++j) {
    if (use_base) m[j] = sys.base().cylinder_length(radii[j]);
    if (use_torus) thr[j] = radius_threshold(radii[j]);
  }
  const bool needs_symbols = use_base || sys.kind() == SystemKind::skew;
  if (use_base) require(y.word.size() >= m.back(), "hitting_times: target word too short");
  if (needs_symbols) {
    require(orbit != nullptr, "hitting_times: system needs a base orbit");
    orbit->ensure(n_max + m.back() + 1);
  }
  const std::uint8_t* s = needs_symbols ? orbit->data() : nullptr;
  const std::uint8_t* w = y.word.data();
  const bool always_active = sys.kind() == SystemKind::rotation;

  std::vector<std::int64_t> tau(J, kTimeout);
  std::size_t next = 0;
  TorusPoint t = t0;
  const TorusPoint& a = use_torus || sys.kind() != SystemKind::base_only ? sys.alpha_fixed() : t0;
  for (std::uint64_t k = 1; k <= n_max && next < J; ++k) {
    if (use_torus && (always_active || sys.in_I(s[k - 1]))) t += a;
    if (k < min_k) continue;
    while (next < J) {
      if (use_base && std::memcmp(s + k, w, m[next]) != 0) break;
      if (use_torus && !t.within(y.t, thr[next])) break;
      tau[next++] = static_cast<std::int64_t>(k);
    }
  }
  return tau;
}

/// Return times: the target is the starting point itself.
inline std::vector<std::int64_t> return_times(const SkewSystem& sys, SymbolicOrbit* orbit,
                                              const TorusPoint& t0,
                                              const std::vector<double>& radii,
                                              std::uint64_t n_max) {
  Target y{{}, t0};
  if (orbit) {
    const unsigned m = sys.base().cylinder_length(radii.back());
    orbit->ensure(m + 1);
    y.word.assign(orbit->data(), orbit->data() + m);
  }
  return hitting_times(sys, orbit, t0, y, radii, n_max);
}

/// Observed times through the fibre: least k > p_skip with ||alpha S_k phi + t0 - t'|| < r.
/// Without a target this is the non-instantaneous return time of the observation.
inline std::vector<std::int64_t> observed_times(const SkewSystem& sys, SymbolicOrbit* orbit,
                                                const TorusPoint& t0,
                                                const std::vector<double>& radii,
                                                std::uint64_t p_skip, std::uint64_t n_max,
                                                std::optional<TorusPoint> target = std::nullopt) {
  Target y{{}, target.value_or(t0)};
  const std::uint64_t min_k = target ? 1 : p_skip + 1;
  return hitting_times(sys, orbit, t0, y, radii, n_max, min_k, Test::torus_only);
}

/// nu(B_r(y)) = mu(cylinder of length m(r)) (2r)^d for the product measure.
inline double ball_measure(const SkewSystem& sys, const Target& y, double r,
                           std::optional<Test> test_opt = std::nullopt) {
  const Test test = test_opt.value_or(detail::default_test(sys));
  double v = 1;
  if (test != Test::torus_only) {
    const unsigned m = sys.base().cylinder_length(r);
    require(y.word.size() >= m, "ball_measure: target word too short");
    v *= sys.base().cylinder_measure_d(y.word.data(), m);
  }
  if (test != Test::base_only) v *= std::pow(std::min(1.0, 2 * r), static_cast<double>(sys.d()));
  return v;
}

/// Dyadic radii 2^-j_min, ..., 2^-j_max (decreasing).
inline std::vector<double> dyadic_radii(unsigned j_min, unsigned j_max) {
  std::vector<double> r;
  for (unsigned j = j_min; j <= j_max; ++j) r.push_back(std::ldexp(1.0, -static_cast<int>(j)));
  return r;
}

struct ExponentFit {
  std::vector<double> radii;
  std::vector<std::int64_t> times;
  std::size_t used = 0;        // uncensored radii
  double lower_ratio = NAN;    // min log tau / log(1/r)
  double upper_ratio = NAN;    // max log tau / log(1/r)
  double lower_slope = NAN;    // lower convex hull edge over the middle of the range
  double upper_slope = NAN;    // upper convex hull edge over the middle of the range
  LineFit ls;                  // least squares on (log 1/r, log tau)
  bool monotone = true;        // tau non-increasing in r
  bool degenerate = true;
};

namespace detail {

// slope of the hull edge of (x, y) (sorted by x) whose x-span contains xm
inline double hull_slope(const std::vector<double>& x, const std::vector<double>& y, double xm,
                         bool lower) {
  std::vector<std::size_t> h;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (h.size() >= 2) {
      const std::size_t a = h[h.size() - 2], b = h.back();
      const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if ((lower && cross <= 0) || (!lower && cross >= 0)) h.pop_back();
      else break;
    }
    h.push_back(i);
  }
  for (std::size_t e = 0; e + 1 < h.size(); ++e) {
    const std::size_t a = h[e], b = h[e + 1];
    if (x[a] <= xm && xm <= x[b]) return (y[b] - y[a]) / (x[b] - x[a]);
  }
  return NAN;
}

}  // namespace detail

/// Envelope, ratio and least-squares exponents of tau_r against 1/r. Censored radii
/// are left out; fewer than 4 usable radii is a degenerate fit.
inline ExponentFit fit_exponents(const std::vector<double>& radii,
                                 const std::vector<std::int64_t>& times) {
  require(radii.size() == times.size(), "fit_exponents: size mismatch");
  ExponentFit f;
  f.radii = radii;
  f.times = times;
  std::vector<std::pair<double, double>> pts;
  std::int64_t prev = 0;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    if (times[j] == kTimeout) continue;
    if (times[j] < prev) f.monotone = false;
    prev = times[j];
    pts.emplace_back(std::log(1.0 / radii[j]), std::log(static_cast<double>(times[j])));
  }
  std::sort(pts.begin(), pts.end());
  f.used = pts.size();
  if (pts.empty()) return f;
  f.lower_ratio = INFINITY;
  f.upper_ratio = -INFINITY;
  std::vector<double> x, y;
  for (auto [a, b] : pts) {
    x.push_back(a);
    y.push_back(b);
    if (a > 0) {
      f.lower_ratio = std::min(f.lower_ratio, b / a);
      f.upper_ratio = std::max(f.upper_ratio, b / a);
    }
  }
  if (pts.size() < 4) return f;
  f.ls = least_squares(x, y);
  const double xm = 0.5 * (x.front() + x.back());
  f.lower_slope = detail::hull_slope(x, y, xm, true);
  f.upper_slope = detail::hull_slope(x, y, xm, false);
  f.degenerate = f.ls.degenerate;
  return f;
}

/// Ratios restricted to a sub-range of the radii (e.g. the small-radius tail).
inline std::pair<double, double> ratio_range(const ExponentFit& f, double r_hi, double r_lo) {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t j = 0; j < f.radii.size(); ++j) {
    if (f.times[j] == kTimeout || f.radii[j] > r_hi || f.radii[j] < r_lo) continue;
    const double v = std::log(static_cast<double>(f.times[j])) / std::log(1.0 / f.radii[j]);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

enum class StatMode { hitting, return_ };

struct TimeStats {
  std::vector<double> rescaled;  // sorted; +inf for censored samples
  double nu_ball = 0;
  std::size_t samples = 0;
  std::size_t censored = 0;
  bool starved = false;          // more than half of the samples censored

  double cdf(double s) const {
    const auto it = std::upper_bound(rescaled.begin(), rescaled.end(), s);
    return static_cast<double>(it - rescaled.begin()) / static_cast<double>(samples);
  }

  double timeout_mass() const { return static_cast<double>(censored) / samples; }

  /// sup over t in [0, T] of |F(t) - (1 - e^-t)|.
  double sup_distance_exp(double T = 3.0) const {
    double best = 0;
    std::size_t below = 0;
    for (std::size_t i = 0; i < rescaled.size() && rescaled[i] <= T; ++i) {
      const double g = 1 - std::exp(-rescaled[i]);
      best = std::max(best, std::abs(static_cast<double>(below) / samples - g));
      ++below;
      while (i + 1 < rescaled.size() && rescaled[i + 1] == rescaled[i]) {
        ++i;
        ++below;
      }
      best = std::max(best, std::abs(static_cast<double>(below) / samples - g));
    }
    best = std::max(best, std::abs(cdf(T) - (1 - std::exp(-T))));
    return best;
  }

  /// Percentile bootstrap band of F at each t.
  std::vector<std::pair<double, double>> bootstrap_band(const std::vector<double>& ts,
                                                        std::uint64_t seed,
                                                        std::size_t boot = 200) const {
    Rng rng(seed);
    std::vector<std::vector<double>> vals(ts.size());
    std::vector<double> res(samples);
    for (std::size_t b = 0; b < boot; ++b) {
      for (auto& v : res) v = rescaled[rng.below(samples)];
      std::sort(res.begin(), res.end());
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto it = std::upper_bound(res.begin(), res.end(), ts[i]);
        vals[i].push_back(static_cast<double>(it - res.begin()) / samples);
      }
    }
    std::vector<std::pair<double, double>> out;
    for (auto& v : vals) {
      std::sort(v.begin(), v.end());
      out.emplace_back(v[static_cast<std::size_t>(0.025 * (boot - 1))],
                       v[static_cast<std::size_t>(0.975 * (boot - 1))]);
    }
    return out;
  }

  void write_csv(std::ostream& os, const std::vector<double>& ts, std::uint64_t seed) const {
    auto band = bootstrap_band(ts, seed);
    os << "t,F,ci_lo,ci_hi\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
      os << ts[i] << ',' << cdf(ts[i]) << ',' << band[i].first << ',' << band[i].second << '\n';
    }
  }
};

/// Offset uniform in the open cube (-r, r)^d, added to t.
inline TorusPoint jitter(const TorusPoint& t, double r, Rng& rng) {
  std::vector<std::uint64_t> top;
  const std::uint64_t thr = radius_threshold(r);
  for (std::size_t i = 0; i < t.dim(); ++i) {
    const std::uint64_t span = thr >= (std::uint64_t{1} << 63) ? ~std::uint64_t{0} : 2 * thr - 1;
    top.push_back(rng.below(span) - (thr - 1));
  }
  return t + TorusPoint::from_top(top, t.bits());
}

/// Empirical law of nu(B_r) tau over sampled starts. Hitting mode samples x ~ nu;
/// return mode starts inside B_r(y): base prefix forced, fibre uniform in the r-cube.
inline TimeStats time_statistics(const SkewSystem& sys, const Target& y, double r,
                                 std::size_t samples, StatMode mode, std::uint64_t seed,
                                 std::uint64_t n_max) {
  require(samples >= 1, "time_statistics: need samples");
  TimeStats st;
  st.samples = samples;
  st.nu_ball = ball_measure(sys, y, r);
  const bool fibre = sys.kind() != SystemKind::base_only;
  const unsigned m = sys.kind() == SystemKind::rotation ? 0 : sys.base().cylinder_length(r);
  for (std::size_t i = 0; i < samples; ++i) {
    const std::uint64_t s = derive_seed(seed, i);
    Rng rng(derive_seed(s, 1));
    std::vector<std::uint8_t> prefix;
    if (mode == StatMode::return_) prefix.assign(y.word.begin(), y.word.begin() + m);
    SymbolicOrbit orbit(sys.base(), s, prefix);
    TorusPoint t0 = fibre ? (mode == StatMode::return_ ? jitter(y.t, r, rng)
                                                       : random_torus_point(sys.d(), sys.bits(), rng))
                          : TorusPoint();
    const auto tau = hitting_times(sys, &orbit, t0, y, {r}, n_max);
    if (tau[0] == kTimeout) {
      st.rescaled.push_back(INFINITY);
      ++st.censored;
    } else {
      st.rescaled.push_back(st.nu_ball * static_cast<double>(tau[0]));
    }
  }
  std::sort(st.rescaled.begin(), st.rescaled.end());
  st.starved = 2 * st.censored > samples;
  return st;
}

/// Random target: a mu-typical word and a uniform fibre point.
inline Target random_target(const SkewSystem& sys, std::size_t word_len, std::uint64_t seed) {
  SymbolicOrbit o(sys.base(), seed);
  o.ensure(word_len);
  Rng rng(derive_seed(seed, 17));
  Target y;
  y.word = o.symbols();
  if (sys.kind() != SystemKind::base_only) y.t = random_torus_point(sys.d(), sys.bits(), rng);
  return y;
}

struct MstpReport {
  std::vector<double> ratios;     // hits / expected, per start
  std::vector<std::uint64_t> hits;
  double expected = 0;            // sum of nu(B_{r_i})
  double mean_ratio = 0;
  double median_ratio = 0;
};

/// Counts i in [i0, N] with S^i x in B_{r_i}(y) over sampled starts x ~ nu, against
/// sum nu(B_{r_i}). `radius` must be non-increasing in i.
inline MstpReport mstp_check(const SkewSystem& sys, const Target& y,
                             const std::function<double(std::uint64_t)>& radius,
                             std::uint64_t i0, std::uint64_t N, std::size_t starts,
                             std::uint64_t seed) {
  require(i0 >= 1 && N >= i0, "mstp_check: need 1 <= i0 <= N");
  const Test test = detail::default_test(sys);
  const bool use_base = test != Test::torus_only;
  const bool use_torus = test != Test::base_only;
  if (use_torus) check_precision(sys, N, radius(N));
  MstpReport rep;
  for (std::uint64_t i = i0; i <= N; ++i) rep.expected += ball_measure(sys, y, radius(i), test);
  const unsigned m_max = use_base ? sys.base().cylinder_length(radius(N)) : 0;
  require(!use_base || y.word.size() >= m_max, "mstp_check: target word too short");
  constexpr std::uint64_t kBlock = 4096;
  for (std::size_t st = 0; st < starts; ++st) {
    const std::uint64_t s = derive_seed(seed, st);
    Rng rng(derive_seed(s, 1));
    SymbolicOrbit orbit(sys.base(), s);
    orbit.ensure(N + m_max + 1);
    const std::uint8_t* sym = orbit.data();
    TorusPoint t = use_torus ? random_torus_point(sys.d(), sys.bits(), rng) : TorusPoint();
    const bool always = sys.kind() == SystemKind::rotation;
    std::uint64_t hits = 0;
    unsigned m_block = 0;
    std::uint64_t thr_block = 0;
    for (std::uint64_t i = 1; i <= N; ++i) {
      if (use_torus && (always || sys.in_I(sym[i - 1]))) t += sys.alpha_fixed();
      if (i < i0) continue;
      if ((i - i0) % kBlock == 0) {
        // the block's first radius is the largest: a cheap superset test
        const double rb = radius(i);
        m_block = use_base ? sys.base().cylinder_length(rb) : 0;
        thr_block = use_torus ? radius_threshold(rb) : 0;
      }
      if (use_base && std::memcmp(sym + i, y.word.data(), m_block) != 0) continue;
      if (use_torus && !t.within(y.t, thr_block)) continue;
      const double ri = radius(i);
      const unsigned mi = use_base ? sys.base().cylinder_length(ri) : 0;
      if (use_base && std::memcmp(sym + i, y.word.data(), mi) != 0) continue;
      if (use_torus && !t.within(y.t, radius_threshold(ri))) continue;
      ++hits;
    }
    rep.hits.push_back(hits);
    rep.ratios.push_back(rep.expected > 0 ? hits / rep.expected : 0);
  }
  std::vector<double> sorted = rep.ratios;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0;
  for (double v : sorted) sum += v;
  rep.mean_ratio = sorted.empty() ? 0 : sum / sorted.size();
  if (!sorted.empty()) {
    const std::size_t n = sorted.size();
    rep.median_ratio = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }
  return rep;
}

inline double median(std::vector<double> v) {
  require(!v.empty(), "median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace skewlab
