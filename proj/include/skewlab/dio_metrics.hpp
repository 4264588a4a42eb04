#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <vector>

#include "skewlab/cf_core.hpp"
#include "skewlab/dyn_core.hpp"
#include "skewlab/lattice.hpp"

namespace skewlab {

/// y = slope x + intercept by least squares.
struct LineFit {
  double slope = 0, intercept = 0;
  std::vector<double> residuals;
  bool degenerate = true;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i) f.residuals.push_back(y[i] - f.slope * x[i] - f.intercept);
  f.degenerate = false;
  return f;
}

struct LatticeScanReport {
  std::int64_t K = 0;
  std::vector<double> shell_lo, shell_hi;  // index m = 1..K, enclosure of the shell minimum
  std::vector<double> cum_min;             // cumulative minimum of shell_lo
  double exponent = 0;                     // slope of -log(cum_min) against log m
  LineFit fit;
  bool degenerate = false;

  void write_csv(std::ostream& os) const {
    os << "m,min_lo,min_hi\n";
    for (std::int64_t m = 1; m <= K; ++m) os << m << ',' << shell_lo[m] << ',' << shell_hi[m] << '\n';
  }
};

namespace detail {

inline void finish_scan(LatticeScanReport& rep) {
  rep.cum_min.assign(rep.shell_lo.size(), 1.0);
  double c = 1.0;
  std::vector<double> x, y;
  for (std::int64_t m = 1; m <= rep.K; ++m) {
    c = std::min(c, rep.shell_lo[m]);
    rep.cum_min[m] = c;
    x.push_back(std::log(static_cast<double>(m)));
    y.push_back(-std::log(c));
  }
  rep.fit = least_squares(x, y);
  rep.degenerate = rep.fit.degenerate;
  rep.exponent = rep.fit.slope;
}

inline std::vector<u128> fixed_angles(const std::vector<CFAngle>& alpha) {
  std::vector<u128> fx;
  for (const auto& a : alpha) fx.push_back(angle_fixed128(a));
  return fx;
}

}  // namespace detail

/// Linear type scan: per shell |k|_inf = m, min of ||k . alpha|| over one
/// representative of each +-k. Works for any d (cost (2K+1)^d).
inline LatticeScanReport gamma_l_estimate(const std::vector<CFAngle>& alpha, std::int64_t K) {
  require(!alpha.empty(), "gamma_l_estimate: need at least one angle");
  require(K >= 1, "gamma_l_estimate: K must be >= 1");
  const std::size_t d = alpha.size();
  const auto fx = detail::fixed_angles(alpha);
  LatticeScanReport rep;
  rep.K = K;
  rep.shell_lo.assign(K + 1, 1.0);
  rep.shell_hi.assign(K + 1, 1.0);
  std::vector<u128> best_lo(K + 1, ~static_cast<u128>(0)), best_hi(K + 1, ~static_cast<u128>(0));
  std::vector<std::int64_t> k(d, -K);
  while (true) {
    // first nonzero coordinate positive: one representative per +-k
    std::size_t first = 0;
    while (first < d && k[first] == 0) ++first;
    if (first < d && k[first] > 0) {
      std::int64_t m = 0;
      for (auto c : k) m = std::max<std::int64_t>(m, std::abs(c));
      const FormEnclosure e = form_enclosure(fx, k);
      if (e.lo == 0) {
        throw InsufficientDepthError("gamma_l_estimate: enclosure touches 0 at shell " +
                                     std::to_string(m));
      }
      if (e.lo < best_lo[m]) {
        best_lo[m] = e.lo;
        best_hi[m] = e.hi;
      }
    }
    std::size_t i = 0;
    while (i < d && k[i] == K) k[i++] = -K;
    if (i == d) break;
    ++k[i];
  }
  for (std::int64_t m = 1; m <= K; ++m) {
    rep.shell_lo[m] = u128_to_unit(best_lo[m]);
    rep.shell_hi[m] = u128_to_unit(best_hi[m]);
  }
  detail::finish_scan(rep);
  return rep;
}

/// Simultaneous type scan: ||k alpha|| = max_i ||k alpha_i|| for scalar k = 1..K.
inline LatticeScanReport gamma_s_estimate(const std::vector<CFAngle>& alpha, std::int64_t K) {
  require(!alpha.empty(), "gamma_s_estimate: need at least one angle");
  require(K >= 1, "gamma_s_estimate: K must be >= 1");
  const auto fx = detail::fixed_angles(alpha);
  LatticeScanReport rep;
  rep.K = K;
  rep.shell_lo.assign(K + 1, 1.0);
  rep.shell_hi.assign(K + 1, 1.0);
  for (std::int64_t m = 1; m <= K; ++m) {
    u128 lo = 0, hi = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      std::vector<std::int64_t> k(alpha.size(), 0);
      k[i] = m;
      const FormEnclosure e = form_enclosure(fx, k);
      lo = std::max(lo, e.lo);
      hi = std::max(hi, e.hi);
    }
    if (lo == 0) {
      throw InsufficientDepthError("gamma_s_estimate: enclosure touches 0 at k = " +
                                   std::to_string(m));
    }
    rep.shell_lo[m] = u128_to_unit(lo);
    rep.shell_hi[m] = u128_to_unit(hi);
  }
  detail::finish_scan(rep);
  return rep;
}

/// Extreme discrepancy of points in [0,1) over intervals [a, b):
/// D = 1/n + max_i (i/n - x_(i)) - min_i (i/n - x_(i)), exact.
inline Rational discrepancy_1d(std::vector<Rational> points) {
  require(!points.empty(), "discrepancy_1d: empty point set");
  for (const auto& x : points) require(x >= 0 && x < 1, "discrepancy_1d: points must lie in [0,1)");
  std::sort(points.begin(), points.end());
  const std::size_t n = points.size();
  Rational mx, mn;
  for (std::size_t i = 0; i < n; ++i) {
    Rational v = Rational(BigInt(i + 1), BigInt(n)) - points[i];
    if (i == 0 || v > mx) mx = v;
    if (i == 0 || v < mn) mn = v;
  }
  Rational d = Rational(1, n) + mx - mn;
  d.canonicalize();
  return d;
}

/// Same on the first coordinate of B-bit torus points, in exact integer arithmetic.
inline Rational discrepancy_1d(const std::vector<TorusPoint>& pts) {
  require(!pts.empty(), "discrepancy_1d: empty point set");
  const unsigned B = pts.front().bits();
  std::vector<BigInt> x;
  x.reserve(pts.size());
  for (const auto& t : pts) x.push_back(t.coord(0));
  std::sort(x.begin(), x.end());
  const BigInt n = static_cast<unsigned long>(x.size());
  const BigInt scale = BigInt(1) << B;
  // i/n - x/2^B = (i 2^B - n x) / (n 2^B)
  BigInt mx, mn;
  for (std::size_t i = 0; i < x.size(); ++i) {
    BigInt v = BigInt(static_cast<unsigned long>(i + 1)) * scale - n * x[i];
    if (i == 0 || v > mx) mx = v;
    if (i == 0 || v < mn) mn = v;
  }
  Rational d(BigInt(scale + mx - mn), BigInt(n * scale));
  d.canonicalize();
  return d;
}

struct GridDiscrepancy {
  Rational value;        // exact maximum over grid boxes
  Rational error_bound;  // 2d/G against the unrestricted supremum
};

/// Maximum of |#{x in R}/n - |R|| over half-open boxes with corners on the G-grid.
/// Weights (summing to 1) turn the point set into a discrete distribution.
inline GridDiscrepancy discrepancy_grid(const std::vector<TorusPoint>& pts, std::uint64_t G,
                                        std::uint64_t max_cells = 1u << 24,
                                        double max_ops = 4e9) {
  require(!pts.empty(), "discrepancy_grid: empty point set");
  require(G >= 2, "discrepancy_grid: G must be >= 2");
  const std::size_t d = pts.front().dim();
  require(d >= 1, "discrepancy_grid: need d >= 1");
  double cells_d = std::pow(static_cast<double>(G), static_cast<double>(d));
  if (cells_d > static_cast<double>(max_cells)) {
    throw PreconditionError("discrepancy_grid: G^d = " + std::to_string(cells_d) +
                            " cells exceeds the memory guard");
  }
  const double ops = std::pow(static_cast<double>(G) * (G + 1) / 2.0, static_cast<double>(d));
  if (d >= 2 && ops > max_ops) {
    throw PreconditionError("discrepancy_grid: box enumeration too large; lower G");
  }
  const std::size_t cells = static_cast<std::size_t>(cells_d);
  const std::int64_t n = static_cast<std::int64_t>(pts.size());
  auto cell_of = [&](const TorusPoint& t, std::size_t i) {
    return static_cast<std::uint64_t>((static_cast<u128>(t.top(i)) * G) >> 64);
  };
  GridDiscrepancy out;
  out.error_bound = Rational(BigInt(2 * d), BigInt(G));
  if (d == 1) {
    std::vector<std::int64_t> cnt(G + 1, 0);
    for (const auto& t : pts) ++cnt[cell_of(t, 0) + 1];
    // f(b) = C(b) G - b n over common denominator n G; D = max f - min f
    std::int64_t c = 0, mx = 0, mn = 0;
    for (std::uint64_t b = 0; b <= G; ++b) {
      c += cnt[b];
      const std::int64_t f = c * static_cast<std::int64_t>(G) - static_cast<std::int64_t>(b) * n;
      mx = std::max(mx, f);
      mn = std::min(mn, f);
    }
    out.value = Rational(BigInt(static_cast<long>(mx - mn)), BigInt(static_cast<long>(n * G)));
    out.value.canonicalize();
    return out;
  }
  // prefix sums P over (G+1)^d corners
  std::vector<std::size_t> stride(d, 1);
  for (std::size_t i = 1; i < d; ++i) stride[i] = stride[i - 1] * (G + 1);
  std::vector<std::int64_t> P(stride[d - 1] * (G + 1), 0);
  for (const auto& t : pts) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < d; ++i) idx += (cell_of(t, i) + 1) * stride[i];
    ++P[idx];
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t idx = 0; idx < P.size(); ++idx) {
      if ((idx / stride[i]) % (G + 1) != 0) P[idx] += P[idx - stride[i]];
    }
  }
  (void)cells;
  // enumerate boxes [a_i, b_i) with a_i < b_i
  const long double nG = static_cast<long double>(n);
  std::vector<std::uint64_t> a(d, 0), b(d, 1);
  BigInt best_num = 0;
  BigInt best_den = 1;
  long double best = -1;
  BigInt Gd = 1;
  for (std::size_t i = 0; i < d; ++i) Gd *= static_cast<unsigned long>(G);
  while (true) {
    // inclusion-exclusion
    std::int64_t count = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      std::size_t idx = 0;
      int sign = 1;
      for (std::size_t i = 0; i < d; ++i) {
        if (mask >> i & 1) {
          idx += a[i] * stride[i];
          sign = -sign;
        } else {
          idx += b[i] * stride[i];
        }
      }
      count += sign * P[idx];
    }
    std::uint64_t vol = 1;
    for (std::size_t i = 0; i < d; ++i) vol *= (b[i] - a[i]);
    // |count/n - vol/G^d| = |count G^d - vol n| / (n G^d)
    const long double dev =
        std::fabs(static_cast<long double>(count) / nG - static_cast<long double>(vol) / cells_d);
    if (dev > best) {
      best = dev;
      BigInt num = BigInt(static_cast<long>(count)) * Gd - BigInt(static_cast<unsigned long>(vol)) * n;
      best_num = abs(num);
      best_den = BigInt(static_cast<long>(n)) * Gd;
    }
    std::size_t i = 0;
    while (i < d) {
      if (b[i] < G) {
        ++b[i];
        break;
      }
      if (a[i] + 2 <= G) {
        ++a[i];
        b[i] = a[i] + 1;
        break;
      }
      a[i] = 0;
      b[i] = 1;
      ++i;
    }
    if (i == d) break;
  }
  out.value = Rational(best_num, best_den);
  out.value.canonicalize();
  return out;
}

/// Index -> bound on |Phi_Q(h)|.
using FourierMagnitudes = std::map<std::vector<std::int64_t>, Rational>;

/// 3^d (2/(H+1) + sum_{0 < |h|_inf <= H} |Phi_Q(h)| / r(h)), r(h) = prod max(1, |h_i|).
inline Rational etk_bound(const FourierMagnitudes& mags, std::int64_t H, std::size_t d) {
  require(H >= 1 && d >= 1, "etk_bound: need H >= 1 and d >= 1");
  Rational sum = Rational(2, H + 1);
  std::vector<std::int64_t> h(d, -H);
  while (true) {
    bool zero = std::all_of(h.begin(), h.end(), [](std::int64_t c) { return c == 0; });
    if (!zero) {
      auto it = mags.find(h);
      if (it == mags.end()) {
        std::string idx;
        for (auto c : h) idx += std::to_string(c) + ' ';
        throw PreconditionError("etk_bound: missing magnitude for index " + idx);
      }
      BigInt r = 1;
      for (auto c : h) r *= std::max<std::int64_t>(1, std::abs(c));
      sum += it->second / Rational(r);
    }
    std::size_t i = 0;
    while (i < d && h[i] == H) h[i++] = -H;
    if (i == d) break;
    ++h[i];
  }
  BigInt three = 1;
  for (std::size_t i = 0; i < d; ++i) three *= 3;
  Rational out = Rational(three) * sum;
  out.canonicalize();
  return out;
}

/// Empirical Fourier magnitudes |1/n sum e^{-2 pi i <h, x>}| rounded up to a rational
/// with denominator 2^40 (so the ETK bound stays an upper bound).
inline FourierMagnitudes empirical_fourier(const std::vector<TorusPoint>& pts, std::int64_t H) {
  require(!pts.empty(), "empirical_fourier: empty point set");
  const std::size_t d = pts.front().dim();
  FourierMagnitudes out;
  std::vector<std::int64_t> h(d, -H);
  while (true) {
    double re = 0, im = 0;
    for (const auto& t : pts) {
      double ph = 0;
      for (std::size_t i = 0; i < d; ++i) ph += static_cast<double>(h[i]) * t.as_double(i);
      re += std::cos(2 * M_PI * ph);
      im -= std::sin(2 * M_PI * ph);
    }
    const double mag = std::hypot(re, im) / pts.size();
    const double up = std::ceil(std::ldexp(mag, 40) + 64.0);
    out[h] = Rational(BigInt(static_cast<unsigned long>(up)), BigInt(1) << 40);
    std::size_t i = 0;
    while (i < d && h[i] == H) h[i++] = -H;
    if (i == d) break;
    ++h[i];
  }
  return out;
}

/// Points k alpha, k = 0..n-1.
inline std::vector<TorusPoint> rotation_orbit(const std::vector<CFAngle>& alpha, std::size_t n,
                                              unsigned bits = 256) {
  const TorusPoint a = TorusPoint::from_angles(alpha, bits);
  std::vector<TorusPoint> out;
  out.reserve(n);
  TorusPoint t(alpha.size(), bits);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(t);
    t += a;
  }
  return out;
}

/// Exact D_n(alpha) for d = 1, grid-restricted for d >= 2.
inline Rational rotation_discrepancy(const std::vector<CFAngle>& alpha, std::size_t n,
                                     std::uint64_t G = 256) {
  auto pts = rotation_orbit(alpha, n);
  if (alpha.size() == 1) return discrepancy_1d(pts);
  return discrepancy_grid(pts, G).value;
}

struct WalkDiscrepancy {
  double value = 0;        // grid discrepancy of the walker cloud
  double grid_error = 0;   // 2d/G
  double stderr_ = 0;      // bootstrap
  std::size_t samples = 0;
};

/// Monte Carlo D_n^mu: the cloud alpha S_n phi(w) over `samples` walkers w ~ mu.
inline WalkDiscrepancy random_walk_discrepancy(const SkewSystem& sys, std::size_t n,
                                               std::size_t samples, std::uint64_t seed,
                                               std::uint64_t G = 4096, std::size_t boot = 50) {
  require(samples >= 100, "random_walk_discrepancy: need at least 100 walkers");
  require(sys.kind() != SystemKind::base_only, "random_walk_discrepancy: system has no fibre");
  check_precision(sys, n, 1.0 / static_cast<double>(G));
  std::vector<std::uint64_t> S(samples);
  for (std::size_t w = 0; w < samples; ++w) {
    SymbolicOrbit o(sys.base(), derive_seed(seed, w));
    S[w] = birkhoff_phi(sys, o, n);
  }
  auto cloud = [&](const std::vector<std::size_t>& idx) {
    std::vector<TorusPoint> pts;
    pts.reserve(idx.size());
    for (auto i : idx) pts.push_back(sys.alpha_fixed().times(S[i]));
    return pts;
  };
  std::uint64_t g = G;
  if (sys.d() >= 2) g = std::min<std::uint64_t>(G, 32);
  std::vector<std::size_t> all(samples);
  std::iota(all.begin(), all.end(), 0);
  const GridDiscrepancy base = discrepancy_grid(cloud(all), g);
  WalkDiscrepancy out;
  out.value = base.value.get_d();
  out.grid_error = base.error_bound.get_d();
  out.samples = samples;
  Rng rng(derive_seed(seed, ~0ULL));
  double s1 = 0, s2 = 0;
  for (std::size_t b = 0; b < boot; ++b) {
    std::vector<std::size_t> idx(samples);
    for (auto& i : idx) i = rng.below(samples);
    const double v = discrepancy_grid(cloud(idx), g).value.get_d();
    s1 += v;
    s2 += v * v;
  }
  const double mean = s1 / boot;
  out.stderr_ = std::sqrt(std::max(0.0, s2 / boot - mean * mean));
  return out;
}

/// Exact D_n^mu for d = 1 and I a union of 1-cylinders: S_n phi ~ Binomial(n, mu(I)),
/// so the law of alpha S_n phi is a finite weighted point set. Used as an oracle.
inline double walk_discrepancy_exact_1d(const SkewSystem& sys, std::size_t n) {
  require(sys.d() == 1, "walk_discrepancy_exact_1d: d must be 1");
  const double q = sys.mu_I().get_d();
  std::vector<std::pair<double, double>> atoms;  // (position, weight)
  const TorusPoint a = sys.alpha_fixed();
  // log-binomial weights
  for (std::size_t j = 0; j <= n; ++j) {
    double lw = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
    lw += (q > 0 ? j * std::log(q) : (j ? -INFINITY : 0)) +
          (q < 1 ? (n - j) * std::log(1 - q) : (n - j ? -INFINITY : 0));
    const double w = std::exp(lw);
    if (w > 0) atoms.emplace_back(a.times(j).as_double(0), w);
  }
  std::sort(atoms.begin(), atoms.end());
  // f(x) = Q([0,x)) - x just before / after each atom; D = sup f - inf f
  double F = 0, mx = 0, mn = 0;
  for (const auto& [x, w] : atoms) {
    mx = std::max(mx, F - x);
    mn = std::min(mn, F - x);
    F += w;
    mx = std::max(mx, F - x);
    mn = std::min(mn, F - x);
  }
  return mx - mn;
}

/// Fitted decay exponent of a (n, D_n) curve: minus the least-squares slope in log-log.
inline LineFit decay_exponent(const std::vector<double>& n, const std::vector<double>& D) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n.size(); ++i) {
    x.push_back(std::log(n[i]));
    y.push_back(-std::log(D[i]));
  }
  return least_squares(x, y);
}

}  // namespace skewlab
