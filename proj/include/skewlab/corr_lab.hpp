#pragma once

// Correlations C_n(A, B) = int A . B o S^n dnu by Monte Carlo and through the twisted
// transfer operators L_u f = L(e^{iu phi} f), the Fourier-Galerkin matrix of L_u,
// and closed-form exponent bounds.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "skewlab/dio_metrics.hpp"
#include "skewlab/dyn_core.hpp"
#include "skewlab/rec_lab.hpp"

namespace skewlab {

using cplx = std::complex<double>;

/// A(w, t) = sum_k a_k(w) e^{2 pi i <k, t>} with each a_k constant on m-cylinders.
/// a_k is indexed by the word s_0..s_{m-1} read as a base-p number (s_0 most significant).
struct Observable {
  unsigned p = 2;
  unsigned m = 1;
  std::size_t d = 1;
  std::map<std::vector<std::int64_t>, std::vector<cplx>> coeffs;
  int regularity = 1;  // C^p class, for the bound calculators only

  std::size_t words() const {
    std::size_t n = 1;
    for (unsigned i = 0; i < m; ++i) n *= p;
    return n;
  }

  /// Pure fibre term c e^{2 pi i <k, t>}.
  static Observable fourier(unsigned p, std::size_t d, std::vector<std::int64_t> k, cplx c = 1.0) {
    Observable o;
    o.p = p;
    o.m = 1;
    o.d = d;
    o.coeffs[std::move(k)] = std::vector<cplx>(p, c);
    return o;
  }

  Observable& add(const std::vector<std::int64_t>& k, const std::vector<cplx>& base) {
    require(k.size() == d, "Observable: frequency has wrong dimension");
    require(base.size() == words(), "Observable: base part has wrong size");
    auto& slot = coeffs[k];
    if (slot.empty()) slot.assign(words(), 0.0);
    for (std::size_t i = 0; i < base.size(); ++i) slot[i] += base[i];
    return *this;
  }

  std::size_t word_index(const std::uint8_t* s) const {
    std::size_t idx = 0;
    for (unsigned i = 0; i < m; ++i) idx = idx * p + s[i];
    return idx;
  }

  cplx operator()(const std::uint8_t* s, const TorusPoint& t) const {
    const std::size_t w = word_index(s);
    cplx v = 0;
    for (const auto& [k, a] : coeffs) {
      double ph = 0;
      for (std::size_t i = 0; i < d; ++i) ph += static_cast<double>(k[i]) * t.as_double(i);
      v += a[w] * std::polar(1.0, 2 * M_PI * ph);
    }
    return v;
  }

  /// int A dnu = mu-average of a_0.
  cplx mean(const MarkovBase& base) const {
    auto it = coeffs.find(std::vector<std::int64_t>(d, 0));
    if (it == coeffs.end()) return 0;
    return base_average(base, it->second);
  }

  cplx base_average(const MarkovBase& base, const std::vector<cplx>& f) const {
    cplx s = 0;
    std::vector<std::uint8_t> w(m);
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
      std::size_t r = idx;
      for (unsigned i = m; i-- > 0;) {
        w[i] = static_cast<std::uint8_t>(r % p);
        r /= p;
      }
      s += f[idx] * base.cylinder_measure_d(w.data(), m);
    }
    return s;
  }

  /// A minus its mean.
  Observable centered(const MarkovBase& base) const {
    Observable o = *this;
    const cplx mu = mean(base);
    auto& a0 = o.coeffs[std::vector<std::int64_t>(d, 0)];
    if (a0.empty()) a0.assign(words(), 0.0);
    for (auto& v : a0) v -= mu;
    return o;
  }

  /// L2(nu) norm.
  double l2(const MarkovBase& base) const {
    double s = 0;
    for (const auto& [k, a] : coeffs) {
      std::vector<cplx> sq(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) sq[i] = std::norm(a[i]);
      s += base_average(base, sq).real();
    }
    return std::sqrt(s);
  }

  /// Re-expresses the base parts on longer cylinders.
  Observable refined(unsigned new_m) const {
    require(new_m >= m, "Observable: cannot coarsen");
    Observable o = *this;
    o.m = new_m;
    std::size_t extra = 1;
    for (unsigned i = m; i < new_m; ++i) extra *= p;
    for (auto& [k, a] : o.coeffs) {
      std::vector<cplx> b(a.size() * extra);
      for (std::size_t i = 0; i < b.size(); ++i) b[i] = a[i / extra];
      a = std::move(b);
    }
    return o;
  }
};

struct Estimate {
  cplx value = 0;
  double err = 0;  // standard error (Monte Carlo) or truncation bound
};

/// Monte Carlo mean of A(x) B(S^n x) over x ~ nu; error is the standard error of the mean.
inline Estimate corr_mc(const SkewSystem& sys, const Observable& A, const Observable& B,
                        std::size_t n, std::size_t samples, std::uint64_t seed) {
  require(samples >= 2, "corr_mc: need at least two samples");
  require(sys.kind() == SystemKind::skew, "corr_mc: needs a skew system");
  check_precision(sys, n, 1e-6);
  const unsigned mm = std::max(A.m, B.m);
  cplx s1 = 0;
  double s2 = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    SymbolicOrbit o(sys.base(), derive_seed(seed, i));
    o.ensure(n + mm + 1);
    Rng rng(derive_seed(seed, i + (std::uint64_t{1} << 40)));
    const TorusPoint t0 = random_torus_point(sys.d(), sys.bits(), rng);
    std::uint64_t S = 0;
    for (std::size_t k = 0; k < n; ++k) S += sys.in_I(o.data()[k]) ? 1 : 0;
    const TorusPoint tn = t0 + sys.alpha_fixed().times(S);
    const cplx v = A(o.data(), t0) * B(o.data() + n, tn);
    s1 += v;
    s2 += std::norm(v);
  }
  const double N = static_cast<double>(samples);
  const cplx mean = s1 / N;
  const double var = std::max(0.0, (s2 / N - std::norm(mean)) * N / (N - 1));
  return {mean, std::sqrt(var / N)};
}

/// L_u acting on functions of the first m symbols: (L_u f)[w] = sum_i p_i e^{iu[i in I]} f[i w].
inline std::vector<cplx> apply_cylinder_operator(const SkewSystem& sys, double u, unsigned m,
                                                 const std::vector<cplx>& f) {
  const unsigned p = sys.base().p();
  std::size_t pm1 = 1;
  for (unsigned i = 1; i < m; ++i) pm1 *= p;
  std::vector<cplx> w(p);
  for (unsigned i = 0; i < p; ++i) {
    w[i] = sys.base().prob(i) * (sys.in_I(static_cast<std::uint8_t>(i)) ? std::polar(1.0, u) : cplx(1.0));
  }
  std::vector<cplx> out(f.size(), 0.0);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const std::size_t tail = m >= 1 ? idx / p : 0;
    for (unsigned i = 0; i < p; ++i) out[idx] += w[i] * f[i * pm1 + tail];
  }
  return out;
}

/// Exact C_n(A, B) = sum_k int L^n_{-2 pi <k, alpha>}(a_k) b_{-k} dmu on the finite
/// cylinder space (invariant under L_u because phi depends on one symbol).
inline Estimate corr_fourier(const SkewSystem& sys, const Observable& A, const Observable& B,
                             std::size_t n) {
  require(sys.kind() == SystemKind::skew, "corr_fourier: needs a skew system");
  require(A.p == sys.base().p() && B.p == sys.base().p(), "corr_fourier: base mismatch");
  const unsigned m = std::max(A.m, B.m);
  const Observable a = A.refined(m), b = B.refined(m);
  std::vector<double> alpha;
  for (std::size_t i = 0; i < sys.d(); ++i) alpha.push_back(sys.alpha_fixed().as_double(i));
  cplx total = 0;
  for (const auto& [k, ak] : a.coeffs) {
    std::vector<std::int64_t> mk(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
    auto it = b.coeffs.find(mk);
    if (it == b.coeffs.end()) continue;
    double ka = 0;
    for (std::size_t i = 0; i < k.size(); ++i) ka += static_cast<double>(k[i]) * alpha[i];
    ka -= std::floor(ka);
    const double u = -2 * M_PI * ka;
    std::vector<cplx> f = ak;
    for (std::size_t step = 0; step < n; ++step) f = apply_cylinder_operator(sys, u, m, f);
    std::vector<cplx> prod(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * it->second[i];
    total += a.base_average(sys.base(), prod);
  }
  return {total, 0.0};
}

/// Fourier-Galerkin matrix of L_u on e_m(w) = e^{2 pi i m w}, |m| <= M, for the p-ary
/// linear map: L_u e_m = W(m) e^{2 pi i (m/p) w}, W(m) = sum_i p_i e^{iu[i in I]} e^{2 pi i m i/p},
/// and e^{2 pi i x w} = sum_n g(x - n) e_n with g(y) = (e^{2 pi i y} - 1)/(2 pi i y).
struct TransferMatrix {
  int M = 0;
  double u = 0;
  Eigen::MatrixXcd A;
  double tail_max = 0;  // largest dropped entry (O(1/M))
  double tail_l2 = 0;   // largest l2 norm of a dropped column tail

  int index(int m) const { return m + M; }
};

inline TransferMatrix transfer_matrix(const SkewSystem& sys, double u, int M) {
  if (sys.kind() != SystemKind::skew) throw UnsupportedBaseError("transfer_matrix: needs a skew system");
  require(M >= 1, "transfer_matrix: M must be >= 1");
  const unsigned p = sys.base().p();
  TransferMatrix T;
  T.M = M;
  T.u = u;
  const int n = 2 * M + 1;
  T.A = Eigen::MatrixXcd::Zero(n, n);
  auto g = [](double y) -> cplx {
    if (y == 0.0) return 1.0;
    return (std::polar(1.0, 2 * M_PI * y) - 1.0) / cplx(0.0, 2 * M_PI * y);
  };
  for (int m = -M; m <= M; ++m) {
    cplx W = 0;
    for (unsigned i = 0; i < p; ++i) {
      const cplx tw = sys.in_I(static_cast<std::uint8_t>(i)) ? std::polar(1.0, u) : cplx(1.0);
      W += sys.base().prob(i) * tw * std::polar(1.0, 2 * M_PI * m * static_cast<double>(i) / p);
    }
    const double x = static_cast<double>(m) / p;
    if (m % static_cast<int>(p) == 0) {
      T.A(T.index(m / static_cast<int>(p)), T.index(m)) = W;
      continue;
    }
    for (int r = -M; r <= M; ++r) T.A(T.index(r), T.index(m)) = W * g(x - r);
    // dropped rows |r| > M
    const double near = M + 1 - std::abs(x);
    T.tail_max = std::max(T.tail_max, std::abs(W) / (M_PI * near));
    T.tail_l2 = std::max(T.tail_l2, std::abs(W) * std::sqrt(2.0 / (M_PI * M_PI * (near - 1))));
  }
  return T;
}

struct SpectralEstimate {
  double eig_max = 0;        // largest |eigenvalue| of the matrix
  double power = 0;          // power-iteration estimate (best of restarts)
  double gelfand_upper = 0;  // min_k ||A^{2^k}||^{1/2^k}
  cplx leading = 0;          // eigenvalue of largest modulus
};

inline double operator_norm(const Eigen::MatrixXcd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(0);
}

inline SpectralEstimate spectral_estimate(const TransferMatrix& T, std::uint64_t seed = 1,
                                          int restarts = 10, int iters = 200, int squarings = 8) {
  SpectralEstimate s;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(T.A, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx ev = es.eigenvalues()(i);
    if (std::abs(ev) > s.eig_max) {
      s.eig_max = std::abs(ev);
      s.leading = ev;
    }
  }
  Rng rng(seed);
  const Eigen::Index n = T.A.rows();
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    v.normalize();
    double log_growth = 0;
    const int burn = iters / 2;
    for (int it = 0; it < iters; ++it) {
      v = T.A * v;
      const double nv = v.norm();
      if (nv == 0) {
        log_growth = -INFINITY;
        break;
      }
      if (it >= burn) log_growth += std::log(nv);
      v /= nv;
    }
    const double est = std::exp(log_growth / (iters - burn));
    s.power = std::max(s.power, est);
  }
  Eigen::MatrixXcd P = T.A;
  s.gelfand_upper = operator_norm(P);
  double k = 1;
  for (int i = 0; i < squarings; ++i) {
    P = P * P;
    k *= 2;
    s.gelfand_upper = std::min(s.gelfand_upper, std::pow(operator_norm(P), 1.0 / k));
  }
  return s;
}

struct DecayFit {
  double lower_slope = NAN, upper_slope = NAN;  // hull slopes of -log|C_n| against log n
  LineFit ls;
  std::vector<bool> below_floor;
  bool superpolynomial = false;
  bool degenerate = true;
};

/// Polynomial exponent of |C_n|. Points at or below `noise_floor` are flagged and dropped.
/// Superpolynomial: the slope over the second half is at least twice the first half's.
inline DecayFit decay_fit(const std::vector<double>& n, const std::vector<double>& C,
                          double noise_floor = 0.0) {
  require(n.size() == C.size(), "decay_fit: size mismatch");
  DecayFit f;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const bool low = std::abs(C[i]) <= noise_floor || C[i] == 0;
    f.below_floor.push_back(low);
    if (low) continue;
    x.push_back(std::log(n[i]));
    y.push_back(-std::log(std::abs(C[i])));
  }
  if (x.size() < 5) return f;
  f.ls = least_squares(x, y);
  f.degenerate = f.ls.degenerate;
  const double xm = 0.5 * (x.front() + x.back());
  f.lower_slope = detail::hull_slope(x, y, xm, true);
  f.upper_slope = detail::hull_slope(x, y, xm, false);
  const std::size_t h = x.size() / 2;
  auto first = least_squares({x.begin(), x.begin() + h + 1}, {y.begin(), y.begin() + h + 1});
  auto second = least_squares({x.begin() + h, x.end()}, {y.begin() + h, y.end()});
  f.superpolynomial = second.slope > 2 * first.slope && second.slope > 1;
  return f;
}

/// base / (p/k + q/l - 1): exponent after converting C^k x C^l decay to C^p x C^q.
inline Rational lemma_cr_exponent(long p, long q, long k, long l, const Rational& base) {
  require(k > 0 && l > 0, "lemma_cr_exponent: k and l must be positive");
  Rational den = Rational(p, k) + Rational(q, l) - 1;
  den.canonicalize();
  require(den > 0, "lemma_cr_exponent: p/k + q/l - 1 must be positive");
  Rational r = base / den;
  r.canonicalize();
  return r;
}

/// max(p, q, p + q - d) / (2 gamma).
inline Rational pro_doc_rate(long p, long q, long d, const Rational& gamma) {
  require(gamma > 0, "pro_doc_rate: gamma must be positive");
  Rational r = Rational(std::max({p, q, p + q - d})) / (2 * gamma);
  r.canonicalize();
  return r;
}

/// (2 dim M + 2) / (R0 - dim M).
inline Rational decorrangle_bound(const Rational& dimM, const Rational& R0) {
  if (R0 <= dimM) throw PreconditionError("decorrangle_bound: need R0 > dim M");
  Rational r = (2 * dimM + 2) / (R0 - dimM);
  r.canonicalize();
  return r;
}

}  // namespace skewlab
