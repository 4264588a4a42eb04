#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "skewlab/cf_core.hpp"

namespace skewlab {

/// Point of T^d in B-bit fixed point, stored as little-endian 64-bit limbs per
/// coordinate. Addition is modulo 2^B and therefore exact.
class TorusPoint {
 public:
  static constexpr std::size_t kMaxLimbs = 16;

  TorusPoint() = default;
  TorusPoint(std::size_t dim, unsigned bits) : dim_(dim), bits_(bits), limbs_(bits / 64) {
    require(bits >= 64 && bits % 64 == 0 && bits <= 64 * kMaxLimbs,
            "TorusPoint: bits must be a multiple of 64 in [64, 1024]");
    w_.assign(dim * limbs_, 0);
  }

  static TorusPoint from_integers(const std::vector<BigInt>& coords, unsigned bits) {
    TorusPoint t(coords.size(), bits);
    BigInt mod = BigInt(1) << bits;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      BigInt c = coords[i] % mod;
      if (c < 0) c += mod;
      for (std::size_t l = 0; l < t.limbs_; ++l) {
        BigInt limb = c & ((BigInt(1) << 64) - 1);
        t.w_[i * t.limbs_ + l] = mpz_get_ui(limb.get_mpz_t());
        if (sizeof(unsigned long) < 8) throw PreconditionError("64-bit unsigned long required");
        c >>= 64;
      }
    }
    return t;
  }

  static TorusPoint from_angles(const std::vector<CFAngle>& alpha, unsigned bits) {
    std::vector<BigInt> c;
    for (const auto& a : alpha) c.push_back(to_fixed_point(a, bits));
    return from_integers(c, bits);
  }

  /// Top 64 bits given directly (lower limbs zero); handy for sampled starts.
  static TorusPoint from_top(const std::vector<std::uint64_t>& top, unsigned bits) {
    TorusPoint t(top.size(), bits);
    for (std::size_t i = 0; i < top.size(); ++i) t.w_[i * t.limbs_ + t.limbs_ - 1] = top[i];
    return t;
  }

  std::size_t dim() const { return dim_; }
  unsigned bits() const { return bits_; }

  BigInt coord(std::size_t i) const {
    BigInt c = 0;
    for (std::size_t l = limbs_; l-- > 0;) {
      c <<= 64;
      c += BigInt(static_cast<unsigned long>(w_[i * limbs_ + l]));
    }
    return c;
  }

  std::uint64_t top(std::size_t i) const { return w_[i * limbs_ + limbs_ - 1]; }

  double as_double(std::size_t i) const {
    return static_cast<double>(top(i)) * 0x1.0p-64 +
           (limbs_ > 1 ? static_cast<double>(w_[i * limbs_ + limbs_ - 2]) * 0x1.0p-128 : 0.0);
  }

  TorusPoint& operator+=(const TorusPoint& o) {
    require(o.dim_ == dim_ && o.bits_ == bits_, "TorusPoint: shape mismatch");
    for (std::size_t i = 0; i < dim_; ++i) add_limbs(&w_[i * limbs_], &o.w_[i * limbs_]);
    return *this;
  }

  TorusPoint& operator-=(const TorusPoint& o) {
    require(o.dim_ == dim_ && o.bits_ == bits_, "TorusPoint: shape mismatch");
    for (std::size_t i = 0; i < dim_; ++i) sub_limbs(&w_[i * limbs_], &o.w_[i * limbs_]);
    return *this;
  }

  friend TorusPoint operator+(TorusPoint a, const TorusPoint& b) { return a += b; }
  friend TorusPoint operator-(TorusPoint a, const TorusPoint& b) { return a -= b; }
  friend bool operator==(const TorusPoint& a, const TorusPoint& b) {
    return a.dim_ == b.dim_ && a.bits_ == b.bits_ && a.w_ == b.w_;
  }

  /// k * self (mod 2^B) for k >= 0.
  TorusPoint times(std::uint64_t k) const {
    TorusPoint out(dim_, bits_);
    for (std::size_t i = 0; i < dim_; ++i) {
      unsigned __int128 carry = 0;
      for (std::size_t l = 0; l < limbs_; ++l) {
        unsigned __int128 v = static_cast<unsigned __int128>(w_[i * limbs_ + l]) * k + carry;
        out.w_[i * limbs_ + l] = static_cast<std::uint64_t>(v);
        carry = v >> 64;
      }
    }
    return out;
  }

  /// Top 64 bits of the toroidal distance of coordinate i to o's, i.e.
  /// floor(2^64 * min(|t-s| mod 1, 1 - ...)), rounded down.
  std::uint64_t dist_top(const TorusPoint& o, std::size_t i) const {
    std::array<std::uint64_t, kMaxLimbs> d{};
    std::copy(w_.begin() + i * limbs_, w_.begin() + (i + 1) * limbs_, d.begin());
    sub_limbs(d.data(), &o.w_[i * limbs_]);
    if (d[limbs_ - 1] >> 63) {
      // negate: min(diff, 2^B - diff)
      std::array<std::uint64_t, kMaxLimbs> z{};
      sub_limbs(z.data(), d.data());
      return z[limbs_ - 1];
    }
    return d[limbs_ - 1];
  }

  /// Max over coordinates of dist_top.
  std::uint64_t sup_dist_top(const TorusPoint& o) const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < dim_; ++i) m = std::max(m, dist_top(o, i));
    return m;
  }

  /// Strict test ||t - s||_inf < threshold / 2^64, where threshold is the
  /// 64-bit radius encoding from radius_threshold(). Exact for dyadic radii.
  bool within(const TorusPoint& o, std::uint64_t threshold) const {
    for (std::size_t i = 0; i < dim_; ++i) {
      if (dist_top(o, i) >= threshold) return false;
    }
    return true;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (i) s += ' ';
      s += fixed_to_string(coord(i), bits_);
    }
    return s;
  }

 private:
  void add_limbs(std::uint64_t* a, const std::uint64_t* b) const {
    unsigned carry = 0;
    for (std::size_t l = 0; l < limbs_; ++l) {
      unsigned __int128 v = static_cast<unsigned __int128>(a[l]) + b[l] + carry;
      a[l] = static_cast<std::uint64_t>(v);
      carry = static_cast<unsigned>(v >> 64);
    }
  }
  void sub_limbs(std::uint64_t* a, const std::uint64_t* b) const {
    std::uint64_t borrow = 0;
    for (std::size_t l = 0; l < limbs_; ++l) {
      const std::uint64_t x = a[l], y = b[l];
      const std::uint64_t r = x - y - borrow;
      borrow = (x < y) || (x == y && borrow) ? 1 : 0;
      a[l] = r;
    }
  }

  std::size_t dim_ = 0;
  unsigned bits_ = 256;
  std::size_t limbs_ = 4;
  std::vector<std::uint64_t> w_;
};

/// Encodes a radius r in (0, 1/2] as floor(r * 2^64). dist_top < threshold is
/// then equivalent to dist < r whenever r is a dyadic 2^-j with j >= 1; for other
/// radii the test is exact up to 2^-64.
inline std::uint64_t radius_threshold(double r) {
  require(r > 0.0, "radius must be positive");
  if (r >= 0.5) return ~std::uint64_t{0};
  return static_cast<std::uint64_t>(std::ldexp(r, 64));
}

inline std::uint64_t radius_threshold_dyadic(unsigned j) {
  require(j >= 1 && j < 64, "dyadic exponent must be in [1, 63]");
  return std::uint64_t{1} << (64 - j);
}

}  // namespace skewlab
