#pragma once

// 128-bit fixed-point evaluation of integer linear forms in angles, with a
// certified error: each angle is stored as A = round(alpha * 2^128) with
// |alpha - A/2^128| < 2^-128, so sum k_i A_i is within sum |k_i| ulps of the
// true value.

#include <cstdint>
#include <vector>

#include "skewlab/cf_core.hpp"

namespace skewlab {

using u128 = unsigned __int128;

inline u128 angle_fixed128(const CFAngle& a) {
  BigInt v = to_fixed_point(a, 128);
  BigInt mod = BigInt(1) << 128;
  v %= mod;
  BigInt hi = v >> 64;
  BigInt lo = v - (hi << 64);
  return (static_cast<u128>(mpz_get_ui(hi.get_mpz_t())) << 64) | mpz_get_ui(lo.get_mpz_t());
}

/// Distance to the nearest integer of x / 2^128, in ulps.
inline u128 dist128(u128 x) {
  const u128 neg = static_cast<u128>(0) - x;
  return x < neg ? x : neg;
}

inline double u128_to_unit(u128 x) { return static_cast<double>(x) * 0x1.0p-128; }

inline BigInt u128_to_big(u128 x) {
  BigInt hi(static_cast<unsigned long>(static_cast<std::uint64_t>(x >> 64)));
  BigInt lo(static_cast<unsigned long>(static_cast<std::uint64_t>(x)));
  return (hi << 64) + lo;
}

/// Certified enclosure [lo, hi] (in ulps of 2^-128) of ||sum k_i alpha_i||.
struct FormEnclosure {
  u128 lo;
  u128 hi;
};

inline FormEnclosure form_enclosure(const std::vector<u128>& fixed, const std::vector<std::int64_t>& k) {
  u128 acc = 0;
  u128 err = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const std::int64_t c = k[i];
    const u128 mag = static_cast<u128>(c < 0 ? -c : c);
    const u128 term = fixed[i] * mag;
    acc = c < 0 ? acc - term : acc + term;
    err += mag;
  }
  const u128 d = dist128(acc);
  const u128 half = static_cast<u128>(1) << 127;
  return {d > err ? d - err : 0, (half - d) > err ? d + err : half};
}

}  // namespace skewlab
