#ifndef SPINTAIL_CORE_HPP
#define SPINTAIL_CORE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace spintail {

using BigInt = boost::multiprecision::cpp_int;

/// Input violates a documented contract (bad geometry, non-PSD term, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A brute-force enumeration would exceed its feasibility guard.
class EnumerationLimitError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A proven inequality failed empirically. Always a defect, never data.
class TheoremViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two independent computation routes disagree beyond tolerance.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n^r as uint64, throwing EnumerationLimitError above `limit`.
inline std::uint64_t checked_pow(std::uint64_t n, int r, std::uint64_t limit) {
  std::uint64_t out = 1;
  for (int i = 0; i < r; ++i) {
    if (n != 0 && out > limit / n) {
      throw EnumerationLimitError("enumeration space " + std::to_string(n) + "^" +
                                  std::to_string(r) + " exceeds guard " +
                                  std::to_string(limit) +
                                  "; use the closed-form bound instead");
    }
    out *= n;
  }
  return out;
}

inline BigInt big_pow(BigInt base, int exp) {
  BigInt out = 1;
  while (exp > 0) {
    if (exp & 1) out *= base;
    base *= base;
    exp >>= 1;
  }
  return out;
}

/// Deterministic random source. All derived draws are pinned algorithms on
/// top of std::mt19937_64 so outputs are reproducible across platforms
/// (std::*_distribution would not be).
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw ValidationError("next_below(0)");
    const std::uint64_t bound = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= bound);
    return x % n;
  }

  /// Standard normal via polar Box-Muller (one spare cached).
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spintail

#endif  // SPINTAIL_CORE_HPP
