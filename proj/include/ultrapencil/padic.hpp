#pragma once

// Exact p-adic scalars and the extended ultrametric norm lattice.
//
// Scalars are exact rationals read in Q_p. Every absolute value over Q_p is
// either 0 or an integer power of p, so norms are carried symbolically as an
// exponent and all comparisons are decided with integer arithmetic.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

#include "ultrapencil/error.hpp"

namespace ultrapencil {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// The base field Q_p. Construction rejects non-primes.
class PrimeContext {
 public:
  explicit PrimeContext(std::int64_t p);

  std::int64_t prime() const noexcept { return p_; }

  /// p^k as an exact rational; k may be negative.
  Rational power(std::int64_t k) const;

  friend bool operator==(const PrimeContext&, const PrimeContext&) = default;

 private:
  std::int64_t p_;
};

bool is_prime(std::int64_t n) noexcept;

/// v_p(x); std::nullopt stands for +infinity (x == 0).
using Valuation = std::optional<std::int64_t>;

Valuation valuation(const Rational& x, const PrimeContext& ctx);

/// Number of times p divides a nonzero integer.
std::int64_t valuation(const Integer& n, const PrimeContext& ctx);

/// Value of an ultrametric norm: 0, p^(-v) for an integer v, or infinity.
///
/// Ordered as reals: zero() < ppow(v) < infinity(), and ppow(v1) < ppow(v2)
/// exactly when v1 > v2.
class UltraNorm {
 public:
  enum class Kind : std::uint8_t { zero, ppow, infinity };

  constexpr UltraNorm() noexcept = default;

  static constexpr UltraNorm zero() noexcept { return UltraNorm(Kind::zero, 0); }
  static constexpr UltraNorm ppow(std::int64_t v) noexcept { return UltraNorm(Kind::ppow, v); }
  static constexpr UltraNorm one() noexcept { return ppow(0); }
  static constexpr UltraNorm infinity() noexcept { return UltraNorm(Kind::infinity, 0); }

  constexpr Kind kind() const noexcept { return kind_; }
  constexpr bool is_zero() const noexcept { return kind_ == Kind::zero; }
  constexpr bool is_infinite() const noexcept { return kind_ == Kind::infinity; }
  constexpr bool is_finite_nonzero() const noexcept { return kind_ == Kind::ppow; }

  /// v in p^(-v). Only meaningful for ppow values.
  constexpr std::int64_t exponent() const noexcept { return v_; }

  /// Real value as an exact rational; std::nullopt for infinity.
  std::optional<Rational> to_rational(const PrimeContext& ctx) const;

  /// 1/x with 1/0 = infinity and 1/infinity = 0.
  constexpr UltraNorm reciprocal() const noexcept {
    switch (kind_) {
      case Kind::zero: return infinity();
      case Kind::infinity: return zero();
      case Kind::ppow: break;
    }
    return ppow(-v_);
  }

  friend constexpr bool operator==(const UltraNorm& a, const UltraNorm& b) noexcept {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::ppow || a.v_ == b.v_);
  }

  friend constexpr std::strong_ordering operator<=>(const UltraNorm& a, const UltraNorm& b) noexcept {
    if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
    if (a.kind_ != Kind::ppow) return std::strong_ordering::equal;
    return b.v_ <=> a.v_;
  }

  /// Zero absorbs everything; infinity absorbs every nonzero value.
  friend constexpr UltraNorm operator*(const UltraNorm& a, const UltraNorm& b) noexcept {
    if (a.is_zero() || b.is_zero()) return zero();
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return ppow(a.v_ + b.v_);
  }

  std::string to_string() const;

 private:
  constexpr UltraNorm(Kind k, std::int64_t v) noexcept : kind_(k), v_(v) {}

  Kind kind_ = Kind::zero;
  std::int64_t v_ = 0;
};

/// |x|_p.
UltraNorm abs(const Rational& x, const PrimeContext& ctx);

/// Exact comparison of a norm value against a positive rational.
std::strong_ordering compare(const UltraNorm& n, const Rational& q, const PrimeContext& ctx);

inline bool exceeds(const UltraNorm& n, const Rational& q, const PrimeContext& ctx) {
  return compare(n, q, ctx) == std::strong_ordering::greater;
}

/// Smallest integer t with p^t > q, for q > 0.
std::int64_t smallest_power_exceeding(const Rational& q, const PrimeContext& ctx);

/// A strictly positive exact rational tolerance.
class Epsilon {
 public:
  explicit Epsilon(Rational value);

  const Rational& value() const noexcept { return value_; }
  Rational reciprocal() const { return 1 / value_; }

  friend bool operator==(const Epsilon&, const Epsilon&) = default;

 private:
  Rational value_;
};

/// x / y, raising Errc::division_by_zero when y == 0.
Rational divide(const Rational& x, const Rational& y);

/// "num/den" in lowest terms, den always printed.
std::string to_string(const Rational& x);

/// Accepts "num/den", "num" or a signed decimal integer with optional spaces.
Rational parse_rational(std::string_view text);

}  // namespace ultrapencil
