#include "ultrapencil/padic.hpp"

#include <cctype>
#include <cmath>

namespace ultrapencil {

bool is_prime(std::int64_t n) noexcept {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

PrimeContext::PrimeContext(std::int64_t p) : p_(p) {
  if (!is_prime(p)) throw Error(Errc::not_prime, std::to_string(p) + " is not a prime");
}

Rational PrimeContext::power(std::int64_t k) const {
  Integer base(p_);
  Integer mag = boost::multiprecision::pow(base, static_cast<unsigned>(k < 0 ? -k : k));
  if (k >= 0) return Rational(mag);
  return Rational(Integer(1), mag);
}

std::int64_t valuation(const Integer& n, const PrimeContext& ctx) {
  if (n == 0) throw Error(Errc::division_by_zero, "valuation of integer zero");
  mpz_t rest;
  mpz_t prime;
  mpz_init(rest);
  mpz_init_set_si(prime, ctx.prime());
  auto count = mpz_remove(rest, n.backend().data(), prime);
  mpz_clear(rest);
  mpz_clear(prime);
  return static_cast<std::int64_t>(count);
}

Valuation valuation(const Rational& x, const PrimeContext& ctx) {
  if (x == 0) return std::nullopt;
  return valuation(Integer(numerator(x)), ctx) - valuation(Integer(denominator(x)), ctx);
}

std::optional<Rational> UltraNorm::to_rational(const PrimeContext& ctx) const {
  switch (kind_) {
    case Kind::zero: return Rational(0);
    case Kind::infinity: return std::nullopt;
    case Kind::ppow: break;
  }
  return ctx.power(-v_);
}

std::string UltraNorm::to_string() const {
  switch (kind_) {
    case Kind::zero: return "0";
    case Kind::infinity: return "inf";
    case Kind::ppow: break;
  }
  return "p^" + std::to_string(-v_);
}

UltraNorm abs(const Rational& x, const PrimeContext& ctx) {
  auto v = valuation(x, ctx);
  return v ? UltraNorm::ppow(*v) : UltraNorm::zero();
}

std::strong_ordering compare(const UltraNorm& n, const Rational& q, const PrimeContext& ctx) {
  if (q <= 0) throw Error(Errc::invalid_epsilon, "comparison threshold must be positive");
  if (n.is_zero()) return std::strong_ordering::less;
  if (n.is_infinite()) return std::strong_ordering::greater;
  const Integer a(numerator(q));
  const Integer b(denominator(q));
  const std::int64_t v = n.exponent();
  const Integer scale = boost::multiprecision::pow(Integer(ctx.prime()),
                                                   static_cast<unsigned>(v < 0 ? -v : v));
  // p^(-v) against a/b, cross-multiplied.
  const Integer lhs = v <= 0 ? scale * b : b;
  const Integer rhs = v <= 0 ? a : a * scale;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::int64_t smallest_power_exceeding(const Rational& q, const PrimeContext& ctx) {
  if (q <= 0) throw Error(Errc::invalid_epsilon, "threshold must be positive");
  const auto bits = static_cast<double>(msb(Integer(numerator(q)))) -
                    static_cast<double>(msb(Integer(denominator(q))));
  auto t = static_cast<std::int64_t>(std::floor(bits / std::log2(static_cast<double>(ctx.prime()))));
  // p^t > q  <=>  |p^(-t)| = ppow(-t) exceeds q.
  auto above = [&](std::int64_t s) { return exceeds(UltraNorm::ppow(-s), q, ctx); };
  while (above(t - 1)) --t;
  while (!above(t)) ++t;
  return t;
}

Epsilon::Epsilon(Rational value) : value_(std::move(value)) {
  if (value_ <= 0) throw Error(Errc::invalid_epsilon, "epsilon must be positive, got " + ultrapencil::to_string(value_));
}

Rational divide(const Rational& x, const Rational& y) {
  if (y == 0) throw Error(Errc::division_by_zero, "division of " + to_string(x) + " by zero");
  return x / y;
}

std::string to_string(const Rational& x) {
  return Integer(numerator(x)).str() + "/" + Integer(denominator(x)).str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Integer parse_integer(std::string_view s, bool allow_sign, std::string_view whole) {
  s = trim(s);
  std::size_t start = 0;
  if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) start = 1;
  if (start == s.size()) throw Error(Errc::parse_error, "malformed rational '" + std::string(whole) + "'");
  for (std::size_t i = start; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      throw Error(Errc::parse_error, "malformed rational '" + std::string(whole) + "'");
    }
  }
  std::string digits(s.substr(s[0] == '+' ? 1 : 0));
  return Integer(digits);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto s = trim(text);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(s, true, text));
  const Integer num = parse_integer(s.substr(0, slash), true, text);
  const Integer den = parse_integer(s.substr(slash + 1), false, text);
  if (den == 0) throw Error(Errc::parse_error, "zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

}  // namespace ultrapencil
