#include <doctest.h>

#include "oracle.hpp"
#include "ultrapencil/padic.hpp"

using namespace ultrapencil;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n) / d; }

}  // namespace

TEST_CASE("valuation of worked values") {
  const PrimeContext p5(5);
  CHECK(valuation(q(50), p5) == 2);
  CHECK_FALSE(valuation(q(0), p5).has_value());
  CHECK(valuation(q(3, 25), p5) == -2);
  CHECK(valuation(Integer(250), p5) == 3);
}

TEST_CASE("absolute value of worked values") {
  const PrimeContext p5(5);
  CHECK(abs(q(50), p5) == UltraNorm::ppow(2));
  CHECK(abs(q(1), p5) == UltraNorm::one());
  CHECK(abs(q(1, 5), p5) == UltraNorm::ppow(-1));
  CHECK(abs(q(0), p5) == UltraNorm::zero());
  CHECK(*UltraNorm::ppow(-1).to_rational(p5) == 5);
  CHECK_FALSE(UltraNorm::infinity().to_rational(p5).has_value());
}

TEST_CASE("field arithmetic") {
  CHECK(q(1, 5) + q(2, 5) == q(3, 5));
  CHECK(q(5) * q(1, 5) == 1);
  CHECK(divide(q(3), q(6)) == q(1, 2));
  try {
    divide(q(1), q(0));
    FAIL("expected division_by_zero");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::division_by_zero);
  }
}

TEST_CASE("norm against rational comparison") {
  const PrimeContext p5(5);
  CHECK(compare(UltraNorm::ppow(-1), q(3), p5) == std::strong_ordering::greater);
  CHECK(compare(UltraNorm::zero(), q(1, 100), p5) == std::strong_ordering::less);
  CHECK(compare(UltraNorm::ppow(2), q(1, 25), p5) == std::strong_ordering::equal);
  CHECK(compare(UltraNorm::infinity(), q(1000000), p5) == std::strong_ordering::greater);
  CHECK(exceeds(UltraNorm::ppow(-1), q(2), p5));
  CHECK_FALSE(exceeds(UltraNorm::ppow(-1), q(5), p5));
}

TEST_CASE("norm lattice order and products") {
  CHECK(UltraNorm::zero() < UltraNorm::ppow(100));
  CHECK(UltraNorm::ppow(1) < UltraNorm::ppow(0));
  CHECK(UltraNorm::ppow(-50) < UltraNorm::infinity());
  CHECK(UltraNorm::ppow(2) * UltraNorm::ppow(-3) == UltraNorm::ppow(-1));
  CHECK(UltraNorm::zero() * UltraNorm::infinity() == UltraNorm::zero());
  CHECK(UltraNorm::ppow(4) * UltraNorm::infinity() == UltraNorm::infinity());
  CHECK(UltraNorm::zero().reciprocal() == UltraNorm::infinity());
  CHECK(UltraNorm::ppow(3).reciprocal() == UltraNorm::ppow(-3));
}

TEST_CASE("smallest power exceeding") {
  const PrimeContext p5(5);
  CHECK(smallest_power_exceeding(q(1), p5) == 1);
  CHECK(smallest_power_exceeding(q(2), p5) == 1);
  CHECK(smallest_power_exceeding(q(1, 5), p5) == 0);
  CHECK(smallest_power_exceeding(q(1, 6), p5) == -1);
  CHECK(smallest_power_exceeding(q(25), p5) == 3);
}

TEST_CASE("primality and context") {
  CHECK(is_prime(2));
  CHECK(is_prime(97));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(91));
  CHECK_THROWS_AS(PrimeContext(4), Error);
  CHECK(PrimeContext(3).power(-2) == q(1, 9));
}

TEST_CASE("epsilon must be positive") {
  CHECK_THROWS_AS(Epsilon(q(0)), Error);
  CHECK_THROWS_AS(Epsilon(q(-1, 2)), Error);
  CHECK(Epsilon(q(1, 4)).reciprocal() == 4);
}

TEST_CASE("rational text round trip") {
  CHECK(to_string(q(3)) == "3/1");
  CHECK(to_string(q(-6, 4)) == "-3/2");
  CHECK(parse_rational("-3/2") == q(-3, 2));
  CHECK(parse_rational(" 7 ") == 7);
  CHECK(parse_rational("10/4") == q(5, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
}

TEST_CASE("norm properties against oracle") {
  oracle::Rng rng(0x5eed);
  for (std::int64_t p : {2, 3, 5, 7}) {
    const PrimeContext ctx(p);
    for (int t = 0; t < 300; ++t) {
      const Rational x = rng.scalar(p, -4, 4, 5);
      const Rational y = rng.scalar(p, -4, 4, 5);
      CAPTURE(p);
      CAPTURE(to_string(x));
      CAPTURE(to_string(y));
      CHECK(valuation(x, ctx) == oracle::valuation(x, p));
      if (x != 0) CHECK(*abs(x, ctx).to_rational(ctx) == oracle::norm(x, p));
      CHECK(abs(x * y, ctx) == abs(x, ctx) * abs(y, ctx));
      CHECK(abs(x + y, ctx) <= std::max(abs(x, ctx), abs(y, ctx)));
      if (abs(x, ctx) != abs(y, ctx)) CHECK(abs(x + y, ctx) == std::max(abs(x, ctx), abs(y, ctx)));
      if (y != 0) {
        const Rational bound = oracle::norm(y, p);
        const Rational nx = oracle::norm(x, p);
        const auto expected = nx < bound   ? std::strong_ordering::less
                              : nx > bound ? std::strong_ordering::greater
                                           : std::strong_ordering::equal;
        CHECK(compare(abs(x, ctx), bound, ctx) == expected);
      }
      CHECK(parse_rational(to_string(x)) == x);
    }
  }
}
