#include <doctest.h>

#include "support.hpp"
#include "ultrapencil/linalg.hpp"

using namespace ultrapencil;

namespace {

UMatrix mat(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  UMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (auto x : r) m(i, j++) = Rational(x);
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("vector norms") {
  const PrimeContext p5(5);
  UVector v(2);
  v << Rational(1), Rational(5);
  CHECK(vec_norm(v, p5) == UltraNorm::one());
  v << Rational(0), Rational(0);
  CHECK(vec_norm(v, p5) == UltraNorm::zero());
  v << Rational(1) / 5, Rational(25);
  CHECK(vec_norm(v, p5) == UltraNorm::ppow(-1));
}

TEST_CASE("operator norms") {
  const PrimeContext p5(5);
  CHECK(op_norm(mat({{5, 1}, {25, 125}}), p5) == UltraNorm::one());
  CHECK(op_norm(diagonal({Rational(1), Rational(2)}), p5) == UltraNorm::one());
  CHECK(op_norm(UMatrix::Zero(2, 2).eval(), p5) == UltraNorm::zero());
}

TEST_CASE("products and sums") {
  const UMatrix m = mat({{1, 2}, {3, 4}});
  CHECK(mat_mul(identity(2), m) == m);
  const UVector y = mat_vec(diagonal({Rational(1), Rational(2)}), coordinate_vector(2, 1));
  CHECK(y(0) == 0);
  CHECK(y(1) == 2);
  CHECK(is_zero(mat_add(m, scalar_mul(Rational(-1), m))));
  CHECK_THROWS_AS(mat_mul(m, UMatrix(3, 3)), Error);
  CHECK_THROWS_AS(mat_add(m, UMatrix(3, 3)), Error);
}

TEST_CASE("determinants") {
  const PrimeContext p5(5);
  CHECK(det(identity(3), p5) == 1);
  CHECK(det(mat({{1, 2}, {3, 4}}), p5) == -2);
  // diag(a − λc, b − λd) at λ = a/c.
  CHECK(det(diagonal({Rational(0), Rational(1)}), p5) == 0);
  CHECK_THROWS_AS(det(UMatrix(2, 3), p5), Error);
}

TEST_CASE("inverses") {
  const PrimeContext p5(5);
  const auto inv = inverse(diagonal({Rational(1), Rational(5)}), p5);
  REQUIRE(inv);
  CHECK(*inv == diagonal({Rational(1), Rational(1) / 5}));
  CHECK_FALSE(inverse(diagonal({Rational(0), Rational(1)}), p5));
  const UMatrix swap = mat({{0, 1}, {1, 0}});
  CHECK(*inverse(swap, p5) == swap);
}

TEST_CASE("rank") {
  const PrimeContext p3(3);
  CHECK(rank(mat({{1, 2}, {2, 4}}), p3) == 1);
  CHECK(rank(mat({{1, 0, 0}, {0, 1, 0}}), p3) == 2);
  CHECK(rank(UMatrix::Zero(2, 2).eval(), p3) == 0);
}

TEST_CASE("functional evaluation and norm") {
  const PrimeContext p5(5);
  Functional f{coordinate_vector(3, 1) * Rational(25)};
  UVector y(3);
  y << Rational(1), Rational(2), Rational(3);
  CHECK(f(y) == 50);
  CHECK(f.norm(p5) == UltraNorm::ppow(2));
}

TEST_CASE("linear algebra against oracle") {
  oracle::Rng rng(0xa11ce);
  for (std::int64_t p : {2, 3, 5}) {
    const PrimeContext ctx(p);
    for (std::size_t n = 1; n <= 4; ++n) {
      for (int t = 0; t < 40; ++t) {
        const oracle::Mat m = rng.matrix(p, n, 3);
        const oracle::Mat k = rng.matrix(p, n, 3);
        const UMatrix um = support::to_umatrix(m);
        const UMatrix uk = support::to_umatrix(k);
        CAPTURE(p);
        CAPTURE(n);
        const Rational d = oracle::det(m);
        CHECK(det(um, ctx) == d);
        const auto inv = inverse(um, ctx);
        CHECK(inv.has_value() == (d != 0));
        if (inv) {
          CHECK(support::to_mat(*inv) == *oracle::inverse(m));
          CHECK(mat_mul(um, *inv) == identity(static_cast<Index>(n)));
          CHECK(rank(um, ctx) == static_cast<Index>(n));
        } else {
          CHECK(rank(um, ctx) < static_cast<Index>(n));
        }
        const UltraNorm nm = op_norm(um, ctx);
        if (!nm.is_zero()) CHECK(support::value(nm, ctx) == oracle::max_norm(m, p));
        CHECK(op_norm(mat_mul(um, uk), ctx) <= nm * op_norm(uk, ctx));
        // The sup-norm operator norm is attained on some coordinate vector.
        UltraNorm best = UltraNorm::zero();
        for (Index j = 0; j < um.cols(); ++j) {
          best = std::max(best, vec_norm(mat_vec(um, coordinate_vector(um.cols(), j)), ctx));
        }
        CHECK(best == nm);
      }
    }
  }
}
