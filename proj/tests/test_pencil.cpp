#include <doctest.h>

#include "support.hpp"
#include "ultrapencil/pencil.hpp"

using namespace ultrapencil;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n) / d; }

UMatrix diag(std::initializer_list<std::int64_t> xs) {
  std::vector<Rational> v;
  for (auto x : xs) v.emplace_back(x);
  return diagonal(v);
}

// diag(1,2) against I over Q_5.
Pencil worked() { return Pencil(diag({1, 2}), identity(2), PrimeContext(5)); }

template <typename F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ultrapencil::Error");
  return Errc::parse_error;
}

}  // namespace

TEST_CASE("pencil construction checks shapes") {
  CHECK(error_of([] { Pencil(identity(2), identity(3), PrimeContext(5)); }) == Errc::dimension_mismatch);
  CHECK(error_of([] { Pencil(UMatrix(2, 3), UMatrix(2, 3), PrimeContext(5)); }) == Errc::dimension_mismatch);
}

TEST_CASE("pencil evaluation") {
  CHECK(eval_pencil(worked(), q(0)) == diag({1, 2}));
  CHECK(eval_pencil(worked(), q(1)) == diag({0, 1}));
  const Pencil same(diag({3, 4}), diag({3, 4}), PrimeContext(5));
  CHECK(is_zero(eval_pencil(same, q(1))));
}

TEST_CASE("spectrum membership") {
  CHECK(in_spectrum(worked(), q(1)));
  CHECK(in_spectrum(worked(), q(2)));
  CHECK_FALSE(in_spectrum(worked(), q(0)));
  const Pencil no_b(identity(2), UMatrix::Zero(2, 2), PrimeContext(3));
  for (std::int64_t l : {-3, 0, 1, 7}) CHECK_FALSE(in_spectrum(no_b, q(l)));
}

TEST_CASE("condition number of the worked pencil") {
  CHECK(kappa(worked(), q(0)).value == UltraNorm::one());
  CHECK(kappa(worked(), q(1)).is_infinite());
  CHECK_FALSE(kappa(worked(), q(1)).degenerate);
  CHECK(kappa(worked(), q(6)).value == UltraNorm::ppow(-1));
  const Pencil same(diag({3, 4}), diag({3, 4}), PrimeContext(5));
  const Kappa k = kappa(same, q(1));
  CHECK(k.is_infinite());
  CHECK(k.degenerate);
}

TEST_CASE("condition pseudospectrum membership") {
  CHECK(in_cond_pseudospectrum(worked(), q(6), Epsilon(q(1, 2))));
  CHECK_FALSE(in_cond_pseudospectrum(worked(), q(6), Epsilon(q(1, 10))));
  CHECK(in_cond_pseudospectrum(worked(), q(1), Epsilon(q(1, 1000000))));
}

TEST_CASE("pseudospectrum membership") {
  CHECK(in_pseudospectrum(worked(), q(6), Epsilon(q(1, 2))));
  CHECK(in_pseudospectrum(worked(), q(0), Epsilon(q(2))));
  CHECK_FALSE(in_pseudospectrum(worked(), q(0), Epsilon(q(1, 10))));
}

TEST_CASE("tolerance translation") {
  CHECK(translate_eps(worked(), q(0), Epsilon(q(1, 2)), EpsDirection::cond_to_pseudo).value() == q(1, 2));
  const Pencil scaled(diag({5, 10}), identity(2), PrimeContext(5));
  CHECK(translate_eps(scaled, q(0), Epsilon(q(1, 2)), EpsDirection::cond_to_pseudo).value() == q(1, 10));
  CHECK(translate_eps(scaled, q(0), Epsilon(q(1, 10)), EpsDirection::pseudo_to_cond).value() == q(1, 2));
  const Pencil same(diag({3, 4}), diag({3, 4}), PrimeContext(5));
  CHECK(error_of([&] { translate_eps(same, q(1), Epsilon(q(1)), EpsDirection::cond_to_pseudo); }) ==
        Errc::zero_pencil_at_lambda);
}

TEST_CASE("witness") {
  const auto x = find_witness(worked(), q(6), Epsilon(q(1)));
  REQUIRE(x);
  CHECK((*x)(0) == -1);
  CHECK((*x)(1) == 0);
  const PrimeContext p5(5);
  CHECK(vec_norm(mat_vec(eval_pencil(worked(), q(6)), *x), p5) < UltraNorm::one());
  CHECK_FALSE(find_witness(worked(), q(0), Epsilon(q(1, 2))));
  CHECK(error_of([] { find_witness(worked(), q(1), Epsilon(q(1))); }) == Errc::spectral_point);
}

TEST_CASE("rank-one destabilizer") {
  const PrimeContext p5(5);
  const RankOnePerturbation c = rank_one_destabilizer(worked(), q(6), Epsilon(q(1)));
  CHECK(c.matrix() == diag({5, 0}));
  CHECK(c.norm(p5) == UltraNorm::ppow(1));
  CHECK(det(mat_add(eval_pencil(worked(), q(6)), c.matrix()), p5) == 0);

  CHECK(is_zero(rank_one_destabilizer(worked(), q(2), Epsilon(q(1, 7))).matrix()));
  CHECK(error_of([] { rank_one_destabilizer(worked(), q(0), Epsilon(q(1, 2))); }) ==
        Errc::not_in_cond_pseudospectrum);
}

TEST_CASE("union characterization report") {
  CHECK(passed(union_characterization_check(worked(), q(6), Epsilon(q(1)), 50, 7)));
  CHECK(passed(union_characterization_check(worked(), q(0), Epsilon(q(1, 2)), 50, 7)));
  CHECK(passed(union_characterization_check(worked(), q(1), Epsilon(q(1, 2)), 10, 7)));
}

TEST_CASE("affine transport") {
  const Pencil p = worked();
  const Pencil same = affine(p, q(0), q(1));
  CHECK(same.A() == p.A());
  CHECK(same.B() == p.B());
  const Pencil moved = affine(p, q(1), q(2));
  CHECK(kappa(moved, q(3)).is_infinite());
  CHECK(kappa(moved, q(1)).value == UltraNorm::one());
  CHECK(error_of([&] { affine(p, q(1), q(0)); }) == Errc::beta_zero);
}

TEST_CASE("similarity") {
  const PrimeContext p5(5);
  const Similarity id = similarity(worked(), identity(2));
  CHECK(id.conjugate.A() == worked().A());
  CHECK(id.k == UltraNorm::one());
  const Similarity scalar = similarity(worked(), scalar_mul(q(5), identity(2)));
  CHECK(scalar.conjugate.A() == worked().A());
  CHECK(scalar.k == UltraNorm::one());

  UMatrix a(2, 2);
  a << q(1), q(1), q(0), q(2);
  const Pencil upper(a, identity(2), p5);
  const Similarity s = similarity(upper, diag({1, 5}));
  UMatrix expected(2, 2);
  expected << q(1), q(5), q(0), q(2);
  CHECK(s.conjugate.A() == expected);
  CHECK(s.k == UltraNorm::ppow(-1));

  CHECK(error_of([&] { similarity(upper, diag({1, 0})); }) == Errc::singular_matrix);
  const Pencil nonscalar_b(a, diag({1, 2}), p5);
  UMatrix u(2, 2);
  u << q(1), q(1), q(0), q(1);
  CHECK(error_of([&] { similarity(nonscalar_b, u); }) == Errc::noncommuting);
}

TEST_CASE("inversion map") {
  const PrimeContext p5(5);
  const Pencil p(diag({1, 2}), diag({1, 6}), p5);
  const Report held = inversion_map_check(p, q(6), Epsilon(q(1)));
  CHECK(passed(held));
  CHECK(held.front().verdict == Verdict::pass);
  const Report idle = inversion_map_check(p, q(6), Epsilon(q(1, 100)));
  CHECK(passed(idle));
  CHECK(idle.front().verdict == Verdict::vacuous);
  CHECK(error_of([&] { inversion_map_check(p, q(0), Epsilon(q(1))); }) == Errc::lambda_zero);
  const Pencil singular_a(diag({0, 2}), identity(2), p5);
  CHECK(error_of([&] { inversion_map_check(singular_a, q(1), Epsilon(q(1))); }) == Errc::singular_matrix);
}

TEST_CASE("B-inverse reduction") {
  const PrimeContext p5(5);
  const Pencil scalar_b(diag({1, 2}), scalar_mul(q(5), identity(2)), p5);
  const Pencil reduced(diag({1, 2}) / Rational(5), identity(2), p5);
  for (std::int64_t l : {0, 3, 7, 26}) CHECK(kappa(reduced, q(l, 5)) == kappa(scalar_b, q(l, 5)));
  for (std::int64_t l : {0, 1, 3, 6, 11, 26}) {
    CHECK(passed(b_inverse_reduction_check(Pencil(diag({1, 2}), diag({1, 5}), p5), q(l), Epsilon(q(1, 5)))));
  }
  UMatrix a(2, 2);
  a << q(1), q(1), q(0), q(2);
  CHECK(error_of([&] { b_inverse_reduction_check(Pencil(a, diag({1, 2}), p5), q(1), Epsilon(q(1))); }) ==
        Errc::noncommuting);
  CHECK(error_of([&] { b_inverse_reduction_check(Pencil(a, diag({0, 2}), p5), q(1), Epsilon(q(1))); }) ==
        Errc::singular_matrix);
}

TEST_CASE("condition number against oracle") {
  oracle::Rng rng(0xbeef);
  for (std::int64_t p : {2, 3, 5}) {
    const PrimeContext ctx(p);
    for (std::size_t n = 1; n <= 3; ++n) {
      for (int t = 0; t < 30; ++t) {
        const oracle::Mat a = rng.matrix(p, n);
        const oracle::Mat b = rng.matrix(p, n);
        const Pencil pencil(support::to_umatrix(a), support::to_umatrix(b), ctx);
        for (int s = 0; s < 4; ++s) {
          const Rational lambda = rng.scalar(p, -2, 2, 4);
          CAPTURE(to_string(lambda));
          const auto expected = oracle::kappa(a, b, lambda, p);
          const Kappa k = kappa(pencil, lambda);
          CHECK(in_spectrum(pencil, lambda) == !expected.has_value());
          if (expected) {
            REQUIRE(k.value.is_finite_nonzero());
            CHECK(support::value(k.value, ctx) == *expected);
            CHECK(k.value >= UltraNorm::one());
          } else {
            CHECK(k.is_infinite());
          }
        }
      }
    }
  }
}
