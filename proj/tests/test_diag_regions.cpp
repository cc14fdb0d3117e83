#include <algorithm>

#include <doctest.h>

#include "support.hpp"
#include "ultrapencil/diag_regions.hpp"

using namespace ultrapencil;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n) / d; }

std::vector<Rational> rats(std::initializer_list<std::int64_t> xs) {
  std::vector<Rational> v;
  for (auto x : xs) v.emplace_back(x);
  return v;
}

DiagonalPencil worked() { return DiagonalPencil(rats({1, 2}), rats({1, 1}), PrimeContext(5)); }

std::vector<PBall> sorted_balls(const RegionDescription& r) {
  auto balls = r.balls;
  std::sort(balls.begin(), balls.end(), [](const PBall& x, const PBall& y) { return x.center < y.center; });
  return balls;
}

}  // namespace

TEST_CASE("diagonal spectrum") {
  CHECK(diag_spectrum(worked()) == rats({1, 2}));
  CHECK(diag_spectrum(DiagonalPencil(rats({0, 0}), rats({1, 2}), PrimeContext(5))) == rats({0}));
  CHECK(diag_spectrum(DiagonalPencil(rats({1, 2, 4}), rats({1, 2, 4}), PrimeContext(5))) == rats({1}));
}

TEST_CASE("diagonal pencil validation") {
  CHECK_THROWS_AS(DiagonalPencil(rats({1}), rats({1, 2}), PrimeContext(5)), Error);
  CHECK_THROWS_AS(DiagonalPencil::from_pencil(Pencil(identity(2) + UMatrix::Ones(2, 2), identity(2), PrimeContext(3))),
                  Error);
  const DiagonalPencil zero_b(rats({1, 2}), rats({1, 0}), PrimeContext(5));
  CHECK_THROWS_AS(cond_region(zero_b, Epsilon(q(1))), Error);
  CHECK_THROWS_AS(pseudo_region(zero_b, Epsilon(q(1))), Error);
}

TEST_CASE("closed-form condition number") {
  CHECK(diag_kappa(worked(), q(6)).value == UltraNorm::ppow(-1));
  CHECK(diag_kappa(worked(), q(1)).is_infinite());
  const DiagonalPencil flat(rats({1, 1}), rats({1, 1}), PrimeContext(5));
  for (std::int64_t l : {0, 2, 6, 26}) CHECK(diag_kappa(flat, q(l)).value == UltraNorm::one());
  CHECK(diag_resolvent_norm(worked(), q(6)) == UltraNorm::ppow(-1));
  CHECK(diag_resolvent_norm(worked(), q(1)) == UltraNorm::infinity());
}

TEST_CASE("balls") {
  const PrimeContext p5(5);
  const PBall b{q(1), 2, true};
  CHECK(b.contains(q(26), p5));
  CHECK(b.contains(q(1), p5));
  CHECK_FALSE(b.contains(q(6), p5));
  CHECK(b.radius() == UltraNorm::ppow(2));
}

TEST_CASE("exact condition region of the worked pencil") {
  const PrimeContext p5(5);
  const RegionDescription r = cond_region(worked(), Epsilon(q(1, 5)));
  CHECK_FALSE(r.complement);
  const std::vector<PBall> expected{{q(1), 2, true}, {q(2), 2, true}};
  CHECK(sorted_balls(r) == expected);
  CHECK(r.contains(q(1), p5));
  CHECK(r.contains(q(26), p5));
  CHECK_FALSE(r.contains(q(6), p5));
  CHECK_FALSE(r.contains(q(0), p5));
}

TEST_CASE("exact pseudo region of the worked pencil") {
  const RegionDescription r = pseudo_region(worked(), Epsilon(q(1, 5)));
  CHECK_FALSE(r.complement);
  const std::vector<PBall> expected{{q(1), 2, true}, {q(2), 2, true}};
  CHECK(sorted_balls(r) == expected);
}

TEST_CASE("single center regions") {
  const PrimeContext p5(5);
  const DiagonalPencil one(rats({1}), rats({1}), p5);
  for (const Rational e : {q(1, 5), q(1), q(3, 2), q(7)}) {
    const RegionDescription r = cond_region(one, Epsilon(e));
    CAPTURE(to_string(e));
    CHECK(r.contains(q(1), p5));
    for (std::int64_t l : {0, 2, 6, 26, -124}) CHECK(r.contains(q(l), p5) == (e > 1));
  }
}

TEST_CASE("centers are always members") {
  const DiagonalPencil d(rats({1, 2, 7}), rats({1, 5, 3}), PrimeContext(5));
  for (const auto& z : diag_spectrum(d)) {
    for (const Rational e : {q(1, 625), q(1), q(25)}) {
      CHECK(cond_region(d, Epsilon(e)).contains(z, d.ctx()));
      CHECK(pseudo_region(d, Epsilon(e)).contains(z, d.ctx()));
    }
  }
}

TEST_CASE("sample grids") {
  const PrimeContext p2(2);
  SampleGrid g;
  g.centers = {q(0)};
  g.v_min = 0;
  g.v_max = 0;
  g.digits = 1;
  g.per_shell = 3;
  CHECK(sample(g, p2) == rats({1}));

  const PrimeContext p5(5);
  SampleGrid shells;
  shells.centers = {q(1)};
  shells.v_min = 1;
  shells.v_max = 2;
  shells.digits = 2;
  shells.per_shell = 4;
  shells.seed = 9;
  const auto pts = sample(shells, p5);
  CHECK_FALSE(pts.empty());
  for (const auto& x : pts) {
    const UltraNorm d = abs(x - 1, p5);
    CHECK((d == UltraNorm::ppow(1) || d == UltraNorm::ppow(2)));
  }
  CHECK(sample(shells, p5) == pts);

  SampleGrid empty;
  CHECK(sample(empty, p5).empty());
}

TEST_CASE("region audit") {
  const DiagonalPencil d = worked();
  const Epsilon eps(q(1, 5));
  SampleGrid g;
  g.centers = diag_spectrum(d);
  g.centers.push_back(q(0));
  g.v_min = -2;
  g.v_max = 5;
  g.digits = 3;
  g.per_shell = 6;
  g.seed = 3;
  CHECK(passed(region_vs_predicate_audit(d, cond_region(d, eps), eps, g)));
  CHECK(passed(region_vs_predicate_audit(d, pseudo_region(d, eps), eps, g, RegionKind::pseudo)));

  RegionDescription wrong = cond_region(d, eps);
  for (auto& b : wrong.balls) b.radius_v = 1;
  const Report bad = region_vs_predicate_audit(d, wrong, eps, g);
  CHECK_FALSE(passed(bad));
  CHECK(bad.size() > 1);

  const Report idle = region_vs_predicate_audit(d, cond_region(d, eps), eps, SampleGrid{});
  REQUIRE(idle.size() == 1);
  CHECK(idle.front().verdict == Verdict::vacuous);
}

TEST_CASE("regions match the oracle condition number") {
  oracle::Rng rng(0xd1a6);
  for (std::int64_t p : {2, 3, 5}) {
    const PrimeContext ctx(p);
    for (int t = 0; t < 25; ++t) {
      const std::size_t n = static_cast<std::size_t>(rng.range(1, 4));
      std::vector<Rational> a, b;
      oracle::Mat am(n, std::vector<Rational>(n)), bm(n, std::vector<Rational>(n));
      for (std::size_t i = 0; i < n; ++i) {
        a.push_back(rng.scalar(p, -1, 2, 4));
        b.push_back(rng.scalar(p, -1, 1));
        am[i][i] = a.back();
        bm[i][i] = b.back();
      }
      const DiagonalPencil d(a, b, ctx);
      const Rational e = oracle::pow_p(p, rng.range(-2, 2)) * Rational(rng.range(1, 3), rng.range(1, 3));
      const RegionDescription cond = cond_region(d, Epsilon(e));
      const RegionDescription pseudo = pseudo_region(d, Epsilon(e));
      for (int s = 0; s < 40; ++s) {
        const Rational z = a[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(n) - 1))] /
                           b[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(n) - 1))];
        const Rational lambda = s % 4 == 0 ? rng.scalar(p, -3, 3) : z + rng.scalar(p, -2, 6);
        CAPTURE(to_string(lambda));
        CAPTURE(to_string(e));
        const auto k = oracle::kappa(am, bm, lambda, p);
        CHECK(cond.contains(lambda, ctx) == (!k || *k > 1 / e));
        const auto inv = oracle::inverse(oracle::pencil_at(am, bm, lambda));
        CHECK(pseudo.contains(lambda, ctx) == (!inv || oracle::max_norm(*inv, p) > 1 / e));
        if (k) CHECK(support::value(diag_kappa(d, lambda).value, ctx) == *k);
      }
    }
  }
}

TEST_CASE("condition regions grow with the tolerance") {
  oracle::Rng rng(0x90);
  const PrimeContext ctx(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<Rational> a, b;
    for (int i = 0; i < 3; ++i) {
      a.push_back(rng.scalar(3, -1, 2, 4));
      b.push_back(rng.scalar(3, -1, 1));
    }
    const DiagonalPencil d(a, b, ctx);
    const RegionDescription small = cond_region(d, Epsilon(q(1, 9)));
    const RegionDescription large = cond_region(d, Epsilon(q(1, 3)));
    for (int s = 0; s < 30; ++s) {
      const Rational lambda = a[0] / b[0] + rng.scalar(3, -2, 5);
      if (small.contains(lambda, ctx)) CHECK(large.contains(lambda, ctx));
    }
  }
}
