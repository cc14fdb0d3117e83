#include "ultrapencil/suite.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "ultrapencil/diag_regions.hpp"
#include "ultrapencil/io.hpp"
#include "ultrapencil/pencil.hpp"
#include "ultrapencil/seq_essential.hpp"

namespace ultrapencil {

std::size_t SuiteReport::failures() const noexcept {
  std::size_t n = 0;
  for (const auto& r : records) n += r.failures;
  return n;
}

bool SuiteReport::passed() const noexcept {
  return std::all_of(records.begin(), records.end(), [](const SuiteRecord& r) { return r.ok(); });
}

namespace {

// splitmix64 over (seed, salt): independent streams per suite.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Tally {
 public:
  Tally(std::string name, std::string anchor) {
    rec_.name = std::move(name);
    rec_.paper_anchor = std::move(anchor);
  }

  template <typename Describe>
  void check(bool ok, Describe&& describe) {
    ++rec_.instances;
    if (ok) {
      ++rec_.passes;
    } else if (rec_.failures++ == 0) {
      rec_.first_counterexample = describe();
    }
  }

  void detail(const std::string& key, std::size_t add) {
    if (rec_.details.is_null()) rec_.details = nlohmann::json::object();
    rec_.details[key] = rec_.details.value(key, std::size_t{0}) + add;
  }

  SuiteRecord take() { return std::move(rec_); }

 private:
  SuiteRecord rec_;
};

std::vector<Rational> eps_sweep(const PrimeContext& ctx) {
  return {ctx.power(-2), ctx.power(-1), Rational(1), ctx.power(1)};
}

Kappa suite_kappa(const SuiteConfig& cfg, const Pencil& p, const Rational& lambda) {
  Kappa k = kappa(p, lambda);
  if (cfg.mutation == Mutation::kappa_sign && k.value.is_finite_nonzero()) {
    k.value = UltraNorm::ppow(-k.value.exponent());
  }
  return k;
}

bool suite_member(const SuiteConfig& cfg, const Pencil& p, const Rational& lambda, const Rational& eps) {
  const Kappa k = suite_kappa(cfg, p, lambda);
  return k.is_infinite() || exceeds(k.value, 1 / eps, p.ctx());
}

json at(const Pencil& p, const Rational& lambda) { return {{"pencil", to_json(p)}, {"lambda", to_json(lambda)}}; }

json at(const Pencil& p, const Rational& lambda, const Rational& eps) {
  json j = at(p, lambda);
  j["epsilon"] = to_json(eps);
  return j;
}

json at(const TailDiagonalPencil& d, const Rational& lambda) {
  return {{"pencil", to_json(d)}, {"lambda", to_json(lambda)}};
}

Rational near(Sampler& rng, const PrimeContext& ctx, const Rational& z, std::int64_t v_lo, std::int64_t v_hi) {
  return z + ctx.power(rng.uniform(v_lo, v_hi)) * Rational(rng.unit(ctx, 2));
}

void dedupe(std::vector<Rational>& xs) {
  std::vector<Rational> out;
  for (auto& x : xs) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(std::move(x));
  }
  xs = std::move(out);
}

bool upper_triangular(const UMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = j + 1; i < m.rows(); ++i) {
      if (m(i, j) != 0) return false;
    }
  }
  return true;
}

// 0, the generalized eigenvalues of triangular pencils and points close to
// them, and a few random scalars.
std::vector<Rational> probes_for(Sampler& rng, const Pencil& p) {
  const PrimeContext& ctx = p.ctx();
  std::vector<Rational> out{Rational(0)};
  if (upper_triangular(p.A()) && upper_triangular(p.B())) {
    for (Index i = 0; i < p.dim(); ++i) {
      if (p.B()(i, i) == 0) continue;
      const Rational z = p.A()(i, i) / p.B()(i, i);
      out.push_back(z);
      out.push_back(near(rng, ctx, z, 0, 4));
    }
  }
  for (int k = 0; k < 3; ++k) out.push_back(rng.scalar(ctx, {-2, 2, 3}));
  dedupe(out);
  return out;
}

struct Instance {
  Pencil pencil;
  std::vector<Rational> probes;
};

// Rotates primes, then dimensions, then families across trials.
struct Layout {
  PrimeContext ctx;
  Index n;
  MatrixFamily family;
};

Layout layout(const SuiteConfig& cfg, std::size_t t) {
  const std::size_t np = cfg.primes.size();
  const std::size_t nd = cfg.dims.size();
  return {PrimeContext(cfg.primes[t % np]), cfg.dims[(t / np) % nd],
          static_cast<MatrixFamily>((t / (np * nd)) % 3)};
}

Instance random_instance(Sampler& rng, const SuiteConfig& cfg, std::size_t t) {
  const Layout l = layout(cfg, t);
  UMatrix a = rng.matrix(l.ctx, l.n, l.family, cfg.shape);
  UMatrix b = rng.invertible_matrix(l.ctx, l.n, l.family, cfg.shape);
  Pencil p(std::move(a), std::move(b), l.ctx);
  auto probes = probes_for(rng, p);
  return {std::move(p), std::move(probes)};
}

Rational norm_value(const UltraNorm& n, const PrimeContext& ctx) { return *n.to_rational(ctx); }

}  // namespace

SuiteRecords suite_foundations(const SuiteConfig& cfg) {
  Sampler rng(stream_seed(cfg.seed, 1));
  Tally ultra("norm-ultrametric", "|x+y| <= max(|x|,|y|)");
  Tally mult("norm-multiplicative", "|xy| = |x||y|");
  Tally submult("op-norm-submultiplicative", "||MN|| <= ||M|| ||N||");
  Tally attain("op-norm-attainment", "||M|| = sup ||Mx||/||x||, attained on some e_j");
  Tally bound("op-norm-bound", "||Mx|| <= ||M|| ||x||");
  Tally inv("exact-inverse", "M M^-1 = I");

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const Layout l = layout(cfg, t);
    const PrimeContext& ctx = l.ctx;
    const Rational x = rng.scalar_or_zero(ctx, cfg.shape, 5);
    const Rational y = rng.scalar_or_zero(ctx, cfg.shape, 5);
    const json xy = {{"p", ctx.prime()}, {"x", to_json(x)}, {"y", to_json(y)}};
    ultra.check(abs(x + y, ctx) <= std::max(abs(x, ctx), abs(y, ctx)), [&] { return xy; });
    mult.check(abs(x * y, ctx) == abs(x, ctx) * abs(y, ctx), [&] { return xy; });

    const UMatrix m = rng.matrix(ctx, l.n, MatrixFamily::dense, cfg.shape);
    const UMatrix n = rng.matrix(ctx, l.n, MatrixFamily::dense, cfg.shape);
    submult.check(op_norm(m * n, ctx) <= op_norm(m, ctx) * op_norm(n, ctx),
                  [&] { return json{{"M", matrix_to_json(m, ctx)}, {"N", matrix_to_json(n, ctx)}}; });

    if (!is_zero(m)) {
      bool found = false;
      for (Index j = 0; j < m.cols(); ++j) found = found || vec_norm(m.col(j), ctx) == op_norm(m, ctx);
      attain.check(found, [&] { return matrix_to_json(m, ctx); });
    }

    UVector v(l.n);
    for (Index i = 0; i < l.n; ++i) v(i) = rng.scalar_or_zero(ctx, cfg.shape, 4);
    bound.check(vec_norm(m * v, ctx) <= op_norm(m, ctx) * vec_norm(v, ctx),
                [&] { return json{{"M", matrix_to_json(m, ctx)}, {"x", vector_to_json(v)}}; });

    const auto mi = inverse(m, ctx);
    const bool singular = det(m, ctx) == 0;
    inv.check(singular ? !mi : (mi && *mi * m == identity(l.n) && m * *mi == identity(l.n)),
              [&] { return matrix_to_json(m, ctx); });
  }
  return {ultra.take(), mult.take(), submult.take(), attain.take(), bound.take(), inv.take()};
}

SuiteRecords suite_two_by_two(const SuiteConfig& cfg) {
  Sampler rng(stream_seed(cfg.seed, 2));
  Tally spectrum("example-2x2-spectrum", "sigma(A,B) = {a/c, b/d}");
  Tally ratio("example-2x2-ratio-formula",
              "Lambda_eps(A,B) = {a/c,b/d} u {|a-lc|/|b-ld| > 1/eps} u {|b-ld|/|a-lc| > 1/eps}");

  for (const auto prime : cfg.primes) {
    const PrimeContext ctx(prime);
    for (int inst = 0; inst < 50; ++inst) {
      Rational a, b, c, d;
      do {
        a = rng.scalar_or_zero(ctx, cfg.shape, 5);
        b = rng.scalar_or_zero(ctx, cfg.shape, 5);
        c = rng.scalar(ctx, cfg.shape);
        d = rng.scalar(ctx, cfg.shape);
      } while (a / c == b / d);
      const Pencil p(diagonal({a, b}), diagonal({c, d}), ctx);
      const std::vector<Rational> points{a / c, b / d};
      const auto is_point = [&](const Rational& l) { return l == points[0] || l == points[1]; };

      std::vector<Rational> probes = points;
      while (probes.size() < 102) {
        const Rational l = probes.size() % 2 == 0 ? rng.scalar(ctx, cfg.shape)
                                                  : near(rng, ctx, points[probes.size() % 4 == 1 ? 0 : 1], 0, 5);
        if (!is_point(l)) probes.push_back(l);
      }

      for (const auto& l : probes) {
        spectrum.check(in_spectrum(p, l) == is_point(l), [&] { return at(p, l); });
        for (const auto& e : eps_sweep(ctx)) {
          bool formula = true;
          if (!is_point(l)) {
            const Rational ra = norm_value(abs(a - l * c, ctx), ctx);
            const Rational rb = norm_value(abs(b - l * d, ctx), ctx);
            formula = ra / rb > 1 / e || rb / ra > 1 / e;
          }
          ratio.check(formula == suite_member(cfg, p, l, e), [&] { return at(p, l, e); });
        }
      }
    }
  }
  return {spectrum.take(), ratio.take()};
}

namespace {

struct ConstTailCase {
  std::vector<Rational> a, b;
  Rational ca, cb;
  TailDiagonalPencil pencil;
};

ConstTailCase random_const_tail(Sampler& rng, const PrimeContext& ctx, const ScalarShape& shape) {
  const auto n = static_cast<std::size_t>(rng.uniform(1, 4));
  const Rational cb = rng.scalar(ctx, shape);
  const Rational ca = rng.scalar_or_zero(ctx, shape, 4);
  std::vector<Rational> a, b;
  for (std::size_t i = 0; i < n; ++i) {
    b.push_back(rng.scalar(ctx, shape));
    // Some prefix ratios coincide with the essential point or each other.
    const auto kind = rng.uniform(0, 5);
    if (kind == 0) {
      a.push_back(ca / cb * b.back());
    } else if (kind == 1 && i > 0) {
      a.push_back(a[0] / b[0] * b.back());
    } else {
      a.push_back(rng.scalar_or_zero(ctx, shape, 6));
    }
  }
  TailDiagonalPencil d(TailDiagonalOperator(a, TailRule::constant(ca), ctx),
                       TailDiagonalOperator(b, TailRule::constant(cb), ctx));
  return {std::move(a), std::move(b), ca, cb, std::move(d)};
}

// κ from valuations of the finitely many distinct entries |a_i − λb_i|.
Kappa entrywise_kappa(const std::vector<Rational>& entries, const PrimeContext& ctx) {
  std::int64_t lo = 0, hi = 0;
  bool first = true;
  for (const auto& x : entries) {
    const auto v = valuation(x, ctx);
    if (!v) return {UltraNorm::infinity(), std::all_of(entries.begin(), entries.end(), [](const Rational& y) { return y == 0; })};
    lo = first ? *v : std::min(lo, *v);
    hi = first ? *v : std::max(hi, *v);
    first = false;
  }
  return {UltraNorm::ppow(lo - hi), false};
}

}  // namespace

SuiteRecords suite_sequence_kappa(const SuiteConfig& cfg) {
  Sampler rng(stream_seed(cfg.seed, 3));
  Tally formula("sequence-kappa-formula", "||(A-lB)^-1|| = 1/inf|a_i-lb_i|, ||A-lB|| = sup|a_i-lb_i|");
  Tally spectrum("sequence-spectrum", "sigma(A,B) = {a_i/b_i : i in N}");
  Tally truncation("sequence-truncation", "||(A-lB)^-1|| = 1/inf|a_i-lb_i|");

  for (std::size_t inst = 0; inst < 20; ++inst) {
    const PrimeContext ctx(cfg.primes[inst % cfg.primes.size()]);
    const ConstTailCase c = random_const_tail(rng, ctx, cfg.shape);
    const Rational z_tail = c.ca / c.cb;
    const Rational z0 = c.a[0] / c.b[0];
    const std::vector<Rational> probes{z0, z_tail, near(rng, ctx, z_tail, 0, 4), rng.scalar(ctx, cfg.shape),
                                       near(rng, ctx, z0, 0, 4)};

    for (const auto& l : probes) {
      std::vector<Rational> entries;
      for (std::size_t i = 0; i < c.a.size(); ++i) entries.push_back(c.a[i] - l * c.b[i]);
      const Rational tail_value = c.ca - l * c.cb;
      entries.push_back(tail_value);
      const Kappa expected = entrywise_kappa(entries, ctx);
      const bool zero_entry = std::any_of(entries.begin(), entries.end(), [](const Rational& x) { return x == 0; });

      formula.check(seq_kappa(c.pencil, l) == expected, [&] { return at(c.pencil, l); });
      spectrum.check(seq_spectrum_membership(c.pencil, l) == zero_entry, [&] { return at(c.pencil, l); });

      if (tail_value == 0) continue;
      for (std::size_t extra = 1; extra <= 3; ++extra) {
        std::vector<Rational> a = c.a, b = c.b;
        a.insert(a.end(), extra, c.ca);
        b.insert(b.end(), extra, c.cb);
        const Pencil truncated(diagonal(a), diagonal(b), ctx);
        truncation.check(kappa(truncated, l) == seq_kappa(c.pencil, l) &&
                             in_spectrum(truncated, l) == seq_spectrum_membership(c.pencil, l),
                         [&] {
                           json j = at(c.pencil, l);
                           j["truncation"] = extra;
                           return j;
                         });
      }
    }
  }
  return {formula.take(), spectrum.take(), truncation.take()};
}

SuiteRecords suite_membership(const SuiteConfig& cfg) {
  Sampler rng(stream_seed(cfg.seed, 4));
  Tally at_least_one("kappa-at-least-one", "||A-lB|| ||(A-lB)^-1|| >= ||I|| = 1");
  Tally nesting("nesting", "Lambda_eps1(A,B) subset Lambda_eps2(A,B) for eps1 <= eps2");
  Tally intersection("intersection", "sigma(A,B) = intersection over eps of Lambda_eps(A,B)");
  Tally translation("translation", "l in Lambda_eps(A,B) iff l in sigma_{eps||A-lB||}(A,B)");

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const Instance inst = random_instance(rng, cfg, t);
    const Pencil& p = inst.pencil;
    const PrimeContext& ctx = p.ctx();
    const auto sweep = eps_sweep(ctx);
    for (const auto& l : inst.probes) {
      const bool spectral = in_spectrum(p, l);
      const Kappa k = suite_kappa(cfg, p, l);
      if (!spectral) {
        at_least_one.check(k.value >= UltraNorm::one(), [&] { return at(p, l); });
        const Rational excluding = 1 / (ctx.prime() * norm_value(kappa(p, l).value, ctx));
        intersection.check(!suite_member(cfg, p, l, excluding), [&] { return at(p, l, excluding); });
      } else {
        for (const auto& e : sweep) intersection.check(suite_member(cfg, p, l, e), [&] { return at(p, l, e); });
      }

      for (std::size_t i = 0; i < sweep.size(); ++i) {
        for (std::size_t j = i + 1; j < sweep.size(); ++j) {
          nesting.check(!suite_member(cfg, p, l, sweep[i]) || suite_member(cfg, p, l, sweep[j]),
                        [&] { return at(p, l, sweep[i]); });
        }
      }

      if (is_zero(eval_pencil(p, l))) continue;
      for (const auto& e : sweep) {
        const Epsilon eps(e);
        const Epsilon to_pseudo = translate_eps(p, l, eps, EpsDirection::cond_to_pseudo);
        const Epsilon to_cond = translate_eps(p, l, eps, EpsDirection::pseudo_to_cond);
        translation.check(suite_member(cfg, p, l, e) == in_pseudospectrum(p, l, to_pseudo) &&
                              in_pseudospectrum(p, l, eps) == suite_member(cfg, p, l, to_cond.value()),
                          [&] { return at(p, l, e); });
      }
    }
  }
  return {at_least_one.take(), nesting.take(), intersection.take(), translation.take()};
}

namespace {

bool strictly_small(const UMatrix& m, const UVector& x, const Rational& eps, const PrimeContext& ctx) {
  const Rational rhs = eps * norm_value(op_norm(m, ctx), ctx) * norm_value(vec_norm(x, ctx), ctx);
  return compare(vec_norm(m * x, ctx), rhs, ctx) == std::strong_ordering::less;
}

}  // namespace

SuiteRecords suite_witness(const SuiteConfig& cfg) {
  Sampler rng(stream_seed(cfg.seed, 5));
  const std::string anchor = "||(A-lB)x|| < eps ||A-lB|| ||x||";
  Tally equivalence("witness-equivalence", anchor);
  Tally inequality("witness-inequality", anchor);
  Tally exhaustive("witness-exhaustive-columns", anchor);
  Tally fixed("witness-fixed-example", anchor);

  {
    const PrimeContext ctx(5);
    const Pencil p(diagonal({1, 2}), identity(2), ctx);
    UVector expected(2);
    expected << -1, 0;
    const auto x = find_witness(p, 6, Epsilon(1));
    fixed.check(x && *x == expected && kappa(p, 6).value == UltraNorm::ppow(-1),
                [&] { return at(p, 6, 1); });
    fixed.check(!find_witness(p, 0, Epsilon(Rational(1, 2))), [&] { return at(p, 0, Rational(1, 2)); });
  }

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const Instance inst = random_instance(rng, cfg, t);
    const Pencil& p = inst.pencil;
    const PrimeContext& ctx = p.ctx();
    for (const auto& l : inst.probes) {
      if (in_spectrum(p, l)) continue;
      const UMatrix m = eval_pencil(p, l);
      for (const auto& e : eps_sweep(ctx)) {
        const auto x = find_witness(p, l, Epsilon(e));
        equivalence.check(x.has_value() == suite_member(cfg, p, l, e), [&] { return at(p, l, e); });
        if (x) {
          inequality.check(vec_norm(*x, ctx) == UltraNorm::one() && strictly_small(m, *x, e, ctx),
                           [&] { return at(p, l, e); });
        } else {
          const UMatrix mi = *inverse(m, ctx);
          bool none = true;
          for (Index j = 0; j < mi.cols(); ++j) none = none && !strictly_small(m, mi.col(j), e, ctx);
          exhaustive.check(none, [&] { return at(p, l, e); });
        }
      }
    }
  }
  return {equivalence.take(), inequality.take(), exhaustive.take(), fixed.take()};
}

SuiteRecords suite_perturbation(const SuiteConfig& cfg) {
  Sampler rng(stream_seed(cfg.seed, 6));
  const std::string anchor = "Lambda_eps(A,B) = union over ||C|| < eps||A-lB|| of sigma(A+C,B)";
  Tally destab("destabilizer", anchor);
  Tally converse("converse-sampling", "||C|| < eps||A-lB|| and l in sigma(A+C,B) => l in Lambda_eps(A,B)");
  Tally union_check("union-characterization", anchor);
  Tally fixed("destabilizer-fixed-example", "Cy = -phi(y)(A-lB)x");

  {
    const PrimeContext ctx(5);
    const Pencil p(diagonal({1, 2}), identity(2), ctx);
    const UMatrix c = rank_one_destabilizer(p, 6, Epsilon(1)).matrix();
    fixed.check(c == diagonal({5, 0}) && op_norm(c, ctx) == UltraNorm::ppow(1) && det(eval_pencil(p, 6) + c, ctx) == 0,
                [&] { return matrix_to_json(c, ctx); });
    const UMatrix zero = rank_one_destabilizer(p, 1, Epsilon(1)).matrix();
    fixed.check(is_zero(zero), [&] { return matrix_to_json(zero, ctx); });
  }

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const Instance inst = random_instance(rng, cfg, t);
    const Pencil& p = inst.pencil;
    const PrimeContext& ctx = p.ctx();
    std::optional<std::pair<Rational, Rational>> outside, inside;

    for (const auto& l : inst.probes) {
      const UMatrix m = eval_pencil(p, l);
      const bool spectral = det(m, ctx) == 0;
      for (const auto& e : eps_sweep(ctx)) {
        const Epsilon eps(e);
        if (spectral) {
          destab.check(is_zero(rank_one_destabilizer(p, l, eps).matrix()), [&] { return at(p, l, e); });
          continue;
        }
        if (!in_cond_pseudospectrum(p, l, eps)) {
          if (!outside) outside.emplace(l, e);
          continue;
        }
        if (!inside) inside.emplace(l, e);
        const UMatrix c = rank_one_destabilizer(p, l, eps).matrix();
        const Rational bound = e * norm_value(op_norm(m, ctx), ctx);
        destab.check(compare(op_norm(c, ctx), bound, ctx) == std::strong_ordering::less && det(m + c, ctx) == 0,
                     [&] {
                       json j = at(p, l, e);
                       j["C"] = matrix_to_json(c, ctx);
                       return j;
                     });
      }
    }

    if (!outside) {
      for (const auto& l : inst.probes) {
        if (in_spectrum(p, l)) continue;
        outside.emplace(l, 1 / (ctx.prime() * norm_value(kappa(p, l).value, ctx)));
        break;
      }
    }
    if (outside) {
      const auto& [l, e] = *outside;
      const Report r = union_characterization_check(p, l, Epsilon(e), cfg.converse_samples, stream_seed(cfg.seed, 1000 + t));
      const json& summary = r.back().certificate;
      converse.detail("samples", summary.value("samples", std::size_t{0}));
      converse.detail("small", summary.value("small", std::size_t{0}));
      converse.detail("singular", summary.value("singular", std::size_t{0}));
      converse.check(passed(r), [&] { return json{{"point", at(p, l, e)}, {"report", to_json(r)}}; });
    }
    if (inside) {
      const auto& [l, e] = *inside;
      const Report r = union_characterization_check(p, l, Epsilon(e), 20, stream_seed(cfg.seed, 5000 + t));
      union_check.check(passed(r) && r.front().verdict == Verdict::pass,
                        [&] { return json{{"point", at(p, l, e)}, {"report", to_json(r)}}; });
    }
  }
  return {destab.take(), converse.take(), union_check.take(), fixed.take()};
}

SuiteRecords suite_transformations(const SuiteConfig& cfg) {
  Sampler rng(stream_seed(cfg.seed, 7));
  Tally affine_rec("affine-transport", "Lambda_eps(bA+aB,B) = a + b Lambda_eps(A,B)");
  Tally sandwich("similarity-sandwich", "Lambda_{eps/k^2}(C,B) subset Lambda_eps(A,B) subset Lambda_{k^2 eps}(C,B)");
  Tally inclusions("similarity-inclusions", "Lambda_{eps/k^2}(C,B) subset Lambda_eps(A,B) subset Lambda_{k^2 eps}(C,B)");
  Tally inversion("inversion-map", "l in Lambda_eps(A^-1,B) => 1/l in Lambda_{eps k}(A,B^-1)");
  Tally b_inverse("b-inverse-reduction", "Lambda_{eps/(||B|| ||B^-1||)}(B^-1 A, I) subset Lambda_eps(A,B)");

  const std::size_t count = std::max<std::size_t>(cfg.trials / 2, 1);
  const ScalarShape conj_shape{-1, 1, 2};
  for (std::size_t t = 0; t < count; ++t) {
    const Layout l = layout(cfg, t);
    const PrimeContext& ctx = l.ctx;
    const Index n = l.n;

    {
      const Instance inst = random_instance(rng, cfg, t);
      const Pencil& p = inst.pencil;
      const Rational alpha = rng.scalar_or_zero(ctx, cfg.shape, 4);
      const Rational beta = rng.scalar(ctx, cfg.shape);
      const Pencil q = affine(p, alpha, beta);
      for (const auto& mu : inst.probes) {
        const Rational lam = alpha + beta * mu;
        affine_rec.check(kappa(q, lam) == kappa(p, mu), [&] {
          json j = at(p, mu);
          j["alpha"] = to_json(alpha);
          j["beta"] = to_json(beta);
          return j;
        });
      }
    }

    {
      // Diagonal U keeps triangular pencils triangular, so probes hit σ.
      const MatrixFamily fam = t % 2 == 0 ? MatrixFamily::diagonal : MatrixFamily::dense;
      const UMatrix u = rng.invertible_matrix(ctx, n, fam, conj_shape);
      const UMatrix b = rng.scalar_or_zero(ctx, cfg.shape, 4) * identity(n) +
                        rng.scalar_or_zero(ctx, cfg.shape, 4) * u + rng.scalar_or_zero(ctx, cfg.shape, 4) * u * u;
      const UMatrix a = rng.matrix(ctx, n, t % 2 == 0 ? MatrixFamily::upper_triangular : MatrixFamily::dense, cfg.shape);
      const Pencil p(a, b, ctx);
      const Similarity s = similarity(p, u);
      const UltraNorm k2 = s.k * s.k;
      const Rational k2v = norm_value(k2, ctx);
      for (const auto& lam : probes_for(rng, p)) {
        const Kappa ka = kappa(p, lam);
        const Kappa kc = kappa(s.conjugate, lam);
        const auto describe = [&] {
          json j = at(p, lam);
          j["U"] = matrix_to_json(u, ctx);
          return j;
        };
        sandwich.check(kc.value <= k2 * ka.value && ka.value <= k2 * kc.value, describe);
        for (const auto& e : eps_sweep(ctx)) {
          const bool inner = in_cond_pseudospectrum(s.conjugate, lam, Epsilon(e / k2v));
          const bool mid = in_cond_pseudospectrum(p, lam, Epsilon(e));
          const bool outer = in_cond_pseudospectrum(s.conjugate, lam, Epsilon(e * k2v));
          inclusions.check((!inner || mid) && (!mid || outer), describe);
        }
      }
    }

    {
      const UMatrix a = rng.invertible_matrix(ctx, n, l.family, cfg.shape);
      const UMatrix b = rng.invertible_matrix(ctx, n, l.family, cfg.shape);
      const Pencil p(a, b, ctx);
      // Probes aimed at the premise pencil (A⁻¹, B).
      const Pencil premise(*inverse(a, ctx), b, ctx);
      for (const auto& lam : probes_for(rng, premise)) {
        if (lam == 0) continue;
        for (const auto& e : eps_sweep(ctx)) {
          const Report r = inversion_map_check(p, lam, Epsilon(e));
          inversion.check(passed(r), [&] { return json{{"point", at(p, lam, e)}, {"report", to_json(r)}}; });
        }
      }
    }

    {
      const UMatrix b = rng.invertible_matrix(ctx, n, l.family, cfg.shape);
      const UMatrix a = rng.scalar_or_zero(ctx, cfg.shape, 4) * identity(n) +
                        rng.scalar_or_zero(ctx, cfg.shape, 4) * b + rng.scalar_or_zero(ctx, cfg.shape, 4) * b * b;
      const Pencil p(a, b, ctx);
      for (const auto& lam : probes_for(rng, p)) {
        for (const auto& e : eps_sweep(ctx)) {
          const Report r = b_inverse_reduction_check(p, lam, Epsilon(e));
          b_inverse.check(passed(r), [&] { return json{{"point", at(p, lam, e)}, {"report", to_json(r)}}; });
        }
      }
    }
  }
  return {affine_rec.take(), sandwich.take(), inclusions.take(), inversion.take(), b_inverse.take()};
}

namespace {

DiagonalSequence random_cc_diagonal(Sampler& rng, const PrimeContext& ctx, std::size_t n, const ScalarShape& shape,
                                    bool allow_constant) {
  DiagonalSequence s;
  const auto len = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(n) + 2));
  for (std::size_t i = 0; i < len; ++i) s.prefix.push_back(rng.scalar_or_zero(ctx, shape, 3));
  const auto terms = rng.uniform(0, 2);
  for (std::int64_t k = 0; k < terms; ++k) {
    const std::int64_t step = allow_constant ? rng.uniform(0, 2) : rng.uniform(1, 3);
    s.tail.push_back({rng.scalar_or_zero(ctx, shape, 4), step});
  }
  return s;
}

FiniteRankOp random_finite_rank(Sampler& rng, const PrimeContext& ctx, std::size_t n, const ScalarShape& shape) {
  FiniteRankOp k;
  const auto terms = rng.uniform(1, 4);
  const auto top = static_cast<std::int64_t>(n) + 3;
  for (std::int64_t t = 0; t < terms; ++t) {
    k.terms.push_back({static_cast<std::size_t>(rng.uniform(0, top)), static_cast<std::size_t>(rng.uniform(0, top)),
                       rng.scalar(ctx, shape)});
  }
  return k;
}

bool non_fredholm(const TailStats& s) { return s.zeros.infinite || s.inf_nonzero.is_zero(); }

}  // namespace

SuiteRecords suite_essential(const SuiteConfig& cfg) {
  Sampler rng(stream_seed(cfg.seed, 8));
  const std::string anchor = "sigma_e(A,B) = intersection over completely continuous K of sigma(A+K,B)";
  Tally set_rec("essential-spectrum-set", "sigma_e: l where A-lB is not Fredholm of index 0");
  Tally subset("essential-subset", "sigma_e(A,B) subset sigma(A,B), sigma_e(A,B) subset Lambda_{e,eps}(A,B)");
  Tally backward("regularizer-backward", anchor);
  Tally essential_point("regularizer-essential-point", anchor);
  Tally disjoint("regularizer-disjointness", "N(A-lB) n N(K) = {0}, R(A-lB) n R(K) = {0}");
  Tally forward("essential-forward", anchor);
  Tally stability("fredholm-stability", "A-lB in Phi_0, K completely continuous => A+K-lB in Phi_0");
  Tally cond_pseudo("essential-cond-pseudo",
                    "Lambda_{e,eps}(A,B) = K \\ {l : A+C-lB in Phi_0 for each ||C|| < eps||A-lB||}");
  Tally fixed("essential-fixed-example", anchor);

  {
    const PrimeContext ctx(5);
    const TailDiagonalPencil d(TailDiagonalOperator({1, 2}, TailRule::constant(3), ctx),
                               TailDiagonalOperator({1, 1}, TailRule::constant(1), ctx));
    fixed.check(essential_spectrum(d) == std::vector<Rational>{3}, [&] { return to_json(d); });
    const FiniteRankOp k = regularizer(d, 1);
    fixed.check(k.terms.size() == 1 && k.terms[0].functional_index == 0 && k.terms[0].target_index == 0 &&
                    k.terms[0].coeff == 1 && analyze_perturbed(d, 1, {}, k).invertible,
                [&] { return to_json(k); });
  }

  const std::size_t pencils = 25;
  for (std::size_t inst = 0; inst < pencils; ++inst) {
    const PrimeContext ctx(cfg.primes[inst % cfg.primes.size()]);
    ConstTailCase c = random_const_tail(rng, ctx, cfg.shape);
    // The last few pencils carry a geometric A tail accumulating at 0.
    const bool geometric = inst >= 20;
    TailDiagonalPencil d = c.pencil;
    if (geometric) {
      d = TailDiagonalPencil(TailDiagonalOperator(c.a, TailRule::geometric(rng.scalar(ctx, cfg.shape), rng.uniform(1, 2)), ctx),
                             TailDiagonalOperator(c.b, TailRule::constant(c.cb), ctx));
    }
    const std::size_t n = d.prefix_length();
    const Rational z_e = geometric ? Rational(0) : c.ca / c.cb;

    std::vector<Rational> probes{Rational(0), z_e};
    for (std::size_t i = 0; i < c.a.size(); ++i) probes.push_back(c.a[i] / c.b[i]);
    for (std::int64_t v = 0; v <= 3; ++v) probes.push_back(z_e + ctx.power(v) * Rational(rng.unit(ctx, 2)));
    probes.push_back(rng.scalar(ctx, cfg.shape));
    dedupe(probes);

    const auto sigma_e = essential_spectrum(d);
    for (const auto& l : probes) {
      const bool in_se = std::find(sigma_e.begin(), sigma_e.end(), l) != sigma_e.end();
      set_rec.check(in_se == (l == z_e) && in_se == !is_fredholm_index0(d, l), [&] { return at(d, l); });

      const DiagonalSequence m = residual(d, l);
      const TailStats stats = sequence_stats(m, ctx);

      if (in_se) {
        subset.check(seq_spectrum_membership(d, l), [&] { return at(d, l); });
        if (!stats.sup.is_zero()) {
          for (const auto& e : eps_sweep(ctx)) {
            subset.check(essential_cond_pseudo_member(d, l, Epsilon(e)), [&] { return at(d, l); });
          }
        }
        bool threw = false;
        try {
          (void)regularizer(d, l);
        } catch (const Error& err) {
          threw = err.code() == Errc::essential_point;
        }
        essential_point.check(threw, [&] { return at(d, l); });
        for (int s = 0; s < 50; ++s) {
          const DiagonalSequence kd = random_cc_diagonal(rng, ctx, n, cfg.shape, false);
          const FiniteRankOp kf = s % 2 == 0 ? FiniteRankOp{} : random_finite_rank(rng, ctx, n, cfg.shape);
          forward.check(!analyze_perturbed(d, l, kd, kf).invertible, [&] {
            json j = at(d, l);
            j["K_diag"] = to_json(kd);
            j["K_fin"] = to_json(kf);
            return j;
          });
        }
      } else {
        const FiniteRankOp k = regularizer(d, l);
        const bool spectral = seq_spectrum_membership(d, l);
        backward.check((spectral ? !k.empty() : k.empty()) && k.norm(ctx) <= stats.sup &&
                           analyze_perturbed(d, l, {}, k).invertible,
                       [&] {
                         json j = at(d, l);
                         j["K"] = to_json(k);
                         return j;
                       });
        if (spectral) {
          const DisjointnessCheck dc = regularizer_disjointness(d, l, k);
          disjoint.check(dc.kernels_meet_trivially && dc.ranges_meet_trivially, [&] { return at(d, l); });
        }
        for (int s = 0; s < 10; ++s) {
          const DiagonalSequence kd = random_cc_diagonal(rng, ctx, n, cfg.shape, false);
          const FiniteRankOp kf = s % 2 == 0 ? FiniteRankOp{} : random_finite_rank(rng, ctx, n, cfg.shape);
          stability.check(analyze_perturbed(d, l, kd, kf).fredholm_index0, [&] {
            json j = at(d, l);
            j["K_diag"] = to_json(kd);
            j["K_fin"] = to_json(kf);
            return j;
          });
        }
      }

      // The diagonal characterization of Λ_{e,ε}, validated both ways.
      if (stats.sup.is_zero()) continue;
      for (const auto& e : eps_sweep(ctx)) {
        const Epsilon eps(e);
        const Rational bound = e * norm_value(stats.sup, ctx);
        if (essential_cond_pseudo_boundary(d, l, eps)) cond_pseudo.detail("boundary", 1);
        const auto cert = essential_cond_pseudo_certificate(d, l, eps);
        if (essential_cond_pseudo_member(d, l, eps)) {
          const UltraNorm c_norm = cert ? sequence_stats(*cert, ctx).sup : UltraNorm::infinity();
          const bool small = c_norm.is_zero() || (cert && compare(c_norm, bound, ctx) == std::strong_ordering::less);
          cond_pseudo.check(cert && small && non_fredholm(sequence_stats(add(m, *cert, ctx), ctx)), [&] {
            json j = at(d, l);
            j["epsilon"] = to_json(e);
            if (cert) j["C"] = to_json(*cert);
            return j;
          });
          cond_pseudo.detail("certificates", 1);
          continue;
        }
        const ScalarShape small_shape{smallest_power_exceeding(1 / bound, ctx), smallest_power_exceeding(1 / bound, ctx) + 3, 3};
        for (int s = 0; s < 10; ++s) {
          const DiagonalSequence kd = random_cc_diagonal(rng, ctx, n, small_shape, true);
          const FiniteRankOp kf = s % 2 == 0 ? FiniteRankOp{} : random_finite_rank(rng, ctx, n, small_shape);
          cond_pseudo.check(!cert && analyze_perturbed(d, l, kd, kf).fredholm_index0, [&] {
            json j = at(d, l);
            j["epsilon"] = to_json(e);
            j["C_diag"] = to_json(kd);
            j["C_fin"] = to_json(kf);
            return j;
          });
          cond_pseudo.detail("small_perturbations", 1);
        }
      }
    }
  }
  return {set_rec.take(),  subset.take(),    backward.take(),    essential_point.take(), disjoint.take(),
          forward.take(),  stability.take(), cond_pseudo.take(), fixed.take()};
}

namespace {

// Grid around the centers plus two random points, grown until it holds at
// least `target` distinct samples.
SampleGrid audit_grid(Sampler& rng, const DiagonalPencil& d, std::size_t target) {
  const PrimeContext& ctx = d.ctx();
  SampleGrid grid;
  grid.centers = diag_spectrum(d);
  grid.centers.push_back(rng.scalar(ctx, {-2, 2, 3}));
  grid.centers.push_back(rng.scalar(ctx, {-2, 2, 3}));
  grid.v_min = -3;
  grid.v_max = 8;
  grid.digits = 8;
  grid.seed = rng.next();
  const std::size_t shells = grid.centers.size() * static_cast<std::size_t>(grid.v_max - grid.v_min + 1);
  grid.per_shell = (target + shells - 1) / shells;
  while (sample(grid, ctx).size() < target) ++grid.per_shell;
  return grid;
}

DiagonalPencil random_diagonal(Sampler& rng, const PrimeContext& ctx, std::size_t centers, const ScalarShape& shape) {
  for (;;) {
    std::vector<Rational> a, b;
    for (std::size_t i = 0; i < centers; ++i) {
      a.push_back(rng.scalar_or_zero(ctx, shape, 5));
      b.push_back(rng.scalar(ctx, shape));
    }
    DiagonalPencil d(a, b, ctx);
    if (diag_spectrum(d).size() == centers) return d;
  }
}

}  // namespace

SuiteRecords suite_regions(const SuiteConfig& cfg) {
  Sampler rng(stream_seed(cfg.seed, 9));
  const std::string anchor =
      "Lambda_eps(A,B) = {a/c,b/d} u {|a-lc|/|b-ld| > 1/eps} u {|b-ld|/|a-lc| > 1/eps}";
  Tally fixed("region-fixed-instance", anchor);
  Tally single("region-single-center", anchor);
  Tally cond("region-audit-condition", anchor);
  Tally pseudo("region-audit-pseudo", "sigma_eps(A,B) = sigma(A,B) u {l : ||(A-lB)^-1|| > 1/eps}");
  Tally multi("region-audit-multi", "sigma_eps(A,B) = {a_i/b_i} u {sup|a_i-lb_i| / inf|a_i-lb_i| > 1/eps}");

  const auto audit = [&](Tally& tally, const DiagonalPencil& d, const RegionDescription& r, const Rational& e,
                         RegionKind kind) {
    const SampleGrid grid = audit_grid(rng, d, cfg.region_samples);
    const Report rep = region_vs_predicate_audit(d, r, Epsilon(e), grid, kind);
    const std::size_t samples = rep.back().certificate.value("samples", std::size_t{0});
    tally.detail("samples", samples);
    tally.detail("mismatches", rep.back().certificate.value("mismatches", std::size_t{0}));
    tally.check(passed(rep) && samples >= cfg.region_samples, [&] {
      json j = {{"pencil", to_json(d.to_pencil())}, {"epsilon", to_json(e)}, {"region", to_json(r)}};
      for (const auto& rec : rep) {
        if (rec.verdict == Verdict::fail) {
          j["lambda"] = to_json(rec.lambda);
          break;
        }
      }
      return j;
    });
  };

  {
    const PrimeContext ctx(5);
    const DiagonalPencil d({1, 2}, {1, 1}, ctx);
    const Rational e(1, 5);
    const RegionDescription r = cond_region(d, Epsilon(e));
    std::vector<PBall> balls = r.balls;
    std::sort(balls.begin(), balls.end(), [](const PBall& x, const PBall& y) { return x.center < y.center; });
    const std::vector<PBall> expected{{1, 2, true}, {2, 2, true}};
    fixed.check(!r.complement && balls == expected, [&] { return to_json(r); });
    audit(fixed, d, r, e, RegionKind::condition);
  }

  for (const auto prime : cfg.primes) {
    const PrimeContext ctx(prime);
    const DiagonalPencil d = random_diagonal(rng, ctx, 1, cfg.shape);
    const RegionDescription r = cond_region(d, Epsilon(Rational(1, 2)));
    single.check(r.balls.empty() && !r.complement && r.points == diag_spectrum(d), [&] { return to_json(r); });
  }

  for (const auto prime : cfg.primes) {
    const PrimeContext ctx(prime);
    for (int k = 0; k < 3; ++k) {
      const DiagonalPencil d2 = random_diagonal(rng, ctx, 2, cfg.shape);
      const DiagonalPencil dn = random_diagonal(rng, ctx, static_cast<std::size_t>(rng.uniform(3, 4)), cfg.shape);
      for (const auto& e : eps_sweep(ctx)) {
        audit(cond, d2, cond_region(d2, Epsilon(e)), e, RegionKind::condition);
        audit(pseudo, d2, pseudo_region(d2, Epsilon(e)), e, RegionKind::pseudo);
        audit(multi, dn, cond_region(dn, Epsilon(e)), e, RegionKind::condition);
        audit(multi, dn, pseudo_region(dn, Epsilon(e)), e, RegionKind::pseudo);
      }
    }
  }
  return {fixed.take(), single.take(), cond.take(), pseudo.take(), multi.take()};
}

SuiteReport run_all_suites(const SuiteConfig& cfg) {
  SuiteReport report;
  report.seed = cfg.seed;
  for (auto suite : {suite_foundations, suite_two_by_two, suite_sequence_kappa, suite_membership, suite_witness,
                     suite_perturbation, suite_transformations, suite_essential, suite_regions}) {
    for (auto& r : suite(cfg)) report.records.push_back(std::move(r));
  }
  std::sort(report.records.begin(), report.records.end(),
            [](const SuiteRecord& a, const SuiteRecord& b) { return a.name < b.name; });
  return report;
}

json to_json(const SuiteRecord& r) {
  json j = {{"name", r.name},
            {"paper_anchor", r.paper_anchor},
            {"instances", r.instances},
            {"passes", r.passes},
            {"failures", r.failures}};
  if (!r.first_counterexample.is_null()) j["first_counterexample"] = r.first_counterexample;
  if (!r.details.is_null()) j["details"] = r.details;
  return j;
}

json to_json(const SuiteReport& r) {
  json records = json::array();
  for (const auto& rec : r.records) records.push_back(to_json(rec));
  return {{"seed", r.seed}, {"passed", r.passed()}, {"failures", r.failures()}, {"records", std::move(records)}};
}

}  // namespace ultrapencil
