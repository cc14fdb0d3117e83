#include "ultrapencil/pencil.hpp"

#include <string>

#include "ultrapencil/io.hpp"
#include "ultrapencil/random.hpp"

namespace ultrapencil {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::vacuous: return "vacuous";
  }
  return "unknown";
}

bool passed(const Report& report) {
  for (const auto& r : report) {
    if (r.verdict == Verdict::fail) return false;
  }
  return true;
}

Pencil::Pencil(UMatrix a, UMatrix b, PrimeContext ctx) : a_(std::move(a)), b_(std::move(b)), ctx_(ctx) {
  if (a_.rows() == 0 || a_.rows() != a_.cols() || b_.rows() != a_.rows() || b_.cols() != a_.cols()) {
    throw Error(Errc::dimension_mismatch,
                "pencil needs two square matrices of equal size, got " + std::to_string(a_.rows()) + "x" +
                    std::to_string(a_.cols()) + " and " + std::to_string(b_.rows()) + "x" +
                    std::to_string(b_.cols()));
  }
}

UMatrix eval_pencil(const Pencil& p, const Rational& lambda) { return p.A() - lambda * p.B(); }

bool in_spectrum(const Pencil& p, const Rational& lambda) {
  return det(eval_pencil(p, lambda), p.ctx()) == 0;
}

Kappa kappa(const Pencil& p, const Rational& lambda) {
  const UMatrix m = eval_pencil(p, lambda);
  if (is_zero(m)) return {UltraNorm::infinity(), true};
  const auto inv = inverse(m, p.ctx());
  if (!inv) return {UltraNorm::infinity(), false};
  return {op_norm(m, p.ctx()) * op_norm(*inv, p.ctx()), false};
}

bool in_cond_pseudospectrum(const Pencil& p, const Rational& lambda, const Epsilon& eps) {
  const Kappa k = kappa(p, lambda);
  return k.is_infinite() || exceeds(k.value, eps.reciprocal(), p.ctx());
}

bool in_pseudospectrum(const Pencil& p, const Rational& lambda, const Epsilon& eps) {
  const auto inv = inverse(eval_pencil(p, lambda), p.ctx());
  return !inv || exceeds(op_norm(*inv, p.ctx()), eps.reciprocal(), p.ctx());
}

Epsilon translate_eps(const Pencil& p, const Rational& lambda, const Epsilon& eps, EpsDirection dir) {
  const UltraNorm n = op_norm(eval_pencil(p, lambda), p.ctx());
  if (n.is_zero()) throw Error(Errc::zero_pencil_at_lambda, "A - lambda B vanishes at lambda = " + to_string(lambda));
  const Rational scale = *n.to_rational(p.ctx());
  return Epsilon(dir == EpsDirection::cond_to_pseudo ? eps.value() * scale : eps.value() / scale);
}

std::optional<UVector> find_witness(const Pencil& p, const Rational& lambda, const Epsilon& eps) {
  const PrimeContext& ctx = p.ctx();
  const UMatrix m = eval_pencil(p, lambda);
  const auto inv = inverse(m, ctx);
  if (!inv) throw Error(Errc::spectral_point, "no witness exists at spectral point " + to_string(lambda));

  Index best = 0;
  UltraNorm best_norm = UltraNorm::zero();
  for (Index j = 0; j < inv->cols(); ++j) {
    const UltraNorm n = vec_norm(inv->col(j), ctx);
    if (n > best_norm) {
      best = j;
      best_norm = n;
    }
  }
  // best_norm is ‖(A−λB)⁻¹‖, so this is κ(λ).
  if (!exceeds(op_norm(m, ctx) * best_norm, eps.reciprocal(), ctx)) return std::nullopt;
  return UVector(ctx.power(-best_norm.exponent()) * inv->col(best));
}

UMatrix RankOnePerturbation::matrix() const { return u * f.coefficients.transpose(); }

UltraNorm RankOnePerturbation::norm(const PrimeContext& ctx) const { return vec_norm(u, ctx) * f.norm(ctx); }

RankOnePerturbation rank_one_destabilizer(const Pencil& p, const Rational& lambda, const Epsilon& eps) {
  const Index n = p.dim();
  if (in_spectrum(p, lambda)) return {UVector::Zero(n), Functional{UVector::Zero(n)}};

  const auto x = find_witness(p, lambda, eps);
  if (!x) {
    throw Error(Errc::not_in_cond_pseudospectrum,
                "kappa(" + to_string(lambda) + ") = " + kappa(p, lambda).value.to_string() +
                    " does not exceed 1/epsilon = " + to_string(eps.reciprocal()));
  }
  Index i = 0;
  while (abs((*x)(i), p.ctx()) != UltraNorm::one()) ++i;

  Functional phi{UVector::Zero(n)};
  phi.coefficients(i) = 1 / (*x)(i);
  return {UVector(-(eval_pencil(p, lambda) * *x)), std::move(phi)};
}

namespace {

CheckRecord record(std::string check, const Pencil& p, const Rational& lambda, const Epsilon& eps) {
  CheckRecord r;
  r.check = std::move(check);
  r.lambda = lambda;
  r.kappa = kappa(p, lambda);
  r.epsilon = eps.value();
  return r;
}

Verdict verdict_of(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

// Rank-one C = −(Mx)·f with f(x) = 1, so (M + C)x = 0.
UMatrix random_annihilator(Sampler& rng, const UMatrix& m, const PrimeContext& ctx) {
  const Index n = m.rows();
  const ScalarShape shape{-2, 2, 2};
  UVector x = UVector::Zero(n);
  while (is_zero(x)) {
    for (Index i = 0; i < n; ++i) x(i) = rng.scalar_or_zero(ctx, shape, 3);
  }
  Index lead = 0;
  for (Index i = 1; i < n; ++i) {
    if (abs(x(i), ctx) > abs(x(lead), ctx)) lead = i;
  }
  UVector f(n);
  Rational rest = 0;
  for (Index i = 0; i < n; ++i) {
    if (i == lead) continue;
    f(i) = rng.scalar_or_zero(ctx, shape, 3);
    rest += f(i) * x(i);
  }
  f(lead) = (1 - rest) / x(lead);
  return UMatrix(-(m * x) * f.transpose());
}

}  // namespace

Report union_characterization_check(const Pencil& p, const Rational& lambda, const Epsilon& eps,
                                    std::size_t trials, std::uint64_t seed) {
  const PrimeContext& ctx = p.ctx();
  const UMatrix m = eval_pencil(p, lambda);
  const bool member = in_cond_pseudospectrum(p, lambda, eps);
  Report report;

  // Backward direction: λ ∈ Λ_ε yields an explicit small destabilizer.
  {
    CheckRecord r = record("destabilizer", p, lambda, eps);
    if (!member) {
      r.verdict = Verdict::vacuous;
    } else {
      const RankOnePerturbation c = rank_one_destabilizer(p, lambda, eps);
      const UMatrix cm = c.matrix();
      const bool singular = det(m + cm, ctx) == 0;
      bool small = true;
      if (!in_spectrum(p, lambda)) {
        small = compare(c.norm(ctx), eps.value() * *op_norm(m, ctx).to_rational(ctx), ctx) ==
                std::strong_ordering::less;
      }
      r.verdict = verdict_of(singular && small);
      r.certificate = {{"C", matrix_to_json(cm, ctx)}, {"norm", to_json(c.norm(ctx))}, {"singular", singular}};
    }
    report.push_back(std::move(r));
  }

  // Forward direction: any small C making A + C − λB singular certifies λ ∈ Λ_ε.
  const UltraNorm m_norm = op_norm(m, ctx);
  CheckRecord summary = record("forward-sampling", p, lambda, eps);
  if (m_norm.is_zero()) {
    summary.verdict = Verdict::vacuous;
    report.push_back(std::move(summary));
    return report;
  }
  const Rational bound = eps.value() * *m_norm.to_rational(ctx);
  const std::int64_t v_small = smallest_power_exceeding(1 / bound, ctx);
  const ScalarShape small_shape{v_small, v_small + 3, 3};

  Sampler rng(seed);
  std::size_t small_count = 0;
  std::size_t singular_count = 0;
  bool all_ok = true;
  for (std::size_t t = 0; t < trials; ++t) {
    UMatrix c = (t % 2 == 0) ? rng.matrix(ctx, p.dim(), MatrixFamily::dense, small_shape)
                             : random_annihilator(rng, m, ctx);
    if (compare(op_norm(c, ctx), bound, ctx) != std::strong_ordering::less) continue;
    ++small_count;
    if (det(m + c, ctx) != 0) continue;
    ++singular_count;
    CheckRecord r = record("forward-certificate", p, lambda, eps);
    r.verdict = verdict_of(member);
    all_ok = all_ok && member;
    r.certificate = {{"C", matrix_to_json(c, ctx)}, {"norm", to_json(op_norm(c, ctx))}};
    report.push_back(std::move(r));
  }
  summary.verdict = verdict_of(all_ok);
  summary.certificate = {{"samples", trials}, {"small", small_count}, {"singular", singular_count}};
  report.push_back(std::move(summary));
  return report;
}

Pencil affine(const Pencil& p, const Rational& alpha, const Rational& beta) {
  if (beta == 0) throw Error(Errc::beta_zero, "affine map needs beta != 0");
  return Pencil(beta * p.A() + alpha * p.B(), p.B(), p.ctx());
}

Similarity similarity(const Pencil& p, const UMatrix& u) {
  const PrimeContext& ctx = p.ctx();
  if (u.rows() != p.dim() || u.cols() != p.dim()) throw Error(Errc::dimension_mismatch, "similarity matrix size");
  const auto u_inv = inverse(u, ctx);
  if (!u_inv) throw Error(Errc::singular_matrix, "similarity matrix U is singular");
  if (u * p.B() != p.B() * u) throw Error(Errc::noncommuting, "U does not commute with B");
  return {Pencil(*u_inv * p.A() * u, p.B(), ctx), op_norm(u, ctx) * op_norm(*u_inv, ctx)};
}

Report inversion_map_check(const Pencil& p, const Rational& lambda, const Epsilon& eps) {
  const PrimeContext& ctx = p.ctx();
  if (lambda == 0) throw Error(Errc::lambda_zero, "inversion map needs lambda != 0");
  const auto a_inv = inverse(p.A(), ctx);
  if (!a_inv) throw Error(Errc::singular_matrix, "A is singular");
  const auto b_inv = inverse(p.B(), ctx);
  if (!b_inv) throw Error(Errc::singular_matrix, "B is singular");

  const UltraNorm k = op_norm(*a_inv, ctx) * op_norm(p.A(), ctx) * op_norm(*b_inv, ctx) * op_norm(p.B(), ctx);
  const Pencil premise_pencil(*a_inv, p.B(), ctx);
  const Pencil image_pencil(p.A(), *b_inv, ctx);
  const Rational mu = 1 / lambda;
  const Kappa k_premise = kappa(premise_pencil, lambda);
  const Kappa k_image = kappa(image_pencil, mu);
  const nlohmann::json cert = {
      {"k", to_json(k)}, {"kappa_premise", to_json(k_premise)}, {"kappa_image", to_json(k_image)}};

  Report report;
  CheckRecord implication = record("inversion-implication", premise_pencil, lambda, eps);
  if (!in_cond_pseudospectrum(premise_pencil, lambda, eps)) {
    implication.verdict = Verdict::vacuous;
  } else {
    const Epsilon scaled(eps.value() * *k.to_rational(ctx));
    implication.verdict = verdict_of(in_cond_pseudospectrum(image_pencil, mu, scaled));
  }
  implication.certificate = cert;
  report.push_back(implication);

  CheckRecord bound = record("inversion-kappa-bound", premise_pencil, lambda, eps);
  bound.verdict = verdict_of(k_premise.value <= k * k_image.value);
  bound.certificate = cert;
  report.push_back(std::move(bound));
  return report;
}

Report b_inverse_reduction_check(const Pencil& p, const Rational& lambda, const Epsilon& eps) {
  const PrimeContext& ctx = p.ctx();
  const auto b_inv = inverse(p.B(), ctx);
  if (!b_inv) throw Error(Errc::singular_matrix, "B is singular");
  if (p.A() * p.B() != p.B() * p.A()) throw Error(Errc::noncommuting, "A and B do not commute");

  const UltraNorm s = op_norm(p.B(), ctx) * op_norm(*b_inv, ctx);
  const Pencil reduced(*b_inv * p.A(), identity(p.dim()), ctx);
  const Kappa k_reduced = kappa(reduced, lambda);
  const Kappa k_orig = kappa(p, lambda);
  const nlohmann::json cert = {
      {"s", to_json(s)}, {"kappa_reduced", to_json(k_reduced)}, {"kappa_original", to_json(k_orig)}};

  Report report;
  CheckRecord implication = record("b-inverse-implication", p, lambda, eps);
  const Epsilon shrunk(eps.value() / *s.to_rational(ctx));
  if (!in_cond_pseudospectrum(reduced, lambda, shrunk)) {
    implication.verdict = Verdict::vacuous;
  } else {
    implication.verdict = verdict_of(in_cond_pseudospectrum(p, lambda, eps));
  }
  implication.certificate = cert;
  report.push_back(implication);

  CheckRecord bound = record("b-inverse-kappa-bound", p, lambda, eps);
  bound.verdict = verdict_of(k_reduced.value <= s * k_orig.value);
  bound.certificate = cert;
  report.push_back(std::move(bound));
  return report;
}

}  // namespace ultrapencil
