#include "ultrapencil/random.hpp"

#include <stdexcept>

namespace ultrapencil {

std::int64_t Sampler::uniform(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("empty sampling range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r = engine_();
  while (r >= limit) r = engine_();
  return lo + static_cast<std::int64_t>(r % span);
}

Integer Sampler::unit(const PrimeContext& ctx, int digits) {
  if (digits < 1) throw std::invalid_argument("unit needs at least one digit");
  const std::int64_t p = ctx.prime();
  // Leading digit nonzero, remaining digits free.
  Integer u = uniform(1, p - 1);
  Integer place = p;
  for (int d = 1; d < digits; ++d) {
    u += place * uniform(0, p - 1);
    place *= p;
  }
  return u;
}

Rational Sampler::scalar(const PrimeContext& ctx, const ScalarShape& shape) {
  const std::int64_t v = uniform(shape.v_min, shape.v_max);
  Rational x = ctx.power(v) * Rational(unit(ctx, shape.digits));
  return coin() ? -x : x;
}

Rational Sampler::scalar_or_zero(const PrimeContext& ctx, const ScalarShape& shape, std::int64_t zero_one_in) {
  if (zero_one_in > 0 && uniform(1, zero_one_in) == 1) return 0;
  return scalar(ctx, shape);
}

UMatrix Sampler::matrix(const PrimeContext& ctx, Index n, MatrixFamily family, const ScalarShape& shape) {
  UMatrix m = UMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const bool allowed = family == MatrixFamily::dense || i == j ||
                           (family == MatrixFamily::upper_triangular && i < j);
      if (allowed) m(i, j) = scalar_or_zero(ctx, shape, 5);
    }
  }
  return m;
}

UMatrix Sampler::invertible_matrix(const PrimeContext& ctx, Index n, MatrixFamily family, const ScalarShape& shape) {
  for (;;) {
    UMatrix m = matrix(ctx, n, family, shape);
    if (det(m, ctx) != 0) return m;
  }
}

}  // namespace ultrapencil
