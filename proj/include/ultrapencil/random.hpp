#pragma once

// Seeded generators for p-adic scalars, matrices and pencils. Draws only use
// raw mt19937_64 output so sequences are identical across standard libraries.

#include <cstdint>
#include <random>

#include "ultrapencil/linalg.hpp"

namespace ultrapencil {

/// Valuation window and unit size for random scalars p^v·u.
struct ScalarShape {
  std::int64_t v_min = -3;
  std::int64_t v_max = 3;
  int digits = 3;  // u is a unit modulo p^digits
};

enum class MatrixFamily { diagonal, upper_triangular, dense };

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);

  bool coin() { return (engine_() >> 63) != 0; }

  /// Uniform unit modulo p^digits, in [1, p^digits).
  Integer unit(const PrimeContext& ctx, int digits);

  /// ±p^v·u with v uniform in the window; never zero.
  Rational scalar(const PrimeContext& ctx, const ScalarShape& shape = {});

  /// Like scalar(), but zero with probability 1/zero_one_in.
  Rational scalar_or_zero(const PrimeContext& ctx, const ScalarShape& shape, std::int64_t zero_one_in);

  UMatrix matrix(const PrimeContext& ctx, Index n, MatrixFamily family, const ScalarShape& shape = {});

  /// Random matrix of the family conditioned on det != 0.
  UMatrix invertible_matrix(const PrimeContext& ctx, Index n, MatrixFamily family,
                            const ScalarShape& shape = {});

 private:
  std::mt19937_64 engine_;
};

}  // namespace ultrapencil
