#pragma once

// Diagonal pencils A = diag(a), B = diag(b): closed-form κ and exact
// descriptions of Λ_ε and σ_ε as finite unions of p-adic balls.
//
// With z_i = a_i/b_i, |a_i − λb_i| = |b_i|·|λ − z_i|, so κ(λ) only depends on
// the distances from λ to the distinct centers. Those distances are constant
// on every ball that contains no center, which makes the regions computable by
// walking the finite tree of balls separating the centers.

#include <cstdint>
#include <optional>
#include <vector>

#include "ultrapencil/pencil.hpp"

namespace ultrapencil {

class DiagonalPencil {
 public:
  DiagonalPencil(std::vector<Rational> a, std::vector<Rational> b, PrimeContext ctx);

  /// Throws non_diagonal_input unless both matrices are diagonal.
  static DiagonalPencil from_pencil(const Pencil& p);

  const std::vector<Rational>& a() const noexcept { return a_; }
  const std::vector<Rational>& b() const noexcept { return b_; }
  const PrimeContext& ctx() const noexcept { return ctx_; }
  std::size_t size() const noexcept { return a_.size(); }

  Pencil to_pencil() const;

  /// Throws zero_b_entry if some b_i vanishes.
  void require_nonzero_b() const;

 private:
  std::vector<Rational> a_;
  std::vector<Rational> b_;
  PrimeContext ctx_;
};

/// {a_i / b_i}, sorted and deduplicated.
std::vector<Rational> diag_spectrum(const DiagonalPencil& d);

/// sup_i |a_i − λb_i| / inf_i |a_i − λb_i|; infinite when some entry vanishes.
Kappa diag_kappa(const DiagonalPencil& d, const Rational& lambda);

/// 1 / inf_i |a_i − λb_i|.
UltraNorm diag_resolvent_norm(const DiagonalPencil& d, const Rational& lambda);

/// Closed ball {λ : |λ − center| ≤ p^(−radius_v)}. Open balls are always
/// canonicalized to the closed ball one step smaller.
struct PBall {
  Rational center;
  std::int64_t radius_v = 0;
  bool closed = true;

  UltraNorm radius() const noexcept { return UltraNorm::ppow(radius_v); }
  bool contains(const Rational& lambda, const PrimeContext& ctx) const;

  friend bool operator==(const PBall&, const PBall&) = default;
};

/// λ ∈ region ⟺ λ ∈ points, or (λ lies in some ball) XOR complement.
struct RegionDescription {
  std::vector<Rational> points;
  std::vector<PBall> balls;
  bool complement = false;

  bool contains(const Rational& lambda, const PrimeContext& ctx) const;
};

/// Exact Λ_ε for a diagonal pencil with nonzero b.
RegionDescription cond_region(const DiagonalPencil& d, const Epsilon& eps);

/// Exact σ_ε for a diagonal pencil with nonzero b.
RegionDescription pseudo_region(const DiagonalPencil& d, const Epsilon& eps);

struct SampleGrid {
  std::vector<Rational> centers;
  std::int64_t v_min = 0;
  std::int64_t v_max = 0;
  int digits = 1;          // p-adic digits of each random unit
  std::size_t per_shell = 1;  // units drawn per (center, valuation)
  std::uint64_t seed = 0;
};

/// λ = c + p^v·u for every center c, v in [v_min, v_max] and `per_shell`
/// seeded random units u; first occurrence order, duplicates removed.
std::vector<Rational> sample(const SampleGrid& grid, const PrimeContext& ctx);

enum class RegionKind { condition, pseudo };

/// Compares R.contains(λ) against the direct membership predicate at every
/// sampled point. One failing record per mismatch, then a summary record.
Report region_vs_predicate_audit(const DiagonalPencil& d, const RegionDescription& region, const Epsilon& eps,
                                 const SampleGrid& grid, RegionKind kind = RegionKind::condition);

}  // namespace ultrapencil
