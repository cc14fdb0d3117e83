#pragma once

// Pencils (A, B): spectrum, pseudospectrum and condition pseudospectrum
// membership, witnesses, rank-one destabilizers and the transformation laws
// relating condition numbers of derived pencils.

#include <cstdint>
#include <optional>

#include "ultrapencil/linalg.hpp"
#include "ultrapencil/report.hpp"

namespace ultrapencil {

class Pencil {
 public:
  Pencil(UMatrix a, UMatrix b, PrimeContext ctx);

  const UMatrix& A() const noexcept { return a_; }
  const UMatrix& B() const noexcept { return b_; }
  const PrimeContext& ctx() const noexcept { return ctx_; }
  Index dim() const noexcept { return a_.rows(); }

 private:
  UMatrix a_;
  UMatrix b_;
  PrimeContext ctx_;
};

/// A − λB.
UMatrix eval_pencil(const Pencil& p, const Rational& lambda);

bool in_spectrum(const Pencil& p, const Rational& lambda);

Kappa kappa(const Pencil& p, const Rational& lambda);

/// λ ∈ Λ_ε(A,B): spectral, or κ(λ) > 1/ε.
bool in_cond_pseudospectrum(const Pencil& p, const Rational& lambda, const Epsilon& eps);

/// λ ∈ σ_ε(A,B): spectral, or ‖(A−λB)⁻¹‖ > 1/ε.
bool in_pseudospectrum(const Pencil& p, const Rational& lambda, const Epsilon& eps);

enum class EpsDirection { cond_to_pseudo, pseudo_to_cond };

/// ε·‖A−λB‖ (cond_to_pseudo) or ε/‖A−λB‖ (pseudo_to_cond). Membership in the
/// two sets is preserved under this change of tolerance.
Epsilon translate_eps(const Pencil& p, const Rational& lambda, const Epsilon& eps, EpsDirection dir);

/// Nonzero x with ‖(A−λB)x‖ < ε‖A−λB‖‖x‖, normalized to ‖x‖ = 1, or nullopt
/// when κ(λ) ≤ 1/ε. x is the column of (A−λB)⁻¹ of largest norm (lowest
/// index on ties) rescaled by a power of p. Throws spectral_point on σ(A,B).
std::optional<UVector> find_witness(const Pencil& p, const Rational& lambda, const Epsilon& eps);

/// C = u·f, acting as y -> f(y)·u.
struct RankOnePerturbation {
  UVector u;
  Functional f;

  UMatrix matrix() const;
  UltraNorm norm(const PrimeContext& ctx) const;
};

/// C with ‖C‖ < ε‖A−λB‖ and A + C − λB singular. Zero on σ(A,B); throws
/// not_in_cond_pseudospectrum when λ ∉ Λ_ε(A,B).
RankOnePerturbation rank_one_destabilizer(const Pencil& p, const Rational& lambda, const Epsilon& eps);

/// Samples `trials` random C below the ε‖A−λB‖ norm bound (dense draws and
/// rank-one annihilators of random vectors); every singular A + C − λB found
/// must certify λ ∈ Λ_ε. When λ ∈ Λ_ε the destabilizer is built and checked.
Report union_characterization_check(const Pencil& p, const Rational& lambda, const Epsilon& eps,
                                    std::size_t trials, std::uint64_t seed);

/// (βA + αB, B). κ of the result at λ equals κ of p at (λ−α)/β.
Pencil affine(const Pencil& p, const Rational& alpha, const Rational& beta);

struct Similarity {
  Pencil conjugate;  // (U⁻¹AU, B)
  UltraNorm k;       // ‖U‖‖U⁻¹‖
};

Similarity similarity(const Pencil& p, const UMatrix& u);

/// For invertible A, B and λ ≠ 0 with k = ‖A⁻¹‖‖A‖‖B⁻¹‖‖B‖: checks
/// λ ∈ Λ_ε(A⁻¹,B) ⇒ 1/λ ∈ Λ_{εk}(A,B⁻¹) and κ_(A⁻¹,B)(λ) ≤ k·κ_(A,B⁻¹)(1/λ).
Report inversion_map_check(const Pencil& p, const Rational& lambda, const Epsilon& eps);

/// For invertible B commuting with A, s = ‖B‖‖B⁻¹‖: checks
/// λ ∈ Λ_{ε/s}(B⁻¹A, I) ⇒ λ ∈ Λ_ε(A,B) and κ_(B⁻¹A,I)(λ) ≤ s·κ_(A,B)(λ).
Report b_inverse_reduction_check(const Pencil& p, const Rational& lambda, const Epsilon& eps);

}  // namespace ultrapencil
