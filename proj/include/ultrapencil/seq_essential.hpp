#pragma once

// Diagonal operators on the sequence space c0(Q_p), described exactly by a
// finite prefix and a symbolic tail. Infima and suprema over all indices are
// computed from the tail description, never from a truncation.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ultrapencil/pencil.hpp"

namespace ultrapencil {

/// Tail entries from index N on: Constant gives c, Geometric gives
/// c·p^(step_v·(i − N)).
struct TailRule {
  enum class Kind { constant, geometric };

  Kind kind = Kind::constant;
  Rational c;
  std::int64_t step_v = 0;

  static TailRule constant(Rational c);
  static TailRule geometric(Rational c, std::int64_t step_v);
};

class TailDiagonalOperator {
 public:
  TailDiagonalOperator(std::vector<Rational> prefix, TailRule tail, PrimeContext ctx);

  const std::vector<Rational>& prefix() const noexcept { return prefix_; }
  const TailRule& tail() const noexcept { return tail_; }
  const PrimeContext& ctx() const noexcept { return ctx_; }

  Rational entry(std::size_t i) const;

  /// The same operator with its prefix extended to length n >= prefix().size().
  TailDiagonalOperator padded(std::size_t n) const;

 private:
  std::vector<Rational> prefix_;
  TailRule tail_;
  PrimeContext ctx_;
};

bool is_completely_continuous(const TailDiagonalOperator& t);

class TailDiagonalPencil {
 public:
  /// Pads both prefixes to a common length.
  TailDiagonalPencil(const TailDiagonalOperator& a, const TailDiagonalOperator& b);

  const TailDiagonalOperator& A() const noexcept { return a_; }
  const TailDiagonalOperator& B() const noexcept { return b_; }
  const PrimeContext& ctx() const noexcept { return a_.ctx(); }
  std::size_t prefix_length() const noexcept { return a_.prefix().size(); }

  /// Spectral operations need every b_i != 0 and a constant nonzero B tail;
  /// throws unsupported_tail_combination or zero_b_entry otherwise.
  void require_spectral_hypotheses() const;

 private:
  TailDiagonalOperator a_;
  TailDiagonalOperator b_;
};

/// One term c·p^(step·k) of a tail series; step 0 is a constant.
struct GeometricTerm {
  Rational coeff;
  std::int64_t step = 0;
};

/// A diagonal sequence: explicit prefix, then entries Σ_t c_t·p^(s_t·k) at
/// index prefix.size() + k. Closed under addition and scaling.
struct DiagonalSequence {
  std::vector<Rational> prefix;
  std::vector<GeometricTerm> tail;

  Rational entry(std::size_t i, const PrimeContext& ctx) const;

  /// Materializes entries up to length n, re-anchoring the tail.
  DiagonalSequence extended(std::size_t n, const PrimeContext& ctx) const;

  static DiagonalSequence from_operator(const TailDiagonalOperator& t);
};

DiagonalSequence add(const DiagonalSequence& x, const DiagonalSequence& y, const PrimeContext& ctx);
DiagonalSequence scale(const Rational& s, const DiagonalSequence& x);

struct ZeroCount {
  bool infinite = false;
  std::size_t count = 0;  // meaningful when finite

  bool any() const noexcept { return infinite || count > 0; }
};

struct TailStats {
  UltraNorm inf;          // inf_i |x_i|
  UltraNorm sup;          // sup_i |x_i|
  UltraNorm inf_nonzero;  // inf over nonzero entries; infinity if there are none
  UltraNorm limit;        // lim |x_i|; zero when entries tend to 0 or vanish
  ZeroCount zeros;
  std::vector<std::size_t> zero_indices;  // listed when finitely many
};

TailStats sequence_stats(const DiagonalSequence& x, const PrimeContext& ctx);

bool is_completely_continuous(const DiagonalSequence& x, const PrimeContext& ctx);

/// A − λB as a diagonal sequence.
DiagonalSequence residual(const TailDiagonalPencil& d, const Rational& lambda);

TailStats tail_inf_sup(const TailDiagonalPencil& d, const Rational& lambda);

bool seq_spectrum_membership(const TailDiagonalPencil& d, const Rational& lambda);
Kappa seq_kappa(const TailDiagonalPencil& d, const Rational& lambda);

/// Finitely many zero entries and the nonzero ones bounded away from 0.
bool is_fredholm_index0(const TailDiagonalPencil& d, const Rational& lambda);

/// Points where A − λB fails to be Fredholm of index 0: {c_A/c_B} for
/// constant tails, {0} for a geometric A tail.
std::vector<Rational> essential_spectrum(const TailDiagonalPencil& d);

/// y -> Σ coeff·y[functional_index]·e[target_index].
struct FiniteRankOp {
  struct Term {
    std::size_t functional_index = 0;
    std::size_t target_index = 0;
    Rational coeff;
  };
  std::vector<Term> terms;

  bool empty() const noexcept { return terms.empty(); }
  UltraNorm norm(const PrimeContext& ctx) const;
};

/// K supported on the zero coordinates Z of A − λB with λ ∉ σ(A+K, B). Empty
/// off the spectrum; throws essential_point on σ_e.
FiniteRankOp regularizer(const TailDiagonalPencil& d, const Rational& lambda);

struct DisjointnessCheck {
  bool kernels_meet_trivially = false;  // N(A−λB) ∩ N(K) = {0}
  bool ranges_meet_trivially = false;   // R(A−λB) ∩ R(K) = {0}
};

DisjointnessCheck regularizer_disjointness(const TailDiagonalPencil& d, const Rational& lambda,
                                           const FiniteRankOp& k);

struct PerturbedAnalysis {
  bool invertible = false;
  bool fredholm_index0 = false;
};

/// A + K_diag + K_fin − λB, decided exactly: the coordinates touched by K_fin
/// form a finite block (determinant), the rest stays diagonal.
PerturbedAnalysis analyze_perturbed(const TailDiagonalPencil& d, const Rational& lambda,
                                    const DiagonalSequence& k_diag, const FiniteRankOp& k_fin);

/// λ ∈ Λ_{e,ε}: infinitely many |a_i − λb_i| < ε‖A − λB‖.
bool essential_cond_pseudo_member(const TailDiagonalPencil& d, const Rational& lambda, const Epsilon& eps);

/// True when the eventual entry norm equals ε‖A − λB‖ exactly, where the
/// strict inequality decides membership.
bool essential_cond_pseudo_boundary(const TailDiagonalPencil& d, const Rational& lambda, const Epsilon& eps);

/// A diagonal C with ‖C‖ < ε‖A − λB‖ making A + C − λB non-Fredholm, when
/// one exists; C = 0 on σ_e.
std::optional<DiagonalSequence> essential_cond_pseudo_certificate(const TailDiagonalPencil& d,
                                                                   const Rational& lambda, const Epsilon& eps);

}  // namespace ultrapencil
