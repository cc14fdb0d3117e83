#include "ultrapencil/seq_essential.hpp"

#include <algorithm>
#include <map>

namespace ultrapencil {

TailRule TailRule::constant(Rational c) { return {Kind::constant, std::move(c), 0}; }

TailRule TailRule::geometric(Rational c, std::int64_t step_v) {
  if (step_v < 1) throw Error(Errc::parse_error, "geometric tail needs step_v >= 1");
  return {Kind::geometric, std::move(c), step_v};
}

TailDiagonalOperator::TailDiagonalOperator(std::vector<Rational> prefix, TailRule tail, PrimeContext ctx)
    : prefix_(std::move(prefix)), tail_(std::move(tail)), ctx_(ctx) {
  if (tail_.kind == TailRule::Kind::geometric && tail_.step_v < 1) {
    throw Error(Errc::parse_error, "geometric tail needs step_v >= 1");
  }
}

Rational TailDiagonalOperator::entry(std::size_t i) const {
  if (i < prefix_.size()) return prefix_[i];
  if (tail_.kind == TailRule::Kind::constant) return tail_.c;
  return tail_.c * ctx_.power(tail_.step_v * static_cast<std::int64_t>(i - prefix_.size()));
}

TailDiagonalOperator TailDiagonalOperator::padded(std::size_t n) const {
  if (n <= prefix_.size()) return *this;
  std::vector<Rational> prefix = prefix_;
  for (std::size_t i = prefix_.size(); i < n; ++i) prefix.push_back(entry(i));
  TailRule tail = tail_;
  if (tail.kind == TailRule::Kind::geometric) tail.c = entry(n);
  return TailDiagonalOperator(std::move(prefix), std::move(tail), ctx_);
}

bool is_completely_continuous(const TailDiagonalOperator& t) {
  return t.tail().kind == TailRule::Kind::geometric || t.tail().c == 0;
}

TailDiagonalPencil::TailDiagonalPencil(const TailDiagonalOperator& a, const TailDiagonalOperator& b)
    : a_(a.padded(std::max(a.prefix().size(), b.prefix().size()))),
      b_(b.padded(std::max(a.prefix().size(), b.prefix().size()))) {
  if (!(a.ctx() == b.ctx())) throw Error(Errc::dimension_mismatch, "A and B live over different primes");
}

void TailDiagonalPencil::require_spectral_hypotheses() const {
  if (b_.tail().kind != TailRule::Kind::constant || b_.tail().c == 0) {
    throw Error(Errc::unsupported_tail_combination, "B needs a constant nonzero tail");
  }
  for (std::size_t i = 0; i < b_.prefix().size(); ++i) {
    if (b_.prefix()[i] == 0) throw Error(Errc::zero_b_entry, "b_" + std::to_string(i) + " = 0");
  }
}

Rational DiagonalSequence::entry(std::size_t i, const PrimeContext& ctx) const {
  if (i < prefix.size()) return prefix[i];
  const auto k = static_cast<std::int64_t>(i - prefix.size());
  Rational s = 0;
  for (const auto& t : tail) s += t.coeff * ctx.power(t.step * k);
  return s;
}

DiagonalSequence DiagonalSequence::extended(std::size_t n, const PrimeContext& ctx) const {
  if (n <= prefix.size()) return *this;
  DiagonalSequence out;
  out.prefix = prefix;
  for (std::size_t i = prefix.size(); i < n; ++i) out.prefix.push_back(entry(i, ctx));
  const auto shift = static_cast<std::int64_t>(n - prefix.size());
  for (const auto& t : tail) out.tail.push_back({t.coeff * ctx.power(t.step * shift), t.step});
  return out;
}

DiagonalSequence DiagonalSequence::from_operator(const TailDiagonalOperator& t) {
  DiagonalSequence out;
  out.prefix = t.prefix();
  out.tail.push_back({t.tail().c, t.tail().kind == TailRule::Kind::constant ? 0 : t.tail().step_v});
  return out;
}

DiagonalSequence add(const DiagonalSequence& x, const DiagonalSequence& y, const PrimeContext& ctx) {
  const std::size_t n = std::max(x.prefix.size(), y.prefix.size());
  DiagonalSequence xe = x.extended(n, ctx);
  const DiagonalSequence ye = y.extended(n, ctx);
  for (std::size_t i = 0; i < n; ++i) xe.prefix[i] += ye.prefix[i];
  xe.tail.insert(xe.tail.end(), ye.tail.begin(), ye.tail.end());
  return xe;
}

DiagonalSequence scale(const Rational& s, const DiagonalSequence& x) {
  DiagonalSequence out = x;
  for (auto& e : out.prefix) e *= s;
  for (auto& t : out.tail) t.coeff *= s;
  return out;
}

namespace {

// Merges equal steps, drops vanishing terms, sorts by step.
std::vector<GeometricTerm> normalized(const std::vector<GeometricTerm>& terms) {
  std::map<std::int64_t, Rational> by_step;
  for (const auto& t : terms) by_step[t.step] += t.coeff;
  std::vector<GeometricTerm> out;
  for (const auto& [step, c] : by_step) {
    if (c != 0) out.push_back({c, step});
  }
  return out;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// First tail offset from which the slowest-decaying term strictly dominates
// every other one; the gap only widens afterwards.
std::int64_t dominance_offset(const std::vector<GeometricTerm>& terms, const PrimeContext& ctx) {
  const std::int64_t v0 = *valuation(terms[0].coeff, ctx);
  std::int64_t k = 0;
  for (std::size_t t = 1; t < terms.size(); ++t) {
    const std::int64_t vt = *valuation(terms[t].coeff, ctx);
    k = std::max(k, floor_div(v0 - vt, terms[t].step - terms[0].step) + 1);
  }
  return k;
}

struct Accumulator {
  UltraNorm sup = UltraNorm::zero();
  UltraNorm inf_nonzero = UltraNorm::infinity();
  std::vector<std::size_t> zeros;

  void visit(const Rational& x, std::size_t index, const PrimeContext& ctx) {
    if (x == 0) {
      zeros.push_back(index);
      return;
    }
    const UltraNorm n = abs(x, ctx);
    sup = std::max(sup, n);
    inf_nonzero = std::min(inf_nonzero, n);
  }
};

}  // namespace

TailStats sequence_stats(const DiagonalSequence& x, const PrimeContext& ctx) {
  Accumulator acc;
  for (std::size_t i = 0; i < x.prefix.size(); ++i) acc.visit(x.prefix[i], i, ctx);

  TailStats stats;
  const auto terms = normalized(x.tail);
  if (terms.empty()) {
    stats.sup = acc.sup;
    stats.inf_nonzero = acc.inf_nonzero;
    stats.limit = UltraNorm::zero();
    stats.zeros = {true, 0};
    stats.inf = UltraNorm::zero();
    return stats;
  }

  const DiagonalSequence tail_only{{}, terms};
  const std::int64_t dom = dominance_offset(terms, ctx);
  for (std::int64_t k = 0; k < dom; ++k) {
    const auto k_index = static_cast<std::size_t>(k);
    acc.visit(tail_only.entry(k_index, ctx), x.prefix.size() + k_index, ctx);
  }
  // From offset `dom` on, |entry_k| = p^-(v0 + s0·k), non-increasing in k.
  const std::int64_t v0 = *valuation(terms[0].coeff, ctx);
  const std::int64_t s0 = terms[0].step;
  acc.sup = std::max(acc.sup, UltraNorm::ppow(v0 + s0 * dom));
  stats.limit = s0 == 0 ? UltraNorm::ppow(v0) : UltraNorm::zero();
  acc.inf_nonzero = std::min(acc.inf_nonzero, stats.limit);

  stats.sup = acc.sup;
  stats.inf_nonzero = acc.inf_nonzero;
  stats.zeros = {false, acc.zeros.size()};
  stats.zero_indices = std::move(acc.zeros);
  stats.inf = stats.zeros.any() ? UltraNorm::zero() : stats.inf_nonzero;
  return stats;
}

bool is_completely_continuous(const DiagonalSequence& x, const PrimeContext& ctx) {
  return sequence_stats(x, ctx).limit.is_zero();
}

DiagonalSequence residual(const TailDiagonalPencil& d, const Rational& lambda) {
  return add(DiagonalSequence::from_operator(d.A()), scale(-lambda, DiagonalSequence::from_operator(d.B())),
             d.ctx());
}

TailStats tail_inf_sup(const TailDiagonalPencil& d, const Rational& lambda) {
  return sequence_stats(residual(d, lambda), d.ctx());
}

namespace {

bool spectral(const TailStats& s) { return s.zeros.any() || s.inf_nonzero.is_zero(); }
bool fredholm0(const TailStats& s) { return !s.zeros.infinite && !s.inf_nonzero.is_zero(); }

}  // namespace

bool seq_spectrum_membership(const TailDiagonalPencil& d, const Rational& lambda) {
  return spectral(tail_inf_sup(d, lambda));
}

Kappa seq_kappa(const TailDiagonalPencil& d, const Rational& lambda) {
  const TailStats s = tail_inf_sup(d, lambda);
  if (spectral(s)) return {UltraNorm::infinity(), s.sup.is_zero()};
  return {s.sup * s.inf.reciprocal(), false};
}

bool is_fredholm_index0(const TailDiagonalPencil& d, const Rational& lambda) {
  return fredholm0(tail_inf_sup(d, lambda));
}

std::vector<Rational> essential_spectrum(const TailDiagonalPencil& d) {
  d.require_spectral_hypotheses();
  if (d.A().tail().kind == TailRule::Kind::geometric) return {Rational(0)};
  return {d.A().tail().c / d.B().tail().c};
}

UltraNorm FiniteRankOp::norm(const PrimeContext& ctx) const {
  std::map<std::pair<std::size_t, std::size_t>, Rational> entries;
  for (const auto& t : terms) entries[{t.target_index, t.functional_index}] += t.coeff;
  UltraNorm best = UltraNorm::zero();
  for (const auto& [pos, c] : entries) best = std::max(best, abs(c, ctx));
  return best;
}

FiniteRankOp regularizer(const TailDiagonalPencil& d, const Rational& lambda) {
  d.require_spectral_hypotheses();
  const TailStats s = tail_inf_sup(d, lambda);
  if (!fredholm0(s)) {
    throw Error(Errc::essential_point, to_string(lambda) + " lies in the essential spectrum");
  }
  FiniteRankOp k;
  if (!s.zeros.any()) return k;
  // |u| = ‖A − λB‖ for every coordinate of the kernel.
  const Rational u = d.ctx().power(s.sup.exponent());
  for (auto i : s.zero_indices) k.terms.push_back({i, i, u});
  return k;
}

namespace {

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Index position(const std::vector<std::size_t>& v, std::size_t x) {
  return static_cast<Index>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
}

}  // namespace

DisjointnessCheck regularizer_disjointness(const TailDiagonalPencil& d, const Rational& lambda,
                                           const FiniteRankOp& k) {
  const PrimeContext& ctx = d.ctx();
  const TailStats s = tail_inf_sup(d, lambda);
  if (s.zeros.infinite) throw Error(Errc::essential_point, "kernel of A - lambda B is infinite dimensional");
  const auto& zeros = s.zero_indices;

  std::vector<std::size_t> targets, functionals;
  for (const auto& t : k.terms) {
    targets.push_back(t.target_index);
    functionals.push_back(t.functional_index);
  }
  targets = sorted_unique(std::move(targets));
  functionals = sorted_unique(std::move(functionals));

  // K restricted to the kernel: columns indexed by the zero coordinates.
  UMatrix on_kernel = UMatrix::Zero(static_cast<Index>(targets.size()), static_cast<Index>(zeros.size()));
  // Matrix of K over its own support, and its rows at the zero coordinates.
  UMatrix full = UMatrix::Zero(static_cast<Index>(targets.size()), static_cast<Index>(functionals.size()));
  for (const auto& t : k.terms) {
    const Index row = position(targets, t.target_index);
    full(row, position(functionals, t.functional_index)) += t.coeff;
    const auto z = std::find(zeros.begin(), zeros.end(), t.functional_index);
    if (z != zeros.end()) on_kernel(row, static_cast<Index>(z - zeros.begin())) += t.coeff;
  }
  UMatrix on_zero_rows = UMatrix::Zero(static_cast<Index>(zeros.size()), full.cols());
  for (std::size_t r = 0; r < zeros.size(); ++r) {
    const auto it = std::find(targets.begin(), targets.end(), zeros[r]);
    if (it != targets.end()) on_zero_rows.row(static_cast<Index>(r)) = full.row(static_cast<Index>(it - targets.begin()));
  }

  DisjointnessCheck out;
  out.kernels_meet_trivially = zeros.empty() || rank(on_kernel, ctx) == static_cast<Index>(zeros.size());
  // R(A − λB) = {y : y_i = 0 on the zero coordinates}, so R(K) meets it
  // trivially iff projecting R(K) onto those coordinates is injective.
  out.ranges_meet_trivially = full.size() == 0 || rank(on_zero_rows, ctx) == rank(full, ctx);
  return out;
}

PerturbedAnalysis analyze_perturbed(const TailDiagonalPencil& d, const Rational& lambda,
                                    const DiagonalSequence& k_diag, const FiniteRankOp& k_fin) {
  const PrimeContext& ctx = d.ctx();
  DiagonalSequence seq = add(residual(d, lambda), k_diag, ctx);

  std::vector<std::size_t> support;
  for (const auto& t : k_fin.terms) {
    support.push_back(t.functional_index);
    support.push_back(t.target_index);
  }
  support = sorted_unique(std::move(support));
  if (!support.empty()) seq = seq.extended(std::max(seq.prefix.size(), support.back() + 1), ctx);

  const auto n = static_cast<Index>(support.size());
  UMatrix block = UMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) block(i, i) = seq.prefix[support[static_cast<std::size_t>(i)]];
  for (const auto& t : k_fin.terms) block(position(support, t.target_index), position(support, t.functional_index)) += t.coeff;

  DiagonalSequence rest;
  rest.tail = seq.tail;
  for (std::size_t i = 0; i < seq.prefix.size(); ++i) {
    if (!std::binary_search(support.begin(), support.end(), i)) rest.prefix.push_back(seq.prefix[i]);
  }
  const TailStats s = sequence_stats(rest, ctx);

  PerturbedAnalysis out;
  out.fredholm_index0 = fredholm0(s);
  out.invertible = out.fredholm_index0 && !s.zeros.any() && (n == 0 || det(block, ctx) != 0);
  return out;
}

namespace {

Rational perturbation_bound(const TailStats& s, const Epsilon& eps, const PrimeContext& ctx) {
  if (s.sup.is_zero()) throw Error(Errc::zero_pencil_at_lambda, "A - lambda B vanishes identically");
  return eps.value() * *s.sup.to_rational(ctx);
}

}  // namespace

bool essential_cond_pseudo_member(const TailDiagonalPencil& d, const Rational& lambda, const Epsilon& eps) {
  const TailStats s = tail_inf_sup(d, lambda);
  const Rational bound = perturbation_bound(s, eps, d.ctx());
  if (s.zeros.infinite || s.limit.is_zero()) return true;
  return compare(s.limit, bound, d.ctx()) == std::strong_ordering::less;
}

bool essential_cond_pseudo_boundary(const TailDiagonalPencil& d, const Rational& lambda, const Epsilon& eps) {
  const TailStats s = tail_inf_sup(d, lambda);
  const Rational bound = perturbation_bound(s, eps, d.ctx());
  return s.limit.is_finite_nonzero() && compare(s.limit, bound, d.ctx()) == std::strong_ordering::equal;
}

std::optional<DiagonalSequence> essential_cond_pseudo_certificate(const TailDiagonalPencil& d,
                                                                   const Rational& lambda, const Epsilon& eps) {
  const PrimeContext& ctx = d.ctx();
  if (!essential_cond_pseudo_member(d, lambda, eps)) return std::nullopt;
  const DiagonalSequence m = residual(d, lambda);
  const TailStats s = sequence_stats(m, ctx);
  if (!fredholm0(s)) return DiagonalSequence{};

  // Cancel the tail from an offset where every remaining entry is small.
  const Rational bound = perturbation_bound(s, eps, ctx);
  const auto terms = normalized(m.tail);
  const std::int64_t v0 = *valuation(terms[0].coeff, ctx);
  std::int64_t start = dominance_offset(terms, ctx);
  while (compare(UltraNorm::ppow(v0 + terms[0].step * start), bound, ctx) != std::strong_ordering::less) ++start;

  DiagonalSequence c;
  c.prefix.assign(m.prefix.size() + static_cast<std::size_t>(start), Rational(0));
  for (const auto& t : terms) c.tail.push_back({-t.coeff * ctx.power(t.step * start), t.step});
  return c;
}

}  // namespace ultrapencil
