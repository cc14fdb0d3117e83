#include "ultrapencil/diag_regions.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

#include "ultrapencil/io.hpp"
#include "ultrapencil/random.hpp"

namespace ultrapencil {

DiagonalPencil::DiagonalPencil(std::vector<Rational> a, std::vector<Rational> b, PrimeContext ctx)
    : a_(std::move(a)), b_(std::move(b)), ctx_(ctx) {
  if (a_.empty() || a_.size() != b_.size()) {
    throw Error(Errc::dimension_mismatch, "diagonal pencil needs equal nonempty diagonals");
  }
}

DiagonalPencil DiagonalPencil::from_pencil(const Pencil& p) {
  if (!is_diagonal(p.A()) || !is_diagonal(p.B())) {
    throw Error(Errc::non_diagonal_input, "exact regions need diagonal A and B");
  }
  std::vector<Rational> a, b;
  for (Index i = 0; i < p.dim(); ++i) {
    a.push_back(p.A()(i, i));
    b.push_back(p.B()(i, i));
  }
  return DiagonalPencil(std::move(a), std::move(b), p.ctx());
}

Pencil DiagonalPencil::to_pencil() const { return Pencil(diagonal(a_), diagonal(b_), ctx_); }

void DiagonalPencil::require_nonzero_b() const {
  for (std::size_t i = 0; i < b_.size(); ++i) {
    if (b_[i] == 0) throw Error(Errc::zero_b_entry, "b_" + std::to_string(i) + " = 0");
  }
}

std::vector<Rational> diag_spectrum(const DiagonalPencil& d) {
  d.require_nonzero_b();
  std::vector<Rational> out;
  for (std::size_t i = 0; i < d.size(); ++i) out.push_back(d.a()[i] / d.b()[i]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Kappa diag_kappa(const DiagonalPencil& d, const Rational& lambda) {
  UltraNorm sup = UltraNorm::zero();
  UltraNorm inf = UltraNorm::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const UltraNorm n = abs(d.a()[i] - lambda * d.b()[i], d.ctx());
    sup = std::max(sup, n);
    inf = std::min(inf, n);
  }
  if (sup.is_zero()) return {UltraNorm::infinity(), true};
  if (inf.is_zero()) return {UltraNorm::infinity(), false};
  return {sup * inf.reciprocal(), false};
}

UltraNorm diag_resolvent_norm(const DiagonalPencil& d, const Rational& lambda) {
  UltraNorm inf = UltraNorm::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) inf = std::min(inf, abs(d.a()[i] - lambda * d.b()[i], d.ctx()));
  return inf.reciprocal();
}

bool PBall::contains(const Rational& lambda, const PrimeContext& ctx) const {
  return abs(lambda - center, ctx) <= radius();
}

bool RegionDescription::contains(const Rational& lambda, const PrimeContext& ctx) const {
  if (std::find(points.begin(), points.end(), lambda) != points.end()) return true;
  const bool in_ball = std::any_of(balls.begin(), balls.end(), [&](const PBall& b) { return b.contains(lambda, ctx); });
  return in_ball != complement;
}

namespace {

struct CenterGroup {
  Rational z;
  std::int64_t vb_min = 0;  // smallest valuation of b_i among indices with center z
  std::int64_t vb_max = 0;
  std::vector<std::size_t> indices;
};

std::vector<CenterGroup> center_groups(const DiagonalPencil& d) {
  std::vector<CenterGroup> groups;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Rational z = d.a()[i] / d.b()[i];
    const std::int64_t vb = *valuation(d.b()[i], d.ctx());
    auto it = std::find_if(groups.begin(), groups.end(), [&](const CenterGroup& g) { return g.z == z; });
    if (it == groups.end()) {
      groups.push_back({z, vb, vb, {i}});
    } else {
      it->vb_min = std::min(it->vb_min, vb);
      it->vb_max = std::max(it->vb_max, vb);
      it->indices.push_back(i);
    }
  }
  return groups;
}

struct Piece {
  PBall ball;
  bool member = false;
};

// Walks the ball tree separating the centers. `member` decides the predicate
// at a point that is not a center; it is constant on each emitted piece.
class RegionBuilder {
 public:
  RegionBuilder(const DiagonalPencil& d, RegionKind kind, std::function<bool(const Rational&)> member)
      : d_(d), ctx_(d.ctx()), kind_(kind), groups_(center_groups(d)), member_(std::move(member)) {}

  RegionDescription build() {
    RegionDescription region;
    region.points = diag_spectrum(d_);
    if (groups_.size() == 1) return build_single_center(std::move(region));

    const Rational& z1 = groups_.front().z;
    std::int64_t top = INT64_MAX;
    for (std::size_t g = 1; g < groups_.size(); ++g) top = std::min(top, *valuation(groups_[g].z - z1, ctx_));

    // Outside the smallest ball holding every center all distances coincide,
    // so κ is constant there while the resolvent norm grows toward the ball.
    const bool outside = member_(z1 + ctx_.power(top - 1));
    if (outside && kind_ == RegionKind::pseudo) {
      std::int64_t j = top - 1;
      while (member_(z1 + ctx_.power(j - 1))) --j;
      region.balls.push_back({z1, j, true});
      return region;
    }
    std::vector<std::size_t> all(groups_.size());
    for (std::size_t g = 0; g < all.size(); ++g) all[g] = g;

    region.complement = outside;
    for (auto& piece : explore(z1, top, all)) {
      if (piece.member != outside) region.balls.push_back(std::move(piece.ball));
    }
    return region;
  }

 private:
  RegionDescription build_single_center(RegionDescription region) {
    const Rational& z = groups_.front().z;
    if (kind_ == RegionKind::condition) {
      // κ is the constant max|b_i| / min|b_i| off the center.
      region.complement = member_(z + 1);
      return region;
    }
    // The resolvent norm grows as λ approaches z: find the threshold shell.
    std::int64_t j = 0;
    if (member_(z + ctx_.power(j))) {
      while (member_(z + ctx_.power(j - 1))) --j;
    } else {
      j = first_member_shell(z, j);
    }
    if (j == kNever) return region;
    region.balls.push_back({z, j, true});
    return region;
  }

  static constexpr std::int64_t kNever = INT64_MIN;
  static constexpr std::int64_t kStepLimit = 1 << 16;

  std::int64_t first_member_shell(const Rational& z, std::int64_t from) {
    for (std::int64_t j = from; j < from + kStepLimit; ++j) {
      if (member_(z + ctx_.power(j))) return j;
    }
    return kNever;
  }

  std::vector<Piece> explore(const Rational& c, std::int64_t k, const std::vector<std::size_t>& inside) {
    std::vector<Piece> pieces;
    if (inside.empty()) {
      pieces.push_back({{c, k, true}, member_(c)});
      return pieces;
    }
    if (inside.size() == 1) return single(inside.front(), k);

    const Rational step = ctx_.power(k);
    for (std::int64_t u = 0; u < ctx_.prime(); ++u) {
      const Rational child = c + u * step;
      std::vector<std::size_t> sub;
      for (auto g : inside) {
        const auto v = valuation(groups_[g].z - child, ctx_);
        if (!v || *v >= k + 1) sub.push_back(g);
      }
      auto part = explore(child, k + 1, sub);
      pieces.insert(pieces.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return merge_if_uniform(c, k, std::move(pieces));
  }

  // Ball B(z, p^-k) whose only center is z: membership depends on the shell
  // |λ − z| = p^-j alone.
  std::vector<Piece> single(std::size_t gi, std::int64_t k) {
    const CenterGroup& g = groups_[gi];
    std::int64_t others_max = INT64_MIN;
    for (std::size_t h = 0; h < groups_.size(); ++h) {
      if (h == gi) continue;
      const std::int64_t dist = *valuation(g.z - groups_[h].z, ctx_);
      others_max = std::max(others_max, groups_[h].vb_max + dist);
    }
    // From shell j0 on, the entries belonging to z are the smallest ones and
    // membership is monotone in j.
    const std::int64_t j0 = std::max(k, others_max - g.vb_min);
    std::vector<bool> shell_member;
    for (std::int64_t j = k; j < j0; ++j) shell_member.push_back(member_(g.z + ctx_.power(j)));
    std::int64_t deep = first_member_shell(g.z, j0);
    if (deep == kNever) throw std::logic_error("membership never reached near a center");
    for (std::int64_t j = j0; j < deep; ++j) shell_member.push_back(false);
    while (deep > k && shell_member[static_cast<std::size_t>(deep - 1 - k)]) --deep;

    std::vector<Piece> pieces;
    pieces.push_back({{g.z, deep, true}, true});
    for (std::int64_t j = k; j < deep; ++j) {
      const bool m = shell_member[static_cast<std::size_t>(j - k)];
      for (std::int64_t u = 1; u < ctx_.prime(); ++u) {
        pieces.push_back({{g.z + u * ctx_.power(j), j + 1, true}, m});
      }
    }
    return merge_if_uniform(g.z, k, std::move(pieces));
  }

  static std::vector<Piece> merge_if_uniform(const Rational& c, std::int64_t k, std::vector<Piece> pieces) {
    const bool first = pieces.front().member;
    if (std::all_of(pieces.begin(), pieces.end(), [&](const Piece& p) { return p.member == first; })) {
      return {Piece{{c, k, true}, first}};
    }
    return pieces;
  }

  const DiagonalPencil& d_;
  const PrimeContext& ctx_;
  RegionKind kind_;
  std::vector<CenterGroup> groups_;
  std::function<bool(const Rational&)> member_;
};

std::function<bool(const Rational&)> off_spectrum_predicate(const DiagonalPencil& d, const Epsilon& eps,
                                                            RegionKind kind) {
  const Rational threshold = eps.reciprocal();
  if (kind == RegionKind::condition) {
    return [&d, threshold](const Rational& l) { return exceeds(diag_kappa(d, l).value, threshold, d.ctx()); };
  }
  return [&d, threshold](const Rational& l) { return exceeds(diag_resolvent_norm(d, l), threshold, d.ctx()); };
}

bool is_spectral(const DiagonalPencil& d, const Rational& lambda) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.a()[i] - lambda * d.b()[i] == 0) return true;
  }
  return false;
}

}  // namespace

RegionDescription cond_region(const DiagonalPencil& d, const Epsilon& eps) {
  d.require_nonzero_b();
  return RegionBuilder(d, RegionKind::condition, off_spectrum_predicate(d, eps, RegionKind::condition)).build();
}

RegionDescription pseudo_region(const DiagonalPencil& d, const Epsilon& eps) {
  d.require_nonzero_b();
  return RegionBuilder(d, RegionKind::pseudo, off_spectrum_predicate(d, eps, RegionKind::pseudo)).build();
}

std::vector<Rational> sample(const SampleGrid& grid, const PrimeContext& ctx) {
  Sampler rng(grid.seed);
  std::vector<Rational> out;
  std::set<Rational> seen;
  for (const auto& c : grid.centers) {
    for (std::int64_t v = grid.v_min; v <= grid.v_max; ++v) {
      const Rational scale = ctx.power(v);
      for (std::size_t s = 0; s < grid.per_shell; ++s) {
        Rational lambda = c + scale * Rational(rng.unit(ctx, grid.digits));
        if (seen.insert(lambda).second) out.push_back(std::move(lambda));
      }
    }
  }
  return out;
}

Report region_vs_predicate_audit(const DiagonalPencil& d, const RegionDescription& region, const Epsilon& eps,
                                 const SampleGrid& grid, RegionKind kind) {
  const auto member = off_spectrum_predicate(d, eps, kind);
  const auto points = sample(grid, d.ctx());
  Report report;
  std::size_t mismatches = 0;
  for (const auto& lambda : points) {
    const bool expected = is_spectral(d, lambda) || member(lambda);
    const bool got = region.contains(lambda, d.ctx());
    if (expected == got) continue;
    ++mismatches;
    CheckRecord r;
    r.check = "region-mismatch";
    r.lambda = lambda;
    r.kappa = diag_kappa(d, lambda);
    r.epsilon = eps.value();
    r.verdict = Verdict::fail;
    r.certificate = {{"region_says", got}, {"predicate_says", expected}};
    report.push_back(std::move(r));
  }
  CheckRecord summary;
  summary.check = "region-audit";
  summary.lambda = 0;
  summary.kappa = {};
  summary.epsilon = eps.value();
  summary.verdict = points.empty() ? Verdict::vacuous : (mismatches == 0 ? Verdict::pass : Verdict::fail);
  summary.certificate = {{"samples", points.size()}, {"mismatches", mismatches}};
  report.push_back(std::move(summary));
  return report;
}

}  // namespace ultrapencil
