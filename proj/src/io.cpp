#include "ultrapencil/io.hpp"

#include <string>

namespace ultrapencil {

namespace {

// nlohmann raises its own exception types on missing keys and type mismatches.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string(what) + ": " + e.what());
  }
}

PrimeContext prime_from(const json& j, std::optional<std::int64_t> p_override) {
  if (p_override) return PrimeContext(*p_override);
  if (!j.is_object() || !j.contains("p")) throw Error(Errc::parse_error, "missing prime \"p\"");
  return PrimeContext(j.at("p").get<std::int64_t>());
}

std::vector<Rational> rationals_from_json(const json& j) {
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(rational_from_json(x));
  return out;
}

json rationals_to_json(const std::vector<Rational>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(to_json(x));
  return out;
}

TailRule tail_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const Rational c = rational_from_json(j.at("c"));
  if (kind == "const" || kind == "constant") return TailRule::constant(c);
  if (kind == "geometric") return TailRule::geometric(c, j.at("step_v").get<std::int64_t>());
  throw Error(Errc::parse_error, "unknown tail kind \"" + kind + "\"");
}

}  // namespace

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

json to_json(const Rational& x) { return to_string(x); }

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw Error(Errc::parse_error, "expected a rational string or integer, got " + j.dump());
}

json to_json(const UltraNorm& n) {
  switch (n.kind()) {
    case UltraNorm::Kind::zero: return {{"kind", "zero"}};
    case UltraNorm::Kind::infinity: return {{"kind", "inf"}};
    case UltraNorm::Kind::ppow: break;
  }
  return {{"kind", "ppow"}, {"v", n.exponent()}};
}

UltraNorm norm_from_json(const json& j) {
  return guarded("norm", [&] {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "zero") return UltraNorm::zero();
    if (kind == "inf") return UltraNorm::infinity();
    if (kind == "ppow") return UltraNorm::ppow(j.at("v").get<std::int64_t>());
    throw Error(Errc::parse_error, "unknown norm kind \"" + kind + "\"");
  });
}

json to_json(const Kappa& k) {
  json out = to_json(k.value);
  out["degenerate"] = k.degenerate;
  return out;
}

json matrix_to_json(const UMatrix& m, const PrimeContext& ctx) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"p", ctx.prime()}, {"rows", std::move(rows)}};
}

json vector_to_json(const UVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

UMatrix matrix_from_json(const json& j) {
  return guarded("matrix", [&] {
    const json& rows = j.is_object() ? j.at("rows") : j;
    if (!rows.is_array()) throw Error(Errc::parse_error, "matrix rows must be a list");
    const auto n = static_cast<Index>(rows.size());
    const auto cols = n == 0 ? Index{0} : static_cast<Index>(rows.at(0).size());
    UMatrix m(n, cols);
    for (Index i = 0; i < n; ++i) {
      const json& row = rows.at(static_cast<std::size_t>(i));
      if (!row.is_array()) throw Error(Errc::parse_error, "matrix row must be a list");
      if (static_cast<Index>(row.size()) != cols) {
        throw Error(Errc::dimension_mismatch, "ragged matrix: row " + std::to_string(i) + " has " +
                                                  std::to_string(row.size()) + " entries, expected " +
                                                  std::to_string(cols));
      }
      for (Index k = 0; k < cols; ++k) m(i, k) = rational_from_json(row.at(static_cast<std::size_t>(k)));
    }
    return m;
  });
}

Pencil pencil_from_json(const json& j, std::optional<std::int64_t> p_override) {
  return guarded("pencil", [&] {
    const PrimeContext ctx = prime_from(j, p_override);
    return Pencil(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")), ctx);
  });
}

json to_json(const Pencil& p) {
  return {{"p", p.ctx().prime()}, {"A", matrix_to_json(p.A(), p.ctx())}, {"B", matrix_to_json(p.B(), p.ctx())}};
}

json to_json(const PBall& b) {
  return {{"center", to_json(b.center)}, {"radius_v", b.radius_v}, {"closed", b.closed}};
}

json to_json(const RegionDescription& r) {
  json balls = json::array();
  for (const auto& b : r.balls) balls.push_back(to_json(b));
  return {{"points", rationals_to_json(r.points)}, {"balls", std::move(balls)}, {"complement", r.complement}};
}

RegionDescription region_from_json(const json& j) {
  return guarded("region", [&] {
    RegionDescription r;
    r.points = rationals_from_json(j.at("points"));
    for (const auto& b : j.at("balls")) {
      r.balls.push_back({rational_from_json(b.at("center")), b.at("radius_v").get<std::int64_t>(),
                         b.value("closed", true)});
    }
    r.complement = j.value("complement", false);
    return r;
  });
}

TailDiagonalPencil tail_pencil_from_json(const json& j, std::optional<std::int64_t> p_override) {
  return guarded("tail pencil", [&] {
    const PrimeContext ctx = prime_from(j, p_override);
    TailDiagonalOperator a(rationals_from_json(j.at("prefix_a")), tail_from_json(j.at("tail_a")), ctx);
    TailDiagonalOperator b(rationals_from_json(j.at("prefix_b")), tail_from_json(j.at("tail_b")), ctx);
    return TailDiagonalPencil(a, b);
  });
}

json to_json(const TailRule& t) {
  if (t.kind == TailRule::Kind::constant) return {{"kind", "const"}, {"c", to_json(t.c)}};
  return {{"kind", "geometric"}, {"c", to_json(t.c)}, {"step_v", t.step_v}};
}

json to_json(const TailDiagonalPencil& d) {
  return {{"p", d.ctx().prime()},
          {"prefix_a", rationals_to_json(d.A().prefix())},
          {"prefix_b", rationals_to_json(d.B().prefix())},
          {"tail_a", to_json(d.A().tail())},
          {"tail_b", to_json(d.B().tail())}};
}

json to_json(const DiagonalSequence& s) {
  json tail = json::array();
  for (const auto& t : s.tail) tail.push_back({{"c", to_json(t.coeff)}, {"step_v", t.step}});
  return {{"prefix", rationals_to_json(s.prefix)}, {"tail", std::move(tail)}};
}

json to_json(const FiniteRankOp& k) {
  json terms = json::array();
  for (const auto& t : k.terms) {
    terms.push_back({{"functional_index", t.functional_index}, {"target_index", t.target_index}, {"coeff", to_json(t.coeff)}});
  }
  return {{"terms", std::move(terms)}};
}

json to_json(const CheckRecord& r) {
  json out = {{"check", r.check},
              {"lambda", to_json(r.lambda)},
              {"kappa", to_json(r.kappa)},
              {"epsilon", to_json(r.epsilon)},
              {"verdict", std::string(to_string(r.verdict))}};
  if (!r.certificate.is_null()) out["certificate"] = r.certificate;
  return out;
}

json to_json(const Report& r) {
  json out = json::array();
  for (const auto& rec : r) out.push_back(to_json(rec));
  return out;
}

}  // namespace ultrapencil
