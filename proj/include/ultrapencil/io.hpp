#pragma once

// JSON encodings of scalars, norms, matrices, pencils, regions and reports.
// Rationals always travel as "num/den" strings; integers are accepted on input.

#include <cstdint>
#include <optional>
#include <string_view>

#include <json.hpp>

#include "ultrapencil/diag_regions.hpp"
#include "ultrapencil/pencil.hpp"
#include "ultrapencil/seq_essential.hpp"

namespace ultrapencil {

using nlohmann::json;

/// Parses text, raising Errc::parse_error on malformed input.
json parse_json_text(std::string_view text);

json to_json(const Rational& x);
Rational rational_from_json(const json& j);

/// {"kind":"zero"}, {"kind":"ppow","v":k} or {"kind":"inf"}.
json to_json(const UltraNorm& n);
UltraNorm norm_from_json(const json& j);

json to_json(const Kappa& k);

/// {"p":5,"rows":[["1/1","0/1"],["0/1","2/1"]]}
json matrix_to_json(const UMatrix& m, const PrimeContext& ctx);
json vector_to_json(const UVector& v);

/// Accepts a matrix object or a bare list of rows.
UMatrix matrix_from_json(const json& j);

/// {"p":5,"A":{...},"B":{...}}; `p_override` wins over the file's prime.
Pencil pencil_from_json(const json& j, std::optional<std::int64_t> p_override = std::nullopt);
json to_json(const Pencil& p);

json to_json(const PBall& b);
json to_json(const RegionDescription& r);
RegionDescription region_from_json(const json& j);

/// {"p":5,"prefix_a":[...],"prefix_b":[...],"tail_a":{"kind":"const","c":"3/1"},"tail_b":{...}};
/// geometric tails read {"kind":"geometric","c":..,"step_v":k}.
TailDiagonalPencil tail_pencil_from_json(const json& j, std::optional<std::int64_t> p_override = std::nullopt);
json to_json(const TailDiagonalPencil& d);
json to_json(const TailRule& t);

json to_json(const DiagonalSequence& s);
json to_json(const FiniteRankOp& k);

json to_json(const CheckRecord& r);
json to_json(const Report& r);

}  // namespace ultrapencil
