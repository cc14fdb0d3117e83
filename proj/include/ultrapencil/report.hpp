#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ultrapencil/padic.hpp"

namespace ultrapencil {

/// κ(λ) = ‖A−λB‖·‖(A−λB)⁻¹‖ as an exact norm value.
///
/// Infinite on the spectrum. `degenerate` marks the point where A−λB is the
/// zero matrix: it is spectral, but the product itself is 0·∞.
struct Kappa {
  UltraNorm value = UltraNorm::infinity();
  bool degenerate = false;

  bool is_infinite() const noexcept { return value.is_infinite(); }

  friend bool operator==(const Kappa&, const Kappa&) = default;
};

enum class Verdict { pass, fail, vacuous };

std::string_view to_string(Verdict v) noexcept;

struct CheckRecord {
  std::string check;
  Rational lambda;
  Kappa kappa;
  Rational epsilon;
  Verdict verdict = Verdict::pass;
  nlohmann::json certificate;  // null when there is nothing to certify
};

using Report = std::vector<CheckRecord>;

/// True when no record failed.
bool passed(const Report& report);

}  // namespace ultrapencil
