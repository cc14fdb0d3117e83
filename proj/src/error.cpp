#include "ultrapencil/error.hpp"

namespace ultrapencil {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::parse_error: return "parse-error";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::division_by_zero: return "division-by-zero";
    case Errc::not_prime: return "not-prime";
    case Errc::invalid_epsilon: return "invalid-epsilon";
    case Errc::non_diagonal_input: return "non-diagonal-input";
    case Errc::zero_b_entry: return "zero-b-entry";
    case Errc::spectral_point: return "spectral-point";
    case Errc::not_in_cond_pseudospectrum: return "not-in-cond-pseudospectrum";
    case Errc::zero_pencil_at_lambda: return "zero-pencil-at-lambda";
    case Errc::beta_zero: return "beta-zero";
    case Errc::singular_matrix: return "singular-matrix";
    case Errc::noncommuting: return "noncommuting";
    case Errc::lambda_zero: return "lambda-zero";
    case Errc::essential_point: return "essential-point";
    case Errc::unsupported_tail_combination: return "unsupported-tail-combination";
  }
  return "unknown";
}

bool is_input_error(Errc code) noexcept {
  switch (code) {
    case Errc::parse_error:
    case Errc::dimension_mismatch:
    case Errc::not_prime:
    case Errc::invalid_epsilon:
    case Errc::non_diagonal_input:
    case Errc::unsupported_tail_combination:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace ultrapencil
