#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ultrapencil {

enum class Errc {
  parse_error,
  dimension_mismatch,
  division_by_zero,
  not_prime,
  invalid_epsilon,
  non_diagonal_input,
  zero_b_entry,
  spectral_point,
  not_in_cond_pseudospectrum,
  zero_pencil_at_lambda,
  beta_zero,
  singular_matrix,
  noncommuting,
  lambda_zero,
  essential_point,
  unsupported_tail_combination,
};

std::string_view to_string(Errc code) noexcept;

// Input errors map to CLI exit code 2; everything else is a violated
// mathematical precondition (exit code 3).
bool is_input_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ultrapencil
