#pragma once

#include "oracle.hpp"
#include "ultrapencil/linalg.hpp"

namespace support {

inline ultrapencil::UMatrix to_umatrix(const oracle::Mat& m) {
  const auto n = static_cast<ultrapencil::Index>(m.size());
  ultrapencil::UMatrix out(n, n);
  for (ultrapencil::Index i = 0; i < n; ++i) {
    for (ultrapencil::Index j = 0; j < n; ++j) {
      out(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

inline oracle::Mat to_mat(const ultrapencil::UMatrix& m) {
  oracle::Mat out(static_cast<std::size_t>(m.rows()), std::vector<oracle::Rational>(static_cast<std::size_t>(m.cols())));
  for (ultrapencil::Index i = 0; i < m.rows(); ++i) {
    for (ultrapencil::Index j = 0; j < m.cols(); ++j) {
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    }
  }
  return out;
}

/// The real value of a finite norm.
inline oracle::Rational value(const ultrapencil::UltraNorm& n, const ultrapencil::PrimeContext& ctx) {
  return *n.to_rational(ctx);
}

}  // namespace support
