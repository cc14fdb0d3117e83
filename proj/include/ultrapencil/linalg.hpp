#pragma once

// Dense linear algebra over exact p-adic scalars with the sup norm.
//
// Matrices are plain Eigen matrices of Rational; the free functions below
// accept any Eigen expression. For the sup norm on K^n the induced operator
// norm of M is max_ij |m_ij|, attained on a coordinate vector.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/eigen.hpp>

#include "ultrapencil/padic.hpp"

namespace ultrapencil {

using UMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using UVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

/// Largest entry norm of any matrix or vector expression.
template <typename Derived>
UltraNorm max_entry_norm(const Eigen::MatrixBase<Derived>& m, const PrimeContext& ctx) {
  UltraNorm best = UltraNorm::zero();
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      const UltraNorm n = abs(Rational(m(i, j)), ctx);
      if (n > best) best = n;
    }
  }
  return best;
}

template <typename Derived>
UltraNorm vec_norm(const Eigen::MatrixBase<Derived>& v, const PrimeContext& ctx) {
  return max_entry_norm(v, ctx);
}

template <typename Derived>
UltraNorm op_norm(const Eigen::MatrixBase<Derived>& m, const PrimeContext& ctx) {
  return max_entry_norm(m, ctx);
}

template <typename Derived>
bool is_zero(const Eigen::MatrixBase<Derived>& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != 0) return false;
    }
  }
  return true;
}

template <typename Derived>
bool is_diagonal(const Eigen::MatrixBase<Derived>& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != 0) return false;
    }
  }
  return true;
}

/// Row functional y -> sum_i c_i y_i. Its dual sup norm is max_i |c_i|.
struct Functional {
  UVector coefficients;

  Rational operator()(const UVector& y) const;
  UltraNorm norm(const PrimeContext& ctx) const { return vec_norm(coefficients, ctx); }
};

UMatrix identity(Index n);
UMatrix diagonal(const std::vector<Rational>& entries);
UVector coordinate_vector(Index n, Index j);

// Checked arithmetic; Eigen itself only asserts on shape mismatches.
UMatrix mat_mul(const UMatrix& m, const UMatrix& n);
UVector mat_vec(const UMatrix& m, const UVector& x);
UMatrix mat_add(const UMatrix& m, const UMatrix& n);
UMatrix scalar_mul(const Rational& s, const UMatrix& m);

/// Exact determinant by elimination with ultrametric pivoting.
Rational det(const UMatrix& m, const PrimeContext& ctx);

/// Exact inverse, or std::nullopt when m is singular. Pivots on the entry of
/// largest p-adic norm in the current column, lowest row index on ties.
std::optional<UMatrix> inverse(const UMatrix& m, const PrimeContext& ctx);

/// Exact rank of a (possibly rectangular) matrix.
Index rank(const UMatrix& m, const PrimeContext& ctx);

}  // namespace ultrapencil
