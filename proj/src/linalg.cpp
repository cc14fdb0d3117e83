#include "ultrapencil/linalg.hpp"

#include <string>

namespace ultrapencil {

namespace {

std::string shape(const UMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_square(const UMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(Errc::dimension_mismatch, "expected a nonempty square matrix, got " + shape(m));
  }
}

// Row in [from, rows) whose entry in column `col` has the largest norm; the
// first such row wins. Returns -1 when the column is zero below `from`.
Index ultra_pivot(const UMatrix& m, Index col, Index from, const PrimeContext& ctx) {
  Index best = -1;
  UltraNorm best_norm = UltraNorm::zero();
  for (Index i = from; i < m.rows(); ++i) {
    const UltraNorm n = abs(m(i, col), ctx);
    if (n > best_norm) {
      best = i;
      best_norm = n;
    }
  }
  return best;
}

}  // namespace

Rational Functional::operator()(const UVector& y) const {
  if (y.size() != coefficients.size()) {
    throw Error(Errc::dimension_mismatch, "functional of length " + std::to_string(coefficients.size()) +
                                              " applied to vector of length " + std::to_string(y.size()));
  }
  Rational s = 0;
  for (Index i = 0; i < y.size(); ++i) s += coefficients(i) * y(i);
  return s;
}

UMatrix identity(Index n) {
  UMatrix m = UMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

UMatrix diagonal(const std::vector<Rational>& entries) {
  const auto n = static_cast<Index>(entries.size());
  UMatrix m = UMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = entries[static_cast<std::size_t>(i)];
  return m;
}

UVector coordinate_vector(Index n, Index j) {
  UVector e = UVector::Zero(n);
  e(j) = 1;
  return e;
}

UMatrix mat_mul(const UMatrix& m, const UMatrix& n) {
  if (m.cols() != n.rows()) throw Error(Errc::dimension_mismatch, shape(m) + " * " + shape(n));
  return m * n;
}

UVector mat_vec(const UMatrix& m, const UVector& x) {
  if (m.cols() != x.size()) {
    throw Error(Errc::dimension_mismatch, shape(m) + " * vector of length " + std::to_string(x.size()));
  }
  return m * x;
}

UMatrix mat_add(const UMatrix& m, const UMatrix& n) {
  if (m.rows() != n.rows() || m.cols() != n.cols()) {
    throw Error(Errc::dimension_mismatch, shape(m) + " + " + shape(n));
  }
  return m + n;
}

UMatrix scalar_mul(const Rational& s, const UMatrix& m) { return s * m; }

Rational det(const UMatrix& m, const PrimeContext& ctx) {
  require_square(m);
  UMatrix work = m;
  const Index n = work.rows();
  Rational result = 1;
  for (Index k = 0; k < n; ++k) {
    const Index piv = ultra_pivot(work, k, k, ctx);
    if (piv < 0) return 0;
    if (piv != k) {
      work.row(k).swap(work.row(piv));
      result = -result;
    }
    const Rational pivot = work(k, k);
    result *= pivot;
    for (Index i = k + 1; i < n; ++i) {
      if (work(i, k) == 0) continue;
      const Rational factor = work(i, k) / pivot;
      for (Index j = k; j < n; ++j) work(i, j) -= factor * work(k, j);
    }
  }
  return result;
}

std::optional<UMatrix> inverse(const UMatrix& m, const PrimeContext& ctx) {
  require_square(m);
  const Index n = m.rows();
  UMatrix work(n, 2 * n);
  work.leftCols(n) = m;
  work.rightCols(n) = identity(n);
  for (Index k = 0; k < n; ++k) {
    const Index piv = ultra_pivot(work, k, k, ctx);
    if (piv < 0) return std::nullopt;
    if (piv != k) work.row(k).swap(work.row(piv));
    const Rational pivot = work(k, k);
    for (Index j = 0; j < 2 * n; ++j) work(k, j) /= pivot;
    for (Index i = 0; i < n; ++i) {
      if (i == k || work(i, k) == 0) continue;
      const Rational factor = work(i, k);
      for (Index j = 0; j < 2 * n; ++j) work(i, j) -= factor * work(k, j);
    }
  }
  return UMatrix(work.rightCols(n));
}

Index rank(const UMatrix& m, const PrimeContext& ctx) {
  UMatrix work = m;
  Index row = 0;
  for (Index col = 0; col < work.cols() && row < work.rows(); ++col) {
    const Index piv = ultra_pivot(work, col, row, ctx);
    if (piv < 0) continue;
    if (piv != row) work.row(row).swap(work.row(piv));
    const Rational pivot = work(row, col);
    for (Index i = row + 1; i < work.rows(); ++i) {
      if (work(i, col) == 0) continue;
      const Rational factor = work(i, col) / pivot;
      for (Index j = col; j < work.cols(); ++j) work(i, j) -= factor * work(row, j);
    }
    ++row;
  }
  return row;
}

}  // namespace ultrapencil
