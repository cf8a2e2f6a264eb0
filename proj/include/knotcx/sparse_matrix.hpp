#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace knotcx {

/// Sparse vector keyed by index; no stored zeros.
using SparseVector = std::map<int, mpq_class>;

/// Sparse matrix over exact rationals, stored by columns.
class SparseRationalMatrix {
 public:
  SparseRationalMatrix() = default;
  SparseRationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), columns_(cols) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  /// Adds value to entry (row, col); entries that cancel to zero are erased.
  void add(int row, int col, const mpq_class& value);
  mpq_class at(int row, int col) const;
  const SparseVector& column(int col) const { return columns_.at(col); }
  std::size_t nonzeros() const;
  bool is_zero() const { return nonzeros() == 0; }

  SparseVector apply(const SparseVector& x) const;
  SparseRationalMatrix multiply(const SparseRationalMatrix& rhs) const;
  SparseRationalMatrix transpose() const;
  /// Entry (r, c) moves to (row_perm[r], col_perm[c]).
  SparseRationalMatrix permuted(const std::vector<int>& row_perm,
                                const std::vector<int>& col_perm) const;

  /// Exact rank by sparse elimination.
  int rank() const;
  /// Basis of the null space {x : A x = 0}, one vector per free column.
  std::vector<SparseVector> kernel_basis() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<SparseVector> columns_;
};

/// Incrementally maintained echelon basis of a subspace of Q^n. Each stored
/// row has a distinct leading index and leading coefficient 1.
class EchelonBasis {
 public:
  /// Reduces v against the basis; returns the remainder (zero if v is in the
  /// span).
  SparseVector reduce(SparseVector v) const;
  /// Inserts v if it is independent; returns whether it was.
  bool insert(SparseVector v);
  std::size_t dimension() const noexcept { return rows_.size(); }
  const std::map<int, SparseVector>& rows() const noexcept { return rows_; }

 private:
  std::map<int, SparseVector> rows_;  // leading index -> row
};

/// v += q * w
void axpy(SparseVector& v, const mpq_class& q, const SparseVector& w);

/// Scales v to coprime integers with a positive first entry.
SparseVector primitive_integer(const SparseVector& v);

}  // namespace knotcx
