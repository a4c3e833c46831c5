#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace binrec {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Square sparse matrix in compressed-row form with sorted column indices.
/// Symmetric operators are stored in full (both triangles).
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Duplicate (row, col) entries are summed.
  static SparseMatrix from_triplets(std::size_t n, std::span<const Triplet> triplets);
  /// Symmetric matrix from one triangle's contributions. Each off-diagonal
  /// pair is given once (either orientation) and mirrored, so entry (i, j)
  /// and (j, i) are bit-identical.
  static SparseMatrix from_symmetric_triplets(std::size_t n, std::span<const Triplet> triplets);
  static SparseMatrix from_diagonal(std::span<const double> diag);

  std::size_t size() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }

  /// Stored value at (i, j), zero if not in the pattern.
  double entry(std::size_t i, std::size_t j) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;

  std::vector<double> diagonal() const;
  std::vector<double> row_sums() const;
  bool is_symmetric() const;

  /// Row-major dense copy; intended for small test systems.
  std::vector<double> to_dense() const;

  std::span<const std::size_t> row_offsets() const noexcept { return row_ptr_; }
  std::span<const int> column_indices() const noexcept { return cols_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> mutable_values() noexcept { return values_; }

  friend SparseMatrix add(double a, const SparseMatrix& A, double b, const SparseMatrix& B);

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

/// a A + b B, pattern is the union of both patterns.
SparseMatrix add(double a, const SparseMatrix& A, double b, const SparseMatrix& B);

SparseMatrix scaled(double a, const SparseMatrix& A);

/// A + diag(d)
SparseMatrix add_diagonal(const SparseMatrix& A, std::span<const double> d);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace binrec
