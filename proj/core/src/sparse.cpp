#include "binrec/sparse.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace binrec {

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::span<const Triplet> triplets) {
  std::vector<Triplet> sorted(triplets.begin(), triplets.end());
  for (const auto& t : sorted) {
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= n ||
        static_cast<std::size_t>(t.col) >= n) {
      throw std::invalid_argument("SparseMatrix::from_triplets: index out of range");
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m;
  m.n_ = n;
  m.row_ptr_.assign(n + 1, 0);
  m.cols_.reserve(sorted.size());
  m.values_.reserve(sorted.size());
  for (std::size_t k = 0; k < sorted.size();) {
    const Triplet& t = sorted[k];
    double sum = 0.0;
    while (k < sorted.size() && sorted[k].row == t.row && sorted[k].col == t.col) {
      sum += sorted[k].value;
      ++k;
    }
    m.cols_.push_back(t.col);
    m.values_.push_back(sum);
    ++m.row_ptr_[t.row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
  return m;
}

SparseMatrix SparseMatrix::from_symmetric_triplets(std::size_t n,
                                                   std::span<const Triplet> upper) {
  std::vector<Triplet> half;
  half.reserve(upper.size());
  for (const auto& t : upper) {
    if (t.row <= t.col) {
      half.push_back(t);
    } else {
      half.push_back({t.col, t.row, t.value});
    }
  }
  const SparseMatrix summed = from_triplets(n, half);

  std::vector<Triplet> full;
  full.reserve(2 * summed.nonzeros());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = summed.row_ptr_[i]; k < summed.row_ptr_[i + 1]; ++k) {
      const int j = summed.cols_[k];
      full.push_back({static_cast<int>(i), j, summed.values_[k]});
      if (static_cast<std::size_t>(j) != i) full.push_back({j, static_cast<int>(i), summed.values_[k]});
    }
  }
  return from_triplets(n, full);
}

SparseMatrix SparseMatrix::from_diagonal(std::span<const double> diag) {
  SparseMatrix m;
  m.n_ = diag.size();
  m.row_ptr_.resize(m.n_ + 1);
  m.cols_.resize(m.n_);
  m.values_.assign(diag.begin(), diag.end());
  for (std::size_t i = 0; i <= m.n_; ++i) m.row_ptr_[i] = i;
  for (std::size_t i = 0; i < m.n_; ++i) m.cols_[i] = static_cast<int>(i);
  return m;
}

double SparseMatrix::entry(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("SparseMatrix::entry: index out of range");
  const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<int>(j));
  if (it == last || *it != static_cast<int>(j)) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) {
    throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[cols_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) d[i] = entry(i, i);
  return d;
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> s(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s[i] += values_[k];
  }
  return s;
}

bool SparseMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (entry(static_cast<std::size_t>(cols_[k]), i) != values_[k]) return false;
    }
  }
  return true;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d[i * n_ + cols_[k]] = values_[k];
  }
  return d;
}

SparseMatrix add(double a, const SparseMatrix& A, double b, const SparseMatrix& B) {
  if (A.n_ != B.n_) throw std::invalid_argument("add: dimension mismatch");
  SparseMatrix C;
  C.n_ = A.n_;
  C.row_ptr_.assign(C.n_ + 1, 0);
  C.cols_.reserve(std::max(A.nonzeros(), B.nonzeros()));
  C.values_.reserve(std::max(A.nonzeros(), B.nonzeros()));
  for (std::size_t i = 0; i < C.n_; ++i) {
    std::size_t ka = A.row_ptr_[i];
    std::size_t kb = B.row_ptr_[i];
    const std::size_t ea = A.row_ptr_[i + 1];
    const std::size_t eb = B.row_ptr_[i + 1];
    while (ka < ea || kb < eb) {
      const int ca = ka < ea ? A.cols_[ka] : std::numeric_limits<int>::max();
      const int cb = kb < eb ? B.cols_[kb] : std::numeric_limits<int>::max();
      if (ca == cb) {
        C.cols_.push_back(ca);
        C.values_.push_back(a * A.values_[ka++] + b * B.values_[kb++]);
      } else if (ca < cb) {
        C.cols_.push_back(ca);
        C.values_.push_back(a * A.values_[ka++]);
      } else {
        C.cols_.push_back(cb);
        C.values_.push_back(b * B.values_[kb++]);
      }
    }
    C.row_ptr_[i + 1] = C.cols_.size();
  }
  return C;
}

SparseMatrix scaled(double a, const SparseMatrix& A) {
  SparseMatrix C = A;
  for (double& v : C.mutable_values()) v *= a;
  return C;
}

SparseMatrix add_diagonal(const SparseMatrix& A, std::span<const double> d) {
  return add(1.0, A, 1.0, SparseMatrix::from_diagonal(d));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace binrec
