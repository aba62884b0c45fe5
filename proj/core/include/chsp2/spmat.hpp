#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace chsp2 {

struct MatrixEntry {
  int col = 0;
  double value = 0.0;

  bool operator==(const MatrixEntry&) const = default;
};

// Symmetric sparse matrix with an explicitly stored diagonal. Both (i,j) and
// (j,i) are kept internally so rows can be iterated directly; the diagonal
// entry of every row is structural: it exists even when its value is zero,
// so the sparsity graph always carries one self-loop per vertex.
class SymSparseMatrix {
 public:
  SymSparseMatrix() = default;
  explicit SymSparseMatrix(int n);

  // Each unordered pair may appear once (either triangle). Missing diagonal
  // entries are inserted with value 0.
  static SymSparseMatrix from_triplets(int n, std::span<const std::tuple<int, int, double>> triplets);

  int size() const { return n_; }

  // Entries of row i sorted by column; the diagonal is always present.
  std::span<const MatrixEntry> row(int i) const;

  bool has(int i, int j) const;
  double get(int i, int j) const;   // 0 when the entry is absent
  void set(int i, int j, double value);  // assigns (i,j) and (j,i)

  double trace() const;

  // Stored entries counted once per unordered pair (diagonal included);
  // this is what the coordinate file format declares.
  std::int64_t stored_entry_count() const;

  bool operator==(const SymSparseMatrix&) const = default;

 private:
  void check_index(int i, int j) const;

  int n_ = 0;
  std::vector<std::vector<MatrixEntry>> rows_;

  friend SymSparseMatrix square(const SymSparseMatrix&);
  friend SymSparseMatrix axpby(double, const SymSparseMatrix&, double, const SymSparseMatrix&);
  friend SymSparseMatrix threshold(const SymSparseMatrix&, double);
  friend SymSparseMatrix threshold_recording(const SymSparseMatrix&, double, std::vector<std::pair<int, int>>&);
};

// Dense square matrix, row-major.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(int n) : n_(n), values_(static_cast<std::size_t>(n) * n, 0.0) {}

  int size() const { return n_; }
  double& at(int i, int j) { return values_[static_cast<std::size_t>(i) * n_ + j]; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * n_ + j]; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double trace() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<double> values_;
};

// X*X. Accumulation order is fixed (rows ascending, contributions by
// ascending intermediate index), so results are reproducible bit for bit
// and bitwise symmetric. Exact zeros off the diagonal are dropped.
SymSparseMatrix square(const SymSparseMatrix& x);

// a*X + b*Y over the merged pattern. Exact zeros off the diagonal are dropped.
SymSparseMatrix axpby(double a, const SymSparseMatrix& x, double b, const SymSparseMatrix& y);

// Removes every off-diagonal entry with |value| < tau. Diagonal entries
// survive regardless of magnitude; tau = 0 is the identity.
SymSparseMatrix threshold(const SymSparseMatrix& m, double tau);

// Same as threshold, appending each dropped pair (i < j) to `dropped`.
SymSparseMatrix threshold_recording(const SymSparseMatrix& m, double tau, std::vector<std::pair<int, int>>& dropped);

DenseMatrix to_dense(const SymSparseMatrix& m);

// Dense X*X with a fixed i-k-j loop order (zero rows skipped; skipping a
// zero contribution leaves IEEE sums unchanged here since no partial sum
// can be negative zero).
DenseMatrix square(const DenseMatrix& x);

// Zeroes off-diagonal entries with |value| < tau in place.
void threshold_in_place(DenseMatrix& m, double tau);

// Matrix Market coordinate real symmetric, 1-based indices. The writer emits
// the lower triangle with 17 significant digits so values round-trip exactly.
SymSparseMatrix load_matrix_market(const std::string& path);
void save_matrix_market(const SymSparseMatrix& m, const std::string& path);

}  // namespace chsp2
