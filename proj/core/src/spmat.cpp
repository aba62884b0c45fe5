#include "chsp2/spmat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "chsp2/errors.hpp"

namespace chsp2 {

namespace {

const MatrixEntry* find_entry(const std::vector<MatrixEntry>& row, int col) {
  auto it = std::lower_bound(row.begin(), row.end(), col,
                             [](const MatrixEntry& e, int c) { return e.col < c; });
  if (it == row.end() || it->col != col) return nullptr;
  return &*it;
}

void insert_or_assign(std::vector<MatrixEntry>& row, int col, double value) {
  auto it = std::lower_bound(row.begin(), row.end(), col,
                             [](const MatrixEntry& e, int c) { return e.col < c; });
  if (it != row.end() && it->col == col) {
    it->value = value;
  } else {
    row.insert(it, MatrixEntry{col, value});
  }
}

}  // namespace

SymSparseMatrix::SymSparseMatrix(int n) : n_(n) {
  if (n < 0) throw validation_error("matrix dimension must be non-negative");
  rows_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rows_[static_cast<std::size_t>(i)].push_back(MatrixEntry{i, 0.0});
}

SymSparseMatrix SymSparseMatrix::from_triplets(int n, std::span<const std::tuple<int, int, double>> triplets) {
  if (n < 0) throw validation_error("matrix dimension must be non-negative");
  SymSparseMatrix m;
  m.n_ = n;
  m.rows_.resize(static_cast<std::size_t>(n));
  for (const auto& [i, j, v] : triplets) {
    if (i < 0 || i >= n || j < 0 || j >= n) throw validation_error("triplet index out of range");
    m.rows_[static_cast<std::size_t>(i)].push_back(MatrixEntry{j, v});
    if (i != j) m.rows_[static_cast<std::size_t>(j)].push_back(MatrixEntry{i, v});
  }
  for (int i = 0; i < n; ++i) {
    auto& row = m.rows_[static_cast<std::size_t>(i)];
    std::sort(row.begin(), row.end(), [](const MatrixEntry& a, const MatrixEntry& b) { return a.col < b.col; });
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k].col == row[k - 1].col) throw validation_error("duplicate entry in triplet list");
    }
    if (find_entry(row, i) == nullptr) insert_or_assign(row, i, 0.0);
  }
  return m;
}

std::span<const MatrixEntry> SymSparseMatrix::row(int i) const {
  check_index(i, i);
  return rows_[static_cast<std::size_t>(i)];
}

void SymSparseMatrix::check_index(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_) throw validation_error("matrix index out of range");
}

bool SymSparseMatrix::has(int i, int j) const {
  check_index(i, j);
  return find_entry(rows_[static_cast<std::size_t>(i)], j) != nullptr;
}

double SymSparseMatrix::get(int i, int j) const {
  check_index(i, j);
  const MatrixEntry* e = find_entry(rows_[static_cast<std::size_t>(i)], j);
  return e ? e->value : 0.0;
}

void SymSparseMatrix::set(int i, int j, double value) {
  check_index(i, j);
  insert_or_assign(rows_[static_cast<std::size_t>(i)], j, value);
  if (i != j) insert_or_assign(rows_[static_cast<std::size_t>(j)], i, value);
}

double SymSparseMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) {
    const MatrixEntry* e = find_entry(rows_[static_cast<std::size_t>(i)], i);
    t += e ? e->value : 0.0;
  }
  return t;
}

std::int64_t SymSparseMatrix::stored_entry_count() const {
  std::int64_t count = 0;
  for (int i = 0; i < n_; ++i) {
    for (const MatrixEntry& e : rows_[static_cast<std::size_t>(i)]) {
      if (e.col <= i) ++count;
    }
  }
  return count;
}

SymSparseMatrix square(const SymSparseMatrix& x) {
  const int n = x.n_;
  SymSparseMatrix out;
  out.n_ = n;
  out.rows_.resize(static_cast<std::size_t>(n));

  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  std::vector<char> mark(static_cast<std::size_t>(n), 0);
  std::vector<int> touched;
  touched.reserve(64);

  for (int i = 0; i < n; ++i) {
    touched.clear();
    for (const MatrixEntry& ik : x.rows_[static_cast<std::size_t>(i)]) {
      const double xik = ik.value;
      for (const MatrixEntry& kj : x.rows_[static_cast<std::size_t>(ik.col)]) {
        const int j = kj.col;
        if (!mark[static_cast<std::size_t>(j)]) {
          mark[static_cast<std::size_t>(j)] = 1;
          touched.push_back(j);
        }
        acc[static_cast<std::size_t>(j)] += xik * kj.value;
      }
    }
    std::sort(touched.begin(), touched.end());
    auto& row = out.rows_[static_cast<std::size_t>(i)];
    row.reserve(touched.size());
    for (int j : touched) {
      const double v = acc[static_cast<std::size_t>(j)];
      if (v != 0.0 || j == i) row.push_back(MatrixEntry{j, v});
      acc[static_cast<std::size_t>(j)] = 0.0;
      mark[static_cast<std::size_t>(j)] = 0;
    }
  }
  return out;
}

SymSparseMatrix axpby(double a, const SymSparseMatrix& x, double b, const SymSparseMatrix& y) {
  if (x.n_ != y.n_) throw validation_error("axpby operands differ in dimension");
  const int n = x.n_;
  SymSparseMatrix out;
  out.n_ = n;
  out.rows_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& xr = x.rows_[static_cast<std::size_t>(i)];
    const auto& yr = y.rows_[static_cast<std::size_t>(i)];
    auto& row = out.rows_[static_cast<std::size_t>(i)];
    row.reserve(std::max(xr.size(), yr.size()));
    std::size_t p = 0, q = 0;
    while (p < xr.size() || q < yr.size()) {
      int col;
      double v;
      if (q == yr.size() || (p < xr.size() && xr[p].col < yr[q].col)) {
        col = xr[p].col;
        v = a * xr[p].value;
        ++p;
      } else if (p == xr.size() || yr[q].col < xr[p].col) {
        col = yr[q].col;
        v = b * yr[q].value;
        ++q;
      } else {
        col = xr[p].col;
        v = a * xr[p].value + b * yr[q].value;
        ++p;
        ++q;
      }
      if (v != 0.0 || col == i) row.push_back(MatrixEntry{col, v});
    }
  }
  return out;
}

SymSparseMatrix threshold(const SymSparseMatrix& m, double tau) {
  if (tau < 0.0) throw validation_error("threshold must be non-negative");
  SymSparseMatrix out;
  out.n_ = m.n_;
  out.rows_.resize(m.rows_.size());
  for (int i = 0; i < m.n_; ++i) {
    const auto& src = m.rows_[static_cast<std::size_t>(i)];
    auto& dst = out.rows_[static_cast<std::size_t>(i)];
    dst.reserve(src.size());
    for (const MatrixEntry& e : src) {
      if (e.col == i || !(std::fabs(e.value) < tau)) dst.push_back(e);
    }
  }
  return out;
}

SymSparseMatrix threshold_recording(const SymSparseMatrix& m, double tau, std::vector<std::pair<int, int>>& dropped) {
  if (tau < 0.0) throw validation_error("threshold must be non-negative");
  SymSparseMatrix out;
  out.n_ = m.n_;
  out.rows_.resize(m.rows_.size());
  for (int i = 0; i < m.n_; ++i) {
    const auto& src = m.rows_[static_cast<std::size_t>(i)];
    auto& dst = out.rows_[static_cast<std::size_t>(i)];
    dst.reserve(src.size());
    for (const MatrixEntry& e : src) {
      if (e.col == i || !(std::fabs(e.value) < tau)) {
        dst.push_back(e);
      } else if (i < e.col) {
        dropped.emplace_back(i, e.col);
      }
    }
  }
  return out;
}

DenseMatrix to_dense(const SymSparseMatrix& m) {
  DenseMatrix d(m.size());
  for (int i = 0; i < m.size(); ++i) {
    for (const MatrixEntry& e : m.row(i)) d.at(i, e.col) = e.value;
  }
  return d;
}

double DenseMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += at(i, i);
  return t;
}

DenseMatrix square(const DenseMatrix& x) {
  const int n = x.size();
  DenseMatrix out(n);
  const double* a = x.data();
  double* c = out.data();
  for (int i = 0; i < n; ++i) {
    const double* ai = a + static_cast<std::size_t>(i) * n;
    double* ci = c + static_cast<std::size_t>(i) * n;
    for (int k = 0; k < n; ++k) {
      const double aik = ai[k];
      if (aik == 0.0) continue;
      const double* ak = a + static_cast<std::size_t>(k) * n;
      for (int j = 0; j < n; ++j) ci[j] += aik * ak[j];
    }
  }
  return out;
}

void threshold_in_place(DenseMatrix& m, double tau) {
  if (tau < 0.0) throw validation_error("threshold must be non-negative");
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i && std::fabs(m.at(i, j)) < tau) m.at(i, j) = 0.0;
    }
  }
}

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

struct LineReader {
  std::ifstream in;
  std::string path;
  std::size_t lineno = 0;

  explicit LineReader(const std::string& p) : in(p), path(p) {}

  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw parse_error(path + ":" + std::to_string(lineno) + ": " + what);
  }
};

}  // namespace

SymSparseMatrix load_matrix_market(const std::string& path) {
  LineReader r(path);
  if (!r.in) throw parse_error("cannot open '" + path + "'");

  std::string line;
  if (!r.next(line)) throw parse_error(path + ": empty file");
  {
    std::istringstream h(line);
    std::string banner, object, format, field, symmetry;
    h >> banner >> object >> format >> field >> symmetry;
    if (lower(banner) != "%%matrixmarket") r.fail("malformed header: expected '%%MatrixMarket'");
    if (lower(object) != "matrix" || lower(format) != "coordinate")
      r.fail("unsupported layout '" + object + " " + format + "': expected 'matrix coordinate'");
    if (lower(field) != "real") r.fail("unsupported field '" + field + "': expected 'real'");
    if (lower(symmetry) != "symmetric")
      r.fail("matrix declared '" + symmetry + "': only symmetric matrices are supported");
  }

  long long n = 0, ncols = 0, nnz = 0;
  for (;;) {
    if (!r.next(line)) throw parse_error(path + ": missing size line");
    if (!line.empty() && line[0] == '%') continue;
    if (blank(line)) continue;
    std::istringstream s(line);
    if (!(s >> n >> ncols >> nnz)) r.fail("malformed size line");
    std::string rest;
    if (s >> rest) r.fail("malformed size line: trailing data");
    break;
  }
  if (n != ncols) r.fail("matrix is " + std::to_string(n) + "x" + std::to_string(ncols) + ": must be square");
  if (n < 0 || nnz < 0) r.fail("negative sizes");
  if (n > (1 << 28)) r.fail("dimension too large");

  std::vector<std::tuple<int, int, double>> trips;
  trips.reserve(static_cast<std::size_t>(nnz));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(nnz) * 2);

  long long read_entries = 0;
  while (read_entries < nnz) {
    if (!r.next(line)) throw parse_error(path + ": unexpected end of file: expected " + std::to_string(nnz) +
                                         " entries, found " + std::to_string(read_entries));
    if (!line.empty() && line[0] == '%') continue;
    if (blank(line)) continue;
    std::istringstream s(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(s >> i >> j >> v)) r.fail("malformed entry line");
    std::string rest;
    if (s >> rest) r.fail("malformed entry line: trailing data");
    if (i < 1 || i > n || j < 1 || j > n) r.fail("index (" + std::to_string(i) + "," + std::to_string(j) +
                                                 ") out of range for dimension " + std::to_string(n));
    const long long a = std::min(i, j) - 1, b = std::max(i, j) - 1;
    const std::uint64_t key = static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(n) +
                              static_cast<std::uint64_t>(b);
    if (!seen.insert(key).second) r.fail("duplicate entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    ++read_entries;
  }
  while (r.next(line)) {
    if (!line.empty() && line[0] == '%') continue;
    if (blank(line)) continue;
    r.fail("trailing data after " + std::to_string(nnz) + " entries");
  }

  return SymSparseMatrix::from_triplets(static_cast<int>(n), trips);
}

void save_matrix_market(const SymSparseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << m.size() << " " << m.size() << " " << m.stored_entry_count() << "\n";
  char buf[80];
  for (int i = 0; i < m.size(); ++i) {
    for (const MatrixEntry& e : m.row(i)) {
      if (e.col > i) break;
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, e.col + 1, e.value);
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace chsp2
