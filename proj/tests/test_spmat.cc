#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "chsp2/errors.hpp"
#include "chsp2/spmat.hpp"
#include "test_support.hpp"

using namespace chsp2;

TEST_CASE("construction keeps a structural diagonal") {
  SymSparseMatrix m(3);
  CHECK(m.size() == 3);
  CHECK(m.stored_entry_count() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(m.has(i, i));
    CHECK(m.get(i, i) == 0.0);
    CHECK(m.row(i).size() == 1);
  }
  CHECK(m.trace() == 0.0);
}

TEST_CASE("from_triplets mirrors and sorts") {
  std::vector<std::tuple<int, int, double>> t = {{2, 0, -1.5}, {1, 1, 4.0}, {0, 1, 2.0}};
  SymSparseMatrix m = SymSparseMatrix::from_triplets(3, t);
  CHECK(m.get(0, 1) == 2.0);
  CHECK(m.get(1, 0) == 2.0);
  CHECK(m.get(2, 0) == -1.5);
  CHECK(m.get(0, 2) == -1.5);
  CHECK(m.get(1, 1) == 4.0);
  CHECK(m.get(0, 0) == 0.0);  // diagonal filled in
  CHECK(m.get(2, 2) == 0.0);
  CHECK(m.get(1, 2) == 0.0);  // absent
  CHECK(!m.has(1, 2));
  CHECK(m.stored_entry_count() == 5);  // 3 diagonal + 2 pairs

  auto r0 = m.row(0);
  for (std::size_t k = 1; k < r0.size(); ++k) CHECK(r0[k - 1].col < r0[k].col);

  CHECK_THROWS_AS(SymSparseMatrix::from_triplets(3, std::vector<std::tuple<int, int, double>>{{0, 3, 1.0}}),
                  validation_error);
  CHECK_THROWS_AS(
      SymSparseMatrix::from_triplets(3, std::vector<std::tuple<int, int, double>>{{0, 1, 1.0}, {1, 0, 2.0}}),
      validation_error);
}

TEST_CASE("set writes both triangles") {
  SymSparseMatrix m(4);
  m.set(1, 3, -2.5);
  CHECK(m.get(3, 1) == -2.5);
  m.set(3, 1, 7.0);
  CHECK(m.get(1, 3) == 7.0);
  m.set(2, 2, 9.0);
  CHECK(m.trace() == 9.0);
  CHECK_THROWS_AS(m.set(0, 4, 1.0), validation_error);
  CHECK_THROWS_AS(m.get(-1, 0), validation_error);
}

TEST_CASE("sparse square matches a dense reference") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + testsup::index_draw(rng, 30);
    const SymSparseMatrix x = testsup::random_sparse_symmetric(n, 0.2, rng);
    const DenseMatrix ref = testsup::dense_mul_ref(to_dense(x), to_dense(x));
    CHECK(testsup::max_abs_diff(square(x), ref) == 0.0);
  }
}

TEST_CASE("square result is symmetric entry for entry") {
  std::mt19937_64 rng(12);
  const SymSparseMatrix x = testsup::random_sparse_symmetric(40, 0.15, rng);
  const SymSparseMatrix y = square(x);
  for (int i = 0; i < y.size(); ++i)
    for (const MatrixEntry& e : y.row(i)) {
      CHECK(y.has(e.col, i));
      CHECK(y.get(e.col, i) == e.value);
    }
}

TEST_CASE("dense square matches the reference multiply") {
  std::mt19937_64 rng(13);
  const SymSparseMatrix x = testsup::random_sparse_symmetric(25, 0.3, rng);
  const DenseMatrix d = to_dense(x);
  CHECK(testsup::max_abs_diff(square(d), testsup::dense_mul_ref(d, d)) == 0.0);
}

TEST_CASE("axpby merges patterns and evaluates exactly") {
  std::mt19937_64 rng(14);
  const SymSparseMatrix x = testsup::random_sparse_symmetric(20, 0.2, rng);
  const SymSparseMatrix x2 = square(x);
  const SymSparseMatrix d = axpby(2.0, x, -1.0, x2);

  const DenseMatrix dx = to_dense(x);
  const DenseMatrix dx2 = to_dense(x2);
  DenseMatrix ref(20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) ref.at(i, j) = 2.0 * dx.at(i, j) - dx2.at(i, j);
  CHECK(testsup::max_abs_diff(d, ref) == 0.0);
}

TEST_CASE("axpby drops exact zeros off the diagonal") {
  std::mt19937_64 rng(15);
  const SymSparseMatrix x = testsup::random_sparse_symmetric(10, 0.4, rng);
  const SymSparseMatrix z = axpby(1.0, x, -1.0, x);
  CHECK(z.stored_entry_count() == 10);  // diagonal only
  CHECK(z.trace() == 0.0);
}

TEST_CASE("threshold removes small off-diagonal entries only") {
  SymSparseMatrix m = SymSparseMatrix::from_triplets(
      4, std::vector<std::tuple<int, int, double>>{
             {0, 0, 1e-9}, {0, 1, 0.5}, {0, 2, -1e-7}, {1, 2, 1e-7}, {2, 3, -0.3}});
  const SymSparseMatrix t = threshold(m, 1e-6);
  CHECK(t.has(0, 0));  // tiny diagonal survives
  CHECK(t.get(0, 0) == 1e-9);
  CHECK(t.has(0, 1));
  CHECK(!t.has(0, 2));
  CHECK(!t.has(1, 2));
  CHECK(t.has(2, 3));

  CHECK(threshold(m, 0.0) == m);

  std::vector<std::pair<int, int>> dropped;
  const SymSparseMatrix t2 = threshold_recording(m, 1e-6, dropped);
  CHECK(t2 == t);
  REQUIRE(dropped.size() == 2);
  CHECK(dropped[0] == std::pair<int, int>{0, 2});
  CHECK(dropped[1] == std::pair<int, int>{1, 2});
}

TEST_CASE("dense threshold agrees with sparse threshold") {
  std::mt19937_64 rng(16);
  const SymSparseMatrix x = square(testsup::random_sparse_symmetric(15, 0.2, rng));
  DenseMatrix d = to_dense(x);
  threshold_in_place(d, 0.05);
  CHECK(testsup::max_abs_diff(threshold(x, 0.05), d) == 0.0);
}

TEST_CASE("matrix market round-trip is exact") {
  std::mt19937_64 rng(17);
  testsup::TempDir dir;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + testsup::index_draw(rng, 40);
    const SymSparseMatrix m = testsup::random_sparse_symmetric(n, 0.25, rng);
    const std::string path = dir.file("m" + std::to_string(trial) + ".mtx");
    save_matrix_market(m, path);
    CHECK(load_matrix_market(path) == m);
  }
}

TEST_CASE("matrix market small example") {
  testsup::TempDir dir;
  const std::string path = dir.file("t.mtx");
  testsup::write_file(path,
                      "%%MatrixMarket matrix coordinate real symmetric\n"
                      "% comment line\n"
                      "2 2 2\n"
                      "1 1 2.0\n"
                      "2 1 -3.0\n");
  const SymSparseMatrix m = load_matrix_market(path);
  CHECK(m.size() == 2);
  CHECK(m.get(0, 0) == 2.0);
  CHECK(m.get(0, 1) == -3.0);
  CHECK(m.get(1, 0) == -3.0);
  CHECK(m.get(1, 1) == 0.0);             // structural diagonal appears
  CHECK(m.stored_entry_count() == 3);    // (0,0), (1,0), and the filled (1,1)
}

TEST_CASE("matrix market rejects malformed input") {
  testsup::TempDir dir;
  auto expect_parse_error = [&](const std::string& name, const std::string& content) {
    const std::string path = dir.file(name);
    testsup::write_file(path, content);
    CHECK_THROWS_AS(load_matrix_market(path), parse_error);
  };

  expect_parse_error("header.mtx", "%%NotMatrixMarket\n2 2 1\n1 1 1.0\n");
  expect_parse_error("field.mtx",
                     "%%MatrixMarket matrix coordinate complex symmetric\n2 2 1\n1 1 1.0 0.0\n");
  expect_parse_error("layout.mtx", "%%MatrixMarket matrix array real symmetric\n2 2\n1.0\n");
  expect_parse_error("general.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n");
  expect_parse_error("nonsquare.mtx",
                     "%%MatrixMarket matrix coordinate real symmetric\n2 3 1\n1 1 1.0\n");
  expect_parse_error("range.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n");
  expect_parse_error("dup.mtx",
                     "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n2 1 1.0\n1 2 2.0\n");
  expect_parse_error("eof.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n");
  expect_parse_error("extra.mtx",
                     "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1.0\n2 2 5.0\n");
  expect_parse_error("badentry.mtx",
                     "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 x 1.0\n");
  expect_parse_error("badsize.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 two 1\n");
  CHECK_THROWS_AS(load_matrix_market(dir.file("missing.mtx")), parse_error);
}

TEST_CASE("trace and stored entry count") {
  std::mt19937_64 rng(18);
  const SymSparseMatrix m = testsup::random_sparse_symmetric(30, 0.2, rng);
  double tr = 0.0;
  std::int64_t pairs = 0;
  for (int i = 0; i < m.size(); ++i) {
    tr += m.get(i, i);
    for (const MatrixEntry& e : m.row(i))
      if (e.col >= i) ++pairs;
  }
  CHECK(m.trace() == tr);
  CHECK(m.stored_entry_count() == pairs);
}
