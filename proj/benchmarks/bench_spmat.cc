#include <benchmark/benchmark.h>

#include "chsp2/gen.hpp"
#include "chsp2/spmat.hpp"

using namespace chsp2;

namespace {

void BM_sparse_square(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SymSparseMatrix a = gen_chain(n, 8, 1);
  for (auto _ : state) {
    SymSparseMatrix s = square(a);
    benchmark::DoNotOptimize(s);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_sparse_square)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void BM_threshold(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SymSparseMatrix s = square(gen_chain(n, 8, 1));
  for (auto _ : state) {
    SymSparseMatrix t = threshold(s, 1e-5);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_threshold)->Arg(1024)->Arg(4096);

void BM_axpby(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SymSparseMatrix a = gen_chain(n, 8, 1);
  const SymSparseMatrix b = square(a);
  for (auto _ : state) {
    SymSparseMatrix c = axpby(2.0, a, -1.0, b);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_axpby)->Arg(1024)->Arg(4096);

void BM_dense_square(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DenseMatrix a = to_dense(gen_banded(n, n / 4, 0.5, 2));
  for (auto _ : state) {
    DenseMatrix s = square(a);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_dense_square)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
