#include <benchmark/benchmark.h>

#include "chsp2/anneal.hpp"
#include "chsp2/gen.hpp"
#include "chsp2/partition.hpp"
#include "chsp2/sgraph.hpp"

using namespace chsp2;

namespace {

const SparsityGraph& chain_graph() {
  static const SparsityGraph g = sparsity_graph(gen_chain(12288, 24, 1));
  return g;
}

void BM_bfs_partition(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto cores = bfs_block_partition(chain_graph(), q, 7);
    benchmark::DoNotOptimize(cores);
  }
}
BENCHMARK(BM_bfs_partition)->Arg(4)->Arg(16)->Arg(64);

void BM_sa_refine(benchmark::State& state) {
  const CHPartition initial = build_ch_partition(chain_graph(), bfs_block_partition(chain_graph(), 16, 7));
  SAConfig cfg;
  cfg.iterations = static_cast<int>(state.range(0));
  cfg.seed = 11;
  for (auto _ : state) {
    SAResult res = sa_refine(chain_graph(), initial, cfg);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_sa_refine)->Arg(100)->Arg(1000);

void BM_structural_closure(benchmark::State& state) {
  const SparsityGraph g = sparsity_graph(gen_chain(4096, 8, 3));
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SparsityGraph p = structural_polynomial_graph(g, steps);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_structural_closure)->Arg(1)->Arg(2)->Arg(3);

void BM_objective(benchmark::State& state) {
  const CHPartition p = build_ch_partition(chain_graph(), bfs_block_partition(chain_graph(), 64, 7));
  for (auto _ : state) {
    benchmark::DoNotOptimize(objective_sum_cubes(p));
  }
}
BENCHMARK(BM_objective);

}  // namespace

BENCHMARK_MAIN();
