#include <benchmark/benchmark.h>

#include "chsp2/gen.hpp"
#include "chsp2/gsp2.hpp"
#include "chsp2/partition.hpp"
#include "chsp2/sgraph.hpp"
#include "chsp2/sp2.hpp"

using namespace chsp2;

namespace {

struct Workload {
  SymSparseMatrix matrix;
  CHPartition partition;
  PolySchedule schedule;
};

const Workload& workload() {
  static const Workload w = [] {
    const SymSparseMatrix h = gen_chain(2048, 8, 5);
    const auto [lo, hi] = gershgorin_bounds(h);
    const SparsityGraph g = sparsity_graph(h);
    Workload out{sp2_initial(h, lo, hi),
                 build_ch_partition(structural_polynomial_graph(g, 3), bfs_block_partition(g, 16, 7)),
                 PolySchedule(3, PolyStep{Branch::square, 1e-8})};
    return out;
  }();
  return w;
}

void BM_gsp2_run(benchmark::State& state) {
  GSP2Options opt;
  opt.workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    GSP2Result res = gsp2_run(workload().matrix, workload().partition, workload().schedule, opt);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_gsp2_run)->Arg(1)->Arg(2)->Arg(4)->UseRealTime();

void BM_extract_submatrix(benchmark::State& state) {
  for (auto _ : state) {
    PartWorkItem item = extract_submatrix(workload().matrix, workload().partition, 0);
    benchmark::DoNotOptimize(item);
  }
}
BENCHMARK(BM_extract_submatrix);

void BM_evaluate_part(benchmark::State& state) {
  const PartWorkItem item = extract_submatrix(workload().matrix, workload().partition, 0);
  for (auto _ : state) {
    DenseMatrix d = evaluate_part(item, workload().schedule);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_evaluate_part);

void BM_sm_sp2(benchmark::State& state) {
  const SymSparseMatrix h = gen_chain(static_cast<int>(state.range(0)), 4, 9);
  SP2Config cfg;
  cfg.nocc = state.range(0) / 2;
  cfg.max_iter = 20;
  for (auto _ : state) {
    SP2Result res = sm_sp2(h, cfg);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_sm_sp2)->Arg(256)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
