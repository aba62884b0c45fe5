#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "chsp2/sgraph.hpp"
#include "chsp2/sp2.hpp"
#include "chsp2/spmat.hpp"

namespace chsp2 {

// One part's independent work unit: the dense submatrix of A on the part's
// core followed by its halo (each ascending), with the local-to-global
// vertex map. Rows 0..core_size-1 are the rows the part owns.
struct PartWorkItem {
  int part_index = -1;
  int core_size = 0;
  std::vector<int> local_to_global;
  DenseMatrix submatrix;
};

PartWorkItem extract_submatrix(const SymSparseMatrix& a, const CHPartition& p, int part_index);

// Applies the schedule densely to the part's submatrix: per step the branch
// polynomial then its threshold. The cost model is schedule.size() * dim^3.
DenseMatrix evaluate_part(const PartWorkItem& item, const PolySchedule& schedule);

struct AssembleOptions {
  double final_tau = 0.0;      // entries below this are dropped on output
  double symmetry_tol = 1e-12; // max allowed |D[i][j] - D[j][i]| across parts
};

struct AssembleResult {
  SymSparseMatrix matrix;
  double max_asymmetry = 0.0;
};

// Collects the core rows of every part result into the global matrix. Each
// global row is written exactly once (cores are disjoint and cover V).
// Nothing is symmetrized: if rows owned by different parts disagree beyond
// symmetry_tol, a validation_error is thrown. For each surviving pair the
// stored value comes from the part owning the smaller-index row.
AssembleResult assemble(std::span<const PartWorkItem> items, std::span<const DenseMatrix> results,
                        const CHPartition& p, int n, const AssembleOptions& options = {});

struct PartRunMetrics {
  int part = -1;
  int core_size = 0;
  int halo_size = 0;
  std::int64_t flops = 0;  // schedule length * (core+halo)^3
  double ms = 0.0;
};

struct RunMetrics {
  std::vector<PartRunMetrics> parts;
  std::int64_t sum_cubes = 0;
  int workers = 0;
  double wall_ms = 0.0;
  double max_asymmetry = 0.0;
};

struct GSP2Options {
  int workers = 1;
  double symmetry_tol = 1e-12;
};

struct GSP2Result {
  SymSparseMatrix density;
  RunMetrics metrics;
};

// Partitioned evaluation of a fixed schedule: extracts one dense submatrix
// per part, evaluates them independently on a bounded worker pool, and
// assembles the core rows. When tau = 0 everywhere and the halos were
// derived from the structural polynomial graph of G(a), the core rows equal
// the unpartitioned evaluation exactly. Output is identical bit for bit for
// any worker count.
GSP2Result gsp2_run(const SymSparseMatrix& a, const CHPartition& p, const PolySchedule& schedule,
                    const GSP2Options& options = {});

struct GSP2SP2Result {
  SymSparseMatrix density;
  PolySchedule schedule;
  RunMetrics metrics;
  bool converged = false;
  int iterations = 0;
  double trace_error = 0.0;
  double idempotency_error = 0.0;
  double eps_min = 0.0;
  double eps_max = 0.0;
};

// Synchronized partitioned purification: runs the trace-steered iteration
// directly on the part submatrices of X0. Each step squares every part,
// reassembles the global traces as sums of core-row diagonals (one
// reduction per step), picks one branch globally, and applies it with
// thresholding on every part.
GSP2SP2Result gsp2_sp2_run(const SymSparseMatrix& h, const CHPartition& p, const SP2Config& cfg,
                           const GSP2Options& options = {});

// CSV columns: part,core_size,halo_size,flops,ms
void write_run_metrics_csv(const RunMetrics& metrics, std::ostream& out);

}  // namespace chsp2
