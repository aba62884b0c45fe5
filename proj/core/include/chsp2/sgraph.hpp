#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chsp2/spmat.hpp"

namespace chsp2 {

// Undirected graph on vertices 0..n-1. Every vertex carries an implicit
// self-loop (matrices here always have a structurally nonzero diagonal), so
// adjacency lists store only the other endpoints.
class SparsityGraph {
 public:
  SparsityGraph() = default;
  explicit SparsityGraph(int n) : adj_(static_cast<std::size_t>(n)) {}

  // Takes ownership of adjacency lists; sorts and deduplicates, drops self
  // entries, and mirrors any one-sided edges.
  static SparsityGraph from_adjacency(std::vector<std::vector<int>> adj);

  int size() const { return static_cast<int>(adj_.size()); }
  std::span<const int> neighbors(int v) const;
  bool has_edge(int u, int v) const;
  void add_edge(int u, int v);  // keeps lists sorted; self edges rejected

  // Undirected edge count, self-loops excluded.
  std::int64_t edge_count() const;

  // Content hash of the adjacency structure; used to tag which graph a
  // partition's halos were derived from.
  std::uint64_t structure_hash() const;

  bool operator==(const SparsityGraph&) const = default;

 private:
  std::vector<std::vector<int>> adj_;
};

// G(X): edge (i,j), i != j, iff X stores (i,j) with a nonzero value.
SparsityGraph sparsity_graph(const SymSparseMatrix& m);

// N(U, G): all vertices reachable from U by at most one edge, U included
// (self-loops). Sorted, duplicate-free.
std::vector<int> neighborhood(const SparsityGraph& g, std::span<const int> vertices);

// Worst-case structure of a degree-2^steps thresholded polynomial: the
// distance <= 2^steps closure of g, i.e. the pattern of boolean (A+I)^(2^steps).
SparsityGraph structural_polynomial_graph(const SparsityGraph& g, int steps);

// Core-halo partition: disjoint cores covering every vertex, plus one halo
// per part: halo[i] = N(core[i], H) \ core[i] for the halo graph H. Halos of
// different parts may overlap.
struct CHPartition {
  int vertex_count = 0;
  std::vector<std::vector<int>> cores;  // sorted ascending
  std::vector<std::vector<int>> halos;  // sorted ascending
  std::uint64_t halo_graph_id = 0;

  int part_count() const { return static_cast<int>(cores.size()); }
  int part_size(int i) const {
    return static_cast<int>(cores[static_cast<std::size_t>(i)].size() +
                            halos[static_cast<std::size_t>(i)].size());
  }
};

// Validates the cores (coverage, disjointness, non-emptiness) and derives
// the halos from halo_graph. Throws validation_error on an invalid input.
CHPartition build_ch_partition(const SparsityGraph& halo_graph, std::vector<std::vector<int>> cores);

// Sum over parts of (core + halo)^3: the load-balance objective driving the
// partition refinement. Exact integer arithmetic.
std::int64_t objective_sum_cubes(const CHPartition& p);

struct PartitionMetrics {
  std::int64_t sum_cubes = 0;
  int min_part = 0;   // min over parts of core+halo size
  int max_part = 0;   // max over parts of core+halo size
  double nno = 0.0;   // sum_cubes / n^3, normalized number of operations
  double mmpn = 0.0;  // (max_part - min_part) / n
  double wall_time_s = 0.0;
};

PartitionMetrics partition_metrics(const CHPartition& p, double elapsed_seconds);

// Total communication volume of a core assignment: for each vertex, the
// number of distinct parts other than its own whose core contains one of
// its neighbors. Computed per vertex, independently of any halo lists;
// equals the sum of halo sizes when halos come from the same graph.
std::int64_t total_communication_volume(const SparsityGraph& g, std::span<const std::vector<int>> cores);

// Adjacency-list graph file: header "n m", then one 1-based neighbor line
// per vertex; '%' lines are comments. Self-loops are not representable.
SparsityGraph load_metis_graph(const std::string& path);
void save_metis_graph(const SparsityGraph& g, const std::string& path);

}  // namespace chsp2
