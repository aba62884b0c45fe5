#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chsp2/sgraph.hpp"

namespace chsp2 {

// Seeded blocked-BFS partitioner. Cores are grown by repeated BFS from
// pseudo-random unassigned seeds; each core is capped at
// ceil(remaining / parts_left), so on the balanced path all cores end up
// with floor(n/q) or ceil(n/q) vertices. Vertices still unassigned after q
// cores exist are attached to the adjacent core with the smallest current
// size (ties to the lowest part index). Requires 2 <= part_count <= n.
std::vector<std::vector<int>> bfs_block_partition(const SparsityGraph& g, int part_count, std::uint64_t seed);

// Reads one 0-based part id per line; exactly g.size() lines, ids must use
// every value 0..max contiguously.
std::vector<std::vector<int>> import_partition(const std::string& path, const SparsityGraph& g);

// Writes one 0-based part id per vertex line.
void export_partition(std::span<const std::vector<int>> cores, int vertex_count, const std::string& path);

struct CoreValidation {
  enum class Kind { ok, empty_core, vertex_out_of_range, overlap, not_covered };

  Kind kind = Kind::ok;
  int part = -1;
  int vertex = -1;
  std::string message;

  bool ok() const { return kind == Kind::ok; }
};

// Checks that cores are nonempty, in range, disjoint, and cover every
// vertex. Reports the first violation found (parts scanned in order, then
// coverage by ascending vertex).
CoreValidation validate_cores(const SparsityGraph& g, std::span<const std::vector<int>> cores);

}  // namespace chsp2
