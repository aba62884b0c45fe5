#pragma once

#include <cstdint>

#include "chsp2/spmat.hpp"

namespace chsp2 {

// Synthetic symmetric test systems. All generators are deterministic in
// (parameters, seed): diagonals land in [1,2), off-diagonals are +-[0.1,0.5),
// so every generated entry is structurally and numerically nonzero.

// Band matrix: entries at |i-j| <= bandwidth. bandwidth=1 is a path.
SymSparseMatrix gen_chain(int n, int bandwidth, std::uint64_t seed);

// 4-neighbor lattice on rows x cols vertices.
SymSparseMatrix gen_grid2d(int rows, int cols, std::uint64_t seed);

// n points uniform in the unit square, edge when distance <= radius.
SymSparseMatrix gen_random_geometric(int n, double radius, std::uint64_t seed);

// Band matrix keeping each off-diagonal entry with probability density.
SymSparseMatrix gen_banded(int n, int bandwidth, double density, std::uint64_t seed);

}  // namespace chsp2
