#include "chsp2/gen.hpp"

#include <cmath>
#include <vector>

#include "chsp2/errors.hpp"
#include "rng.hpp"

namespace chsp2 {

namespace {

double diag_value(std::mt19937_64& rng) { return 1.0 + detail::uniform_unit(rng); }

double offdiag_value(std::mt19937_64& rng) {
  const double magnitude = 0.1 + 0.4 * detail::uniform_unit(rng);
  return (rng() & 1u) ? magnitude : -magnitude;
}

}  // namespace

SymSparseMatrix gen_chain(int n, int bandwidth, std::uint64_t seed) {
  if (n < 1) throw validation_error("chain needs at least one vertex");
  if (bandwidth < 0) throw validation_error("bandwidth must be non-negative");
  std::mt19937_64 rng(seed);
  SymSparseMatrix m(n);
  for (int i = 0; i < n; ++i) {
    m.set(i, i, diag_value(rng));
    for (int j = i + 1; j <= i + bandwidth && j < n; ++j) m.set(i, j, offdiag_value(rng));
  }
  return m;
}

SymSparseMatrix gen_grid2d(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw validation_error("grid needs positive extents");
  std::mt19937_64 rng(seed);
  const int n = rows * cols;
  SymSparseMatrix m(n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      m.set(v, v, diag_value(rng));
      if (c + 1 < cols) m.set(v, v + 1, offdiag_value(rng));
      if (r + 1 < rows) m.set(v, v + cols, offdiag_value(rng));
    }
  }
  return m;
}

SymSparseMatrix gen_random_geometric(int n, double radius, std::uint64_t seed) {
  if (n < 1) throw validation_error("geometric graph needs at least one vertex");
  if (!(radius > 0.0)) throw validation_error("radius must be positive");
  std::mt19937_64 rng(seed);

  std::vector<double> px(static_cast<std::size_t>(n)), py(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    px[static_cast<std::size_t>(i)] = detail::uniform_unit(rng);
    py[static_cast<std::size_t>(i)] = detail::uniform_unit(rng);
  }

  // bucket the unit square into radius-sized cells so neighbor checks stay
  // local; cap the grid near sqrt(n) per side so tiny radii cannot blow up
  // memory (wider cells are still correct, just less selective)
  const int cap = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
  const int cells = std::max(1, std::min(static_cast<int>(std::min(1.0 / radius, 1e9)), cap));
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(cells) * cells);
  auto cell_of = [&](double x) { return std::min(cells - 1, static_cast<int>(x * cells)); };
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(cell_of(px[static_cast<std::size_t>(i)])) * cells +
         cell_of(py[static_cast<std::size_t>(i)])].push_back(i);
  }

  SymSparseMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, diag_value(rng));
  const double r2 = radius * radius;
  for (int i = 0; i < n; ++i) {
    const int cx = cell_of(px[static_cast<std::size_t>(i)]);
    const int cy = cell_of(py[static_cast<std::size_t>(i)]);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        const int gx = cx + dx, gy = cy + dy;
        if (gx < 0 || gx >= cells || gy < 0 || gy >= cells) continue;
        for (int j : grid[static_cast<std::size_t>(gx) * cells + gy]) {
          if (j <= i) continue;
          const double ddx = px[static_cast<std::size_t>(i)] - px[static_cast<std::size_t>(j)];
          const double ddy = py[static_cast<std::size_t>(i)] - py[static_cast<std::size_t>(j)];
          if (ddx * ddx + ddy * ddy <= r2) m.set(i, j, offdiag_value(rng));
        }
      }
    }
  }
  return m;
}

SymSparseMatrix gen_banded(int n, int bandwidth, double density, std::uint64_t seed) {
  if (n < 1) throw validation_error("banded matrix needs at least one vertex");
  if (bandwidth < 0) throw validation_error("bandwidth must be non-negative");
  if (!(density >= 0.0 && density <= 1.0)) throw validation_error("density must be in [0, 1]");
  std::mt19937_64 rng(seed);
  SymSparseMatrix m(n);
  for (int i = 0; i < n; ++i) {
    m.set(i, i, diag_value(rng));
    for (int j = i + 1; j <= i + bandwidth && j < n; ++j) {
      if (detail::uniform_unit(rng) < density) m.set(i, j, offdiag_value(rng));
    }
  }
  return m;
}

}  // namespace chsp2
