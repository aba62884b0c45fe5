#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <tuple>
#include <vector>

#include "chsp2/errors.hpp"
#include "chsp2/gen.hpp"
#include "chsp2/sgraph.hpp"
#include "chsp2/spmat.hpp"
#include "test_support.hpp"

using namespace chsp2;

namespace {

SparsityGraph path_graph(int n) {
  SparsityGraph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

}  // namespace

TEST_CASE("from_adjacency cleans its input") {
  // duplicates, self entries, and one-sided edges
  SparsityGraph g = SparsityGraph::from_adjacency({{1, 1, 0, 2}, {0}, {}, {3}});
  CHECK(g.size() == 4);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(0, 2));
  CHECK(g.has_edge(2, 0));  // mirrored
  CHECK(!g.has_edge(0, 0));
  CHECK(!g.has_edge(3, 3));
  CHECK(g.edge_count() == 2);
  CHECK(g.neighbors(0).size() == 2);
}

TEST_CASE("add_edge keeps lists sorted and rejects self loops") {
  SparsityGraph g(3);
  g.add_edge(2, 0);
  g.add_edge(0, 1);
  auto nb = g.neighbors(0);
  REQUIRE(nb.size() == 2);
  CHECK(nb[0] == 1);
  CHECK(nb[1] == 2);
  CHECK_THROWS_AS(g.add_edge(1, 1), validation_error);
  CHECK_THROWS_AS(g.add_edge(0, 3), validation_error);
}

TEST_CASE("sparsity graph uses nonzero off-diagonal entries") {
  std::vector<std::tuple<int, int, double>> t = {{0, 1, 0.5}, {1, 2, 0.0}, {2, 3, -0.25}};
  const SymSparseMatrix m = SymSparseMatrix::from_triplets(4, t);
  const SparsityGraph g = sparsity_graph(m);
  CHECK(g.has_edge(0, 1));
  CHECK(!g.has_edge(1, 2));  // stored zero is not an edge
  CHECK(g.has_edge(2, 3));
  CHECK(g.edge_count() == 2);
}

TEST_CASE("neighborhood is the one-step closure of a vertex set") {
  const SparsityGraph g = path_graph(7);
  const std::vector<int> u = {2, 3};
  const std::vector<int> n1 = neighborhood(g, u);
  CHECK(n1 == std::vector<int>{1, 2, 3, 4});
  const std::vector<int> lone = {0};
  CHECK(neighborhood(g, lone) == std::vector<int>{0, 1});
  CHECK(neighborhood(g, std::vector<int>{}).empty());
}

TEST_CASE("structural polynomial graph matches boolean matrix powers") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4 + testsup::index_draw(rng, 36);
    const SparsityGraph g = testsup::random_connected_graph(n, testsup::index_draw(rng, 2 * n), rng);
    for (int steps = 0; steps <= 3; ++steps) {
      const SparsityGraph p = structural_polynomial_graph(g, steps);
      const auto pattern = testsup::bool_power_pattern(g, steps);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          CHECK(p.has_edge(i, j) == static_cast<bool>(pattern[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
        }
    }
  }
}

TEST_CASE("structural polynomial graph saturates to the component") {
  const SparsityGraph g = path_graph(9);
  // 2^4 = 16 > 8 = diameter
  const SparsityGraph p = structural_polynomial_graph(g, 4);
  CHECK(p.edge_count() == 9 * 8 / 2);
  CHECK(structural_polynomial_graph(g, 0) == g);
  CHECK(structural_polynomial_graph(g, 30) == p);  // radius is capped, no overflow
}

TEST_CASE("core-halo partition of a split path") {
  const SparsityGraph g = path_graph(6);
  const CHPartition p = build_ch_partition(g, {{0, 1, 2}, {3, 4, 5}});
  CHECK(p.vertex_count == 6);
  CHECK(p.part_count() == 2);
  CHECK(p.halos[0] == std::vector<int>{3});
  CHECK(p.halos[1] == std::vector<int>{2});
  CHECK(p.part_size(0) == 4);
  CHECK(p.part_size(1) == 4);
  CHECK(objective_sum_cubes(p) == 128);
  CHECK(p.halo_graph_id == g.structure_hash());

  // halos from a wider polynomial structure reach further
  const SparsityGraph p2 = structural_polynomial_graph(g, 1);
  const CHPartition wide = build_ch_partition(p2, {{0, 1, 2}, {3, 4, 5}});
  CHECK(wide.halos[0] == std::vector<int>{3, 4});
  CHECK(wide.halos[1] == std::vector<int>{1, 2});
  CHECK(objective_sum_cubes(wide) == 250);
}

TEST_CASE("halo of every part grows with the halo graph") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 10 + testsup::index_draw(rng, 40);
    const SparsityGraph g = testsup::random_connected_graph(n, n, rng);
    const int q = 2 + testsup::index_draw(rng, 4);
    const auto cores = testsup::random_cores(n, q, rng);
    const CHPartition narrow = build_ch_partition(g, cores);
    const CHPartition wide = build_ch_partition(structural_polynomial_graph(g, 2), cores);
    for (int i = 0; i < q; ++i) {
      CHECK(std::includes(wide.halos[static_cast<std::size_t>(i)].begin(),
                          wide.halos[static_cast<std::size_t>(i)].end(),
                          narrow.halos[static_cast<std::size_t>(i)].begin(),
                          narrow.halos[static_cast<std::size_t>(i)].end()));
    }
    CHECK(objective_sum_cubes(wide) >= objective_sum_cubes(narrow));
  }
}

TEST_CASE("partition validation rejects bad cores") {
  const SparsityGraph g = path_graph(4);
  CHECK_THROWS_AS(build_ch_partition(g, {{0, 1, 2, 3}, {}}), validation_error);
  CHECK_THROWS_AS(build_ch_partition(g, {{0, 1}, {1, 2, 3}}), validation_error);
  CHECK_THROWS_AS(build_ch_partition(g, {{0, 1}, {3}}), validation_error);
  CHECK_THROWS_AS(build_ch_partition(g, {{0, 1}, {2, 4}}), validation_error);
  CHECK_THROWS_AS(build_ch_partition(g, {}), validation_error);
}

TEST_CASE("objective matches sixteen equal parts") {
  // 16 parts, each core 1024 plus halo 512: 16 * 1536^3
  CHPartition p;
  p.vertex_count = 16 * 1024;
  for (int part = 0; part < 16; ++part) {
    std::vector<int> core;
    for (int v = 0; v < 1024; ++v) core.push_back(part * 1024 + v);
    std::vector<int> halo;
    for (int v = 0; v < 512; ++v) halo.push_back((part * 1024 + 1024 + v) % p.vertex_count);
    p.cores.push_back(std::move(core));
    p.halos.push_back(std::move(halo));
  }
  CHECK(objective_sum_cubes(p) == 57'982'058'496LL);

  const PartitionMetrics m = partition_metrics(p, 1.25);
  CHECK(m.sum_cubes == 57'982'058'496LL);
  CHECK(m.min_part == 1536);
  CHECK(m.max_part == 1536);
  CHECK(m.mmpn == 0.0);
  CHECK(m.nno == doctest::Approx(57'982'058'496.0 / (16384.0 * 16384.0 * 16384.0)).epsilon(1e-15));
  CHECK(m.wall_time_s == 1.25);
}

TEST_CASE("partition metrics on an uneven partition") {
  const SparsityGraph g = path_graph(6);
  const CHPartition p = build_ch_partition(g, {{0}, {1, 2, 3, 4, 5}});
  // part sizes 2 and 6
  const PartitionMetrics m = partition_metrics(p, 0.0);
  CHECK(m.sum_cubes == 8 + 216);
  CHECK(m.min_part == 2);
  CHECK(m.max_part == 6);
  CHECK(m.nno == doctest::Approx(224.0 / 216.0).epsilon(1e-15));
  CHECK(m.mmpn == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("communication volume equals the halo size total") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8 + testsup::index_draw(rng, 60);
    const SparsityGraph g = testsup::random_connected_graph(n, 2 * n, rng);
    const int q = 2 + testsup::index_draw(rng, 5);
    const auto cores = testsup::random_cores(n, q, rng);
    const CHPartition p = build_ch_partition(g, cores);
    std::int64_t halo_total = 0;
    for (const auto& h : p.halos) halo_total += static_cast<std::int64_t>(h.size());
    CHECK(total_communication_volume(g, cores) == halo_total);
  }

  const SparsityGraph path = path_graph(6);
  CHECK(total_communication_volume(path, std::vector<std::vector<int>>{{0, 1, 2}, {3, 4, 5}}) == 2);
}

TEST_CASE("structure hash distinguishes structures") {
  const SparsityGraph a = path_graph(5);
  SparsityGraph b = path_graph(5);
  CHECK(a.structure_hash() == b.structure_hash());
  b.add_edge(0, 4);
  CHECK(a.structure_hash() != b.structure_hash());
  // same edge count, different shape
  const SparsityGraph c = SparsityGraph::from_adjacency({{1, 2, 3, 4}, {0}, {0}, {0}, {0}});
  CHECK(a.edge_count() == c.edge_count());
  CHECK(a.structure_hash() != c.structure_hash());
}

TEST_CASE("graph file round-trip") {
  std::mt19937_64 rng(24);
  testsup::TempDir dir;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + testsup::index_draw(rng, 50);
    const SparsityGraph g = testsup::random_connected_graph(n, n, rng);
    const std::string path = dir.file("g" + std::to_string(trial) + ".graph");
    save_metis_graph(g, path);
    CHECK(load_metis_graph(path) == g);
  }

  // isolated vertices produce empty adjacency lines
  SparsityGraph iso(3);
  iso.add_edge(0, 2);
  const std::string path = dir.file("iso.graph");
  save_metis_graph(iso, path);
  CHECK(load_metis_graph(path) == iso);
}

TEST_CASE("graph file parser accepts comments and validates") {
  testsup::TempDir dir;
  const std::string ok = dir.file("ok.graph");
  testsup::write_file(ok, "% four vertices, a square\n4 4\n2 4\n1 3\n% interior comment\n2 4\n1 3\n");
  const SparsityGraph g = load_metis_graph(ok);
  CHECK(g.size() == 4);
  CHECK(g.edge_count() == 4);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(0, 3));

  auto expect_parse_error = [&](const std::string& name, const std::string& content) {
    const std::string path = dir.file(name);
    testsup::write_file(path, content);
    CHECK_THROWS_AS(load_metis_graph(path), parse_error);
  };
  expect_parse_error("badheader.graph", "x y\n");
  expect_parse_error("weighted.graph", "2 1 011\n2\n1\n");
  expect_parse_error("short.graph", "3 1\n2\n1\n");
  expect_parse_error("extra.graph", "2 1\n2\n1\n\n1 2\n");
  expect_parse_error("badcount.graph", "3 5\n2\n1 3\n2\n");
  expect_parse_error("range.graph", "2 1\n3\n1\n");
  expect_parse_error("self.graph", "2 1\n1\n1\n");
  expect_parse_error("oneside.graph", "3 1\n2\n\n\n");
  expect_parse_error("dup.graph", "2 2\n2 2\n1 1\n");
}
