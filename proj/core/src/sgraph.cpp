#include "chsp2/sgraph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chsp2/errors.hpp"

namespace chsp2 {

SparsityGraph SparsityGraph::from_adjacency(std::vector<std::vector<int>> adj) {
  const int n = static_cast<int>(adj.size());
  SparsityGraph g;
  g.adj_ = std::move(adj);
  for (int v = 0; v < n; ++v) {
    auto& nb = g.adj_[static_cast<std::size_t>(v)];
    for (int u : nb) {
      if (u < 0 || u >= n) throw validation_error("adjacency index out of range");
    }
    std::erase(nb, v);
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  // mirror one-sided edges
  std::vector<std::vector<int>> add(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    for (int u : g.adj_[static_cast<std::size_t>(v)]) {
      const auto& back = g.adj_[static_cast<std::size_t>(u)];
      if (!std::binary_search(back.begin(), back.end(), v)) add[static_cast<std::size_t>(u)].push_back(v);
    }
  }
  for (int v = 0; v < n; ++v) {
    auto& extra = add[static_cast<std::size_t>(v)];
    if (extra.empty()) continue;
    auto& nb = g.adj_[static_cast<std::size_t>(v)];
    nb.insert(nb.end(), extra.begin(), extra.end());
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

std::span<const int> SparsityGraph::neighbors(int v) const {
  if (v < 0 || v >= size()) throw validation_error("vertex out of range");
  return adj_[static_cast<std::size_t>(v)];
}

bool SparsityGraph::has_edge(int u, int v) const {
  if (u < 0 || u >= size() || v < 0 || v >= size()) throw validation_error("vertex out of range");
  const auto& nb = adj_[static_cast<std::size_t>(u)];
  return std::binary_search(nb.begin(), nb.end(), v);
}

void SparsityGraph::add_edge(int u, int v) {
  if (u < 0 || u >= size() || v < 0 || v >= size()) throw validation_error("vertex out of range");
  if (u == v) throw validation_error("self edges are implicit and cannot be added");
  auto insert = [](std::vector<int>& nb, int w) {
    auto it = std::lower_bound(nb.begin(), nb.end(), w);
    if (it == nb.end() || *it != w) nb.insert(it, w);
  };
  insert(adj_[static_cast<std::size_t>(u)], v);
  insert(adj_[static_cast<std::size_t>(v)], u);
}

std::int64_t SparsityGraph::edge_count() const {
  std::int64_t degsum = 0;
  for (const auto& nb : adj_) degsum += static_cast<std::int64_t>(nb.size());
  return degsum / 2;
}

std::uint64_t SparsityGraph::structure_hash() const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(size()));
  for (const auto& nb : adj_) {
    mix(0xfffffffffffffffeull);
    for (int u : nb) mix(static_cast<std::uint64_t>(u));
  }
  return h;
}

SparsityGraph sparsity_graph(const SymSparseMatrix& m) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(m.size()));
  for (int i = 0; i < m.size(); ++i) {
    for (const MatrixEntry& e : m.row(i)) {
      if (e.col != i && e.value != 0.0) adj[static_cast<std::size_t>(i)].push_back(e.col);
    }
  }
  return SparsityGraph::from_adjacency(std::move(adj));
}

std::vector<int> neighborhood(const SparsityGraph& g, std::span<const int> vertices) {
  const int n = g.size();
  std::vector<char> mark(static_cast<std::size_t>(n), 0);
  std::vector<int> out;
  out.reserve(vertices.size() * 4);
  for (int v : vertices) {
    if (v < 0 || v >= n) throw validation_error("vertex out of range");
    if (!mark[static_cast<std::size_t>(v)]) {
      mark[static_cast<std::size_t>(v)] = 1;
      out.push_back(v);
    }
    for (int u : g.neighbors(v)) {
      if (!mark[static_cast<std::size_t>(u)]) {
        mark[static_cast<std::size_t>(u)] = 1;
        out.push_back(u);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SparsityGraph structural_polynomial_graph(const SparsityGraph& g, int steps) {
  if (steps < 0) throw validation_error("steps must be non-negative");
  if (steps == 0) return g;
  const int n = g.size();
  // distance beyond n-1 cannot occur, so cap the radius there
  const long long radius = steps >= 31 ? n : std::min<long long>(1ll << steps, n);

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  std::vector<int> stamp(static_cast<std::size_t>(n), -1);
  std::vector<int> queue;
  std::vector<int> dist(static_cast<std::size_t>(n), 0);
  for (int s = 0; s < n; ++s) {
    queue.clear();
    queue.push_back(s);
    stamp[static_cast<std::size_t>(s)] = s;
    dist[static_cast<std::size_t>(s)] = 0;
    std::size_t head = 0;
    while (head < queue.size()) {
      const int v = queue[head++];
      const int dv = dist[static_cast<std::size_t>(v)];
      if (dv == radius) continue;
      for (int u : g.neighbors(v)) {
        if (stamp[static_cast<std::size_t>(u)] == s) continue;
        stamp[static_cast<std::size_t>(u)] = s;
        dist[static_cast<std::size_t>(u)] = dv + 1;
        queue.push_back(u);
      }
    }
    auto& nb = adj[static_cast<std::size_t>(s)];
    nb.assign(queue.begin() + 1, queue.end());
    std::sort(nb.begin(), nb.end());
  }
  return SparsityGraph::from_adjacency(std::move(adj));
}

CHPartition build_ch_partition(const SparsityGraph& halo_graph, std::vector<std::vector<int>> cores) {
  const int n = halo_graph.size();
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t p = 0; p < cores.size(); ++p) {
    if (cores[p].empty()) throw validation_error("core " + std::to_string(p) + " is empty");
    for (int v : cores[p]) {
      if (v < 0 || v >= n) throw validation_error("core vertex " + std::to_string(v) + " out of range");
      if (owner[static_cast<std::size_t>(v)] != -1)
        throw validation_error("vertex " + std::to_string(v) + " assigned to cores " +
                               std::to_string(owner[static_cast<std::size_t>(v)]) + " and " + std::to_string(p));
      owner[static_cast<std::size_t>(v)] = static_cast<int>(p);
    }
  }
  for (int v = 0; v < n; ++v) {
    if (owner[static_cast<std::size_t>(v)] == -1)
      throw validation_error("vertex " + std::to_string(v) + " is not covered by any core");
  }

  CHPartition part;
  part.vertex_count = n;
  part.cores = std::move(cores);
  part.halo_graph_id = halo_graph.structure_hash();
  part.halos.resize(part.cores.size());
  for (std::size_t p = 0; p < part.cores.size(); ++p) {
    auto& core = part.cores[p];
    std::sort(core.begin(), core.end());
    std::vector<int> reach = neighborhood(halo_graph, core);
    auto& halo = part.halos[p];
    halo.reserve(reach.size());
    std::set_difference(reach.begin(), reach.end(), core.begin(), core.end(), std::back_inserter(halo));
  }
  return part;
}

std::int64_t objective_sum_cubes(const CHPartition& p) {
  std::int64_t sum = 0;
  for (int i = 0; i < p.part_count(); ++i) {
    const std::int64_t s = p.part_size(i);
    sum += s * s * s;
  }
  return sum;
}

PartitionMetrics partition_metrics(const CHPartition& p, double elapsed_seconds) {
  if (p.part_count() == 0) throw validation_error("partition has no parts");
  PartitionMetrics m;
  m.sum_cubes = objective_sum_cubes(p);
  m.min_part = p.part_size(0);
  m.max_part = p.part_size(0);
  for (int i = 1; i < p.part_count(); ++i) {
    m.min_part = std::min(m.min_part, p.part_size(i));
    m.max_part = std::max(m.max_part, p.part_size(i));
  }
  const double n = static_cast<double>(p.vertex_count);
  m.nno = static_cast<double>(m.sum_cubes) / (n * n * n);
  m.mmpn = static_cast<double>(m.max_part - m.min_part) / n;
  m.wall_time_s = elapsed_seconds;
  return m;
}

std::int64_t total_communication_volume(const SparsityGraph& g, std::span<const std::vector<int>> cores) {
  const int n = g.size();
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t p = 0; p < cores.size(); ++p) {
    for (int v : cores[p]) {
      if (v < 0 || v >= n) throw validation_error("core vertex out of range");
      if (owner[static_cast<std::size_t>(v)] != -1) throw validation_error("cores overlap");
      owner[static_cast<std::size_t>(v)] = static_cast<int>(p);
    }
  }
  for (int v = 0; v < n; ++v) {
    if (owner[static_cast<std::size_t>(v)] == -1) throw validation_error("cores do not cover every vertex");
  }

  std::int64_t volume = 0;
  std::vector<int> parts;
  for (int v = 0; v < n; ++v) {
    parts.clear();
    const int own = owner[static_cast<std::size_t>(v)];
    for (int u : g.neighbors(v)) {
      const int p = owner[static_cast<std::size_t>(u)];
      if (p != own) parts.push_back(p);
    }
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    volume += static_cast<std::int64_t>(parts.size());
  }
  return volume;
}

namespace {

struct GraphLineReader {
  std::ifstream in;
  std::string path;
  std::size_t lineno = 0;

  explicit GraphLineReader(const std::string& p) : in(p), path(p) {}

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line[0] == '%') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw parse_error(path + ":" + std::to_string(lineno) + ": " + what);
  }
};

}  // namespace

SparsityGraph load_metis_graph(const std::string& path) {
  GraphLineReader r(path);
  if (!r.in) throw parse_error("cannot open '" + path + "'");

  std::string line;
  if (!r.next(line)) throw parse_error(path + ": missing header line");
  long long n = 0, m = 0;
  {
    std::istringstream s(line);
    if (!(s >> n >> m)) r.fail("malformed header: expected 'n m'");
    std::string fmt;
    if (s >> fmt && fmt != "0") r.fail("weighted graph formats are not supported");
    if (n < 0 || m < 0) r.fail("negative header values");
  }

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (long long v = 0; v < n; ++v) {
    if (!std::getline(r.in, line)) {
      throw parse_error(path + ": expected " + std::to_string(n) + " vertex lines, found " + std::to_string(v));
    }
    ++r.lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '%') {
      --v;  // comments between vertex lines do not consume a vertex
      continue;
    }
    std::istringstream s(line);
    long long u;
    auto& nb = adj[static_cast<std::size_t>(v)];
    while (s >> u) {
      if (u < 1 || u > n) r.fail("neighbor " + std::to_string(u) + " out of range");
      if (u - 1 == v) r.fail("self edge on vertex " + std::to_string(v + 1));
      nb.push_back(static_cast<int>(u - 1));
    }
    if (!s.eof()) r.fail("malformed neighbor list");
    std::sort(nb.begin(), nb.end());
    for (std::size_t k = 1; k < nb.size(); ++k) {
      if (nb[k] == nb[k - 1]) r.fail("duplicate neighbor " + std::to_string(nb[k] + 1));
    }
  }
  while (r.next(line)) {
    if (line.find_first_not_of(" \t") != std::string::npos) r.fail("trailing data after vertex lines");
  }

  // every edge must be listed from both endpoints
  for (long long v = 0; v < n; ++v) {
    for (int u : adj[static_cast<std::size_t>(v)]) {
      const auto& back = adj[static_cast<std::size_t>(u)];
      if (!std::binary_search(back.begin(), back.end(), static_cast<int>(v))) {
        throw parse_error(path + ": edge (" + std::to_string(v + 1) + "," + std::to_string(u + 1) +
                          ") is not listed from both endpoints");
      }
    }
  }

  SparsityGraph g = SparsityGraph::from_adjacency(std::move(adj));
  if (g.edge_count() != m) {
    throw parse_error(path + ": header declares " + std::to_string(m) + " edges, adjacency lists contain " +
                      std::to_string(g.edge_count()));
  }
  return g;
}

void save_metis_graph(const SparsityGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << g.size() << " " << g.edge_count() << "\n";
  for (int v = 0; v < g.size(); ++v) {
    const auto nb = g.neighbors(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (k) out << ' ';
      out << nb[k] + 1;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace chsp2
