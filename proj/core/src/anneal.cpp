#include "chsp2/anneal.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "chsp2/errors.hpp"
#include "rng.hpp"

namespace chsp2 {

namespace {

std::int64_t cube(std::int64_t x) { return x * x * x; }

// Mutable view of a partition for incremental objective updates. A vertex w
// is in halo(p) iff it is outside core p and core_nbr_count[w][p] > 0.
struct MoveState {
  const SparsityGraph* g = nullptr;
  int q = 0;
  std::vector<int> core_of;
  std::vector<int> core_nbr_count;  // n x q, neighbors of v inside core p
  std::vector<std::int64_t> core_size;
  std::vector<std::int64_t> halo_size;

  int count(int v, int p) const { return core_nbr_count[static_cast<std::size_t>(v) * q + p]; }
  int& count(int v, int p) { return core_nbr_count[static_cast<std::size_t>(v) * q + p]; }

  void init(const SparsityGraph& graph, const CHPartition& part) {
    g = &graph;
    q = part.part_count();
    const int n = graph.size();
    core_of.assign(static_cast<std::size_t>(n), -1);
    for (int p = 0; p < q; ++p) {
      for (int v : part.cores[static_cast<std::size_t>(p)]) core_of[static_cast<std::size_t>(v)] = p;
    }
    core_nbr_count.assign(static_cast<std::size_t>(n) * q, 0);
    for (int v = 0; v < n; ++v) {
      for (int u : graph.neighbors(v)) ++count(v, core_of[static_cast<std::size_t>(u)]);
    }
    core_size.assign(static_cast<std::size_t>(q), 0);
    for (int v = 0; v < n; ++v) ++core_size[static_cast<std::size_t>(core_of[static_cast<std::size_t>(v)])];
    halo_size.assign(static_cast<std::size_t>(q), 0);
    for (int p = 0; p < q; ++p) recompute_halo(p);
  }

  void recompute_halo(int p) {
    const int n = g->size();
    std::int64_t h = 0;
    for (int v = 0; v < n; ++v) {
      if (core_of[static_cast<std::size_t>(v)] != p && count(v, p) > 0) ++h;
    }
    halo_size[static_cast<std::size_t>(p)] = h;
  }

  std::int64_t objective() const {
    std::int64_t s = 0;
    for (int p = 0; p < q; ++p) s += cube(core_size[static_cast<std::size_t>(p)] + halo_size[static_cast<std::size_t>(p)]);
    return s;
  }

  // Objective change of moving w from its core into core b. Only parts
  // a = core_of[w] and b change: every other part keeps its core, hence its
  // halo. Assumes the move is legal.
  std::int64_t delta(int w, int b) const {
    const int a = core_of[static_cast<std::size_t>(w)];
    int gain_b = 0;  // new halo members of b among w's neighbors
    int loss_a = 0;  // halo members of a whose only core-a neighbor is w
    for (int u : g->neighbors(w)) {
      const int cu = core_of[static_cast<std::size_t>(u)];
      if (cu != b && count(u, b) == 0) ++gain_b;
      if (cu != a && count(u, a) == 1) ++loss_a;
    }
    const bool w_joins_a = count(w, a) > 0;  // w still borders its old core
    const std::int64_t hb = halo_size[static_cast<std::size_t>(b)] - 1 + gain_b;
    const std::int64_t ha = halo_size[static_cast<std::size_t>(a)] - loss_a + (w_joins_a ? 1 : 0);
    const std::int64_t cb = core_size[static_cast<std::size_t>(b)] + 1;
    const std::int64_t ca = core_size[static_cast<std::size_t>(a)] - 1;
    return cube(cb + hb) - cube(core_size[static_cast<std::size_t>(b)] + halo_size[static_cast<std::size_t>(b)]) +
           cube(ca + ha) - cube(core_size[static_cast<std::size_t>(a)] + halo_size[static_cast<std::size_t>(a)]);
  }

  void apply(int w, int b) {
    const int a = core_of[static_cast<std::size_t>(w)];
    for (int u : g->neighbors(w)) {
      --count(u, a);
      ++count(u, b);
    }
    core_of[static_cast<std::size_t>(w)] = b;
    --core_size[static_cast<std::size_t>(a)];
    ++core_size[static_cast<std::size_t>(b)];
    recompute_halo(a);
    recompute_halo(b);
  }

  std::vector<std::vector<int>> cores() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(q));
    for (int v = 0; v < static_cast<int>(core_of.size()); ++v) {
      out[static_cast<std::size_t>(core_of[static_cast<std::size_t>(v)])].push_back(v);
    }
    return out;
  }
};

struct Move {
  int part = -1;  // receiving part
  int vertex = -1;
};

// Core-halo edges of part p are exactly the graph edges leaving its core.
std::int64_t count_ch_edges(const MoveState& st, const CHPartition& part, int p) {
  std::int64_t edges = 0;
  for (int v : part.cores[static_cast<std::size_t>(p)]) {
    for (int u : st.g->neighbors(v)) {
      if (st.core_of[static_cast<std::size_t>(u)] != p) ++edges;
    }
  }
  return edges;
}

}  // namespace

std::int64_t sa_delta(const CHPartition& p, int target_part, int halo_vertex, const SparsityGraph& halo_graph) {
  const int n = halo_graph.size();
  if (p.vertex_count != n) throw validation_error("partition and graph sizes differ");
  if (target_part < 0 || target_part >= p.part_count()) throw validation_error("target part out of range");
  if (halo_vertex < 0 || halo_vertex >= n) throw validation_error("vertex out of range");

  std::vector<int> core_of(static_cast<std::size_t>(n), -1);
  for (int q = 0; q < p.part_count(); ++q) {
    for (int v : p.cores[static_cast<std::size_t>(q)]) core_of[static_cast<std::size_t>(v)] = q;
  }
  const int source = core_of[static_cast<std::size_t>(halo_vertex)];
  if (source == -1) throw validation_error("vertex not covered by any core");
  if (source == target_part)
    throw validation_error("degenerate move: vertex " + std::to_string(halo_vertex) +
                           " is already in the core of part " + std::to_string(target_part));
  const auto& halo = p.halos[static_cast<std::size_t>(target_part)];
  if (!std::binary_search(halo.begin(), halo.end(), halo_vertex))
    throw validation_error("vertex " + std::to_string(halo_vertex) + " is not in the halo of part " +
                           std::to_string(target_part));
  if (p.cores[static_cast<std::size_t>(source)].size() == 1)
    throw validation_error("move would empty the core of part " + std::to_string(source));

  const auto& halo_a = p.halos[static_cast<std::size_t>(source)];
  auto in_halo = [](const std::vector<int>& h, int v) { return std::binary_search(h.begin(), h.end(), v); };

  int gain_b = 0;
  int loss_a = 0;
  bool w_joins_a = false;
  for (int u : halo_graph.neighbors(halo_vertex)) {
    const int cu = core_of[static_cast<std::size_t>(u)];
    if (cu != target_part && !in_halo(halo, u)) ++gain_b;
    if (cu == source) w_joins_a = true;
    if (cu != source && in_halo(halo_a, u)) {
      int in_a = 0;
      for (int x : halo_graph.neighbors(u)) {
        if (core_of[static_cast<std::size_t>(x)] == source) ++in_a;
      }
      if (in_a == 1) ++loss_a;
    }
  }

  const std::int64_t cb = static_cast<std::int64_t>(p.cores[static_cast<std::size_t>(target_part)].size());
  const std::int64_t hb = static_cast<std::int64_t>(halo.size());
  const std::int64_t ca = static_cast<std::int64_t>(p.cores[static_cast<std::size_t>(source)].size());
  const std::int64_t ha = static_cast<std::int64_t>(halo_a.size());
  return cube(cb + 1 + hb - 1 + gain_b) - cube(cb + hb) +
         cube(ca - 1 + ha - loss_a + (w_joins_a ? 1 : 0)) - cube(ca + ha);
}

bool metropolis_accept(std::int64_t delta, double temperature, double uniform_sample) {
  if (delta < 0) return true;
  return uniform_sample < std::exp(-static_cast<double>(delta) / temperature);
}

SAResult sa_refine(const SparsityGraph& halo_graph, const CHPartition& initial, const SAConfig& cfg) {
  if (cfg.iterations < 0) throw validation_error("iteration count must be non-negative");
  if (initial.vertex_count != halo_graph.size()) throw validation_error("partition and graph sizes differ");
  {
    CHPartition check = build_ch_partition(halo_graph, initial.cores);
    if (check.halos != initial.halos)
      throw validation_error("partition halos were not derived from this graph");
  }

  SAResult result;
  result.initial_objective = objective_sum_cubes(initial);
  result.best_objective = result.initial_objective;

  MoveState st;
  st.init(halo_graph, initial);
  CHPartition current = initial;

  bool any_halo = false;
  for (int p = 0; p < st.q; ++p) any_halo = any_halo || st.halo_size[static_cast<std::size_t>(p)] > 0;
  if (!any_halo || cfg.iterations == 0) {
    result.refined = initial;
    result.last = initial;
    return result;
  }

  std::mt19937_64 rng(cfg.seed);
  std::int64_t objective = result.initial_objective;
  std::vector<std::vector<int>> best_cores = initial.cores;

  std::vector<int> parts_with_halo;
  parts_with_halo.reserve(static_cast<std::size_t>(st.q));

  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    const double t = 1.0 / static_cast<double>(iter);

    parts_with_halo.clear();
    for (int p = 0; p < st.q; ++p) {
      if (st.halo_size[static_cast<std::size_t>(p)] > 0) parts_with_halo.push_back(p);
    }
    if (parts_with_halo.empty()) break;

    // sample a part, then one of its core-halo edges; resample moves that
    // would empty a core
    Move move;
    bool found = false;
    for (int attempt = 0; attempt < 64 && !found; ++attempt) {
      const int p = parts_with_halo[static_cast<std::size_t>(detail::uniform_index(rng, parts_with_halo.size()))];
      const std::int64_t edges = count_ch_edges(st, current, p);
      std::int64_t k = static_cast<std::int64_t>(detail::uniform_below(rng, static_cast<std::uint64_t>(edges)));
      int w = -1;
      for (int v : current.cores[static_cast<std::size_t>(p)]) {
        for (int u : halo_graph.neighbors(v)) {
          if (st.core_of[static_cast<std::size_t>(u)] != p && k-- == 0) {
            w = u;
            break;
          }
        }
        if (w != -1) break;
      }
      if (st.core_size[static_cast<std::size_t>(st.core_of[static_cast<std::size_t>(w)])] > 1) {
        move = Move{p, w};
        found = true;
      }
    }
    if (!found) {
      // every sampled move emptied a core; check whether a legal move exists at all
      for (int p : parts_with_halo) {
        for (int v : current.cores[static_cast<std::size_t>(p)]) {
          for (int u : halo_graph.neighbors(v)) {
            if (st.core_of[static_cast<std::size_t>(u)] != p &&
                st.core_size[static_cast<std::size_t>(st.core_of[static_cast<std::size_t>(u)])] > 1) {
              move = Move{p, u};
              found = true;
              break;
            }
          }
          if (found) break;
        }
        if (found) break;
      }
      if (!found) break;  // no legal move anywhere; keep the best seen
    }

    const std::int64_t delta = st.delta(move.vertex, move.part);
    bool accepted;
    if (delta < 0) {
      accepted = true;
    } else {
      accepted = metropolis_accept(delta, t, detail::uniform_unit(rng));
    }

    if (accepted) {
      st.apply(move.vertex, move.part);
      objective += delta;
      current = build_ch_partition(halo_graph, st.cores());
      assert(objective == objective_sum_cubes(current));
      if (objective < result.best_objective) {
        result.best_objective = objective;
        best_cores = current.cores;
      }
    }

    result.trace.push_back(SATraceRow{iter, move.part, move.vertex, delta, t, accepted, objective,
                                      result.best_objective});
  }

  result.refined = build_ch_partition(halo_graph, std::move(best_cores));
  result.last = std::move(current);
  return result;
}

void write_sa_trace_csv(std::span<const SATraceRow> trace, std::ostream& out) {
  out << "iteration,part,vertex,delta,temperature,accepted,objective,best_objective\n";
  char buf[160];
  for (const SATraceRow& row : trace) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%lld,%.17g,%d,%lld,%lld\n", row.iteration, row.part, row.vertex,
                  static_cast<long long>(row.delta), row.temperature, row.accepted ? 1 : 0,
                  static_cast<long long>(row.objective), static_cast<long long>(row.best_objective));
    out << buf;
  }
}

}  // namespace chsp2
