#include "chsp2/partition.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "chsp2/errors.hpp"
#include "rng.hpp"

namespace chsp2 {

std::vector<std::vector<int>> bfs_block_partition(const SparsityGraph& g, int part_count, std::uint64_t seed) {
  const int n = g.size();
  if (part_count < 2) throw validation_error("part count must be at least 2");
  if (part_count > n) throw validation_error("part count exceeds vertex count");

  std::mt19937_64 rng(seed);
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::vector<int> pos(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    pool[static_cast<std::size_t>(v)] = v;
    pos[static_cast<std::size_t>(v)] = v;
  }
  int pool_size = n;
  auto remove_from_pool = [&](int v) {
    const int at = pos[static_cast<std::size_t>(v)];
    const int last = pool[static_cast<std::size_t>(pool_size - 1)];
    pool[static_cast<std::size_t>(at)] = last;
    pos[static_cast<std::size_t>(last)] = at;
    --pool_size;
  };

  std::vector<int> sizes(static_cast<std::size_t>(part_count), 0);
  std::vector<int> queue;
  for (int part = 0; part < part_count; ++part) {
    const int parts_left = part_count - part;
    const int cap = (pool_size + parts_left - 1) / parts_left;
    const int start = pool[static_cast<std::size_t>(detail::uniform_index(rng, static_cast<std::size_t>(pool_size)))];

    queue.clear();
    queue.push_back(start);
    owner[static_cast<std::size_t>(start)] = part;
    remove_from_pool(start);
    int taken = 1;
    std::size_t head = 0;
    while (head < queue.size() && taken < cap) {
      const int v = queue[head++];
      for (int u : g.neighbors(v)) {
        if (owner[static_cast<std::size_t>(u)] != -1) continue;
        owner[static_cast<std::size_t>(u)] = part;
        remove_from_pool(u);
        queue.push_back(u);
        if (++taken == cap) break;
      }
    }
    sizes[static_cast<std::size_t>(part)] = taken;
  }

  // attach leftovers to the smallest adjacent core; repeat so chains of
  // unassigned vertices drain toward the assigned region
  if (pool_size > 0) {
    std::vector<int> leftovers(pool.begin(), pool.begin() + pool_size);
    std::sort(leftovers.begin(), leftovers.end());
    bool progress = true;
    while (!leftovers.empty() && progress) {
      progress = false;
      std::vector<int> still;
      for (int v : leftovers) {
        int best = -1;
        for (int u : g.neighbors(v)) {
          const int p = owner[static_cast<std::size_t>(u)];
          if (p == -1) continue;
          if (best == -1 || sizes[static_cast<std::size_t>(p)] < sizes[static_cast<std::size_t>(best)] ||
              (sizes[static_cast<std::size_t>(p)] == sizes[static_cast<std::size_t>(best)] && p < best)) {
            best = p;
          }
        }
        if (best == -1) {
          still.push_back(v);
        } else {
          owner[static_cast<std::size_t>(v)] = best;
          ++sizes[static_cast<std::size_t>(best)];
          progress = true;
        }
      }
      leftovers.swap(still);
    }
    // vertices in components with no assigned neighbor at all
    for (int v : leftovers) {
      int best = 0;
      for (int p = 1; p < part_count; ++p) {
        if (sizes[static_cast<std::size_t>(p)] < sizes[static_cast<std::size_t>(best)]) best = p;
      }
      owner[static_cast<std::size_t>(v)] = best;
      ++sizes[static_cast<std::size_t>(best)];
    }
  }

  std::vector<std::vector<int>> cores(static_cast<std::size_t>(part_count));
  for (int p = 0; p < part_count; ++p) cores[static_cast<std::size_t>(p)].reserve(static_cast<std::size_t>(sizes[static_cast<std::size_t>(p)]));
  for (int v = 0; v < n; ++v) cores[static_cast<std::size_t>(owner[static_cast<std::size_t>(v)])].push_back(v);
  return cores;
}

std::vector<std::vector<int>> import_partition(const std::string& path, const SparsityGraph& g) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");
  const int n = g.size();

  std::vector<int> owner;
  owner.reserve(static_cast<std::size_t>(n));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      // a single trailing blank line is tolerated, anything else is not
      std::string rest;
      while (std::getline(in, rest)) {
        if (rest.find_first_not_of(" \t\r") != std::string::npos)
          throw parse_error(path + ":" + std::to_string(lineno) + ": blank line inside part list");
      }
      break;
    }
    std::istringstream s(line);
    long long id;
    std::string rest;
    if (!(s >> id) || (s >> rest))
      throw parse_error(path + ":" + std::to_string(lineno) + ": expected a single integer part id");
    if (id < 0) throw parse_error(path + ":" + std::to_string(lineno) + ": negative part id");
    if (id > std::numeric_limits<int>::max())
      throw parse_error(path + ":" + std::to_string(lineno) + ": part id out of range");
    owner.push_back(static_cast<int>(id));
  }
  if (static_cast<int>(owner.size()) != n) {
    throw parse_error(path + ": expected " + std::to_string(n) + " part ids, found " +
                      std::to_string(owner.size()));
  }

  int q = 0;
  for (int id : owner) q = std::max(q, id + 1);
  std::vector<std::vector<int>> cores(static_cast<std::size_t>(q));
  for (int v = 0; v < n; ++v) cores[static_cast<std::size_t>(owner[static_cast<std::size_t>(v)])].push_back(v);
  for (int p = 0; p < q; ++p) {
    if (cores[static_cast<std::size_t>(p)].empty())
      throw parse_error(path + ": part id " + std::to_string(p) + " is unused (ids must be contiguous from 0)");
  }
  return cores;
}

void export_partition(std::span<const std::vector<int>> cores, int vertex_count, const std::string& path) {
  std::vector<int> owner(static_cast<std::size_t>(vertex_count), -1);
  for (std::size_t p = 0; p < cores.size(); ++p) {
    for (int v : cores[p]) {
      if (v < 0 || v >= vertex_count) throw validation_error("core vertex out of range");
      if (owner[static_cast<std::size_t>(v)] != -1) throw validation_error("cores overlap");
      owner[static_cast<std::size_t>(v)] = static_cast<int>(p);
    }
  }
  for (int v = 0; v < vertex_count; ++v) {
    if (owner[static_cast<std::size_t>(v)] == -1) throw validation_error("cores do not cover every vertex");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (int v = 0; v < vertex_count; ++v) out << owner[static_cast<std::size_t>(v)] << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

CoreValidation validate_cores(const SparsityGraph& g, std::span<const std::vector<int>> cores) {
  const int n = g.size();
  CoreValidation r;
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t p = 0; p < cores.size(); ++p) {
    if (cores[p].empty()) {
      r.kind = CoreValidation::Kind::empty_core;
      r.part = static_cast<int>(p);
      r.message = "core " + std::to_string(p) + " is empty";
      return r;
    }
    for (int v : cores[p]) {
      if (v < 0 || v >= n) {
        r.kind = CoreValidation::Kind::vertex_out_of_range;
        r.part = static_cast<int>(p);
        r.vertex = v;
        r.message = "core " + std::to_string(p) + " contains out-of-range vertex " + std::to_string(v);
        return r;
      }
      if (owner[static_cast<std::size_t>(v)] != -1) {
        r.kind = CoreValidation::Kind::overlap;
        r.part = static_cast<int>(p);
        r.vertex = v;
        r.message = "vertex " + std::to_string(v) + " appears in cores " +
                    std::to_string(owner[static_cast<std::size_t>(v)]) + " and " + std::to_string(p);
        return r;
      }
      owner[static_cast<std::size_t>(v)] = static_cast<int>(p);
    }
  }
  for (int v = 0; v < n; ++v) {
    if (owner[static_cast<std::size_t>(v)] == -1) {
      r.kind = CoreValidation::Kind::not_covered;
      r.vertex = v;
      r.message = "vertex " + std::to_string(v) + " is not covered by any core";
      return r;
    }
  }
  return r;
}

}  // namespace chsp2
