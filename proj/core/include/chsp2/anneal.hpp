#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "chsp2/sgraph.hpp"

namespace chsp2 {

enum class TemperatureSchedule { reciprocal };  // t(i) = 1/i

struct SAConfig {
  int iterations = 100;
  std::uint64_t seed = 0;
  TemperatureSchedule temperature = TemperatureSchedule::reciprocal;
};

struct SATraceRow {
  int iteration = 0;  // 1-based
  int part = -1;      // receiving part of the proposed move
  int vertex = -1;    // halo vertex proposed for the move
  std::int64_t delta = 0;
  double temperature = 0.0;
  bool accepted = false;
  std::int64_t objective = 0;       // objective after this iteration
  std::int64_t best_objective = 0;  // best seen so far
};

struct SAResult {
  CHPartition refined;  // best partition seen over the whole run
  CHPartition last;     // final iterate
  std::vector<SATraceRow> trace;
  std::int64_t initial_objective = 0;
  std::int64_t best_objective = 0;
};

// Objective change of moving halo vertex w into the core of `target_part`
// (w leaves its current core). Recomputes only the two affected parts'
// (core+halo)^3 terms; all other halos are untouched by such a move.
// Throws validation_error when the move is illegal: w not in the target
// halo, w already in the target core, or the move would empty w's core.
std::int64_t sa_delta(const CHPartition& p, int target_part, int halo_vertex, const SparsityGraph& halo_graph);

// The acceptance rule: always for improving moves, otherwise accepted when
// uniform_sample < exp(-delta / temperature).
bool metropolis_accept(std::int64_t delta, double temperature, double uniform_sample);

// Simulated annealing refinement of a core-halo partition. Per iteration i
// (1-based, temperature 1/i): pick a uniform random part with at least one
// core-halo edge, pick a uniform random core-halo edge (v,w) of that part,
// and propose moving w into the part's core; accept with the Metropolis
// rule. Moves that would empty a core are resampled. Returns the best
// partition seen. A partition with no core-halo edges anywhere is returned
// unchanged. Identical inputs and seed give identical traces and outputs.
SAResult sa_refine(const SparsityGraph& halo_graph, const CHPartition& initial, const SAConfig& cfg = {});

// CSV columns: iteration,part,vertex,delta,temperature,accepted,objective,best_objective
void write_sa_trace_csv(std::span<const SATraceRow> trace, std::ostream& out);

}  // namespace chsp2
