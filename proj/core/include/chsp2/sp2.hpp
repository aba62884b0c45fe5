#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chsp2/spmat.hpp"

namespace chsp2 {

// The two purification branches: X^2 contracts occupation, 2X - X^2 expands it.
enum class Branch { square, dms };

struct PolyStep {
  Branch branch = Branch::square;
  double tau = 0.0;  // threshold applied after the polynomial

  bool operator==(const PolyStep&) const = default;
};

// Realized evaluation plan of a thresholded matrix polynomial of degree
// 2^size(): per step a quadratic branch tag plus the threshold applied to
// its result.
using PolySchedule = std::vector<PolyStep>;

struct SP2Config {
  double nocc = 0.0;      // target occupation (trace of the projector), 0 < nocc < n
  double tau = 1e-5;      // threshold applied after every step
  int max_iter = 30;
  double conv_tol = 1e-10;
  // Spectral bounds for the initial transform; Gershgorin estimates of the
  // input when absent.
  std::optional<double> eps_min;
  std::optional<double> eps_max;
  // Optional per-step threshold override; the last value repeats when the
  // run is longer than the list.
  std::vector<double> step_taus;
};

struct SP2Result {
  SymSparseMatrix density;
  PolySchedule schedule;  // realized branches and thresholds, in order
  bool converged = false;
  int iterations = 0;     // steps actually taken == schedule.size()
  double trace_error = 0.0;        // |trace(D) - nocc|
  double idempotency_error = 0.0;  // |trace(D^2) - trace(D)|
  double eps_min = 0.0;            // bounds used by the initial transform
  double eps_max = 0.0;
};

// Row-sum spectral bounds: min_i (a_ii - r_i), max_i (a_ii + r_i) with
// r_i the absolute off-diagonal row sum.
std::pair<double, double> gershgorin_bounds(const SymSparseMatrix& m);

// X0 = (eps_max*I - H) / (eps_max - eps_min). Maps [eps_min, eps_max] onto
// [0, 1] with the spectrum order reversed; preserves the stored pattern.
// Requires eps_max > eps_min.
SymSparseMatrix sp2_initial(const SymSparseMatrix& h, double eps_min, double eps_max);

struct SP2StepResult {
  SymSparseMatrix next;
  Branch branch = Branch::square;
};

// One unthresholded purification step: computes X^2, then picks the branch
// whose trace lands closer to nocc (ties go to square).
SP2StepResult sp2_step(const SymSparseMatrix& x, double nocc);

// Thresholded second-order spectral projection: iterates trace-steered
// branches with per-step thresholding from X0 until |trace - nocc| and the
// trace idempotency error both fall under conv_tol, or max_iter steps were
// taken (then converged=false and the last iterate is returned). Replaying
// the returned schedule through thresholded_poly_apply on X0 reproduces the
// density matrix bit for bit.
SP2Result sm_sp2(const SymSparseMatrix& h, const SP2Config& cfg);

struct PolyApplyResult {
  SymSparseMatrix result;
  // Per step, the off-diagonal pairs (i < j) removed by that step's
  // threshold: the realized dropped edge set.
  std::vector<std::vector<std::pair<int, int>>> dropped_edges;
};

// Applies a fixed schedule: per step the branch polynomial, then its
// threshold. The result's sparsity pattern is contained in the distance
// 2^steps closure of the input's pattern.
PolyApplyResult thresholded_poly_apply(const SymSparseMatrix& a, const PolySchedule& schedule);

// Text schedule format:
//   init eps_min=<v> eps_max=<v>      (optional first line)
//   step 0: SQUARE tau=<v>
//   step 1: DMS tau=<v>
// Step numbers must count up from 0; values use 17 significant digits.
struct ScheduleFile {
  std::optional<std::pair<double, double>> spectral_bounds;
  PolySchedule steps;
};

ScheduleFile load_schedule(const std::string& path);
void save_schedule(const ScheduleFile& schedule, const std::string& path);

}  // namespace chsp2
