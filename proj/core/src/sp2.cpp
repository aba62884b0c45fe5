#include "chsp2/sp2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "chsp2/errors.hpp"

namespace chsp2 {

std::pair<double, double> gershgorin_bounds(const SymSparseMatrix& m) {
  if (m.size() == 0) throw validation_error("empty matrix has no spectral bounds");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.size(); ++i) {
    double center = 0.0, radius = 0.0;
    for (const MatrixEntry& e : m.row(i)) {
      if (e.col == i) {
        center = e.value;
      } else {
        radius += std::fabs(e.value);
      }
    }
    lo = std::min(lo, center - radius);
    hi = std::max(hi, center + radius);
  }
  return {lo, hi};
}

SymSparseMatrix sp2_initial(const SymSparseMatrix& h, double eps_min, double eps_max) {
  if (!(eps_max > eps_min)) throw validation_error("spectral bounds require eps_max > eps_min");
  const double range = eps_max - eps_min;
  SymSparseMatrix x(h.size());
  for (int i = 0; i < h.size(); ++i) {
    for (const MatrixEntry& e : h.row(i)) {
      if (e.col < i) continue;  // symmetric assignment covers the mirror
      if (e.col == i) {
        x.set(i, i, (eps_max - e.value) / range);
      } else {
        x.set(i, e.col, -e.value / range);
      }
    }
  }
  return x;
}

namespace {

struct StepChoice {
  Branch branch = Branch::square;
  double trace_before = 0.0;
  double trace_squared = 0.0;
};

StepChoice choose_branch(const SymSparseMatrix& x, const SymSparseMatrix& x2, double nocc) {
  StepChoice c;
  c.trace_before = x.trace();
  c.trace_squared = x2.trace();
  const double err_square = std::fabs(c.trace_squared - nocc);
  const double err_dms = std::fabs(2.0 * c.trace_before - c.trace_squared - nocc);
  c.branch = err_square <= err_dms ? Branch::square : Branch::dms;
  return c;
}

SymSparseMatrix apply_branch(Branch branch, const SymSparseMatrix& x, SymSparseMatrix&& x2) {
  if (branch == Branch::square) return std::move(x2);
  return axpby(2.0, x, -1.0, x2);
}

double step_tau(const SP2Config& cfg, int step) {
  if (cfg.step_taus.empty()) return cfg.tau;
  const std::size_t i = std::min(static_cast<std::size_t>(step), cfg.step_taus.size() - 1);
  return cfg.step_taus[i];
}

}  // namespace

SP2StepResult sp2_step(const SymSparseMatrix& x, double nocc) {
  SymSparseMatrix x2 = square(x);
  const StepChoice c = choose_branch(x, x2, nocc);
  return SP2StepResult{apply_branch(c.branch, x, std::move(x2)), c.branch};
}

SP2Result sm_sp2(const SymSparseMatrix& h, const SP2Config& cfg) {
  const int n = h.size();
  if (!(cfg.nocc > 0.0) || !(cfg.nocc < static_cast<double>(n)))
    throw validation_error("occupation must satisfy 0 < nocc < n");
  if (cfg.max_iter < 1) throw validation_error("max_iter must be at least 1");
  if (cfg.tau < 0.0) throw validation_error("threshold must be non-negative");
  for (double t : cfg.step_taus) {
    if (t < 0.0) throw validation_error("threshold must be non-negative");
  }

  double eps_min, eps_max;
  if (cfg.eps_min && cfg.eps_max) {
    eps_min = *cfg.eps_min;
    eps_max = *cfg.eps_max;
  } else if (!cfg.eps_min && !cfg.eps_max) {
    std::tie(eps_min, eps_max) = gershgorin_bounds(h);
  } else {
    throw validation_error("spectral bounds must be given as a pair or not at all");
  }

  SP2Result result;
  result.eps_min = eps_min;
  result.eps_max = eps_max;

  SymSparseMatrix x = sp2_initial(h, eps_min, eps_max);
  for (int it = 0; it <= cfg.max_iter; ++it) {
    SymSparseMatrix x2 = square(x);
    const StepChoice c = choose_branch(x, x2, cfg.nocc);
    result.trace_error = std::fabs(c.trace_before - cfg.nocc);
    result.idempotency_error = std::fabs(c.trace_squared - c.trace_before);
    if (result.trace_error < cfg.conv_tol && result.idempotency_error < cfg.conv_tol) {
      result.converged = true;
      break;
    }
    if (it == cfg.max_iter) break;  // budget spent, return the last iterate

    const double tau = step_tau(cfg, it);
    x = threshold(apply_branch(c.branch, x, std::move(x2)), tau);
    result.schedule.push_back(PolyStep{c.branch, tau});
  }

  result.iterations = static_cast<int>(result.schedule.size());
  result.density = std::move(x);
  return result;
}

PolyApplyResult thresholded_poly_apply(const SymSparseMatrix& a, const PolySchedule& schedule) {
  PolyApplyResult out;
  out.result = a;
  out.dropped_edges.resize(schedule.size());
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const PolyStep& step = schedule[s];
    if (step.tau < 0.0) throw validation_error("threshold must be non-negative");
    SymSparseMatrix x2 = square(out.result);
    SymSparseMatrix y = apply_branch(step.branch, out.result, std::move(x2));
    out.result = threshold_recording(y, step.tau, out.dropped_edges[s]);
  }
  return out;
}

namespace {

const char* branch_name(Branch b) { return b == Branch::square ? "SQUARE" : "DMS"; }

[[noreturn]] void sched_fail(const std::string& path, std::size_t lineno, const std::string& what) {
  throw parse_error(path + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace

ScheduleFile load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path + "'");

  ScheduleFile sched;
  std::string line;
  std::size_t lineno = 0;
  int expected_step = 0;
  bool saw_any = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') continue;

    std::istringstream s(line);
    std::string head;
    s >> head;
    if (head == "init") {
      if (saw_any || sched.spectral_bounds)
        sched_fail(path, lineno, "'init' must be the first non-comment line");
      std::string kmin, kmax;
      s >> kmin >> kmax;
      double lo, hi;
      if (std::sscanf(kmin.c_str(), "eps_min=%lf", &lo) != 1 ||
          std::sscanf(kmax.c_str(), "eps_max=%lf", &hi) != 1) {
        sched_fail(path, lineno, "malformed init line: expected 'init eps_min=<v> eps_max=<v>'");
      }
      std::string rest;
      if (s >> rest) sched_fail(path, lineno, "malformed init line: trailing data");
      if (!(hi > lo)) sched_fail(path, lineno, "init bounds require eps_max > eps_min");
      sched.spectral_bounds = std::make_pair(lo, hi);
      continue;
    }
    if (head != "step") sched_fail(path, lineno, "expected 'step k: SQUARE|DMS tau=<v>'");
    saw_any = true;

    std::string knum, tag, tau_field;
    s >> knum >> tag >> tau_field;
    std::string rest;
    if (s >> rest) sched_fail(path, lineno, "malformed step line: trailing data");
    if (knum.empty() || knum.back() != ':') sched_fail(path, lineno, "expected 'step k:'");
    knum.pop_back();
    int k;
    try {
      std::size_t pos = 0;
      k = std::stoi(knum, &pos);
      if (pos != knum.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      sched_fail(path, lineno, "malformed step number '" + knum + "'");
    }
    if (k != expected_step)
      sched_fail(path, lineno, "step " + std::to_string(k) + " out of order: expected " +
                 std::to_string(expected_step));
    Branch branch;
    if (tag == "SQUARE") {
      branch = Branch::square;
    } else if (tag == "DMS") {
      branch = Branch::dms;
    } else {
      sched_fail(path, lineno, "unknown branch tag '" + tag + "'");
    }
    double tau;
    if (std::sscanf(tau_field.c_str(), "tau=%lf", &tau) != 1)
      sched_fail(path, lineno, "malformed threshold '" + tau_field + "'");
    if (tau < 0.0) sched_fail(path, lineno, "threshold must be non-negative");
    sched.steps.push_back(PolyStep{branch, tau});
    ++expected_step;
  }
  return sched;
}

void save_schedule(const ScheduleFile& schedule, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  char buf[120];
  if (schedule.spectral_bounds) {
    std::snprintf(buf, sizeof buf, "init eps_min=%.17g eps_max=%.17g\n", schedule.spectral_bounds->first,
                  schedule.spectral_bounds->second);
    out << buf;
  }
  for (std::size_t k = 0; k < schedule.steps.size(); ++k) {
    std::snprintf(buf, sizeof buf, "step %zu: %s tau=%.17g\n", k, branch_name(schedule.steps[k].branch),
                  schedule.steps[k].tau);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace chsp2
