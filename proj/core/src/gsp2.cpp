#include "chsp2/gsp2.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <thread>
#include <tuple>

#include "chsp2/errors.hpp"

namespace chsp2 {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void run_on_pool(int workers, int jobs, const std::function<void(int)>& body) {
  const int threads = std::max(1, std::min(workers, jobs));
  if (threads == 1) {
    for (int i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= jobs) return;
        body(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

void dms_in_place(DenseMatrix& x, const DenseMatrix& x2) {
  const int n = x.size();
  double* a = x.data();
  const double* b = x2.data();
  const std::size_t total = static_cast<std::size_t>(n) * n;
  for (std::size_t i = 0; i < total; ++i) a[i] = 2.0 * a[i] - b[i];
}

}  // namespace

PartWorkItem extract_submatrix(const SymSparseMatrix& a, const CHPartition& p, int part_index) {
  if (part_index < 0 || part_index >= p.part_count()) throw validation_error("part index out of range");
  if (a.size() != p.vertex_count) throw validation_error("matrix and partition sizes differ");

  const auto& core = p.cores[static_cast<std::size_t>(part_index)];
  const auto& halo = p.halos[static_cast<std::size_t>(part_index)];

  PartWorkItem item;
  item.part_index = part_index;
  item.core_size = static_cast<int>(core.size());
  item.local_to_global.reserve(core.size() + halo.size());
  item.local_to_global.insert(item.local_to_global.end(), core.begin(), core.end());
  item.local_to_global.insert(item.local_to_global.end(), halo.begin(), halo.end());

  const int dim = static_cast<int>(item.local_to_global.size());
  std::vector<int> global_to_local(static_cast<std::size_t>(a.size()), -1);
  for (int l = 0; l < dim; ++l) global_to_local[static_cast<std::size_t>(item.local_to_global[static_cast<std::size_t>(l)])] = l;

  item.submatrix = DenseMatrix(dim);
  for (int l = 0; l < dim; ++l) {
    const int g = item.local_to_global[static_cast<std::size_t>(l)];
    for (const MatrixEntry& e : a.row(g)) {
      const int lc = global_to_local[static_cast<std::size_t>(e.col)];
      if (lc >= 0) item.submatrix.at(l, lc) = e.value;
    }
  }
  return item;
}

DenseMatrix evaluate_part(const PartWorkItem& item, const PolySchedule& schedule) {
  DenseMatrix x = item.submatrix;
  for (const PolyStep& step : schedule) {
    DenseMatrix x2 = square(x);
    if (step.branch == Branch::square) {
      x = std::move(x2);
    } else {
      dms_in_place(x, x2);
    }
    threshold_in_place(x, step.tau);
  }
  return x;
}

AssembleResult assemble(std::span<const PartWorkItem> items, std::span<const DenseMatrix> results,
                        const CHPartition& p, int n, const AssembleOptions& options) {
  if (static_cast<int>(items.size()) != p.part_count() || results.size() != items.size())
    throw validation_error("assemble needs exactly one result per part");
  if (n != p.vertex_count) throw validation_error("matrix and partition sizes differ");

  // gather every part's core rows, indexed by global row
  std::vector<std::vector<MatrixEntry>> rows(static_cast<std::size_t>(n));
  std::vector<char> written(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 0; k < items.size(); ++k) {
    const PartWorkItem& item = items[k];
    const DenseMatrix& res = results[k];
    const int dim = static_cast<int>(item.local_to_global.size());
    if (res.size() != dim) throw validation_error("part result dimension does not match its work item");
    for (int r = 0; r < item.core_size; ++r) {
      const int g = item.local_to_global[static_cast<std::size_t>(r)];
      if (written[static_cast<std::size_t>(g)])
        throw validation_error("row " + std::to_string(g) + " written by more than one part");
      written[static_cast<std::size_t>(g)] = 1;
      auto& row = rows[static_cast<std::size_t>(g)];
      for (int c = 0; c < dim; ++c) {
        const double v = res.at(r, c);
        const int gc = item.local_to_global[static_cast<std::size_t>(c)];
        if (gc == g) {
          row.push_back(MatrixEntry{gc, v});  // diagonal stays structural
        } else if (v != 0.0 && !(std::fabs(v) < options.final_tau)) {
          row.push_back(MatrixEntry{gc, v});
        }
      }
      std::sort(row.begin(), row.end(), [](const MatrixEntry& a, const MatrixEntry& b) { return a.col < b.col; });
    }
  }
  for (int g = 0; g < n; ++g) {
    if (!written[static_cast<std::size_t>(g)])
      throw validation_error("row " + std::to_string(g) + " was not produced by any part");
  }

  auto lookup = [&rows](int i, int j) -> const MatrixEntry* {
    const auto& row = rows[static_cast<std::size_t>(i)];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const MatrixEntry& e, int c) { return e.col < c; });
    if (it == row.end() || it->col != j) return nullptr;
    return &*it;
  };

  // rows come from different parts; verify they agree before keeping one
  // value per unordered pair (the smaller-index row's)
  double max_asym = 0.0;
  for (int i = 0; i < n; ++i) {
    for (const MatrixEntry& e : rows[static_cast<std::size_t>(i)]) {
      if (e.col == i) continue;
      const MatrixEntry* back = lookup(e.col, i);
      const double other = back ? back->value : 0.0;
      max_asym = std::max(max_asym, std::fabs(e.value - other));
    }
  }
  if (max_asym > options.symmetry_tol) {
    char buf[120];
    std::snprintf(buf, sizeof buf, "assembled matrix asymmetry %.3e exceeds tolerance %.3e", max_asym,
                  options.symmetry_tol);
    throw validation_error(buf);
  }

  std::vector<std::tuple<int, int, double>> trips;
  for (int i = 0; i < n; ++i) {
    for (const MatrixEntry& e : rows[static_cast<std::size_t>(i)]) {
      if (e.col >= i) {
        trips.emplace_back(i, e.col, e.value);
      } else if (lookup(e.col, i) == nullptr) {
        // pattern present only below the diagonal; keep it under the
        // smaller-index convention
        trips.emplace_back(e.col, i, e.value);
      }
    }
  }

  AssembleResult out;
  out.matrix = SymSparseMatrix::from_triplets(n, trips);
  out.max_asymmetry = max_asym;
  return out;
}

namespace {

RunMetrics make_metrics(const CHPartition& p, std::size_t schedule_len, const std::vector<double>& part_ms,
                        int workers) {
  RunMetrics m;
  m.workers = workers;
  m.parts.reserve(static_cast<std::size_t>(p.part_count()));
  for (int i = 0; i < p.part_count(); ++i) {
    PartRunMetrics pm;
    pm.part = i;
    pm.core_size = static_cast<int>(p.cores[static_cast<std::size_t>(i)].size());
    pm.halo_size = static_cast<int>(p.halos[static_cast<std::size_t>(i)].size());
    const std::int64_t dim = p.part_size(i);
    pm.flops = static_cast<std::int64_t>(schedule_len) * dim * dim * dim;
    pm.ms = part_ms[static_cast<std::size_t>(i)];
    m.parts.push_back(pm);
  }
  m.sum_cubes = objective_sum_cubes(p);
  return m;
}

}  // namespace

GSP2Result gsp2_run(const SymSparseMatrix& a, const CHPartition& p, const PolySchedule& schedule,
                    const GSP2Options& options) {
  if (options.workers < 1) throw validation_error("worker count must be at least 1");
  const auto t0 = Clock::now();
  const int parts = p.part_count();

  std::vector<PartWorkItem> items;
  items.reserve(static_cast<std::size_t>(parts));
  for (int i = 0; i < parts; ++i) items.push_back(extract_submatrix(a, p, i));

  std::vector<DenseMatrix> results(static_cast<std::size_t>(parts));
  std::vector<double> part_ms(static_cast<std::size_t>(parts), 0.0);
  run_on_pool(options.workers, parts, [&](int i) {
    const auto s0 = Clock::now();
    results[static_cast<std::size_t>(i)] = evaluate_part(items[static_cast<std::size_t>(i)], schedule);
    part_ms[static_cast<std::size_t>(i)] = ms_since(s0);
  });

  AssembleOptions aopt;
  aopt.final_tau = schedule.empty() ? 0.0 : schedule.back().tau;
  aopt.symmetry_tol = options.symmetry_tol;
  AssembleResult assembled = assemble(items, results, p, a.size(), aopt);

  GSP2Result out;
  out.density = std::move(assembled.matrix);
  out.metrics = make_metrics(p, schedule.size(), part_ms, std::max(1, std::min(options.workers, parts)));
  out.metrics.max_asymmetry = assembled.max_asymmetry;
  out.metrics.wall_ms = ms_since(t0);
  return out;
}

GSP2SP2Result gsp2_sp2_run(const SymSparseMatrix& h, const CHPartition& p, const SP2Config& cfg,
                           const GSP2Options& options) {
  if (options.workers < 1) throw validation_error("worker count must be at least 1");
  const int n = h.size();
  if (!(cfg.nocc > 0.0) || !(cfg.nocc < static_cast<double>(n)))
    throw validation_error("occupation must satisfy 0 < nocc < n");
  if (cfg.max_iter < 1) throw validation_error("max_iter must be at least 1");
  if (cfg.tau < 0.0) throw validation_error("threshold must be non-negative");

  const auto t0 = Clock::now();

  double eps_min, eps_max;
  if (cfg.eps_min && cfg.eps_max) {
    eps_min = *cfg.eps_min;
    eps_max = *cfg.eps_max;
  } else if (!cfg.eps_min && !cfg.eps_max) {
    std::tie(eps_min, eps_max) = gershgorin_bounds(h);
  } else {
    throw validation_error("spectral bounds must be given as a pair or not at all");
  }
  const SymSparseMatrix x0 = sp2_initial(h, eps_min, eps_max);

  const int parts = p.part_count();
  std::vector<PartWorkItem> items;
  items.reserve(static_cast<std::size_t>(parts));
  for (int i = 0; i < parts; ++i) items.push_back(extract_submatrix(x0, p, i));

  std::vector<DenseMatrix> xs(static_cast<std::size_t>(parts));
  for (int i = 0; i < parts; ++i) xs[static_cast<std::size_t>(i)] = items[static_cast<std::size_t>(i)].submatrix;
  std::vector<DenseMatrix> squares(static_cast<std::size_t>(parts));
  std::vector<double> part_ms(static_cast<std::size_t>(parts), 0.0);

  GSP2SP2Result out;
  out.eps_min = eps_min;
  out.eps_max = eps_max;

  auto core_diag_sum = [&](const std::vector<DenseMatrix>& mats) {
    // the global trace, reassembled from the diagonal entries of core rows
    double t = 0.0;
    for (int i = 0; i < parts; ++i) {
      const DenseMatrix& m = mats[static_cast<std::size_t>(i)];
      for (int r = 0; r < items[static_cast<std::size_t>(i)].core_size; ++r) t += m.at(r, r);
    }
    return t;
  };

  for (int it = 0; it <= cfg.max_iter; ++it) {
    run_on_pool(options.workers, parts, [&](int i) {
      const auto s0 = Clock::now();
      squares[static_cast<std::size_t>(i)] = square(xs[static_cast<std::size_t>(i)]);
      part_ms[static_cast<std::size_t>(i)] += ms_since(s0);
    });
    const double tr = core_diag_sum(xs);
    const double tr2 = core_diag_sum(squares);
    out.trace_error = std::fabs(tr - cfg.nocc);
    out.idempotency_error = std::fabs(tr2 - tr);
    if (out.trace_error < cfg.conv_tol && out.idempotency_error < cfg.conv_tol) {
      out.converged = true;
      break;
    }
    if (it == cfg.max_iter) break;

    const double err_square = std::fabs(tr2 - cfg.nocc);
    const double err_dms = std::fabs(2.0 * tr - tr2 - cfg.nocc);
    const Branch branch = err_square <= err_dms ? Branch::square : Branch::dms;
    double tau = cfg.tau;
    if (!cfg.step_taus.empty()) {
      const std::size_t k = std::min(static_cast<std::size_t>(it), cfg.step_taus.size() - 1);
      tau = cfg.step_taus[k];
    }
    run_on_pool(options.workers, parts, [&](int i) {
      const auto s0 = Clock::now();
      DenseMatrix& x = xs[static_cast<std::size_t>(i)];
      if (branch == Branch::square) {
        x = std::move(squares[static_cast<std::size_t>(i)]);
      } else {
        dms_in_place(x, squares[static_cast<std::size_t>(i)]);
      }
      threshold_in_place(x, tau);
      part_ms[static_cast<std::size_t>(i)] += ms_since(s0);
    });
    out.schedule.push_back(PolyStep{branch, tau});
  }

  AssembleOptions aopt;
  aopt.final_tau = out.schedule.empty() ? 0.0 : out.schedule.back().tau;
  aopt.symmetry_tol = options.symmetry_tol;
  AssembleResult assembled = assemble(items, xs, p, n, aopt);

  out.iterations = static_cast<int>(out.schedule.size());
  out.density = std::move(assembled.matrix);
  out.metrics = make_metrics(p, out.schedule.size(), part_ms, std::max(1, std::min(options.workers, parts)));
  out.metrics.max_asymmetry = assembled.max_asymmetry;
  out.metrics.wall_ms = ms_since(t0);
  return out;
}

void write_run_metrics_csv(const RunMetrics& metrics, std::ostream& out) {
  out << "part,core_size,halo_size,flops,ms\n";
  char buf[160];
  for (const PartRunMetrics& pm : metrics.parts) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%lld,%.6f\n", pm.part, pm.core_size, pm.halo_size,
                  static_cast<long long>(pm.flops), pm.ms);
    out << buf;
  }
}

}  // namespace chsp2
