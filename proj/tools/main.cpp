#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chsp2/anneal.hpp"
#include "chsp2/errors.hpp"
#include "chsp2/gen.hpp"
#include "chsp2/gsp2.hpp"
#include "chsp2/partition.hpp"
#include "chsp2/sgraph.hpp"
#include "chsp2/sp2.hpp"
#include "chsp2/spmat.hpp"

namespace {

// 0 success, 1 other failures, then one code per failure class
constexpr int kExitOther = 1;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitConvergence = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool has_matrix_extension(const std::string& path) {
  const std::string ext = std::filesystem::path(path).extension().string();
  return ext == ".mtx" || ext == ".mm";
}

// Matrix files carry values; plain graph files only structure. Both are
// accepted wherever only the structure matters.
chsp2::SparsityGraph load_graph_any(const std::string& path) {
  if (has_matrix_extension(path)) return chsp2::sparsity_graph(chsp2::load_matrix_market(path));
  return chsp2::load_metis_graph(path);
}

std::string file_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

int default_workers() {
  if (const char* env = std::getenv("CHSP2_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid CHSP2_WORKERS='" << env << "'\n";
  }
  return 1;
}

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct PartitionArgs {
  std::string graph_file;
  std::string method = "bfs";
  std::string partition_file;  // input for --method import
  int q = 0;
  std::uint64_t seed = 0;
  int sa_iters = 0;
  std::optional<std::uint64_t> sa_seed;
  std::string sa_trace_file;
  std::string name;
  std::string out;
  bool header = false;
};

int run_partition(const PartitionArgs& a) {
  const chsp2::SparsityGraph g = load_graph_any(a.graph_file);

  const auto t0 = Clock::now();
  std::vector<std::vector<int>> cores;
  if (a.method == "bfs") {
    if (a.q < 1) throw chsp2::validation_error("--q must be at least 1");
    if (a.q == 1) {
      cores.emplace_back(g.size());
      for (int v = 0; v < g.size(); ++v) cores[0][static_cast<std::size_t>(v)] = v;
    } else {
      cores = chsp2::bfs_block_partition(g, a.q, a.seed);
    }
  } else if (a.method == "import") {
    if (a.partition_file.empty()) throw chsp2::validation_error("--method import needs --partition");
    cores = chsp2::import_partition(a.partition_file, g);
    if (a.q > 0 && a.q != static_cast<int>(cores.size()))
      throw chsp2::validation_error("--q disagrees with the imported partition");
  } else {
    throw chsp2::validation_error("unknown method '" + a.method + "': expected bfs or import");
  }

  chsp2::CHPartition part = chsp2::build_ch_partition(g, std::move(cores));
  std::string method = a.method;
  if (a.sa_iters > 0) {
    chsp2::SAConfig sa;
    sa.iterations = a.sa_iters;
    sa.seed = a.sa_seed.value_or(a.seed);
    chsp2::SAResult res = chsp2::sa_refine(g, part, sa);
    part = std::move(res.refined);
    method += "+sa";
    if (!a.sa_trace_file.empty()) {
      std::ofstream trace(a.sa_trace_file);
      if (!trace) throw std::runtime_error("cannot write '" + a.sa_trace_file + "'");
      chsp2::write_sa_trace_csv(res.trace, trace);
    }
  }
  const double elapsed = seconds_since(t0);

  chsp2::export_partition(part.cores, part.vertex_count, a.out);

  const chsp2::PartitionMetrics m = chsp2::partition_metrics(part, elapsed);
  const std::string name = a.name.empty() ? file_stem(a.graph_file) : a.name;
  if (a.header) std::cout << "name,method,sum,min,max,time_s,nno,mmpn\n";
  std::cout << name << ',' << method << ',' << m.sum_cubes << ',' << m.min_part << ',' << m.max_part << ','
            << csv_double(m.wall_time_s) << ',' << csv_double(m.nno) << ',' << csv_double(m.mmpn) << '\n';
  return 0;
}

struct SP2Args {
  std::string matrix_file;
  double nocc = 0.0;
  double tau = 1e-5;
  int max_iter = 30;
  double conv_tol = 1e-10;
  std::optional<double> eps_min;
  std::optional<double> eps_max;
  std::string out;
};

int run_sp2(const SP2Args& a) {
  const chsp2::SymSparseMatrix h = chsp2::load_matrix_market(a.matrix_file);
  chsp2::SP2Config cfg;
  cfg.nocc = a.nocc;
  cfg.tau = a.tau;
  cfg.max_iter = a.max_iter;
  cfg.conv_tol = a.conv_tol;
  cfg.eps_min = a.eps_min;
  cfg.eps_max = a.eps_max;

  const chsp2::SP2Result res = chsp2::sm_sp2(h, cfg);

  chsp2::save_matrix_market(res.density, a.out + ".density.mtx");
  chsp2::ScheduleFile sched;
  sched.spectral_bounds = std::make_pair(res.eps_min, res.eps_max);
  sched.steps = res.schedule;
  chsp2::save_schedule(sched, a.out + ".schedule.txt");

  std::cout << "iterations=" << res.iterations << " converged=" << (res.converged ? 1 : 0)
            << " trace_error=" << csv_double(res.trace_error)
            << " idempotency_error=" << csv_double(res.idempotency_error) << '\n';
  if (!res.converged) {
    std::cerr << "warning: no convergence within " << a.max_iter << " iterations\n";
    return kExitConvergence;
  }
  return 0;
}

struct GSP2Args {
  std::string matrix_file;
  std::string partition_file;
  std::string schedule_file;
  std::string halo = "structural";
  std::string halo_matrix;
  int workers = 1;
  double sym_tol = 1e-12;
  bool synchronized = false;
  std::optional<double> nocc;
  double tau = 1e-5;
  int max_iter = 30;
  double conv_tol = 1e-10;
  std::string out;
};

int run_gsp2(const GSP2Args& a) {
  const chsp2::SymSparseMatrix input = chsp2::load_matrix_market(a.matrix_file);
  const chsp2::SparsityGraph g_input = chsp2::sparsity_graph(input);
  const std::vector<std::vector<int>> cores = chsp2::import_partition(a.partition_file, g_input);

  chsp2::GSP2Options opt;
  opt.workers = a.workers;
  opt.symmetry_tol = a.sym_tol;

  auto halo_graph_for = [&](std::size_t schedule_len) -> chsp2::SparsityGraph {
    if (!a.halo_matrix.empty())
      return chsp2::sparsity_graph(chsp2::load_matrix_market(a.halo_matrix));
    if (a.halo == "input") return g_input;
    if (a.halo == "structural")
      return chsp2::structural_polynomial_graph(g_input, static_cast<int>(schedule_len));
    throw chsp2::validation_error("unknown halo choice '" + a.halo + "': expected structural or input");
  };

  if (a.synchronized) {
    if (!a.nocc) throw chsp2::validation_error("--synchronized needs --nocc");
    if (!a.schedule_file.empty())
      throw chsp2::validation_error("--synchronized computes its own schedule; drop --schedule");
    if (a.halo == "structural" && a.halo_matrix.empty())
      throw chsp2::validation_error(
          "--synchronized has no schedule length in advance; use --halo input or --halo-matrix");

    chsp2::CHPartition part = chsp2::build_ch_partition(halo_graph_for(0), cores);
    chsp2::SP2Config cfg;
    cfg.nocc = *a.nocc;
    cfg.tau = a.tau;
    cfg.max_iter = a.max_iter;
    cfg.conv_tol = a.conv_tol;
    const chsp2::GSP2SP2Result res = chsp2::gsp2_sp2_run(input, part, cfg, opt);

    chsp2::save_matrix_market(res.density, a.out + ".density.mtx");
    chsp2::ScheduleFile sched;
    sched.spectral_bounds = std::make_pair(res.eps_min, res.eps_max);
    sched.steps = res.schedule;
    chsp2::save_schedule(sched, a.out + ".schedule.txt");
    std::ofstream csv(a.out + ".metrics.csv");
    if (!csv) throw std::runtime_error("cannot write '" + a.out + ".metrics.csv'");
    chsp2::write_run_metrics_csv(res.metrics, csv);

    std::cout << "parts=" << res.metrics.parts.size() << " workers=" << res.metrics.workers
              << " iterations=" << res.iterations << " converged=" << (res.converged ? 1 : 0)
              << " sum_cubes=" << res.metrics.sum_cubes
              << " max_asymmetry=" << csv_double(res.metrics.max_asymmetry)
              << " wall_ms=" << res.metrics.wall_ms << '\n';
    if (!res.converged) {
      std::cerr << "warning: no convergence within " << a.max_iter << " iterations\n";
      return kExitConvergence;
    }
    return 0;
  }

  if (a.schedule_file.empty()) throw chsp2::validation_error("--schedule is required (or use --synchronized)");
  const chsp2::ScheduleFile sched = chsp2::load_schedule(a.schedule_file);
  // when the schedule records the initial transform, the input is the
  // Hamiltonian and the polynomial applies to X0
  const chsp2::SymSparseMatrix a0 = sched.spectral_bounds
      ? chsp2::sp2_initial(input, sched.spectral_bounds->first, sched.spectral_bounds->second)
      : input;

  chsp2::CHPartition part = chsp2::build_ch_partition(halo_graph_for(sched.steps.size()), cores);
  const chsp2::GSP2Result res = chsp2::gsp2_run(a0, part, sched.steps, opt);

  chsp2::save_matrix_market(res.density, a.out + ".density.mtx");
  std::ofstream csv(a.out + ".metrics.csv");
  if (!csv) throw std::runtime_error("cannot write '" + a.out + ".metrics.csv'");
  chsp2::write_run_metrics_csv(res.metrics, csv);

  std::cout << "parts=" << res.metrics.parts.size() << " workers=" << res.metrics.workers
            << " sum_cubes=" << res.metrics.sum_cubes
            << " max_asymmetry=" << csv_double(res.metrics.max_asymmetry)
            << " wall_ms=" << res.metrics.wall_ms << '\n';
  return 0;
}

struct SweepArgs {
  std::string matrix_file;
  std::vector<int> q_list;
  std::uint64_t seed = 0;
  int sa_iters = 0;
  std::string out;
};

int run_sweep(const SweepArgs& a) {
  const chsp2::SparsityGraph g = load_graph_any(a.matrix_file);

  std::ostringstream rows;
  rows << "q,sum_cubes,partition_time_s\n";
  for (int q : a.q_list) {
    if (q < 1 || q > g.size()) throw chsp2::validation_error("q=" + std::to_string(q) + " is out of range");
    const auto t0 = Clock::now();
    std::vector<std::vector<int>> cores;
    if (q == 1) {
      cores.emplace_back(g.size());
      for (int v = 0; v < g.size(); ++v) cores[0][static_cast<std::size_t>(v)] = v;
    } else {
      cores = chsp2::bfs_block_partition(g, q, a.seed);
    }
    chsp2::CHPartition part = chsp2::build_ch_partition(g, std::move(cores));
    if (a.sa_iters > 0) {
      chsp2::SAConfig sa;
      sa.iterations = a.sa_iters;
      sa.seed = a.seed;
      part = chsp2::sa_refine(g, part, sa).refined;
    }
    const double elapsed = seconds_since(t0);
    rows << q << ',' << chsp2::objective_sum_cubes(part) << ',' << csv_double(elapsed) << '\n';
  }

  const std::string table = rows.str();
  if (a.out.empty() || a.out == "-") {
    std::cout << table;
  } else {
    std::ofstream out(a.out);
    if (!out) throw std::runtime_error("cannot write '" + a.out + "'");
    out << table;
    std::cout << table;
  }
  return 0;
}

struct GenArgs {
  std::string kind;
  int n = 0;
  int bandwidth = 1;
  int rows = 0;
  int cols = 0;
  double radius = 0.1;
  double density = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  chsp2::SymSparseMatrix m;
  if (a.kind == "chain") {
    m = chsp2::gen_chain(a.n, a.bandwidth, a.seed);
  } else if (a.kind == "grid2d") {
    m = chsp2::gen_grid2d(a.rows, a.cols, a.seed);
  } else if (a.kind == "random-geometric") {
    m = chsp2::gen_random_geometric(a.n, a.radius, a.seed);
  } else if (a.kind == "banded") {
    m = chsp2::gen_banded(a.n, a.bandwidth, a.density, a.seed);
  } else {
    throw chsp2::validation_error("unknown kind '" + a.kind +
                                  "': expected chain, grid2d, random-geometric, or banded");
  }
  chsp2::save_matrix_market(m, a.out);
  std::cout << "n=" << m.size() << " stored_entries=" << m.stored_entry_count() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"core-halo graph partitioning and partitioned density-matrix evaluation"};
  app.require_subcommand(1);

  PartitionArgs pa;
  CLI::App* partition = app.add_subcommand("partition", "partition a graph into cores with derived halos");
  partition->add_option("--graph", pa.graph_file, "graph file (.mtx/.mm matrix or adjacency-list format)")
      ->required();
  partition->add_option("--q", pa.q, "number of parts");
  partition->add_option("--method", pa.method, "bfs or import (default bfs)");
  partition->add_option("--partition", pa.partition_file, "partition file to import");
  partition->add_option("--seed", pa.seed, "partitioner seed");
  partition->add_option("--sa-iters", pa.sa_iters, "annealing refinement iterations (0 = off)");
  partition->add_option("--sa-seed", pa.sa_seed, "annealing seed (defaults to --seed)");
  partition->add_option("--sa-trace", pa.sa_trace_file, "write the annealing trace CSV here");
  partition->add_option("--name", pa.name, "name column of the CSV row (default: graph file stem)");
  partition->add_flag("--header", pa.header, "print the CSV header line first");
  partition->add_option("--out", pa.out, "output partition file")->required();

  SP2Args sa;
  CLI::App* sp2 = app.add_subcommand("sp2", "compute a density matrix by thresholded purification");
  sp2->add_option("--matrix", sa.matrix_file, "Hamiltonian matrix file")->required();
  sp2->add_option("--nocc", sa.nocc, "target occupation")->required();
  sp2->add_option("--tau", sa.tau, "threshold applied after every step (default 1e-5)");
  sp2->add_option("--max-iter", sa.max_iter, "iteration budget (default 30)");
  sp2->add_option("--conv-tol", sa.conv_tol, "convergence tolerance (default 1e-10)");
  sp2->add_option("--eps-min", sa.eps_min, "lower spectral bound (default: Gershgorin)");
  sp2->add_option("--eps-max", sa.eps_max, "upper spectral bound (default: Gershgorin)");
  sp2->add_option("--out", sa.out, "output prefix: writes <out>.density.mtx and <out>.schedule.txt")
      ->required();

  GSP2Args ga;
  ga.workers = default_workers();
  CLI::App* gsp2 = app.add_subcommand("gsp2", "evaluate a schedule on independent core-halo submatrices");
  gsp2->add_option("--matrix", ga.matrix_file, "matrix file")->required();
  gsp2->add_option("--partition", ga.partition_file, "core assignment (.part file)")->required();
  gsp2->add_option("--schedule", ga.schedule_file, "schedule file from sp2");
  gsp2->add_option("--halo", ga.halo, "halo graph: structural (exact) or input (default structural)");
  gsp2->add_option("--halo-matrix", ga.halo_matrix, "derive halos from this matrix file instead");
  gsp2->add_option("--workers", ga.workers, "worker threads (default $CHSP2_WORKERS or 1)");
  gsp2->add_option("--sym-tol", ga.sym_tol, "max allowed cross-part asymmetry (default 1e-12)");
  gsp2->add_flag("--synchronized", ga.synchronized,
                 "steer branches per step from the reassembled global trace");
  gsp2->add_option("--nocc", ga.nocc, "target occupation (synchronized mode)");
  gsp2->add_option("--tau", ga.tau, "threshold (synchronized mode, default 1e-5)");
  gsp2->add_option("--max-iter", ga.max_iter, "iteration budget (synchronized mode, default 30)");
  gsp2->add_option("--conv-tol", ga.conv_tol, "convergence tolerance (synchronized mode, default 1e-10)");
  gsp2->add_option("--out", ga.out, "output prefix: writes <out>.density.mtx and <out>.metrics.csv")
      ->required();

  SweepArgs wa;
  CLI::App* sweep = app.add_subcommand("sweep", "partition for each q and tabulate the objective");
  sweep->add_option("--matrix", wa.matrix_file, "matrix or graph file")->required();
  sweep->add_option("--q-list", wa.q_list, "part counts to sweep")->required()->delimiter(',');
  sweep->add_option("--seed", wa.seed, "partitioner seed");
  sweep->add_option("--sa-iters", wa.sa_iters, "annealing refinement iterations (0 = off)");
  sweep->add_option("--out", wa.out, "CSV output file ('-' for stdout only)");

  GenArgs ea;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic symmetric test system");
  gen->add_option("--kind", ea.kind, "chain, grid2d, random-geometric, or banded")->required();
  gen->add_option("--n", ea.n, "vertex count (chain, random-geometric, banded)");
  gen->add_option("--bandwidth", ea.bandwidth, "band half-width (chain, banded)");
  gen->add_option("--rows", ea.rows, "grid rows");
  gen->add_option("--cols", ea.cols, "grid columns");
  gen->add_option("--radius", ea.radius, "connection radius (random-geometric)");
  gen->add_option("--density", ea.density, "within-band fill probability (banded)");
  gen->add_option("--seed", ea.seed, "value seed");
  gen->add_option("--out", ea.out, "output matrix file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (partition->parsed()) return run_partition(pa);
    if (sp2->parsed()) return run_sp2(sa);
    if (gsp2->parsed()) return run_gsp2(ga);
    if (sweep->parsed()) return run_sweep(wa);
    if (gen->parsed()) return run_gen(ea);
  } catch (const chsp2::parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const chsp2::validation_error& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
