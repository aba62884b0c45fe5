#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>
#include <vector>

#include "chsp2/errors.hpp"
#include "chsp2/gen.hpp"
#include "chsp2/sp2.hpp"
#include "chsp2/spmat.hpp"
#include "test_support.hpp"

using namespace chsp2;

namespace {

SymSparseMatrix diag2(double a, double b) {
  return SymSparseMatrix::from_triplets(
      2, std::vector<std::tuple<int, int, double>>{{0, 0, a}, {1, 1, b}});
}

}  // namespace

TEST_CASE("gershgorin bounds") {
  const SymSparseMatrix m = SymSparseMatrix::from_triplets(
      2, std::vector<std::tuple<int, int, double>>{{0, 0, 2.0}, {1, 1, 2.0}, {0, 1, -1.0}});
  const auto [lo, hi] = gershgorin_bounds(m);
  CHECK(lo == 1.0);
  CHECK(hi == 3.0);

  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    const SymSparseMatrix x = testsup::random_sparse_symmetric(20, 0.3, rng);
    const auto [a, b] = gershgorin_bounds(x);
    const auto eigs = testsup::jacobi_eigenvalues(to_dense(x));
    CHECK(eigs.front() >= a - 1e-12);
    CHECK(eigs.back() <= b + 1e-12);
  }
}

TEST_CASE("initial transform maps the spectrum into the unit interval") {
  // diag(0, 1) with bounds [0, 1] flips to diag(1, 0)
  const SymSparseMatrix x0 = sp2_initial(diag2(0.0, 1.0), 0.0, 1.0);
  CHECK(x0.get(0, 0) == 1.0);
  CHECK(x0.get(1, 1) == 0.0);

  std::mt19937_64 rng(52);
  const SymSparseMatrix h = testsup::random_sparse_symmetric(25, 0.3, rng);
  const auto [lo, hi] = gershgorin_bounds(h);
  const SymSparseMatrix x = sp2_initial(h, lo, hi);

  // pattern preserved
  for (int i = 0; i < h.size(); ++i)
    for (const MatrixEntry& e : h.row(i)) CHECK(x.has(i, e.col));
  CHECK(x.stored_entry_count() == h.stored_entry_count());

  // spectrum lands in [0, 1], order reversed
  const auto eh = testsup::jacobi_eigenvalues(to_dense(h));
  const auto ex = testsup::jacobi_eigenvalues(to_dense(x));
  for (double v : ex) {
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
  const int n = h.size();
  for (int k = 0; k < n; ++k) {
    const double mapped = (hi - eh[static_cast<std::size_t>(n - 1 - k)]) / (hi - lo);
    CHECK(ex[static_cast<std::size_t>(k)] == doctest::Approx(mapped).epsilon(1e-10));
  }

  CHECK_THROWS_AS(sp2_initial(h, 2.0, 2.0), validation_error);
  CHECK_THROWS_AS(sp2_initial(h, 3.0, 2.0), validation_error);
}

TEST_CASE("one purification step picks the branch by trace distance") {
  // diag(0.8, 0.3): square gives trace 0.73, the expansion gives 0.87
  const SymSparseMatrix x = diag2(0.8, 0.3);
  const SP2StepResult contract = sp2_step(x, 0.5);
  CHECK(contract.branch == Branch::square);
  CHECK(contract.next.get(0, 0) == 0.8 * 0.8);
  CHECK(contract.next.get(1, 1) == 0.3 * 0.3);

  const SP2StepResult expand = sp2_step(x, 1.2);
  CHECK(expand.branch == Branch::dms);
  CHECK(expand.next.get(0, 0) == 2.0 * 0.8 - 0.8 * 0.8);
  CHECK(expand.next.get(1, 1) == 2.0 * 0.3 - 0.3 * 0.3);

  // symmetric tie: |0.25 - 0.5| == |0.75 - 0.5| goes to square
  const SP2StepResult tie = sp2_step(diag2(0.5, 0.0), 0.5);
  CHECK(tie.branch == Branch::square);
}

TEST_CASE("already idempotent inputs converge without stepping") {
  SP2Config cfg;
  cfg.nocc = 1.0;
  cfg.eps_min = 0.0;
  cfg.eps_max = 1.0;
  const SP2Result res = sm_sp2(diag2(0.0, 1.0), cfg);
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK(res.schedule.empty());
  CHECK(res.density.get(0, 0) == 1.0);
  CHECK(res.density.get(1, 1) == 0.0);
  CHECK(res.trace_error == 0.0);
  CHECK(res.eps_min == 0.0);
  CHECK(res.eps_max == 1.0);
}

TEST_CASE("two-level system converges to the analytic projector") {
  // eigenvalues -1 and 1; the occupied state is (1,1)/sqrt(2)
  const SymSparseMatrix h = SymSparseMatrix::from_triplets(
      2, std::vector<std::tuple<int, int, double>>{{0, 1, -1.0}});
  SP2Config cfg;
  cfg.nocc = 1.0;
  cfg.tau = 0.0;
  const SP2Result res = sm_sp2(h, cfg);
  CHECK(res.converged);
  CHECK(res.iterations <= 30);
  CHECK(std::fabs(res.density.get(0, 0) - 0.5) < 1e-6);
  CHECK(std::fabs(res.density.get(0, 1) - 0.5) < 1e-6);
  CHECK(std::fabs(res.density.get(1, 1) - 0.5) < 1e-6);
  CHECK(res.trace_error < 1e-8);
}

TEST_CASE("gapped systems purify to the spectral projector") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 12 + testsup::index_draw(rng, 24);
    const int nocc = 2 + testsup::index_draw(rng, n / 2);
    const auto sys = testsup::make_gapped_system(n, nocc, 0.8, rng);

    SP2Config cfg;
    cfg.nocc = nocc;
    cfg.tau = 0.0;
    const SP2Result res = sm_sp2(sys.hamiltonian, cfg);
    CHECK(res.converged);
    CHECK(res.iterations <= 30);
    CHECK(res.trace_error < 1e-8);
    CHECK(testsup::max_abs_diff(res.density, sys.projector) < 1e-6);

    // Frobenius-relative idempotency of the returned density matrix
    const DenseMatrix d = to_dense(res.density);
    const DenseMatrix d2 = testsup::dense_mul_ref(d, d);
    DenseMatrix gap(d.size());
    for (int i = 0; i < d.size(); ++i)
      for (int j = 0; j < d.size(); ++j) gap.at(i, j) = d2.at(i, j) - d.at(i, j);
    CHECK(testsup::frobenius_norm(gap) / testsup::frobenius_norm(d) < 1e-6);
  }
}

TEST_CASE("thresholding keeps the density matrix close while sparsifying") {
  std::mt19937_64 rng(54);
  const auto sys = testsup::make_gapped_system(30, 9, 1.0, rng);
  SP2Config loose;
  loose.nocc = 9;
  loose.tau = 1e-5;
  SP2Config exact;
  exact.nocc = 9;
  exact.tau = 0.0;
  const SP2Result a = sm_sp2(sys.hamiltonian, loose);
  const SP2Result b = sm_sp2(sys.hamiltonian, exact);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(testsup::max_abs_diff(a.density, to_dense(b.density)) < 1e-3);
  for (const PolyStep& s : a.schedule) CHECK(s.tau == 1e-5);
  for (const PolyStep& s : b.schedule) CHECK(s.tau == 0.0);
}

TEST_CASE("per-step threshold overrides repeat their last value") {
  std::mt19937_64 rng(55);
  const auto sys = testsup::make_gapped_system(16, 5, 1.0, rng);
  SP2Config cfg;
  cfg.nocc = 5;
  cfg.step_taus = {1e-3, 1e-4, 1e-6};
  const SP2Result res = sm_sp2(sys.hamiltonian, cfg);
  REQUIRE(res.schedule.size() >= 4);
  CHECK(res.schedule[0].tau == 1e-3);
  CHECK(res.schedule[1].tau == 1e-4);
  CHECK(res.schedule[2].tau == 1e-6);
  CHECK(res.schedule[3].tau == 1e-6);
  CHECK(res.schedule.back().tau == 1e-6);
}

TEST_CASE("config validation") {
  const SymSparseMatrix h = diag2(0.0, 1.0);
  SP2Config cfg;
  cfg.nocc = 0.0;
  CHECK_THROWS_AS(sm_sp2(h, cfg), validation_error);
  cfg.nocc = 2.0;
  CHECK_THROWS_AS(sm_sp2(h, cfg), validation_error);
  cfg.nocc = 1.0;
  cfg.max_iter = 0;
  CHECK_THROWS_AS(sm_sp2(h, cfg), validation_error);
  cfg.max_iter = 30;
  cfg.tau = -1e-3;
  CHECK_THROWS_AS(sm_sp2(h, cfg), validation_error);
  cfg.tau = 1e-5;
  cfg.eps_min = 0.0;  // eps_max left unset
  CHECK_THROWS_AS(sm_sp2(h, cfg), validation_error);
}

TEST_CASE("hard occupations fail to converge within the budget") {
  // nocc 0.5 sits between the two eigenvalue counts, so the trace can
  // never reach it
  const SymSparseMatrix h = diag2(0.0, 1.0);
  SP2Config cfg;
  cfg.nocc = 0.5;
  cfg.max_iter = 12;
  const SP2Result res = sm_sp2(h, cfg);
  CHECK(!res.converged);
  CHECK(res.iterations == 12);
  CHECK(static_cast<int>(res.schedule.size()) == 12);
}

TEST_CASE("replaying the schedule reproduces the density matrix exactly") {
  std::mt19937_64 rng(56);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 10 + testsup::index_draw(rng, 20);
    const auto sys = testsup::make_gapped_system(n, 1 + testsup::index_draw(rng, n - 2), 0.6, rng);
    SP2Config cfg;
    cfg.nocc = 1 + testsup::index_draw(rng, n - 1);
    cfg.tau = trial % 2 == 0 ? 1e-5 : 0.0;
    const SP2Result res = sm_sp2(sys.hamiltonian, cfg);

    const SymSparseMatrix x0 = sp2_initial(sys.hamiltonian, res.eps_min, res.eps_max);
    const PolyApplyResult replay = thresholded_poly_apply(x0, res.schedule);
    CHECK(replay.result == res.density);
  }
}

TEST_CASE("schedule application matches a dense reference") {
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6 + testsup::index_draw(rng, 30);
    const SymSparseMatrix x = testsup::random_normalized_sparse(n, 0.25, rng);
    const PolySchedule schedule = testsup::random_schedule(1 + testsup::index_draw(rng, 3),
                                                           trial % 2 == 0 ? 0.0 : 1e-4, rng);
    const PolyApplyResult got = thresholded_poly_apply(x, schedule);
    const DenseMatrix want = testsup::dense_schedule_ref(to_dense(x), schedule);
    CHECK(testsup::max_abs_diff(got.result, want) == 0.0);
    CHECK(got.dropped_edges.size() == schedule.size());
  }
}

TEST_CASE("dropped edges account for every thresholded entry") {
  std::mt19937_64 rng(58);
  const SymSparseMatrix x = testsup::random_normalized_sparse(20, 0.3, rng);
  PolySchedule schedule = {{Branch::square, 1e-3}, {Branch::dms, 1e-2}};
  const PolyApplyResult res = thresholded_poly_apply(x, schedule);

  // replay step by step without thresholds and compare drop decisions
  SymSparseMatrix cur = x;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    SymSparseMatrix x2 = square(cur);
    SymSparseMatrix raw =
        schedule[s].branch == Branch::square ? x2 : axpby(2.0, cur, -1.0, x2);
    std::vector<std::pair<int, int>> dropped;
    cur = threshold_recording(raw, schedule[s].tau, dropped);
    CHECK(dropped == res.dropped_edges[s]);
    for (const auto& [i, j] : dropped) {
      CHECK(i < j);
      CHECK(!cur.has(i, j));
      CHECK(std::fabs(raw.get(i, j)) < schedule[s].tau);
    }
  }
  CHECK(cur == res.result);
}

TEST_CASE("schedule files round-trip") {
  testsup::TempDir dir;
  ScheduleFile sched;
  sched.spectral_bounds = std::make_pair(-1.2345678901234567, 3.0000000000000004);
  sched.steps = {{Branch::square, 1e-5}, {Branch::dms, 0.0}, {Branch::dms, 1e-7}};
  const std::string path = dir.file("s.txt");
  save_schedule(sched, path);
  const ScheduleFile back = load_schedule(path);
  REQUIRE(back.spectral_bounds.has_value());
  CHECK(back.spectral_bounds->first == sched.spectral_bounds->first);
  CHECK(back.spectral_bounds->second == sched.spectral_bounds->second);
  CHECK(back.steps == sched.steps);

  ScheduleFile bare;
  bare.steps = {{Branch::dms, 1e-5}};
  save_schedule(bare, path);
  const ScheduleFile back2 = load_schedule(path);
  CHECK(!back2.spectral_bounds.has_value());
  CHECK(back2.steps == bare.steps);
}

TEST_CASE("schedule parser accepts comments and validates") {
  testsup::TempDir dir;
  const std::string ok = dir.file("ok.txt");
  testsup::write_file(ok,
                      "# produced by hand\n"
                      "init eps_min=-1 eps_max=2\n"
                      "# branch record\n"
                      "step 0: SQUARE tau=1e-5\n"
                      "step 1: DMS tau=0\n"
                      "\n");
  const ScheduleFile s = load_schedule(ok);
  REQUIRE(s.spectral_bounds.has_value());
  CHECK(s.spectral_bounds->first == -1.0);
  CHECK(s.spectral_bounds->second == 2.0);
  REQUIRE(s.steps.size() == 2);
  CHECK(s.steps[0].branch == Branch::square);
  CHECK(s.steps[1].branch == Branch::dms);
  CHECK(s.steps[1].tau == 0.0);

  auto expect_parse_error = [&](const std::string& name, const std::string& content) {
    const std::string path = dir.file(name);
    testsup::write_file(path, content);
    CHECK_THROWS_AS(load_schedule(path), parse_error);
  };
  expect_parse_error("numbering.txt", "step 1: SQUARE tau=1e-5\n");
  expect_parse_error("skip.txt", "step 0: SQUARE tau=1e-5\nstep 2: DMS tau=1e-5\n");
  expect_parse_error("branch.txt", "step 0: CUBE tau=1e-5\n");
  expect_parse_error("notau.txt", "step 0: SQUARE\n");
  expect_parse_error("trailing.txt", "step 0: SQUARE tau=1e-5 extra\n");
  expect_parse_error("lateinit.txt", "step 0: SQUARE tau=1e-5\ninit eps_min=0 eps_max=1\n");
  expect_parse_error("badinit.txt", "init eps_min=0\n");
  expect_parse_error("initorder.txt", "init eps_min=2 eps_max=1\n");
  expect_parse_error("garbage.txt", "hello\n");
  CHECK_THROWS_AS(load_schedule(dir.file("missing.txt")), parse_error);

  // an empty file is an empty schedule
  const std::string empty = dir.file("empty.txt");
  testsup::write_file(empty, "");
  CHECK(load_schedule(empty).steps.empty());
}
