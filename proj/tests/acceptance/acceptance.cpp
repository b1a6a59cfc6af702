// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Optional arguments select criteria by number.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ltf/design.hpp"
#include "ltf/kkt.hpp"
#include "ltf/lasso.hpp"
#include "ltf/pathwise.hpp"
#include "ltf/sim.hpp"
#include "test_support.hpp"

namespace {

using namespace ltf;
using ltf::testing::max_abs;
using ltf::testing::max_abs_diff;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome solver_correctness() {
  const std::array<std::size_t, 3> sizes{20, 50, 100};
  std::size_t cert_failures = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    const std::size_t n = sizes[i % 3];
    const TimeSeries y = ltf::testing::random_series(n, 1000 + i, i % 2 == 1);
    const auto grid = make_lambda_grid(lambda_max(y), 5, 1e-3, false);
    const LambdaPath pw = fit_path(y, grid);
    const LambdaPath ls = lasso_path(y, grid);
    const double scale = 1.0 + max_abs(y.values());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto oracle = oracle_solve(y, grid[j]);
      cert_failures += pw[j].certificate.passed ? 0 : 1;
      cert_failures += ls[j].certificate.passed ? 0 : 1;
      worst = std::max({worst, max_abs_diff(pw[j].fit.mu_hat, ls[j].fit.mu_hat) / scale,
                        max_abs_diff(pw[j].fit.mu_hat, oracle.mu) / scale,
                        max_abs_diff(ls[j].fit.mu_hat, oracle.mu) / scale});
    }
  }
  return {cert_failures == 0 && worst <= 1e-5,
          "250 fits per solver, certificate failures " + std::to_string(cert_failures) +
              ", max scaled disagreement " + fmt(worst)};
}

Outcome endpoint_exactness() {
  double worst_zero = 0.0;
  double worst_affine = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    const TimeSeries y = ltf::testing::random_series(10 + 5 * i, 2000 + i);
    const auto affine = affine_fit(y.values());
    const std::vector<double> zero{0.0};
    const std::vector<double> big{2.0 * lambda_max(y)};
    for (const LambdaPath& p : {fit_path(y, zero), lasso_path(y, zero)})
      worst_zero = std::max(worst_zero, max_abs_diff(p[0].fit.mu_hat, y.values()));
    for (const LambdaPath& p : {fit_path(y, big), lasso_path(y, big)})
      worst_affine = std::max(worst_affine, max_abs_diff(p[0].fit.mu_hat, affine));
  }
  return {worst_zero <= 1e-10 && worst_affine <= 1e-8,
          "lambda=0 max error " + fmt(worst_zero) + ", lambda=2 lambda_max max error " +
              fmt(worst_affine)};
}

Outcome irrepresentable_reference_numbers() {
  constexpr std::array<std::array<double, 3>, 7> published{{
      {-0.3255, 0.7383, 0.2872},
      {-0.2383, 0.3574, 0.6809},
      {0.1277, -0.1915, 1.0638},
      {0.1702, -0.2553, 0.9422},
      {0.1532, -0.2298, 0.7052},
      {0.1021, -0.1532, 0.4225},
      {0.0426, -0.0638, 0.1641},
  }};
  const auto m = irrepresentable_vectors(10, std::vector<std::size_t>{5});
  std::size_t mismatched = 0;
  for (Eigen::Index r = 0; r < 7; ++r)
    for (Eigen::Index c = 0; c < 3; ++c)
      if (std::abs(std::round(m.rows(r, c) * 1e4) / 1e4 - published[r][c]) > 1e-9) ++mismatched;

  struct Case {
    std::array<int, 3> s;
    std::vector<std::size_t> rows;
  };
  const std::vector<Case> cases{
      {{1, 1, 1}, {3}}, {{1, -1, 1}, {3, 4, 5}}, {{1, 1, -1}, {3, 4}}, {{-1, 1, 1}, {1, 2}}};
  std::size_t verdicts = 0;
  for (const auto& c : cases) {
    const auto v = irrepresentable_holds(m.rows, c.s);
    std::vector<std::size_t> rows;
    for (const auto& x : v.violations) rows.push_back(x.row);
    if (!v.holds && rows == c.rows) ++verdicts;
  }
  return {mismatched == 0 && verdicts == 4,
          std::to_string(21 - mismatched) + "/21 entries at 4 decimals, " +
              std::to_string(verdicts) + "/4 sign-case verdicts"};
}

Outcome spectral_bounds() {
  bool ok = true;
  std::string detail;
  for (std::size_t n : {10u, 25u, 50u, 100u}) {
    const auto s = spectral_check(n);
    const double nd = static_cast<double>(n);
    const bool pass = s.rho1 < 1.0 / (4.0 * nd) && s.max_row_energy >= nd * nd / 4.0;
    ok = ok && pass;
    detail += "n=" + std::to_string(n) + " rho1=" + fmt(s.rho1) + " energy=" +
              fmt(s.max_row_energy) + (pass ? "" : " (fails)") + "; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome noiseless_recovery() {
  bool ok = true;
  std::string detail;
  for (const auto& spec : {example1_spec(500), example2_spec(1000)}) {
    const auto mu0 = gen_trend(spec);
    const TimeSeries y(mu0);
    const std::vector<double> grid{lambda_max(y) / 100.0};
    const LambdaPath p = fit_path(y, grid);
    const KinkSet k = extract_kinks(p[0].fit);
    const double re = relative_error(p[0].fit.mu_hat, mu0);
    const bool pass = sign_consistent(k, spec.true_kinks()) && re <= 1e-8;
    ok = ok && pass;
    detail += "n=" + std::to_string(spec.n) + " kinks " + std::to_string(k.size()) + "/" +
              std::to_string(spec.true_kinks().size()) +
              (sign_consistent(k, spec.true_kinks()) ? " sign-consistent" : " not sign-consistent") +
              " RE=" + fmt(re) + "; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

ExperimentConfig experiment(const PiecewiseLinearSpec& spec, double snr, std::size_t reps,
                            SolverKind solver) {
  ExperimentConfig c;
  c.spec = spec;
  c.noise.snr = snr;
  c.replications = reps;
  c.criterion = Criterion::MC;
  c.solver = solver;
  c.base_seed = 20240601;
  return c;
}

Outcome table_one_analogue() {
  const auto a = run_experiment(experiment(example1_spec(500), 1e4, 20, SolverKind::Pathwise));
  const auto b = run_experiment(experiment(example2_spec(500), 400, 20, SolverKind::Pathwise));
  const bool ok = a.used == 20 && a.re.mean <= 0.005 && a.j_count.mean >= 2 &&
                  a.j_count.mean <= 6 && a.e_ab.mean <= 0.02 && a.e_ba.mean <= 0.35 &&
                  b.used == 20 && b.j_count.mean >= 4 && b.j_count.mean <= 9;
  return {ok, "ex1 RE " + fmt(a.re.mean) + ", |J| " + fmt(a.j_count.mean) + " (" +
                  fmt(a.j_count.sd) + "), eAB " + fmt(a.e_ab.mean) + ", eBA " +
                  fmt(a.e_ba.mean) + ", reps used " + std::to_string(a.used) + "; ex2 |J| " +
                  fmt(b.j_count.mean) + " (" + fmt(b.j_count.sd) + "), reps used " +
                  std::to_string(b.used)};
}

Outcome table_two_direction() {
  const auto pw = run_experiment(experiment(example2_spec(500), 400, 10, SolverKind::Pathwise));
  const auto ls = run_experiment(experiment(example2_spec(500), 400, 10, SolverKind::Lasso));
  const bool ok = ls.used > 0 && pw.used > 0 && ls.j_count.mean > pw.j_count.mean &&
                  ls.near_kink_small.mean > pw.near_kink_small.mean;
  return {ok, "|J| lasso " + fmt(ls.j_count.mean) + " vs pathwise " + fmt(pw.j_count.mean) +
                  "; near-kink small lasso " + fmt(ls.near_kink_small.mean) + " vs pathwise " +
                  fmt(pw.near_kink_small.mean) + "; reps used " + std::to_string(ls.used) + "/" +
                  std::to_string(pw.used)};
}

Outcome metric_examples() {
  std::size_t passed = 0;
  std::size_t total = 0;
  auto expect = [&](bool c) {
    ++total;
    passed += c ? 1 : 0;
  };
  const std::vector<double> mu0{1.0, -2.0, 3.0};
  expect(relative_error(mu0, mu0) == 0.0);
  expect(relative_error({1.0, 1.0}, {0.0, 0.0}) == 1.0);
  expect(relative_error({2.0, -4.0, 6.0}, mu0) == 0.25);
  auto h = [](std::vector<std::size_t> a, std::vector<std::size_t> b) {
    const auto r = hausdorff(a, b, 100);
    return std::array<double, 3>{r.e_ab, r.e_ba, r.hd};
  };
  expect(h({10, 20}, {10, 20}) == std::array<double, 3>{0, 0, 0});
  expect(h({1}, {5}) == std::array<double, 3>{4, 4, 4});
  expect(h({1, 10}, {5}) == std::array<double, 3>{4, 5, 5});
  const KinkSet truth({{151, 1, 0.06}, {351, 1, 0.06}});
  expect(sign_consistent(KinkSet({{151, 1, 0.05}, {351, 1, 0.07}}), truth));
  expect(!sign_consistent(KinkSet({{151, 1, 0.05}, {351, -1, 0.07}}), truth));
  expect(!sign_consistent(KinkSet({{151, 1, 0.05}, {200, 1, 1e-4}, {351, 1, 0.07}}), truth));
  return {passed == total, std::to_string(passed) + "/" + std::to_string(total) + " examples"};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ltf_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](const std::string& tag, const std::string& workers) {
    const std::string out = (dir / (tag + ".csv")).string();
    const std::string reps = (dir / (tag + ".reps.csv")).string();
    const std::vector<std::string> args{"ltf",   "simulate", "--preset", "example2", "--snr",
                                        "400",   "--reps",   "8",        "--seed",   "7",
                                        "--workers", workers, "-o", out, "--replications-output",
                                        reps};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = tools::run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    std::ifstream a(out, std::ios::binary), b(reps, std::ios::binary);
    std::stringstream s;
    s << a.rdbuf() << b.rdbuf();
    return std::make_pair(code, s.str());
  };
  const auto first = run("w1a", "1");
  const auto second = run("w1b", "1");
  const auto pooled = run("w4", "4");
  fs::remove_all(dir);
  const bool ok = first.first == 0 && second.first == 0 && pooled.first == 0 &&
                  !first.second.empty() && first.second == second.second &&
                  first.second == pooled.second;
  return {ok, std::string("repeat run ") + (first.second == second.second ? "identical" : "differs") +
                  ", 1 vs 4 workers " + (first.second == pooled.second ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"solver correctness", solver_correctness},
      {"lambda endpoints exact", endpoint_exactness},
      {"irrepresentable counter-example", irrepresentable_reference_numbers},
      {"design spectral bounds", spectral_bounds},
      {"noiseless kink recovery", noiseless_recovery},
      {"low/moderate noise selection", table_one_analogue},
      {"lasso route over-selects", table_two_direction},
      {"metric examples", metric_examples},
      {"simulation determinism", determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
