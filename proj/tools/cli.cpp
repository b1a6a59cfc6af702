#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "ltf/csv.hpp"
#include "ltf/design.hpp"
#include "ltf/error.hpp"
#include "ltf/kkt.hpp"
#include "ltf/lasso.hpp"
#include "ltf/pathwise.hpp"
#include "ltf/select.hpp"
#include "ltf/sim.hpp"

#ifndef LTF_VERSION_STRING
#define LTF_VERSION_STRING "unknown"
#endif

namespace ltf::tools {

namespace {

constexpr const char* kOutputDirEnv = "LTF_OUTPUT_DIR";

struct Options {
  std::string input;
  std::string output;
  std::string scores;
  std::string fit_file;
  std::string config;
  std::string meta;
  std::string replications_out;
  std::string preset;
  double lambda = 0.0;
  double lambda_rel = 0.0;
  bool lambda_fig2 = false;
  std::size_t grid_size = 60;
  double grid_min_rel = 1e-4;
  std::string solver = "pathwise";
  std::string criterion = "mc";
  std::uint64_t seed = 1;
  std::size_t reps = 20;
  std::size_t n = 500;
  double snr = 400.0;
  std::size_t workers = 0;
  double tol = 0.0;
  double tol_kink = kDefaultKinkTol;
  double kkt_tol = 1e-6;
  bool lasso_polish = false;
  bool paper_example = false;
  std::size_t irrep_n = 10;
  std::vector<std::size_t> kinks;
  std::vector<int> signs;
};

std::string command_echo(int argc, const char* const* argv) {
  std::string s = "ltf";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    s += ' ';
    s += a.find_first_of(" \t\"") == std::string::npos ? a : '"' + a + '"';
  }
  return s;
}

// Target for one artifact: the explicit path, else the default name under
// $LTF_OUTPUT_DIR, else standard output.
class Sink {
 public:
  Sink(const std::string& explicit_path, const std::string& default_name, std::ostream& fallback)
      : fallback_(fallback) {
    if (!explicit_path.empty()) {
      path_ = explicit_path;
    } else if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      path_ = (std::filesystem::path(dir) / default_name).string();
    }
    if (!path_.empty()) {
      file_ = std::make_unique<std::ofstream>(path_, std::ios::binary);
      if (!*file_) throw ParseError("cannot write " + path_, 0);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : fallback_; }
  const std::string& path() const { return path_; }

 private:
  std::ostream& fallback_;
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
};

std::vector<std::string> base_metadata(const std::string& echo) {
  return {std::string("ltf ") + LTF_VERSION_STRING, "command: " + echo};
}

double resolve_lambda(const Options& o, const CLI::App& sub, const TimeSeries& y) {
  const bool abs = sub.count("--lambda") > 0;
  const bool rel = sub.count("--lambda-rel") > 0;
  const bool fig2 = o.lambda_fig2;
  if (static_cast<int>(abs) + static_cast<int>(rel) + static_cast<int>(fig2) != 1)
    throw InvalidSpec("give exactly one of --lambda, --lambda-rel, --lambda-paper-fig2");
  if (abs) {
    if (!(o.lambda >= 0.0)) throw InvalidSpec("--lambda must be nonnegative");
    return o.lambda;
  }
  if (rel) {
    if (!(o.lambda_rel >= 0.0)) throw InvalidSpec("--lambda-rel must be nonnegative");
    return o.lambda_rel * lambda_max(y);
  }
  if (o.preset.empty()) throw InvalidSpec("--lambda-paper-fig2 needs --preset for the true trend");
  const auto spec = preset_config(o.preset, y.size()).spec;
  return 20.0 * spec.min_slope_change() * static_cast<double>(spec.min_segment_size());
}

TrendFit solve_one(const TimeSeries& y, double lambda, const Options& o, SolverKind solver) {
  if (solver == SolverKind::Pathwise) {
    PathwiseOptions po;
    if (o.tol > 0.0) po.sweep_tol = o.tol;
    po.tol_kink = o.tol_kink;
    FusedState state = FusedState::from_mean(y.values());
    return pathwise_solve(y, lambda, state, po);
  }
  LassoOptions lo;
  if (o.tol > 0.0) lo.tol = o.tol;
  const LassoProblem problem(y, lambda);
  LassoFit fit = cd_fit(problem, {}, lo.tol, lo.max_iter);
  fit = active_set_polish(problem, fit, lo.tol, lo.max_iter);
  return fit.fit;
}

void add_certificate(std::vector<std::string>& meta, const KktReport& c) {
  meta.push_back("kkt_passed: " + std::string(c.passed ? "true" : "false"));
  meta.push_back("kkt_max_inactive_ratio: " + format_double(c.max_inactive_ratio));
  meta.push_back("kkt_active_sign_mismatches: " + std::to_string(c.active_sign_mismatches));
  meta.push_back("kkt_stationarity_residual: " + format_double(c.stationarity_residual));
}

int cmd_fit(const Options& o, const CLI::App& sub, const std::string& echo, std::ostream& out,
            std::ostream& err) {
  const TimeSeries y = read_series_file(o.input);
  const double lambda = resolve_lambda(o, sub, y);
  const SolverKind solver = parse_solver(o.solver);
  const TrendFit fit = solve_one(y, lambda, o, solver);
  const KktReport cert = check_kkt(y, fit.mu_hat, lambda, o.kkt_tol, o.tol_kink);

  auto meta = base_metadata(echo);
  meta.push_back("solver: " + std::string(solver_name(solver)));
  meta.push_back("lambda: " + format_double(lambda));
  meta.push_back("kink_tol: " + format_double(o.tol_kink));
  meta.push_back("converged: " + std::string(fit.converged ? "true" : "false"));
  meta.push_back("objective: " + format_double(fit.objective));
  add_certificate(meta, cert);

  Sink sink(o.output, "fit.csv", out);
  write_fit_csv(sink.stream(), y, fit, extract_kinks(fit, o.tol_kink), meta);
  if (!fit.converged) {
    err << "warning: solver hit its iteration cap; output flagged converged: false\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_path(const Options& o, const std::string& echo, std::ostream& out, std::ostream& err) {
  const TimeSeries y = read_series_file(o.input);
  const SolverKind solver = parse_solver(o.solver);
  const Criterion criterion = parse_criterion(o.criterion);
  const std::vector<double> grid = make_lambda_grid(lambda_max(y), o.grid_size, o.grid_min_rel, true);

  LambdaPath path;
  if (solver == SolverKind::Pathwise) {
    PathwiseOptions po;
    if (o.tol > 0.0) po.sweep_tol = o.tol;
    po.tol_kink = o.tol_kink;
    po.kkt_tol = o.kkt_tol;
    path = fit_path(y, grid, po);
  } else {
    LassoOptions lo;
    if (o.tol > 0.0) lo.tol = o.tol;
    lo.tol_kink = o.tol_kink;
    lo.kkt_tol = o.kkt_tol;
    path = lasso_path(y, grid, lo);
  }
  const Selection sel = select(path, y, criterion, o.tol_kink);
  if (sel.excluded > 0)
    err << "note: " << sel.excluded << " path entr" << (sel.excluded == 1 ? "y" : "ies")
        << " with zero residual excluded from selection\n";

  std::size_t unconverged = 0;
  std::size_t uncertified = 0;
  for (const auto& e : path.entries()) {
    unconverged += e.fit.converged ? 0 : 1;
    uncertified += e.certificate.passed ? 0 : 1;
  }

  auto meta = base_metadata(echo);
  meta.push_back("solver: " + std::string(solver_name(solver)));
  meta.push_back("criterion: " + std::string(criterion_name(criterion)));
  meta.push_back("grid: " + std::to_string(grid.size()) + " values, zero plus log-spaced from " +
                 format_double(o.grid_min_rel) + " * lambda_max to lambda_max = " +
                 format_double(grid.back()));
  meta.push_back("kink_tol: " + format_double(o.tol_kink));
  meta.push_back("unconverged_entries: " + std::to_string(unconverged));
  meta.push_back("uncertified_entries: " + std::to_string(uncertified));

  {
    Sink scores(o.scores, "scores.csv", out);
    for (const auto& m : meta) scores.stream() << "# " << m << '\n';
    write_scores_csv(scores.stream(), sel.scores);
    if (scores.path().empty()) out << '\n';
  }

  auto fit_meta = meta;
  fit_meta.push_back("selected_lambda: " + format_double(sel.lambda));
  fit_meta.push_back("selected_index: " + std::to_string(sel.index));
  add_certificate(fit_meta, path[sel.index].certificate);
  Sink fit_sink(o.output, "selected_fit.csv", out);
  write_fit_csv(fit_sink.stream(), y, sel.fit, extract_kinks(sel.fit, o.tol_kink), fit_meta);

  if (unconverged > 0) {
    err << "warning: " << unconverged << " path entries hit their iteration cap\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_simulate(const Options& o, const CLI::App& sub, const std::string& echo,
                 std::ostream& out, std::ostream& err) {
  const bool have_config = !o.config.empty();
  const bool have_preset = !o.preset.empty();
  if (have_config == have_preset) throw InvalidSpec("give exactly one of --config, --preset");

  ExperimentConfig c;
  if (have_config) {
    c = load_config_file(o.config);
    if (sub.count("--n")) c.spec.n = o.n;
  } else {
    c = preset_config(o.preset, o.n);
    c.noise.snr = o.snr;
    c.replications = o.reps;
    c.base_seed = o.seed;
  }
  if (have_config) {
    if (sub.count("--snr")) c.noise.snr = o.snr;
    if (sub.count("--reps")) c.replications = o.reps;
    if (sub.count("--seed")) c.base_seed = o.seed;
  }
  if (!have_config || sub.count("--criterion")) c.criterion = parse_criterion(o.criterion);
  if (!have_config || sub.count("--solver")) c.solver = parse_solver(o.solver);
  if (sub.count("--grid-size")) c.grid_size = o.grid_size;
  if (sub.count("--grid-min-rel")) c.grid_min_rel = o.grid_min_rel;
  if (sub.count("--tol")) c.lasso_tol = o.tol;
  if (sub.count("--kink-tol")) c.tol_kink = o.tol_kink;
  if (sub.count("--lasso-polish")) c.lasso_polish = o.lasso_polish;
  if (sub.count("--workers")) c.workers = o.workers;
  c.validate();

  const ExperimentSummary s = run_experiment(c);

  Sink sink(o.output, "experiment.csv", out);
  write_experiment_csv(sink.stream(), s);

  if (!o.replications_out.empty()) {
    std::ofstream reps(o.replications_out, std::ios::binary);
    if (!reps) throw ParseError("cannot write " + o.replications_out, 0);
    write_replications_csv(reps, s);
  }

  std::string meta_path = o.meta;
  if (meta_path.empty() && !sink.path().empty()) meta_path = sink.path() + ".meta.json";
  if (!meta_path.empty()) {
    nlohmann::json truth = nlohmann::json::array();
    for (const auto& k : c.spec.true_kinks().kinks())
      truth.push_back({{"time", k.time}, {"sign", k.sign}, {"magnitude", k.magnitude}});
    nlohmann::json failed = nlohmann::json::array();
    for (const auto& r : s.replications)
      if (!r.converged) failed.push_back(r.rep);
    const nlohmann::json meta = {
        {"tool", "ltf"},
        {"version", LTF_VERSION_STRING},
        {"command", echo},
        {"config", config_to_json(c)},
        {"workers", c.workers},
        {"rng", rng_identity()},
        {"true_kinks", truth},
        {"grid_resolution",
         {{"size", c.grid_size}, {"min_rel", c.grid_min_rel}, {"include_zero", false}}},
        {"kink_threshold", "|second difference| > tol_kink * max(1, max |mu|)"},
        {"noise_sd_rule", c.noise.signed_mean ? "mean(mu0) / snr" : "mean(|mu0|) / snr"},
        {"time_scale", c.spec.normalized_time ? "t / n" : "t"},
        {"hausdorff_empty_set", "n (one set empty), 0 (both empty); reported divided by n"},
        {"near_kink_small",
         "estimated kinks within 5 of a true kink with magnitude below half the smallest true "
         "slope change"},
        {"reps_used", s.used},
        {"reps_failed", s.failed},
        {"failed_reps", failed},
    };
    std::ofstream m(meta_path, std::ios::binary);
    if (!m) throw ParseError("cannot write " + meta_path, 0);
    m << meta.dump(2) << '\n';
  }

  if (s.failed > 0)
    err << "warning: " << s.failed << " replication(s) selected an unconverged fit; excluded\n";
  return s.used == 0 ? kExitNotConverged : kExitOk;
}

int cmd_check(const Options& o, const CLI::App& sub, std::ostream& out) {
  const TimeSeries y = read_series_file(o.input);
  const std::vector<double> mu = read_fit_mu_file(o.fit_file);
  if (mu.size() != y.size())
    throw ParseError("fit has " + std::to_string(mu.size()) + " rows but the series has " +
                         std::to_string(y.size()),
                     0);
  if (!sub.count("--lambda") || !(o.lambda > 0.0)) throw InvalidSpec("--lambda must be positive");
  const double tol = sub.count("--tol") ? o.tol : o.kkt_tol;
  const KktReport r = check_kkt(y, mu, o.lambda, tol, o.tol_kink);
  out << "lambda,max_inactive_ratio,active_sign_mismatches,stationarity_residual,passed\n"
      << format_double(o.lambda) << ',' << format_double(r.max_inactive_ratio) << ','
      << r.active_sign_mismatches << ',' << format_double(r.stationarity_residual) << ','
      << (r.passed ? "true" : "false") << '\n';
  return r.passed ? kExitOk : kExitCertification;
}

void print_verdict(std::ostream& out, const IrrepresentableMatrix& m, const std::vector<int>& s) {
  const IrrepresentableVerdict v = irrepresentable_holds(m.rows, s);
  std::ostringstream signs;
  for (std::size_t i = 0; i < s.size(); ++i) signs << (i ? "," : "") << s[i];
  out << "signs (" << signs.str() << "): " << (v.holds ? "holds" : "violated") << '\n';
  out << "row,column,product\n";
  for (std::size_t i = 0; i < v.products.size(); ++i)
    out << i + 1 << ',' << m.z2_columns[i] << ',' << format_double(v.products[i]) << '\n';
  out << "violations:";
  for (const auto& viol : v.violations) out << ' ' << viol.row;
  out << '\n';
}

int cmd_irrep(const Options& o, std::ostream& out) {
  std::size_t n = o.irrep_n;
  std::vector<std::size_t> kinks = o.kinks;
  std::vector<std::vector<int>> cases;
  if (o.paper_example) {
    n = 10;
    kinks = {5};
    cases = {{1, 1, 1}, {1, -1, 1}, {1, 1, -1}, {-1, 1, 1}};
  } else if (!o.signs.empty()) {
    cases.push_back(o.signs);
  }
  const IrrepresentableMatrix m = irrepresentable_vectors(n, kinks);

  auto join = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  out << "# n=" << n << " z1_columns=" << join(m.z1_columns) << " z2_columns=" << join(m.z2_columns)
      << '\n';
  out << "row,column";
  for (std::size_t c = 0; c < m.z1_columns.size(); ++c) out << ",m" << c + 1;
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows.rows(); ++r) {
    out << r + 1 << ',' << m.z2_columns[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < m.rows.cols(); ++c) out << ',' << format_double(m.rows(r, c));
    out << '\n';
  }
  for (const auto& s : cases) {
    if (s.size() != m.z1_columns.size())
      throw InvalidSpec("--signs needs " + std::to_string(m.z1_columns.size()) + " entries");
    out << '\n';
    print_verdict(out, m, s);
  }
  return kExitOk;
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("-o,--output", o.output,
                  "Output file (default: $LTF_OUTPUT_DIR/<name>, else standard output)");
}

void add_kink_tol(CLI::App* sub, Options& o) {
  sub->add_option("--kink-tol", o.tol_kink, "Relative threshold for a nonzero slope change")
      ->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"l1 trend filtering: fits, paths, model selection, simulations, certificates",
               "ltf"};
  app.set_version_flag("--version", LTF_VERSION_STRING);
  app.require_subcommand(1);
  app.footer(std::string("Environment: ") + kOutputDirEnv +
             " sets the default output directory.\nExit codes: 0 ok, 2 input or validation "
             "error, 3 non-convergence, 4 certification failure.");

  auto* fit = app.add_subcommand("fit", "Fit one lambda and report kinks");
  fit->add_option("-i,--input", o.input, "Series CSV (one column, or index,value)")->required();
  add_output(fit, o);
  fit->add_option("--lambda", o.lambda, "Penalty level");
  fit->add_option("--lambda-rel", o.lambda_rel, "Penalty as a multiple of lambda_max(y)");
  fit->add_flag("--lambda-paper-fig2", o.lambda_fig2,
                "Penalty 20 * a_n * b_min from the --preset trend (a_n smallest slope change, "
                "b_min shortest piece)");
  fit->add_option("--preset", o.preset, "Ground-truth trend for --lambda-paper-fig2")
      ->check(CLI::IsMember({"example1", "example2"}));
  fit->add_option("--solver", o.solver, "pathwise or lasso")
      ->check(CLI::IsMember({"pathwise", "lasso"}))
      ->capture_default_str();
  fit->add_option("--tol", o.tol, "Solver convergence tolerance (default: solver's own)");
  fit->add_option("--kkt-tol", o.kkt_tol, "Certificate tolerance")->capture_default_str();
  add_kink_tol(fit, o);

  auto* path = app.add_subcommand("path", "Fit a lambda grid, score SIC and MC, select");
  path->add_option("-i,--input", o.input, "Series CSV")->required();
  add_output(path, o);
  path->add_option("--scores", o.scores, "Scores CSV (default: $LTF_OUTPUT_DIR/scores.csv, else "
                                          "standard output before the fit)");
  path->add_option("--grid-size", o.grid_size, "Log-spaced grid values")->capture_default_str();
  path->add_option("--grid-min-rel", o.grid_min_rel, "Smallest grid value / lambda_max")
      ->capture_default_str();
  path->add_option("--solver", o.solver, "pathwise or lasso")
      ->check(CLI::IsMember({"pathwise", "lasso"}))
      ->capture_default_str();
  path->add_option("--criterion", o.criterion, "sic or mc")
      ->check(CLI::IsMember({"sic", "mc"}))
      ->capture_default_str();
  path->add_option("--tol", o.tol, "Solver convergence tolerance");
  path->add_option("--kkt-tol", o.kkt_tol, "Certificate tolerance")->capture_default_str();
  add_kink_tol(path, o);

  auto* sim = app.add_subcommand("simulate", "Replicated experiment on a synthetic trend");
  sim->add_option("--config", o.config, "JSON experiment config");
  sim->add_option("--preset", o.preset, "example1 or example2")
      ->check(CLI::IsMember({"example1", "example2"}));
  add_output(sim, o);
  sim->add_option("--meta", o.meta, "Metadata JSON (default: <output>.meta.json)");
  sim->add_option("--replications-output", o.replications_out, "Per-replication CSV");
  sim->add_option("--n", o.n, "Series length")->capture_default_str();
  sim->add_option("--snr", o.snr, "Signal-to-noise ratio (inf for noiseless)")
      ->capture_default_str();
  sim->add_option("--reps", o.reps, "Replications")->capture_default_str();
  sim->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  sim->add_option("--criterion", o.criterion, "sic or mc")
      ->check(CLI::IsMember({"sic", "mc"}))
      ->capture_default_str();
  sim->add_option("--solver", o.solver, "pathwise or lasso")
      ->check(CLI::IsMember({"pathwise", "lasso"}))
      ->capture_default_str();
  sim->add_option("--grid-size", o.grid_size, "Log-spaced grid values (default 100)");
  sim->add_option("--grid-min-rel", o.grid_min_rel, "Smallest grid value / lambda_max (default 1e-6)");
  sim->add_option("--tol", o.tol, "Coordinate-descent tolerance on the lasso route");
  sim->add_flag("--lasso-polish", o.lasso_polish, "Polish lasso fits to exact optimality");
  sim->add_option("--workers", o.workers, "Worker threads (0: hardware concurrency)")
      ->capture_default_str();
  add_kink_tol(sim, o);

  auto* check = app.add_subcommand("check", "KKT certificate for a fitted trend");
  check->add_option("-i,--input", o.input, "Series CSV")->required();
  check->add_option("--fit", o.fit_file, "Fit CSV as written by `fit`")->required();
  check->add_option("--lambda", o.lambda, "Penalty level (> 0)")->required();
  check->add_option("--tol", o.tol, "Certificate tolerance (default 1e-6)");
  add_kink_tol(check, o);

  auto* irrep = app.add_subcommand("irrep", "Irrepresentable condition for a kink pattern");
  irrep->add_option("--n", o.irrep_n, "Series length")->capture_default_str();
  irrep->add_option("--kinks", o.kinks, "Kink columns of Z, comma separated (3..n)")
      ->delimiter(',');
  irrep->add_option("--signs", o.signs, "Signs for columns 1, 2 and the kinks, comma separated")
      ->delimiter(',');
  irrep->add_flag("--paper-example", o.paper_example,
                  "n = 10, kink column 5, the four sign cases");

  const std::string echo = command_echo(argc, argv);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (fit->parsed()) return cmd_fit(o, *fit, echo, out, err);
    if (path->parsed()) return cmd_path(o, echo, out, err);
    if (sim->parsed()) return cmd_simulate(o, *sim, echo, out, err);
    if (check->parsed()) return cmd_check(o, *check, out);
    if (irrep->parsed()) return cmd_irrep(o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace ltf::tools
