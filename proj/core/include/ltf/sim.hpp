#pragma once

// Synthetic joint piecewise-linear trends, Gaussian noise, replicated
// fit-and-select experiments, and the metrics used to score them.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "ltf/select.hpp"
#include "ltf/series.hpp"

namespace ltf {

/// k linear pieces joined continuously. Piece j has slope b[j-1]; the
/// change points are t_j = round(n r_j) + 1. The first piece has
/// intercept a1 and later intercepts follow from continuity.
struct PiecewiseLinearSpec {
  std::size_t n = 0;
  std::vector<double> r;  ///< k - 1 fractions, strictly increasing in (0, 1)
  std::vector<double> b;  ///< k slopes
  double a1 = 0.0;
  /// Slopes apply to t / n when true, to t otherwise.
  bool normalized_time = true;

  /// Throws InvalidSpec unless the kink times are strictly increasing in 2..n-1.
  void validate() const;
  std::size_t segments() const noexcept { return b.size(); }
  std::vector<std::size_t> kink_times() const;
  std::vector<double> intercepts() const;
  /// Kinks of the generated trend with signs sign(b_{j+1} - b_j).
  KinkSet true_kinks() const;
  /// Smallest slope change at a kink, in units of the second difference.
  double min_slope_change() const;
  /// Smallest piece length.
  std::size_t min_segment_size() const;
};

PiecewiseLinearSpec example1_spec(std::size_t n);
PiecewiseLinearSpec example2_spec(std::size_t n);

std::vector<double> gen_trend(const PiecewiseLinearSpec& spec);

/// Use as NoiseSpec::snr for noiseless data.
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

struct NoiseSpec {
  double snr = kNoiseless;
  std::uint64_t seed = 0;
  /// sigma = mean(mu0) / snr instead of mean(|mu0|) / snr; needs a positive mean.
  bool signed_mean = false;
};

/// Noise sd implied by `noise` for this trend; 0 when noiseless.
double noise_sigma(const std::vector<double>& mu0, const NoiseSpec& noise);

/// y = mu0 + sigma * N(0, 1), drawn from a seeded 64-bit Mersenne Twister.
/// Throws ZeroSigma when a finite snr yields sigma <= 0.
TimeSeries add_noise(const std::vector<double>& mu0, const NoiseSpec& noise);

/// Independent stream seed for replication `rep`.
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t rep);

/// Name of the generator and derivation used, for output metadata.
std::string rng_identity();

/// sum (mu_hat - mu0)^2 / sum mu_hat^2. Throws UndefinedMetric if mu_hat == 0.
double relative_error(const std::vector<double>& mu_hat, const std::vector<double>& mu0);

struct HausdorffResult {
  double e_ab = 0.0;  ///< sup over b in B of the distance from b to A
  double e_ba = 0.0;  ///< sup over a in A of the distance from a to B
  double hd = 0.0;
};

/// Directed deviations and their maximum. When exactly one set is empty all
/// three are `n`; when both are empty all three are 0.
HausdorffResult hausdorff(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                          std::size_t n);

/// Same kink times.
bool detection_consistent(const KinkSet& fit, const KinkSet& truth);
/// Same kink times and the same sign at each.
bool sign_consistent(const KinkSet& fit, const KinkSet& truth);

/// Estimated kinks within `radius` of a true kink whose magnitude is below
/// `fraction` times the smallest true slope change.
std::size_t near_kink_small_count(const KinkSet& fit, const PiecewiseLinearSpec& spec,
                                  std::size_t radius = 5, double fraction = 0.5);

enum class SolverKind { Pathwise, Lasso };
SolverKind parse_solver(std::string_view name);
std::string_view solver_name(SolverKind s);

struct ExperimentConfig {
  std::string label = "custom";
  PiecewiseLinearSpec spec;
  NoiseSpec noise;  ///< seed ignored; replications derive theirs from base_seed
  std::size_t replications = 1;
  Criterion criterion = Criterion::MC;
  SolverKind solver = SolverKind::Pathwise;
  std::size_t grid_size = 100;
  double grid_min_rel = 1e-6;
  std::uint64_t base_seed = 1;
  double tol_kink = kDefaultKinkTol;
  /// Run the exact active-set polish after coordinate descent on the LASSO
  /// route. Off by default: the route is plain coordinate descent.
  bool lasso_polish = false;
  double lasso_tol = 1e-8;
  std::size_t lasso_max_iter = 100'000;
  /// 0 uses the available hardware parallelism.
  std::size_t workers = 0;

  /// Throws InvalidSpec with the offending field name.
  void validate() const;
};

struct MetricsRow {
  double re = 0.0;
  double e_ab = 0.0;  ///< divided by n
  double e_ba = 0.0;  ///< divided by n
  double hd = 0.0;    ///< divided by n
  std::size_t j_count = 0;
  bool detection_consistent = false;
  bool sign_consistent = false;
  std::size_t near_kink_small = 0;
};

struct ReplicationResult {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  bool converged = true;           ///< the selected fit converged
  std::size_t path_unconverged = 0;  ///< path entries that hit their iteration cap
  std::size_t kkt_failures = 0;      ///< path entries whose certificate failed
  MetricsRow metrics;
};

struct Aggregate {
  double mean = 0.0;
  double sd = 0.0;  ///< sample sd, 0 for a single value
};

Aggregate aggregate(const std::vector<double>& values);

struct ExperimentSummary {
  ExperimentConfig config;
  std::vector<ReplicationResult> replications;  ///< ordered by rep
  std::size_t used = 0;
  std::size_t failed = 0;
  Aggregate re, j_count, e_ab, e_ba, hd, near_kink_small;
  double sign_frequency = 0.0;
  double detection_frequency = 0.0;
};

/// Generates, fits the path, selects lambda and scores one replication.
ReplicationResult run_replication(const ExperimentConfig& config, std::size_t rep);

/// All replications on a pool of worker threads; the result does not depend
/// on the worker count.
ExperimentSummary run_experiment(const ExperimentConfig& config);

/// One aggregated row: example, n, snr, criterion, solver, reps used/failed,
/// metric means and sds, sign and detection frequencies.
void write_experiment_csv(std::ostream& out, const ExperimentSummary& summary);
/// One row per replication.
void write_replications_csv(std::ostream& out, const ExperimentSummary& summary);

}  // namespace ltf
