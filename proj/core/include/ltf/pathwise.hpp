#pragma once

// Pathwise coordinate solver on the slope vector nu (mu = X nu):
//
//   f(nu) = 1/2 ||y - X nu||^2 + lambda * sum_{t=3}^n |nu_t - nu_{t-1}|.
//
// Each lambda is reached by continuation from the previous one. At a fixed
// lambda the solver alternates descent cycles (exact minimization over one
// slope) with fusion cycles (exact minimization over a run of slopes forced
// to a common value). Once the cycles settle, the fused pattern is refined
// exactly: with the kink set and signs fixed the objective is a quadratic
// in the knot values of a continuous piecewise-linear mean, which is solved
// directly; kinks whose sign would flip are dropped and coordinates that
// violate the subgradient bound are admitted.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ltf/series.hpp"

namespace ltf {

/// A contiguous run of slopes sharing one value. 1-based, inclusive.
struct SlopeRun {
  std::size_t first;
  std::size_t last;
  double value;
  std::size_t length() const noexcept { return last - first + 1; }
};

/// Slope vector together with its partition into maximal runs of
/// bitwise-equal values.
class FusedState {
 public:
  explicit FusedState(std::vector<double> slopes);

  /// State whose prefix sums reproduce `mu` (nu_1 = mu_1, nu_t = mu_t - mu_{t-1}).
  static FusedState from_mean(std::span<const double> mu);

  std::size_t size() const noexcept { return nu_.size(); }
  std::span<const double> slopes() const noexcept { return nu_; }
  double slope(std::size_t k) const { return nu_.at(k - 1); }

  void set_slope(std::size_t k, double value);
  /// Sets slopes first..last (1-based, inclusive) to `value`.
  void set_block(std::size_t first, std::size_t last, double value);

  std::vector<SlopeRun> groups() const;
  std::vector<double> mean() const;

 private:
  std::vector<double> nu_;
};

/// Exact minimizer of f over nu_k with the other slopes held fixed, located
/// by checking the stationary point on each interval cut by nu_{k-1} and
/// nu_{k+1}. Returns nullopt when the minimizer is the current value.
std::optional<double> descent_update(std::size_t k, const FusedState& state,
                                     const TimeSeries& y, double lambda);

struct FusionResult {
  bool accepted = false;
  double alpha = 0.0;
  double objective_before = 0.0;
  double objective_after = 0.0;
};

/// Tries nu_{k-m} = ... = nu_k = alpha with alpha minimizing f on the three
/// intervals cut by the block's outer neighbours nu_{k-m-1} and nu_{k+1}.
/// Accepts when such a stationary alpha exists and f does not increase;
/// on acceptance the block is written into `state`. Requires 1 <= m < k.
FusionResult fusion_update(std::size_t k, std::size_t m, FusedState& state,
                           const TimeSeries& y, double lambda);

struct PathwiseOptions {
  double sweep_tol = 1e-10;
  /// Cap on descent/fusion sweeps per lambda; 0 means 10 * n.
  std::size_t max_sweeps = 0;
  /// Sweeps between exact pattern refinements.
  std::size_t refine_interval = 8;
  /// Set false to run the bare descent/fusion cycles only.
  bool refine = true;
  double kkt_tol = 1e-6;
  double tol_kink = kDefaultKinkTol;
  /// Re-evaluate f after every accepted move and count increases beyond
  /// 1e-12 relative. Quadratic cost; meant for tests.
  bool check_monotone = false;
};

struct PathwiseDiagnostics {
  std::size_t sweeps = 0;
  std::size_t refinements = 0;
  std::size_t fusions_accepted = 0;
  std::size_t monotone_violations = 0;
};

/// Solves at one lambda, starting from and updating `state`.
TrendFit pathwise_solve(const TimeSeries& y, double lambda, FusedState& state,
                        const PathwiseOptions& options = {},
                        PathwiseDiagnostics* diagnostics = nullptr);

/// Fits every lambda of a strictly increasing grid (which may start at 0),
/// warm-starting each from the previous solution. Every entry carries its
/// KKT certificate; entries that hit the sweep cap are flagged through
/// `fit.converged`.
LambdaPath fit_path(const TimeSeries& y, std::span<const double> lambda_grid,
                    const PathwiseOptions& options = {},
                    PathwiseDiagnostics* diagnostics = nullptr);

}  // namespace ltf
