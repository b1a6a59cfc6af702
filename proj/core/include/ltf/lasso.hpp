#pragma once

// The trend filter as a LASSO on the second-difference encoding beta:
//
//   min 1/2 ||y - Z beta||^2 + lambda * sum_{j>=3} |beta_j|,   mu = Z beta.
//
// Columns 1 and 2 carry the level and initial slope and are not penalized.
// Solved by cyclic coordinate descent with an incrementally maintained
// residual.

#include <cstddef>
#include <span>
#include <vector>

#include "ltf/design.hpp"
#include "ltf/series.hpp"

namespace ltf {

struct LassoProblem {
  LassoProblem(TimeSeries series, double lambda);

  TimeSeries y;
  DesignZ z;
  double lambda;
};

struct LassoFit {
  TrendFit fit;
  std::vector<double> beta;  ///< full encoding, length n
};

struct LassoOptions {
  double tol = 1e-8;
  std::size_t max_iter = 100'000;
  /// Run active_set_polish after coordinate descent.
  bool polish = true;
  double kkt_tol = 1e-6;
  double tol_kink = kDefaultKinkTol;
};

/// Cyclic coordinate descent from `beta_init` (zeros when empty). Each pass
/// over all columns is followed by passes over the nonzero set until it
/// settles; stops when a full pass moves no coordinate by more than
/// tol * (1 + |beta_j|). With lambda == 0 the square design is inverted
/// directly: beta is the encoding of y.
LassoFit cd_fit(const LassoProblem& problem, std::span<const double> beta_init,
                double tol, std::size_t max_iter);

/// Tightens a coordinate-descent fit. Repeats: descent restricted to the
/// nonzero set plus columns 1, 2 at tol / 100; an exact solve on that set
/// with the signs held fixed, stepping back to the first sign change and
/// dropping that column. Stops when no zero column has |z_j' r| above
/// lambda (1 + 1e-9); otherwise one full pass admits the violators. The
/// objective never increases.
LassoFit active_set_polish(const LassoProblem& problem, const LassoFit& start,
                           double tol, std::size_t max_iter);

/// Fits a strictly increasing grid. Internally runs from the largest lambda
/// down, warm-starting each fit from the previous beta, and returns entries
/// in increasing order with KKT certificates attached.
LambdaPath lasso_path(const TimeSeries& y, std::span<const double> lambda_grid,
                      const LassoOptions& options = {},
                      std::vector<std::vector<double>>* betas = nullptr);

}  // namespace ltf
