#pragma once

// Optimality certificate for the l1 trend filter, the affine limit of the
// path, and an independent dual proximal-gradient solver used to produce
// reference solutions.
//
// Stationarity reads y - mu = lambda * D' gamma, where D is the
// (n-2) x n second-difference operator and gamma is a subgradient of
// ||D mu||_1: gamma_t = sign((D mu)_t) where D mu is nonzero, |gamma_t| <= 1
// elsewhere. D' has full column rank, so gamma is unique.

#include <cstddef>
#include <span>
#include <vector>

#include "ltf/series.hpp"

namespace ltf {

/// Ordinary least-squares fit of y on (1, t), returned as a length-n vector.
std::vector<double> affine_fit(std::span<const double> y);

struct SubgradientRecovery {
  std::vector<double> gamma;  ///< length n - 2; entry j pairs with kink time j + 1
  double residual;            ///< ||r - lambda D' gamma||_inf
};

/// Least-squares gamma for r = lambda D' gamma. The component of r along
/// affine sequences cannot be represented and shows up in `residual`.
SubgradientRecovery recover_subgradient(std::span<const double> residual, double lambda);

/// Certifies `mu` as the minimizer at `lambda`. Active coordinates are those
/// extract_kinks would report at `tol_kink`. With lambda == 0 the test is
/// mu == y within tol * (1 + ||y||_inf).
KktReport check_kkt(const TimeSeries& y, std::span<const double> mu, double lambda,
                    double tol, double tol_kink = kDefaultKinkTol);

/// Smallest lambda at which the affine fit is optimal; zero for affine y.
double lambda_max(const TimeSeries& y);

struct OracleOptions {
  /// Stop once the duality gap is below tol * (1 + ||y||^2).
  double tol = 1e-10;
  std::size_t max_iter = 20'000'000;
};

struct OracleSolution {
  std::vector<double> mu;
  std::vector<double> gamma;
  double gap = 0.0;
  std::size_t iterations = 0;
};

/// Accelerated projected gradient on the box-constrained dual
///   min_{||gamma||_inf <= 1} 1/2 ||y - lambda D' gamma||^2,
/// with mu = y - lambda D' gamma. Throws OracleBudgetExceeded when the gap
/// is not closed within max_iter iterations.
OracleSolution oracle_solve(const TimeSeries& y, double lambda, OracleOptions options = {});

}  // namespace ltf
