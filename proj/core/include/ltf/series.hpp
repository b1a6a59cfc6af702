#pragma once

// Value types shared by every module: the observed series, one fitted trend,
// its kink set, and a fitted lambda path.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ltf {

/// Default relative threshold separating a slope change from numerical zero.
inline constexpr double kDefaultKinkTol = 1e-8;

/// Shortest series accepted by the fitting code.
inline constexpr std::size_t kMinSeriesLength = 5;

class TimeSeries {
 public:
  /// Throws InvalidDimension for n < 5 and InvalidDimension for non-finite
  /// values.
  explicit TimeSeries(std::vector<double> y);

  std::size_t size() const noexcept { return y_.size(); }
  std::span<const double> values() const noexcept { return y_; }
  double operator[](std::size_t i) const { return y_[i]; }
  double max_abs() const noexcept;

 private:
  std::vector<double> y_;
};

/// One fitted trend at a fixed lambda. Slopes and second differences are
/// always derived from `mu_hat`, never stored independently.
struct TrendFit {
  double lambda = 0.0;
  std::vector<double> mu_hat;
  std::vector<double> nu_hat;     ///< nu_1 = mu_1, nu_t = mu_t - mu_{t-1}
  std::vector<double> beta_tail;  ///< second differences, t = 3..n
  double objective = 0.0;
  bool converged = true;
  std::size_t iterations = 0;

  static TrendFit from_mu(const TimeSeries& y, std::vector<double> mu, double lambda);
};

struct Kink {
  std::size_t time;  ///< 1-based time location i; second difference at t = i + 1
  int sign;          ///< +1 or -1
  double magnitude;  ///< |mu_{i+1} + mu_{i-1} - 2 mu_i|
};

class KinkSet {
 public:
  KinkSet() = default;
  /// Requires strictly increasing times >= 2 and signs in {-1, +1}.
  explicit KinkSet(std::vector<Kink> kinks);

  std::size_t size() const noexcept { return kinks_.size(); }
  bool empty() const noexcept { return kinks_.empty(); }
  const std::vector<Kink>& kinks() const noexcept { return kinks_; }
  std::vector<std::size_t> times() const;
  std::optional<int> sign_at(std::size_t time) const;

  friend bool operator==(const KinkSet& a, const KinkSet& b);

 private:
  std::vector<Kink> kinks_;
};

/// Interior kinks of a fitted mean: |second difference| > tol_kink * scale
/// with scale = max(1, max_t |mu_t|).
KinkSet extract_kinks(std::span<const double> mu, double tol_kink = kDefaultKinkTol);
KinkSet extract_kinks(const TrendFit& fit, double tol_kink = kDefaultKinkTol);

/// 1/2 ||y - mu||^2 + lambda * sum_{t>=3} |mu_t + mu_{t-2} - 2 mu_{t-1}|.
double objective_value(const TimeSeries& y, std::span<const double> mu, double lambda);

struct KktReport {
  double max_inactive_ratio = 0.0;
  std::size_t active_sign_mismatches = 0;
  double stationarity_residual = 0.0;
  bool passed = false;
};

struct PathEntry {
  double lambda;
  TrendFit fit;
  bool warm_start;
  KktReport certificate;
};

/// Fits ordered by strictly increasing lambda.
class LambdaPath {
 public:
  /// Throws InvalidDimension if `entry.lambda` does not exceed the last one.
  void push_back(PathEntry entry);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<PathEntry>& entries() const noexcept { return entries_; }
  const PathEntry& operator[](std::size_t i) const { return entries_[i]; }

 private:
  std::vector<PathEntry> entries_;
};

/// `size` log-spaced values from lambda_max * min_rel to lambda_max, with a
/// leading zero when `include_zero`. Strictly increasing.
std::vector<double> make_lambda_grid(double lambda_max, std::size_t size,
                                     double min_rel, bool include_zero);

}  // namespace ltf
