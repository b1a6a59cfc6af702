#pragma once

// Linear operators of the two reformulations of the l1 trend filter, plus
// the spectral and irrepresentable-condition calculators built on them.
//
// Row, column and time indices in this header are 1-based, matching the
// usual way the model is written down. Vectors are ordinary 0-based
// containers: entry t of a vector lives at position t - 1.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ltf {

/// Dense materialization is refused above this size.
inline constexpr std::size_t kMaxDenseSize = 2000;

/// Prefix-sum design: x_tj = 1 for j <= t, 0 otherwise. Maps slopes to means.
class DesignX {
 public:
  explicit DesignX(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double entry(std::size_t t, std::size_t j) const;

  /// X * nu, i.e. running prefix sums. O(n).
  std::vector<double> apply(std::span<const double> nu) const;
  /// X' * v, i.e. suffix sums. O(n).
  std::vector<double> apply_transpose(std::span<const double> v) const;

  Eigen::MatrixXd dense() const;

 private:
  std::size_t n_;
};

/// Slope-change design: z_t1 = 1; z_tj = t - j + 1 for 2 <= j <= t; 0 above
/// the diagonal. Maps the second-difference encoding beta to means.
class DesignZ {
 public:
  explicit DesignZ(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double entry(std::size_t t, std::size_t j) const;

  /// Z * beta via two running sums. O(n).
  std::vector<double> apply(std::span<const double> beta) const;
  /// Z' * v via two suffix sums. O(n).
  std::vector<double> apply_transpose(std::span<const double> v) const;

  /// ||z_j||^2 in closed form: n for j = 1, sum_{i=1}^{n-j+1} i^2 otherwise.
  double column_norm_sq(std::size_t j) const;

  Eigen::MatrixXd dense() const;

 private:
  std::size_t n_;
};

DesignX build_design_X(std::size_t n);
DesignZ build_design_Z(std::size_t n);

/// Entries mu_t + mu_{t-2} - 2 mu_{t-1} for t = 3..n (output position t - 3).
/// The value at t describes a slope change located at time t - 1.
std::vector<double> second_diff(std::span<const double> mu);

/// Full encoding (mu_1, mu_2 - mu_1, second_diff(mu)...), the inverse of Z.
std::vector<double> encode_second_diff(std::span<const double> mu);

struct SpectralSummary {
  double rho1;            ///< smallest eigenvalue of Z'Z / n
  double max_row_energy;  ///< max_t z_t'z_t / n
};

/// Dense eigen-solve; intended for desk-scale n.
SpectralSummary spectral_check(std::size_t n);

/// M = Z2' Z1 (Z1'Z1)^{-1} together with the column bookkeeping. Z1 holds
/// columns {1, 2} and the kink columns; Z2 the remaining columns ascending.
struct IrrepresentableMatrix {
  Eigen::MatrixXd rows;                   ///< one row per column of Z2
  std::vector<std::size_t> z1_columns;    ///< 1-based
  std::vector<std::size_t> z2_columns;    ///< 1-based, ascending
};

IrrepresentableMatrix irrepresentable_vectors(
    std::size_t n, std::span<const std::size_t> kink_columns);

struct IrrepresentableViolation {
  std::size_t row;  ///< 1-based row of M (a_1, a_2, ...)
  double value;     ///< a_row' s1
};

struct IrrepresentableVerdict {
  bool holds;
  std::vector<double> products;  ///< M * s1
  std::vector<IrrepresentableViolation> violations;
};

/// Strict componentwise test |M s1| < 1. A product equal to one (up to
/// 1e-10 relative rounding) is a violation.
IrrepresentableVerdict irrepresentable_holds(const Eigen::MatrixXd& m,
                                             std::span<const int> s1);

}  // namespace ltf
