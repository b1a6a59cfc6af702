#include "ltf/design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ltf/error.hpp"

namespace ltf {

namespace {

void require_positive(std::size_t n) {
  if (n == 0) throw InvalidDimension("design size must be positive");
}

void require_length(std::span<const double> v, std::size_t n) {
  if (v.size() != n) {
    throw InvalidDimension("vector length " + std::to_string(v.size()) +
                           " does not match design size " + std::to_string(n));
  }
}

void require_dense_ok(std::size_t n) {
  if (n > kMaxDenseSize) {
    throw InvalidDimension("dense materialization limited to n <= " +
                           std::to_string(kMaxDenseSize));
  }
}

}  // namespace

DesignX::DesignX(std::size_t n) : n_(n) { require_positive(n); }

double DesignX::entry(std::size_t t, std::size_t j) const {
  if (t < 1 || t > n_ || j < 1 || j > n_) throw InvalidIndex("entry out of range");
  return j <= t ? 1.0 : 0.0;
}

std::vector<double> DesignX::apply(std::span<const double> nu) const {
  require_length(nu, n_);
  std::vector<double> out(n_);
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    acc += nu[i];
    out[i] = acc;
  }
  return out;
}

std::vector<double> DesignX::apply_transpose(std::span<const double> v) const {
  require_length(v, n_);
  std::vector<double> out(n_);
  double acc = 0.0;
  for (std::size_t i = n_; i-- > 0;) {
    acc += v[i];
    out[i] = acc;
  }
  return out;
}

Eigen::MatrixXd DesignX::dense() const {
  require_dense_ok(n_);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n_, n_);
  for (std::size_t t = 0; t < n_; ++t)
    for (std::size_t j = 0; j <= t; ++j) x(t, j) = 1.0;
  return x;
}

DesignZ::DesignZ(std::size_t n) : n_(n) { require_positive(n); }

double DesignZ::entry(std::size_t t, std::size_t j) const {
  if (t < 1 || t > n_ || j < 1 || j > n_) throw InvalidIndex("entry out of range");
  if (j == 1) return 1.0;
  return j <= t ? static_cast<double>(t - j + 1) : 0.0;
}

std::vector<double> DesignZ::apply(std::span<const double> beta) const {
  require_length(beta, n_);
  std::vector<double> out(n_);
  out[0] = beta[0];
  double slope = 0.0;
  double level = beta[0];
  for (std::size_t i = 1; i < n_; ++i) {
    slope += beta[i];
    level += slope;
    out[i] = level;
  }
  return out;
}

std::vector<double> DesignZ::apply_transpose(std::span<const double> v) const {
  require_length(v, n_);
  std::vector<double> out(n_);
  double tail = 0.0;
  double weighted = 0.0;
  for (std::size_t i = n_; i-- > 1;) {
    tail += v[i];
    weighted += tail;
    out[i] = weighted;
  }
  tail += v[0];
  out[0] = tail;
  return out;
}

double DesignZ::column_norm_sq(std::size_t j) const {
  if (j < 1 || j > n_) throw InvalidIndex("column out of range");
  if (j == 1) return static_cast<double>(n_);
  const double m = static_cast<double>(n_ - j + 1);
  return m * (m + 1.0) * (2.0 * m + 1.0) / 6.0;
}

Eigen::MatrixXd DesignZ::dense() const {
  require_dense_ok(n_);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n_, n_);
  for (std::size_t t = 1; t <= n_; ++t)
    for (std::size_t j = 1; j <= t; ++j) z(t - 1, j - 1) = entry(t, j);
  return z;
}

DesignX build_design_X(std::size_t n) { return DesignX(n); }
DesignZ build_design_Z(std::size_t n) { return DesignZ(n); }

std::vector<double> second_diff(std::span<const double> mu) {
  if (mu.size() < 3) throw InvalidDimension("second_diff needs at least 3 points");
  std::vector<double> out(mu.size() - 2);
  for (std::size_t i = 2; i < mu.size(); ++i)
    out[i - 2] = mu[i] + mu[i - 2] - 2.0 * mu[i - 1];
  return out;
}

std::vector<double> encode_second_diff(std::span<const double> mu) {
  if (mu.size() < 2) throw InvalidDimension("encoding needs at least 2 points");
  std::vector<double> beta(mu.size());
  beta[0] = mu[0];
  beta[1] = mu[1] - mu[0];
  for (std::size_t i = 2; i < mu.size(); ++i)
    beta[i] = mu[i] + mu[i - 2] - 2.0 * mu[i - 1];
  return beta;
}

SpectralSummary spectral_check(std::size_t n) {
  if (n < 2) throw InvalidDimension("spectral_check needs n >= 2");
  const Eigen::MatrixXd z = DesignZ(n).dense();
  const double scale = static_cast<double>(n);
  const Eigen::MatrixXd gram = (z.transpose() * z) / scale;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw SingularDesign("eigen-solve failed");
  return {eig.eigenvalues().minCoeff(), z.rowwise().squaredNorm().maxCoeff() / scale};
}

IrrepresentableMatrix irrepresentable_vectors(
    std::size_t n, std::span<const std::size_t> kink_columns) {
  if (n < 2) throw InvalidDimension("irrepresentable_vectors needs n >= 2");
  for (std::size_t i = 0; i < kink_columns.size(); ++i) {
    const std::size_t c = kink_columns[i];
    if (c < 3 || c > n)
      throw InvalidIndex("kink column " + std::to_string(c) + " outside 3.." +
                         std::to_string(n));
    if (i > 0 && c <= kink_columns[i - 1])
      throw InvalidIndex("kink columns must be strictly increasing");
  }

  IrrepresentableMatrix out;
  out.z1_columns = {1, 2};
  out.z1_columns.insert(out.z1_columns.end(), kink_columns.begin(), kink_columns.end());
  for (std::size_t j = 3; j <= n; ++j) {
    if (!std::binary_search(kink_columns.begin(), kink_columns.end(), j))
      out.z2_columns.push_back(j);
  }

  const Eigen::MatrixXd z = DesignZ(n).dense();
  Eigen::MatrixXd z1(n, out.z1_columns.size());
  Eigen::MatrixXd z2(n, out.z2_columns.size());
  for (std::size_t c = 0; c < out.z1_columns.size(); ++c)
    z1.col(c) = z.col(out.z1_columns[c] - 1);
  for (std::size_t c = 0; c < out.z2_columns.size(); ++c)
    z2.col(c) = z.col(out.z2_columns[c] - 1);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z1);
  if (qr.rank() < z1.cols()) throw SingularDesign("Z1'Z1 is singular");
  // (Z1'Z1)^{-1} Z1'Z2 is the least-squares solution of Z1 W = Z2.
  out.rows = qr.solve(z2).transpose();
  return out;
}

IrrepresentableVerdict irrepresentable_holds(const Eigen::MatrixXd& m,
                                             std::span<const int> s1) {
  if (static_cast<std::size_t>(m.cols()) != s1.size())
    throw InvalidDimension("sign vector length " + std::to_string(s1.size()) +
                           " does not match " + std::to_string(m.cols()) + " columns");
  Eigen::VectorXd s(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (s1[i] != 1 && s1[i] != -1) throw InvalidIndex("signs must be +1 or -1");
    s(i) = s1[i];
  }
  const Eigen::VectorXd prod = m * s;

  IrrepresentableVerdict verdict{true, {}, {}};
  verdict.products.assign(prod.data(), prod.data() + prod.size());
  for (Eigen::Index i = 0; i < prod.size(); ++i) {
    if (std::abs(prod(i)) >= 1.0 - 1e-10) {
      verdict.holds = false;
      verdict.violations.push_back({static_cast<std::size_t>(i) + 1, prod(i)});
    }
  }
  return verdict;
}

}  // namespace ltf
