#include "ltf/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "ltf/error.hpp"
#include "ltf/kkt.hpp"

namespace ltf {

namespace {

constexpr double kAdmitSlack = 1e-9;

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

class CoordinateState {
 public:
  CoordinateState(const LassoProblem& p, std::vector<double> beta)
      : p_(p), n_(p.y.size()), beta_(std::move(beta)), norms_(n_) {
    for (std::size_t j = 0; j < n_; ++j) norms_[j] = p_.z.column_norm_sq(j + 1);
    reset_residual();
  }

  void reset_residual() {
    const std::vector<double> mu = p_.z.apply(beta_);
    r_.resize(n_);
    for (std::size_t t = 0; t < n_; ++t) r_[t] = p_.y[t] - mu[t];
  }

  // One cyclic pass over `cols` (ascending, 0-based). Gradients z_j' r are
  // taken from the residual at the start of the pass and corrected for the
  // updates made earlier in the pass: an update d at column k < j lowers
  // z_j' r by d * (S2(N) + (j - k) S1(N)), N = n - j, with S1, S2 the sums of
  // the first N integers and squares (d * S1(N) when k is the level column).
  // That keeps a pass at O(n). Returns the largest relative change.
  double sweep(const std::vector<std::size_t>& cols) {
    std::vector<double> grad(n_);
    double tail = 0.0, weighted = 0.0;
    for (std::size_t i = n_; i-- > 0;) {
      tail += r_[i];
      weighted += tail;
      grad[i] = weighted;
    }
    grad[0] = tail;

    double level = 0.0;  // update of column 0
    double sum_d = 0.0;  // sum of updates at columns k >= 1
    double sum_dk = 0.0;  // sum of d * k over the same
    double change = 0.0;
    for (std::size_t j : cols) {
      double g = grad[j];
      if (j > 0) {
        const double big_n = static_cast<double>(n_ - j);
        const double s1 = big_n * (big_n + 1.0) / 2.0;
        const double s2 = s1 * (2.0 * big_n + 1.0) / 3.0;
        const double jd = static_cast<double>(j);
        g -= level * s1 + sum_d * s2 + (jd * sum_d - sum_dk) * s1;
      }
      const double rho = g + norms_[j] * beta_[j];
      const double next = j < 2 ? rho / norms_[j] : soft_threshold(rho, p_.lambda) / norms_[j];
      const double delta = next - beta_[j];
      if (delta == 0.0) continue;
      beta_[j] = next;
      if (j == 0) {
        level += delta;
      } else {
        sum_d += delta;
        sum_dk += delta * static_cast<double>(j);
      }
      change = std::max(change, std::abs(delta) / (1.0 + std::abs(next)));
    }
    reset_residual();
    return change;
  }

  double full_sweep() {
    std::vector<std::size_t> all(n_);
    for (std::size_t j = 0; j < n_; ++j) all[j] = j;
    return sweep(all);
  }

  // Zero penalized columns with |z_j' r| > lambda * (1 + slack).
  std::size_t violators(double slack) const {
    std::size_t count = 0;
    double tail = 0.0, weighted = 0.0;
    for (std::size_t i = n_; i-- > 2;) {
      tail += r_[i];
      weighted += tail;
      if (beta_[i] == 0.0 && std::abs(weighted) > p_.lambda * (1.0 + slack)) ++count;
    }
    return count;
  }

  std::vector<std::size_t> active() const {
    std::vector<std::size_t> cols{0, 1};
    for (std::size_t j = 2; j < n_; ++j)
      if (beta_[j] != 0.0) cols.push_back(j);
    return cols;
  }

  // Minimizer on `cols` with the signs of the penalized entries frozen,
  // walked toward until the first penalized entry would change sign. That
  // entry is zeroed and the solve repeated.
  void solve_on_pattern(std::vector<std::size_t> cols) {
    while (true) {
      const auto p = static_cast<Eigen::Index>(cols.size());
      Eigen::MatrixXd za(static_cast<Eigen::Index>(n_), p);
      Eigen::VectorXd sign_term = Eigen::VectorXd::Zero(p);
      for (Eigen::Index c = 0; c < p; ++c) {
        const std::size_t j = cols[static_cast<std::size_t>(c)];
        for (std::size_t t = 0; t < n_; ++t)
          za(static_cast<Eigen::Index>(t), c) = p_.z.entry(t + 1, j + 1);
        if (j >= 2) sign_term(c) = beta_[j] > 0 ? p_.lambda : -p_.lambda;
      }
      const Eigen::Map<const Eigen::VectorXd> yv(p_.y.values().data(),
                                                 static_cast<Eigen::Index>(n_));

      // R beta = Q'y - R^{-T} (lambda s), avoiding the squared condition of Z'Z.
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(za);
      const Eigen::VectorXd qty = (qr.householderQ().transpose() * yv).head(p);
      const auto r = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
      const Eigen::VectorXd v = r.transpose().solve(sign_term);
      const Eigen::VectorXd target = r.solve(qty - v);

      double step = 1.0;
      std::size_t hit = cols.size();
      for (std::size_t c = 2; c < cols.size(); ++c) {
        const double now = beta_[cols[c]];
        const double next = target(static_cast<Eigen::Index>(c));
        if (now * next >= 0.0) continue;
        const double t = now / (now - next);
        if (t < step) {
          step = t;
          hit = c;
        }
      }
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const std::size_t j = cols[c];
        beta_[j] += step * (target(static_cast<Eigen::Index>(c)) - beta_[j]);
      }
      if (hit == cols.size()) break;
      beta_[cols[hit]] = 0.0;
      cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(hit));
    }
    reset_residual();
  }

  const std::vector<double>& beta() const { return beta_; }

 private:
  const LassoProblem& p_;
  std::size_t n_;
  std::vector<double> beta_;
  std::vector<double> norms_;
  std::vector<double> r_;
};

LassoFit make_fit(const LassoProblem& problem, std::vector<double> beta, bool converged,
                  std::size_t iterations) {
  LassoFit out;
  out.fit = TrendFit::from_mu(problem.y, problem.z.apply(beta), problem.lambda);
  out.fit.converged = converged;
  out.fit.iterations = iterations;
  out.beta = std::move(beta);
  return out;
}

std::vector<double> initial_beta(const LassoProblem& problem, std::span<const double> init) {
  const std::size_t n = problem.y.size();
  if (init.empty()) return std::vector<double>(n, 0.0);
  if (init.size() != n) throw InvalidDimension("beta_init length does not match series");
  return {init.begin(), init.end()};
}

}  // namespace

LassoProblem::LassoProblem(TimeSeries series, double lam)
    : y(std::move(series)), z(y.size()), lambda(lam) {
  if (lambda < 0.0) throw InvalidDimension("lambda must be nonnegative");
}

LassoFit cd_fit(const LassoProblem& problem, std::span<const double> beta_init, double tol,
                std::size_t max_iter) {
  if (!(tol > 0.0)) throw InvalidDimension("tol must be positive");
  if (problem.lambda == 0.0) return make_fit(problem, encode_second_diff(problem.y.values()), true, 0);

  CoordinateState st(problem, initial_beta(problem, beta_init));
  std::size_t iters = 0;
  bool converged = false;
  while (iters < max_iter) {
    const double full = st.full_sweep();
    ++iters;
    if (full <= tol) {
      converged = true;
      break;
    }
    const std::vector<std::size_t> cols = st.active();
    while (iters < max_iter) {
      ++iters;
      if (st.sweep(cols) <= tol) break;
    }
  }
  return make_fit(problem, st.beta(), converged, iters);
}

LassoFit active_set_polish(const LassoProblem& problem, const LassoFit& start, double tol,
                           std::size_t max_iter) {
  if (!(tol > 0.0)) throw InvalidDimension("tol must be positive");
  if (problem.lambda == 0.0) return make_fit(problem, encode_second_diff(problem.y.values()), true, 0);

  const std::size_t n = problem.y.size();
  CoordinateState st(problem, initial_beta(problem, start.beta));
  const double inner_tol = tol / 100.0;
  const std::size_t inner_cap = std::min<std::size_t>(max_iter, 200);
  std::size_t iters = 0;
  bool converged = false;

  for (std::size_t round = 0; round < 4 * n + 16 && iters < max_iter; ++round) {
    const std::vector<std::size_t> cols = st.active();
    for (std::size_t s = 0; s < inner_cap && iters < max_iter; ++s) {
      ++iters;
      if (st.sweep(cols) <= inner_tol) break;
    }
    st.solve_on_pattern(st.active());
    if (st.violators(kAdmitSlack) == 0) {
      converged = true;
      break;
    }
    st.full_sweep();
    ++iters;
  }
  return make_fit(problem, st.beta(), converged, start.fit.iterations + iters);
}

LambdaPath lasso_path(const TimeSeries& y, std::span<const double> lambda_grid,
                      const LassoOptions& options, std::vector<std::vector<double>>* betas) {
  if (lambda_grid.empty()) throw InvalidDimension("lambda grid is empty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (lambda_grid[i] < 0.0) throw InvalidDimension("lambda grid must be nonnegative");
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
      throw InvalidDimension("lambda grid must be strictly increasing");
  }

  const std::size_t count = lambda_grid.size();
  std::vector<LassoFit> fits(count);
  std::vector<double> warm;
  for (std::size_t i = count; i-- > 0;) {
    const LassoProblem problem(y, lambda_grid[i]);
    LassoFit fit = cd_fit(problem, warm, options.tol, options.max_iter);
    if (options.polish) fit = active_set_polish(problem, fit, options.tol, options.max_iter);
    warm = fit.beta;
    fits[i] = std::move(fit);
  }

  LambdaPath path;
  if (betas) betas->clear();
  for (std::size_t i = 0; i < count; ++i) {
    const double lambda = lambda_grid[i];
    KktReport cert = check_kkt(y, fits[i].fit.mu_hat, lambda, options.kkt_tol, options.tol_kink);
    if (betas) betas->push_back(fits[i].beta);
    path.push_back({lambda, std::move(fits[i].fit), i + 1 < count, cert});
  }
  return path;
}

}  // namespace ltf
