#include "ltf/pathwise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Sparse>

#include "ltf/error.hpp"
#include "ltf/kkt.hpp"

namespace ltf {

namespace {

// Early-stop certificate relative to the reported one, plus the rounding
// floor of subgradient recovery (about eps * n^2 * |y| / lambda).
constexpr double kRefineCertFactor = 1e-2;

struct LineMin {
  double x;
  bool stationary;  // false when the minimizer sits on a neighbour's value
};

// Minimizes 1/2 c x^2 - b x + lambda (|x - left| + |x - right|), each
// absolute term present only when its neighbour exists. The real line is cut
// into (-inf, lo], (lo, hi], (hi, inf) and the stationary point
// x = (b + lambda g) / c is tried on each piece, with g the number of
// neighbours above x minus the number below. If no piece contains its own
// stationary point the minimizer is a neighbour's value; ties go right.
LineMin minimize_on_intervals(double c, double b, double lambda,
                              std::optional<double> left, std::optional<double> right) {
  double pts[2];
  std::size_t m = 0;
  if (left) pts[m++] = *left;
  if (right) pts[m++] = *right;
  if (m == 2 && pts[1] < pts[0]) std::swap(pts[0], pts[1]);

  for (std::size_t i = 0; i <= m; ++i) {
    if (i > 0 && i < m && !(pts[i - 1] < pts[i])) continue;
    const double g = static_cast<double>(m - i) - static_cast<double>(i);
    const double x = (b + lambda * g) / c;
    const bool above_lo = i == 0 || x > pts[i - 1];
    const bool below_hi = i == m || x <= pts[i];
    if (above_lo && below_hi) return {x, true};
  }

  auto phi = [&](double x) {
    double pen = 0.0;
    if (left) pen += std::abs(x - *left);
    if (right) pen += std::abs(x - *right);
    return 0.5 * c * x * x - b * x + lambda * pen;
  };
  if (left && right) return {phi(*left) < phi(*right) ? *left : *right, false};
  return {left ? *left : *right, false};
}

std::vector<double> prefix_sums(std::span<const double> v) {
  std::vector<double> out(v.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += v[i];
    out[i] = acc;
  }
  return out;
}

std::vector<double> residual_of(const TimeSeries& y, std::span<const double> nu) {
  std::vector<double> r(nu.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    acc += nu[i];
    r[i] = y[i] - acc;
  }
  return r;
}

// Neighbour values entering the penalty for slope k0 (0-based). The term
// |nu_t - nu_{t-1}| is penalized for t >= 3, i.e. 0-based t0 >= 2.
std::optional<double> left_neighbour(std::span<const double> nu, std::size_t first0) {
  if (first0 >= 2) return nu[first0 - 1];
  return std::nullopt;
}
std::optional<double> right_neighbour(std::span<const double> nu, std::size_t last0) {
  if (last0 >= 1 && last0 + 1 < nu.size()) return nu[last0 + 1];
  return std::nullopt;
}

struct BlockEval {
  bool found = false;
  double alpha = 0.0;
  double delta = 0.0;  // change of f if the block is set to alpha
};

// Block first0..last0 (0-based, inclusive) set to a common alpha. Setting
// the block shifts mu_t by alpha * w_t - B_t where w_t = t - first + 1 inside
// the block, the block length after it, and B_t is the old block's share of
// mu_t.
BlockEval evaluate_block(std::span<const double> nu, std::span<const double> r,
                         std::size_t first0, std::size_t last0, double lambda) {
  const std::size_t n = nu.size();
  const double len = static_cast<double>(last0 - first0 + 1);
  double curv = 0.0;
  double lin = 0.0;
  double block = 0.0;
  for (std::size_t t = first0; t < n; ++t) {
    double w = len;
    if (t <= last0) {
      block += nu[t];
      w = static_cast<double>(t - first0 + 1);
    }
    curv += w * w;
    lin += w * (r[t] + block);
  }

  const auto left = left_neighbour(nu, first0);
  const auto right = right_neighbour(nu, last0);
  const LineMin lm = minimize_on_intervals(curv, lin, lambda, left, right);
  BlockEval ev;
  if (!lm.stationary) return ev;
  ev.found = true;
  ev.alpha = lm.x;

  double du2 = 0.0;
  double ru = 0.0;
  block = 0.0;
  for (std::size_t t = first0; t < n; ++t) {
    double w = len;
    if (t <= last0) {
      block += nu[t];
      w = static_cast<double>(t - first0 + 1);
    }
    const double u = ev.alpha * w - block;
    du2 += u * u;
    ru += r[t] * u;
  }

  double old_pen = 0.0;
  for (std::size_t t = std::max<std::size_t>(first0 + 1, 2); t <= last0; ++t)
    old_pen += std::abs(nu[t] - nu[t - 1]);
  double new_pen = 0.0;
  if (left) {
    old_pen += std::abs(nu[first0] - *left);
    new_pen += std::abs(ev.alpha - *left);
  }
  if (right) {
    old_pen += std::abs(*right - nu[last0]);
    new_pen += std::abs(*right - ev.alpha);
  }
  ev.delta = 0.5 * du2 - ru + lambda * (new_pen - old_pen);
  return ev;
}

double objective_of(const TimeSeries& y, std::span<const double> nu, double lambda) {
  return objective_value(y, prefix_sums(nu), lambda);
}

class Engine {
 public:
  Engine(const TimeSeries& y, double lambda, std::vector<double>& nu,
         const PathwiseOptions& options, PathwiseDiagnostics& diag)
      : y_(y), lambda_(lambda), nu_(nu), opt_(options), diag_(diag) {
    rebuild_residual();
    if (opt_.check_monotone) last_objective_ = objective_of(y_, nu_, lambda_);
  }

  double descent_sweep() {
    const std::size_t n = nu_.size();
    std::vector<double> suffix(n);
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      acc += r_[i];
      suffix[i] = acc;
    }

    // Slopes updated earlier in the sweep lowered every residual from their
    // index on; `shift` carries the sum of those updates.
    double shift = 0.0;
    double max_change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double c = static_cast<double>(n - k);
      double s = suffix[k] - shift * c;
      if (opt_.check_monotone) {
        rebuild_residual();
        s = 0.0;
        for (std::size_t t = k; t < n; ++t) s += r_[t];
      }
      const double b = s + c * nu_[k];
      const LineMin lm = minimize_on_intervals(c, b, lambda_, left_neighbour(nu_, k),
                                               right_neighbour(nu_, k));
      const double delta = lm.x - nu_[k];
      if (delta != 0.0) {
        nu_[k] = lm.x;
        shift += delta;
        max_change = std::max(max_change, std::abs(delta) / (1.0 + std::abs(lm.x)));
        if (opt_.check_monotone) note_move();
      }
    }
    rebuild_residual();
    return max_change;
  }

  double fusion_cycle() {
    double max_change = 0.0;
    std::vector<SlopeRun> runs = FusedState(nu_).groups();

    // Merge a growing suffix of each run with the whole next run.
    std::size_t g = 0;
    std::size_t accepted = 0;
    while (g + 1 < runs.size() && accepted < 2 * nu_.size()) {
      const std::size_t last0 = runs[g + 1].last - 1;
      bool merged = false;
      for (std::size_t first0 = runs[g].last; first0-- > runs[g].first - 1;) {
        const BlockEval ev = evaluate_block(nu_, r_, first0, last0, lambda_);
        if (!ev.found || ev.delta > 0.0) continue;
        max_change = std::max(max_change, apply_block(first0, last0, ev.alpha));
        ++diag_.fusions_accepted;
        ++accepted;
        runs = FusedState(nu_).groups();
        g = run_index(runs, first0);
        merged = true;
        break;
      }
      if (!merged) ++g;
    }

    // Move each multi-slope run as one coordinate.
    for (const SlopeRun& run : FusedState(nu_).groups()) {
      if (run.length() < 2) continue;
      const BlockEval ev = evaluate_block(nu_, r_, run.first - 1, run.last - 1, lambda_);
      if (!ev.found || ev.delta >= 0.0 || ev.alpha == run.value) continue;
      max_change = std::max(max_change, apply_block(run.first - 1, run.last - 1, ev.alpha));
    }
    return max_change;
  }

  // Exact solve with the kink pattern held fixed, see the header comment.
  void refine() {
    if (lambda_ == 0.0) return;
    ++diag_.refinements;
    const std::size_t n = nu_.size();
    const std::vector<double> mu = prefix_sums(nu_);

    std::vector<std::size_t> knots{1};  // 1-based times
    std::vector<int> signs{0};          // aligned with knots; ends unused
    for (std::size_t i = 2; i < n; ++i) {
      const double d = nu_[i] - nu_[i - 1];
      if (d != 0.0) {
        knots.push_back(i);
        signs.push_back(d > 0 ? 1 : -1);
      }
    }
    knots.push_back(n);
    signs.push_back(0);
    std::vector<double> c(knots.size());
    for (std::size_t m = 0; m < knots.size(); ++m) c[m] = mu[knots[m] - 1];

    std::vector<std::size_t> blocked;
    std::vector<unsigned> admitted(n + 1, 0);
    constexpr unsigned kMaxAdmissions = 3;
    const double rounding_floor = std::numeric_limits<double>::epsilon() *
                                  static_cast<double>(n) * static_cast<double>(n) *
                                  (1.0 + y_.max_abs()) / lambda_;
    const std::size_t max_rounds = 4 * n + 16;
    for (std::size_t round = 0; round < max_rounds; ++round) {
      const std::vector<double> target = solve_pattern(knots, signs);

      // Walk toward the pattern optimum, stopping where a kink would flip.
      double step = 1.0;
      std::size_t hit = 0;
      for (std::size_t m = 1; m + 1 < knots.size(); ++m) {
        const double now = kink_value(knots, c, m);
        const double next = kink_value(knots, target, m);
        if (signs[m] * next >= 0.0) continue;
        const double t = signs[m] * now <= 0.0 ? 0.0 : now / (now - next);
        if (t < step) {
          step = t;
          hit = m;
        }
      }
      for (std::size_t m = 0; m < c.size(); ++m) c[m] += step * (target[m] - c[m]);
      if (hit != 0) {
        if (step == 0.0) blocked.push_back(knots[hit]);
        knots.erase(knots.begin() + static_cast<std::ptrdiff_t>(hit));
        signs.erase(signs.begin() + static_cast<std::ptrdiff_t>(hit));
        c.erase(c.begin() + static_cast<std::ptrdiff_t>(hit));
        continue;
      }

      // Admit the strongest violator of the subgradient bound.
      const std::vector<double> fitted = interpolate(knots, c);
      std::vector<double> res(n);
      for (std::size_t i = 0; i < n; ++i) res[i] = y_[i] - fitted[i];
      // z_t' r for column t = i + 1 at 0-based position i: double suffix sum.
      std::vector<double> zr(n);
      double tail = 0.0, weighted = 0.0;
      for (std::size_t i = n; i-- > 0;) {
        tail += res[i];
        weighted += tail;
        zr[i] = weighted;
      }
      // Each fitted value carries ~eps * |y| of rounding and the double suffix
      // sum accumulates n^2 of them. Violations below that are noise, and
      // admitting them makes the walk drop and re-admit knots without end.
      double worst = 1.0 + 1e-9 + rounding_floor;
      std::size_t pick = 0;
      std::size_t m = 0;
      for (std::size_t time = 2; time < n; ++time) {
        while (knots[m] < time) ++m;
        if (knots[m] == time) continue;
        if (std::find(blocked.begin(), blocked.end(), time) != blocked.end()) continue;
        if (admitted[time] >= kMaxAdmissions) continue;
        const double ratio = std::abs(zr[time]) / lambda_;
        if (ratio > worst) {
          worst = ratio;
          pick = time;
        }
      }
      if (pick == 0) break;
      ++admitted[pick];
      const auto pos = std::lower_bound(knots.begin(), knots.end(), pick) - knots.begin();
      knots.insert(knots.begin() + pos, pick);
      signs.insert(signs.begin() + pos, zr[pick] > 0 ? 1 : -1);
      c.insert(c.begin() + pos, fitted[pick - 1]);
    }

    nu_[0] = c[0];
    for (std::size_t m = 0; m + 1 < knots.size(); ++m) {
      const double slope = (c[m + 1] - c[m]) / static_cast<double>(knots[m + 1] - knots[m]);
      for (std::size_t t = knots[m] + 1; t <= knots[m + 1]; ++t) nu_[t - 1] = slope;
    }
    rebuild_residual();
    if (opt_.check_monotone) note_move();
  }

 private:
  void rebuild_residual() { r_ = residual_of(y_, nu_); }

  double apply_block(std::size_t first0, std::size_t last0, double alpha) {
    double change = 0.0;
    for (std::size_t t = first0; t <= last0; ++t) {
      change = std::max(change, std::abs(alpha - nu_[t]) / (1.0 + std::abs(alpha)));
      nu_[t] = alpha;
    }
    rebuild_residual();
    if (opt_.check_monotone) note_move();
    return change;
  }

  static std::size_t run_index(const std::vector<SlopeRun>& runs, std::size_t pos0) {
    for (std::size_t g = 0; g < runs.size(); ++g)
      if (runs[g].last >= pos0 + 1) return g;
    return runs.size() - 1;
  }

  void note_move() {
    const double now = objective_of(y_, nu_, lambda_);
    if (now > last_objective_ + 1e-12 * (1.0 + std::abs(last_objective_)))
      ++diag_.monotone_violations;
    last_objective_ = now;
  }

  // Slope change at interior knot m of the piecewise-linear mean with knot
  // values c.
  static double kink_value(const std::vector<std::size_t>& knots,
                           const std::vector<double>& c, std::size_t m) {
    const double hl = static_cast<double>(knots[m] - knots[m - 1]);
    const double hr = static_cast<double>(knots[m + 1] - knots[m]);
    return (c[m + 1] - c[m]) / hr - (c[m] - c[m - 1]) / hl;
  }

  std::vector<double> interpolate(const std::vector<std::size_t>& knots,
                                  const std::vector<double>& c) const {
    std::vector<double> out(nu_.size());
    for (std::size_t m = 0; m + 1 < knots.size(); ++m) {
      const double h = static_cast<double>(knots[m + 1] - knots[m]);
      for (std::size_t t = knots[m]; t <= knots[m + 1]; ++t) {
        const double th = static_cast<double>(t - knots[m]) / h;
        out[t - 1] = (1.0 - th) * c[m] + th * c[m + 1];
      }
    }
    return out;
  }

  // Minimizer over knot values of 1/2 ||y - Phi c||^2 + lambda sum s_m kink_m(c),
  // Phi the hat-function basis on the knots. The Gram matrix is tridiagonal.
  std::vector<double> solve_pattern(const std::vector<std::size_t>& knots,
                                    const std::vector<int>& signs) const {
    const std::size_t p = knots.size();
    std::vector<double> diag(p, 0.0), off(p - 1, 0.0);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    for (std::size_t m = 0; m + 1 < p; ++m) {
      const double h = static_cast<double>(knots[m + 1] - knots[m]);
      const std::size_t stop = m + 2 == p ? knots[m + 1] : knots[m + 1] - 1;
      for (std::size_t t = knots[m]; t <= stop; ++t) {
        const double th = static_cast<double>(t - knots[m]) / h;
        const double a = 1.0 - th;
        diag[m] += a * a;
        diag[m + 1] += th * th;
        off[m] += a * th;
        rhs(static_cast<Eigen::Index>(m)) += a * y_[t - 1];
        rhs(static_cast<Eigen::Index>(m + 1)) += th * y_[t - 1];
      }
    }
    for (std::size_t m = 1; m + 1 < p; ++m) {
      const double hl = static_cast<double>(knots[m] - knots[m - 1]);
      const double hr = static_cast<double>(knots[m + 1] - knots[m]);
      const double s = lambda_ * signs[m];
      rhs(static_cast<Eigen::Index>(m - 1)) -= s / hl;
      rhs(static_cast<Eigen::Index>(m)) += s * (1.0 / hl + 1.0 / hr);
      rhs(static_cast<Eigen::Index>(m + 1)) -= s / hr;
    }

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(3 * p);
    for (std::size_t m = 0; m < p; ++m) {
      const auto i = static_cast<int>(m);
      trip.emplace_back(i, i, diag[m]);
      if (m + 1 < p) {
        trip.emplace_back(i, i + 1, off[m]);
        trip.emplace_back(i + 1, i, off[m]);
      }
    }
    Eigen::SparseMatrix<double> gram(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    gram.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(gram);
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    return {sol.data(), sol.data() + sol.size()};
  }

  const TimeSeries& y_;
  double lambda_;
  std::vector<double>& nu_;
  const PathwiseOptions& opt_;
  PathwiseDiagnostics& diag_;
  std::vector<double> r_;
  double last_objective_ = 0.0;
};

}  // namespace

FusedState::FusedState(std::vector<double> slopes) : nu_(std::move(slopes)) {
  if (nu_.empty()) throw InvalidDimension("slope vector must be non-empty");
}

FusedState FusedState::from_mean(std::span<const double> mu) {
  if (mu.empty()) throw InvalidDimension("mean vector must be non-empty");
  std::vector<double> nu(mu.size());
  nu[0] = mu[0];
  for (std::size_t i = 1; i < mu.size(); ++i) nu[i] = mu[i] - mu[i - 1];
  return FusedState(std::move(nu));
}

void FusedState::set_slope(std::size_t k, double value) { nu_.at(k - 1) = value; }

void FusedState::set_block(std::size_t first, std::size_t last, double value) {
  if (first < 1 || last > nu_.size() || first > last) throw InvalidIndex("bad slope block");
  std::fill(nu_.begin() + static_cast<std::ptrdiff_t>(first - 1),
            nu_.begin() + static_cast<std::ptrdiff_t>(last), value);
}

std::vector<SlopeRun> FusedState::groups() const {
  std::vector<SlopeRun> runs;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= nu_.size(); ++i) {
    if (i == nu_.size() || nu_[i] != nu_[start]) {
      runs.push_back({start + 1, i, nu_[start]});
      start = i;
    }
  }
  return runs;
}

std::vector<double> FusedState::mean() const { return prefix_sums(nu_); }

std::optional<double> descent_update(std::size_t k, const FusedState& state,
                                     const TimeSeries& y, double lambda) {
  const std::size_t n = y.size();
  if (state.size() != n) throw InvalidDimension("state length does not match series");
  if (k < 1 || k > n) throw InvalidIndex("descent index out of range");
  const auto nu = state.slopes();
  const std::vector<double> r = residual_of(y, nu);
  const std::size_t k0 = k - 1;
  const double c = static_cast<double>(n - k0);
  double s = 0.0;
  for (std::size_t t = k0; t < n; ++t) s += r[t];
  const LineMin lm = minimize_on_intervals(c, s + c * nu[k0], lambda, left_neighbour(nu, k0),
                                           right_neighbour(nu, k0));
  // Moves at the rounding level of the residual sums are not moves.
  if (std::abs(lm.x - nu[k0]) <= 1e-13 * (1.0 + std::abs(nu[k0]))) return std::nullopt;
  return lm.x;
}

FusionResult fusion_update(std::size_t k, std::size_t m, FusedState& state,
                           const TimeSeries& y, double lambda) {
  const std::size_t n = y.size();
  if (state.size() != n) throw InvalidDimension("state length does not match series");
  if (k < 2 || k > n || m < 1 || m >= k) throw InvalidIndex("fusion block out of range");
  const std::size_t first0 = k - m - 1;
  const std::size_t last0 = k - 1;
  const auto nu = state.slopes();
  const std::vector<double> r = residual_of(y, nu);

  FusionResult out;
  out.objective_before = objective_of(y, nu, lambda);
  out.objective_after = out.objective_before;

  BlockEval ev = evaluate_block(nu, r, first0, last0, lambda);
  if (!ev.found) return out;
  out.alpha = ev.alpha;

  const bool constant = std::all_of(nu.begin() + static_cast<std::ptrdiff_t>(first0),
                                    nu.begin() + static_cast<std::ptrdiff_t>(last0 + 1),
                                    [&](double v) { return v == nu[first0]; });
  if (constant && std::abs(ev.alpha - nu[first0]) <= 1e-12 * (1.0 + std::abs(nu[first0]))) {
    out.accepted = true;
    out.alpha = nu[first0];
    return out;
  }

  std::vector<double> trial(nu.begin(), nu.end());
  std::fill(trial.begin() + static_cast<std::ptrdiff_t>(first0),
            trial.begin() + static_cast<std::ptrdiff_t>(last0 + 1), ev.alpha);
  const double after = objective_of(y, trial, lambda);
  if (after > out.objective_before) return out;
  out.accepted = true;
  out.objective_after = after;
  state.set_block(first0 + 1, last0 + 1, ev.alpha);
  return out;
}

TrendFit pathwise_solve(const TimeSeries& y, double lambda, FusedState& state,
                        const PathwiseOptions& options, PathwiseDiagnostics* diagnostics) {
  const std::size_t n = y.size();
  if (state.size() != n) throw InvalidDimension("state length does not match series");
  if (lambda < 0.0) throw InvalidDimension("lambda must be nonnegative");
  PathwiseDiagnostics local;
  PathwiseDiagnostics& diag = diagnostics ? *diagnostics : local;

  if (lambda == 0.0) {
    // The interpolant is the unique minimizer without penalty.
    state = FusedState::from_mean(y.values());
    std::vector<double> mu(y.values().begin(), y.values().end());
    return TrendFit::from_mu(y, std::move(mu), 0.0);
  }

  std::vector<double> nu(state.slopes().begin(), state.slopes().end());
  Engine engine(y, lambda, nu, options, diag);
  const std::size_t cap = options.max_sweeps ? options.max_sweeps : 10 * n;
  const std::size_t every = std::max<std::size_t>(options.refine_interval, 1);
  const double nd = static_cast<double>(n);
  const double cert_tol =
      kRefineCertFactor * options.kkt_tol +
      (lambda > 0.0 ? std::numeric_limits<double>::epsilon() * nd * nd * (1.0 + y.max_abs()) / lambda
                    : 0.0);

  bool converged = false;
  std::size_t sweeps = 0;
  while (sweeps < cap) {
    double change = engine.descent_sweep();
    change = std::max(change, engine.fusion_cycle());
    ++sweeps;
    const bool settled = change <= options.sweep_tol;
    if (settled && !options.refine) {
      converged = true;
      break;
    }
    // Descent and fusion can stall where a kink has to split (every single
    // or block move telescopes), so a settled state is refined before it is
    // accepted.
    if (options.refine && (settled || (sweeps - 1) % every == 0)) {
      engine.refine();
      // A certified pattern solve is optimal; further sweeps only trade
      // rounding noise near degenerate kinks.
      if (check_kkt(y, prefix_sums(nu), lambda, cert_tol, options.tol_kink).passed) {
        converged = true;
        break;
      }
    }
  }
  diag.sweeps += sweeps;

  state = FusedState(nu);
  TrendFit fit = TrendFit::from_mu(y, state.mean(), lambda);
  fit.converged = converged;
  fit.iterations = sweeps;
  return fit;
}

LambdaPath fit_path(const TimeSeries& y, std::span<const double> lambda_grid,
                    const PathwiseOptions& options, PathwiseDiagnostics* diagnostics) {
  if (lambda_grid.empty()) throw InvalidDimension("lambda grid is empty");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (lambda_grid[i] < 0.0) throw InvalidDimension("lambda grid must be nonnegative");
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
      throw InvalidDimension("lambda grid must be strictly increasing");
  }

  LambdaPath path;
  FusedState state = FusedState::from_mean(y.values());
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double lambda = lambda_grid[i];
    TrendFit fit = pathwise_solve(y, lambda, state, options, diagnostics);
    KktReport cert = check_kkt(y, fit.mu_hat, lambda, options.kkt_tol, options.tol_kink);
    path.push_back({lambda, std::move(fit), i > 0, cert});
  }
  return path;
}

}  // namespace ltf
