#include "ltf/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ltf/design.hpp"
#include "ltf/error.hpp"

namespace ltf {

TimeSeries::TimeSeries(std::vector<double> y) : y_(std::move(y)) {
  if (y_.size() < kMinSeriesLength)
    throw InvalidDimension("series needs at least " + std::to_string(kMinSeriesLength) +
                           " points, got " + std::to_string(y_.size()));
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (!std::isfinite(y_[i]))
      throw InvalidDimension("non-finite observation at t=" + std::to_string(i + 1));
  }
}

double TimeSeries::max_abs() const noexcept {
  double m = 0.0;
  for (double v : y_) m = std::max(m, std::abs(v));
  return m;
}

TrendFit TrendFit::from_mu(const TimeSeries& y, std::vector<double> mu, double lambda) {
  if (mu.size() != y.size()) throw InvalidDimension("fit length does not match series");
  TrendFit fit;
  fit.lambda = lambda;
  fit.nu_hat.resize(mu.size());
  fit.nu_hat[0] = mu[0];
  for (std::size_t i = 1; i < mu.size(); ++i) fit.nu_hat[i] = mu[i] - mu[i - 1];
  fit.beta_tail = second_diff(mu);
  fit.objective = objective_value(y, mu, lambda);
  fit.mu_hat = std::move(mu);
  return fit;
}

KinkSet::KinkSet(std::vector<Kink> kinks) : kinks_(std::move(kinks)) {
  for (std::size_t i = 0; i < kinks_.size(); ++i) {
    if (kinks_[i].time < 2) throw InvalidIndex("kink time must be interior (>= 2)");
    if (kinks_[i].sign != 1 && kinks_[i].sign != -1)
      throw InvalidIndex("kink sign must be +1 or -1");
    if (i > 0 && kinks_[i].time <= kinks_[i - 1].time)
      throw InvalidIndex("kink times must be strictly increasing");
  }
}

std::vector<std::size_t> KinkSet::times() const {
  std::vector<std::size_t> out;
  out.reserve(kinks_.size());
  for (const auto& k : kinks_) out.push_back(k.time);
  return out;
}

std::optional<int> KinkSet::sign_at(std::size_t time) const {
  auto it = std::lower_bound(kinks_.begin(), kinks_.end(), time,
                             [](const Kink& k, std::size_t t) { return k.time < t; });
  if (it == kinks_.end() || it->time != time) return std::nullopt;
  return it->sign;
}

bool operator==(const KinkSet& a, const KinkSet& b) {
  return std::equal(a.kinks_.begin(), a.kinks_.end(), b.kinks_.begin(), b.kinks_.end(),
                    [](const Kink& x, const Kink& y) {
                      return x.time == y.time && x.sign == y.sign;
                    });
}

KinkSet extract_kinks(std::span<const double> mu, double tol_kink) {
  if (mu.size() < 3) return KinkSet{};
  double scale = 1.0;
  for (double v : mu) scale = std::max(scale, std::abs(v));
  const double threshold = tol_kink * scale;

  std::vector<Kink> kinks;
  for (std::size_t i = 1; i + 1 < mu.size(); ++i) {
    const double d = mu[i + 1] + mu[i - 1] - 2.0 * mu[i];
    if (std::abs(d) > threshold) kinks.push_back({i + 1, d > 0 ? 1 : -1, std::abs(d)});
  }
  return KinkSet(std::move(kinks));
}

KinkSet extract_kinks(const TrendFit& fit, double tol_kink) {
  return extract_kinks(fit.mu_hat, tol_kink);
}

double objective_value(const TimeSeries& y, std::span<const double> mu, double lambda) {
  if (mu.size() != y.size()) throw InvalidDimension("mean length does not match series");
  double rss = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double r = y[i] - mu[i];
    rss += r * r;
  }
  double penalty = 0.0;
  for (std::size_t i = 2; i < mu.size(); ++i)
    penalty += std::abs(mu[i] + mu[i - 2] - 2.0 * mu[i - 1]);
  return 0.5 * rss + lambda * penalty;
}

void LambdaPath::push_back(PathEntry entry) {
  if (!entries_.empty() && !(entry.lambda > entries_.back().lambda))
    throw InvalidDimension("lambda path must be strictly increasing");
  if (entry.lambda < 0.0) throw InvalidDimension("lambda must be nonnegative");
  entries_.push_back(std::move(entry));
}

std::vector<double> make_lambda_grid(double lambda_max, std::size_t size,
                                     double min_rel, bool include_zero) {
  if (size == 0) throw InvalidDimension("grid size must be positive");
  if (!(min_rel > 0.0) || min_rel > 1.0) throw InvalidDimension("grid min_rel must be in (0, 1]");
  std::vector<double> grid;
  if (include_zero) grid.push_back(0.0);
  if (!(lambda_max > 0.0)) return grid.empty() ? std::vector<double>{0.0} : grid;

  if (size == 1) {
    grid.push_back(lambda_max);
    return grid;
  }
  const double lo = std::log(lambda_max * min_rel);
  const double hi = std::log(lambda_max);
  for (std::size_t i = 0; i < size; ++i) {
    const double v = i + 1 == size ? lambda_max
                                   : std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                                       static_cast<double>(size - 1));
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

}  // namespace ltf
