#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ltf/error.hpp"
#include "ltf/kkt.hpp"
#include "ltf/pathwise.hpp"
#include "ltf/select.hpp"
#include "ltf/sim.hpp"
#include "test_support.hpp"

namespace ltf {
namespace {

using testing::random_series;

// n = 100 fit with exactly two kinks and y - mu = +/-1, so rss = 100.
std::pair<TimeSeries, TrendFit> two_kink_unit_residual() {
  std::vector<double> mu(100);
  std::vector<double> y(100);
  for (std::size_t t = 1; t <= 100; ++t) {
    const double x = static_cast<double>(t);
    mu[t - 1] = t <= 30 ? x : (t <= 70 ? 30.0 : 30.0 - (x - 70.0));
    y[t - 1] = mu[t - 1] + (t % 2 ? 1.0 : -1.0);
  }
  TimeSeries ys(y);
  TrendFit fit = TrendFit::from_mu(ys, mu, 1.0);
  return {std::move(ys), std::move(fit)};
}

TEST(Score, SicHandEvaluated) {
  const auto [y, fit] = two_kink_unit_residual();
  const SelectionScore s = score(y, fit);
  EXPECT_DOUBLE_EQ(s.rss, 100.0);
  EXPECT_EQ(s.k_hat, 2u);
  EXPECT_NEAR(s.sic, 4.0 * std::log(100.0) / 100.0, 1e-12);
  EXPECT_NEAR(s.sic, 0.184207, 1e-6);
}

TEST(Score, McHandEvaluated) {
  const auto [y, fit] = two_kink_unit_residual();
  const SelectionScore s = score(y, fit);
  EXPECT_NEAR(s.mc, 6.0 * std::log(100.0) / 100.0, 1e-12);
  EXPECT_NEAR(s.mc, 0.276310, 1e-6);
}

TEST(Score, NoKinksHasNoMcPenalty) {
  const auto y = random_series(30, 1);
  const TrendFit fit = TrendFit::from_mu(y, affine_fit(y.values()), 1.0);
  const SelectionScore s = score(y, fit);
  EXPECT_EQ(s.k_hat, 0u);
  EXPECT_EQ(s.mc, std::log(s.rss / 30.0));
}

TEST(Score, ZeroResidualIsNotFinite) {
  const auto y = random_series(10, 2);
  const SelectionScore s =
      score(y, TrendFit::from_mu(y, {y.values().begin(), y.values().end()}, 0.0));
  EXPECT_FALSE(s.finite());
}

TEST(Score, StrictlyIncreasingInKinkCount) {
  for (std::size_t k = 0; k < 20; ++k) {
    SelectionScore a{1.0, 5.0, k, 0, 0};
    SelectionScore b{1.0, 5.0, k + 1, 0, 0};
    // Same formulas as score(), evaluated on a synthetic grid.
    auto fill = [](SelectionScore& s) {
      const double n = 50.0;
      const double kk = static_cast<double>(s.k_hat);
      s.sic = std::log(s.rss / n) + (kk + 2) * std::log(n) / n;
      s.mc = std::log(s.rss / n) + kk * (kk + 1) * std::log(n) / n;
    };
    fill(a);
    fill(b);
    const std::vector<SelectionScore> v{a, b};
    EXPECT_EQ(argmin_score(v, Criterion::SIC), 0u);
    EXPECT_EQ(argmin_score(v, Criterion::MC), 0u);
  }
}

TEST(Select, SingletonPath) {
  const auto y = random_series(20, 3);
  const std::vector<double> grid{0.5 * lambda_max(y)};
  const LambdaPath p = fit_path(y, grid);
  const Selection s = select(p, y, Criterion::MC);
  EXPECT_EQ(s.index, 0u);
  EXPECT_EQ(s.lambda, grid[0]);
}

TEST(Select, TieGoesToLargerLambda) {
  std::vector<SelectionScore> v{{1.0, 1, 0, 0.5, 0.5}, {2.0, 1, 0, 0.5, 0.5}, {3.0, 1, 0, 0.7, 0.7}};
  EXPECT_EQ(argmin_score(v, Criterion::MC), 1u);
  EXPECT_EQ(argmin_score(v, Criterion::SIC), 1u);
}

TEST(Select, AllInfiniteThrows) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<SelectionScore> v{{0.0, 0, 3, -inf, -inf}};
  EXPECT_THROW(argmin_score(v, Criterion::MC), NoSelectableModel);
  EXPECT_THROW(select(LambdaPath{}, TimeSeries({1, 2, 3, 4, 5}), Criterion::MC),
               NoSelectableModel);
}

TEST(Select, ZeroResidualEntryExcluded) {
  const auto y = random_series(25, 4);
  const auto grid = make_lambda_grid(lambda_max(y), 5, 1e-2, true);
  const Selection s = select(fit_path(y, grid), y, Criterion::SIC);
  EXPECT_EQ(s.excluded, 1u);
  EXPECT_NE(s.index, 0u);
}

TEST(Select, OrderInvariant) {
  const auto y = random_series(40, 5);
  const auto grid = make_lambda_grid(lambda_max(y), 12, 1e-3, false);
  const Selection s = select(fit_path(y, grid), y, Criterion::MC);
  auto shuffled = s.scores;
  std::mt19937 rng(5);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_EQ(shuffled[argmin_score(shuffled, Criterion::MC)].lambda, s.lambda);
}

TEST(Select, ScaleShiftsCriteriaUniformly) {
  const auto y = random_series(40, 6);
  const double c = 3.0;
  std::vector<double> scaled(y.values().begin(), y.values().end());
  for (auto& v : scaled) v *= c;
  const TimeSeries ys(scaled);
  const auto grid = make_lambda_grid(lambda_max(y), 12, 1e-3, false);
  std::vector<double> grid_c(grid);
  for (auto& g : grid_c) g *= c;
  const Selection a = select(fit_path(y, grid), y, Criterion::MC);
  const Selection b = select(fit_path(ys, grid_c), ys, Criterion::MC);
  EXPECT_EQ(a.index, b.index);
  for (std::size_t i = 0; i < a.scores.size(); ++i)
    if (a.scores[i].k_hat == b.scores[i].k_hat)
      EXPECT_NEAR(b.scores[i].mc - a.scores[i].mc, 2 * std::log(c), 1e-6);
}

TEST(Select, LowNoiseExampleOnePicksFewKinks) {
  const auto spec = example1_spec(500);
  const TimeSeries y = add_noise(gen_trend(spec), {1e4, 77, false});
  const auto grid = make_lambda_grid(lambda_max(y), 100, 1e-6, false);
  const Selection s = select(fit_path(y, grid), y, Criterion::MC);
  const std::size_t k = extract_kinks(s.fit).size();
  EXPECT_GE(k, 2u);
  EXPECT_LE(k, 6u);
}

TEST(Criterion, Parsing) {
  EXPECT_EQ(parse_criterion("SIC"), Criterion::SIC);
  EXPECT_EQ(parse_criterion("mc"), Criterion::MC);
  EXPECT_THROW(parse_criterion("aic"), InvalidSpec);
}

TEST(ScoresCsv, Header) {
  std::ostringstream out;
  write_scores_csv(out, {{1.5, 2.0, 3, 0.25, 0.5}});
  EXPECT_EQ(out.str(), "lambda,rss,k_hat,sic,mc\n1.5,2,3,0.25,0.5\n");
}

}  // namespace
}  // namespace ltf
