#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ltf/design.hpp"
#include "ltf/error.hpp"
#include "ltf/sim.hpp"

namespace ltf {
namespace {

// Brute force over all pairs, independent of the library's directed loop.
std::array<double, 3> brute_hausdorff(const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b) {
  auto dist = [](std::size_t x, std::size_t y) {
    return std::abs(static_cast<double>(x) - static_cast<double>(y));
  };
  double ab = 0.0;
  for (auto y : b) {
    double m = 1e300;
    for (auto x : a) m = std::min(m, dist(x, y));
    ab = std::max(ab, m);
  }
  double ba = 0.0;
  for (auto x : a) {
    double m = 1e300;
    for (auto y : b) m = std::min(m, dist(x, y));
    ba = std::max(ba, m);
  }
  return {ab, ba, std::max(ab, ba)};
}

TEST(GenTrend, SingleSegment) {
  PiecewiseLinearSpec spec;
  spec.n = 5;
  spec.b = {2.0};
  const auto mu = gen_trend(spec);
  const std::vector<double> expected{0.4, 0.8, 1.2, 1.6, 2.0};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(mu[i], expected[i], 1e-15);
}

TEST(GenTrend, ExampleOneKinks) {
  const auto spec = example1_spec(500);
  const auto k = extract_kinks(gen_trend(spec));
  EXPECT_EQ(k.times(), (std::vector<std::size_t>{151, 351}));
  EXPECT_EQ(k, spec.true_kinks());
  for (const auto& x : k.kinks()) EXPECT_EQ(x.sign, 1);
}

TEST(GenTrend, ExampleTwoSigns) {
  const auto spec = example2_spec(1000);
  const auto k = extract_kinks(gen_trend(spec));
  ASSERT_EQ(k.size(), 4u);
  const std::vector<int> signs{1, -1, 1, -1};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(k.kinks()[i].sign, signs[i]);
  EXPECT_EQ(k.times(), (std::vector<std::size_t>{201, 401, 601, 801}));
}

TEST(GenTrend, ContinuousAndExactlyKinked) {
  for (const auto& spec : {example1_spec(500), example2_spec(1000), example2_spec(333)}) {
    const auto mu = gen_trend(spec);
    const auto d = second_diff(mu);
    const auto times = spec.kink_times();
    const double scale = spec.normalized_time ? static_cast<double>(spec.n) : 1.0;
    for (std::size_t t = 3; t <= spec.n; ++t) {
      const std::size_t time = t - 1;
      const auto it = std::find(times.begin(), times.end(), time);
      if (it == times.end()) {
        EXPECT_LE(std::abs(d[t - 3]), 1e-12 * (1 + spec.n)) << time;
      } else {
        const std::size_t j = static_cast<std::size_t>(it - times.begin());
        EXPECT_NEAR(d[t - 3], (spec.b[j + 1] - spec.b[j]) / scale, 1e-9) << time;
      }
    }
  }
}

TEST(GenTrend, SpecValidation) {
  PiecewiseLinearSpec spec = example1_spec(500);
  spec.r = {0.7, 0.3};
  EXPECT_THROW(spec.validate(), InvalidSpec);
  spec = example1_spec(500);
  spec.b = {1, 1, 2};
  EXPECT_THROW(spec.validate(), InvalidSpec);
  spec = example1_spec(500);
  spec.r = {0.3};
  EXPECT_THROW(gen_trend(spec), InvalidSpec);
}

TEST(GenTrend, FigureTwoQuantities) {
  const auto spec = example1_spec(500);
  EXPECT_NEAR(spec.min_slope_change(), 0.06, 1e-15);
  EXPECT_EQ(spec.min_segment_size(), 150u);
}

TEST(Noise, InfiniteSnrPassesThrough) {
  const auto mu = gen_trend(example1_spec(100));
  const TimeSeries y = add_noise(mu, {kNoiseless, 5, false});
  EXPECT_EQ(std::vector<double>(y.values().begin(), y.values().end()), mu);
}

TEST(Noise, DeterministicPerSeed) {
  const auto mu = gen_trend(example2_spec(200));
  const TimeSeries a = add_noise(mu, {25.0, 9, false});
  const TimeSeries b = add_noise(mu, {25.0, 9, false});
  const TimeSeries c = add_noise(mu, {25.0, 10, false});
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
}

TEST(Noise, SampleSdNearSigma) {
  const auto mu = gen_trend(example1_spec(1000));
  const NoiseSpec noise{25.0, 3, false};
  const double sigma = noise_sigma(mu, noise);
  double mean_abs = 0.0;
  for (double v : mu) mean_abs += std::abs(v);
  EXPECT_NEAR(sigma, mean_abs / 1000.0 / 25.0, 1e-15);
  const TimeSeries y = add_noise(mu, noise);
  std::vector<double> e(1000);
  for (std::size_t i = 0; i < 1000; ++i) e[i] = y[i] - mu[i];
  const double m = std::accumulate(e.begin(), e.end(), 0.0) / 1000.0;
  double ss = 0.0;
  for (double v : e) ss += (v - m) * (v - m);
  EXPECT_NEAR(std::sqrt(ss / 999.0), sigma, 0.05 * sigma);
}

TEST(Noise, SignedMeanCanVanish) {
  PiecewiseLinearSpec spec;
  spec.n = 10;
  spec.r = {0.5};
  spec.b = {-1.0, 1.0};
  spec.a1 = 0.0;
  const auto mu = gen_trend(spec);
  EXPECT_THROW(noise_sigma(mu, {10.0, 1, true}), ZeroSigma);
  EXPECT_GT(noise_sigma(mu, {10.0, 1, false}), 0.0);
}

TEST(RelativeError, Examples) {
  const std::vector<double> mu0{1.0, -2.0, 3.0};
  EXPECT_EQ(relative_error(mu0, mu0), 0.0);
  EXPECT_EQ(relative_error({1.0, 1.0}, {0.0, 0.0}), 1.0);
  EXPECT_EQ(relative_error({2.0, -4.0, 6.0}, mu0), 0.25);
  EXPECT_THROW(relative_error({0.0, 0.0}, {1.0, 1.0}), UndefinedMetric);
}

TEST(RelativeError, PermutationInvariant) {
  const std::vector<double> a{1.0, 2.5, -3.0, 0.5};
  const std::vector<double> b{1.5, 2.0, -2.0, 0.0};
  const std::vector<double> pa{0.5, -3.0, 1.0, 2.5};
  const std::vector<double> pb{0.0, -2.0, 1.5, 2.0};
  EXPECT_DOUBLE_EQ(relative_error(a, b), relative_error(pa, pb));
}

TEST(Hausdorff, Examples) {
  auto check = [](std::vector<std::size_t> a, std::vector<std::size_t> b,
                  std::array<double, 3> expected) {
    const auto h = hausdorff(a, b, 100);
    EXPECT_EQ(h.e_ab, expected[0]);
    EXPECT_EQ(h.e_ba, expected[1]);
    EXPECT_EQ(h.hd, expected[2]);
    EXPECT_EQ(brute_hausdorff(a, b), expected);
  };
  check({10, 20}, {10, 20}, {0, 0, 0});
  check({1}, {5}, {4, 4, 4});
  check({1, 10}, {5}, {4, 5, 5});
}

TEST(Hausdorff, EmptySetConvention) {
  const auto one = hausdorff({}, {3}, 50);
  EXPECT_EQ(one.hd, 50.0);
  EXPECT_EQ(one.e_ab, 50.0);
  const auto both = hausdorff({}, {}, 50);
  EXPECT_EQ(both.hd, 0.0);
}

TEST(Hausdorff, SymmetricAndZeroOnlyForEqualSets) {
  const std::vector<std::vector<std::size_t>> sets{{3}, {3, 9}, {4, 9, 20}, {1, 2, 3, 50}};
  for (const auto& a : sets) {
    for (const auto& b : sets) {
      const auto ab = hausdorff(a, b, 60);
      const auto ba = hausdorff(b, a, 60);
      EXPECT_EQ(ab.hd, ba.hd);
      EXPECT_EQ(ab.e_ab, ba.e_ba);
      EXPECT_EQ(ab.hd == 0.0, a == b);
      EXPECT_EQ(brute_hausdorff(a, b)[2], ab.hd);
    }
  }
}

TEST(SignConsistency, Examples) {
  const KinkSet truth({{151, 1, 0.06}, {351, 1, 0.06}});
  EXPECT_TRUE(sign_consistent(KinkSet({{151, 1, 0.05}, {351, 1, 0.07}}), truth));
  const KinkSet flipped({{151, 1, 0.05}, {351, -1, 0.07}});
  EXPECT_FALSE(sign_consistent(flipped, truth));
  EXPECT_TRUE(detection_consistent(flipped, truth));
  const KinkSet extra({{151, 1, 0.05}, {200, 1, 1e-4}, {351, 1, 0.07}});
  EXPECT_FALSE(sign_consistent(extra, truth));
  EXPECT_FALSE(detection_consistent(extra, truth));
}

TEST(NearKinkSmall, CountsSmallKinksNearTruth) {
  const auto spec = example1_spec(500);
  const KinkSet fit({{148, 1, 0.01}, {151, 1, 0.05}, {152, 1, 0.02}, {200, 1, 0.001},
                     {356, 1, 0.001}, {357, 1, 0.001}});
  EXPECT_EQ(near_kink_small_count(fit, spec), 3u);
}

TEST(Seeds, ReplicationSeedsDistinct) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t r = 0; r < 1000; ++r) seeds.push_back(replication_seed(1, r));
  std::sort(seeds.begin(), seeds.end());
  EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
  EXPECT_NE(replication_seed(1, 0), replication_seed(2, 0));
}

TEST(Aggregate, MeanAndSampleSd) {
  const Aggregate a = aggregate({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(a.mean, 2.5);
  EXPECT_DOUBLE_EQ(a.sd, std::sqrt(5.0 / 3.0));
  EXPECT_EQ(aggregate({7.0}).sd, 0.0);
}

TEST(Experiment, NoiselessSingleReplication) {
  ExperimentConfig c;
  c.spec = example1_spec(500);
  c.noise.snr = kNoiseless;
  c.workers = 1;
  const ExperimentSummary s = run_experiment(c);
  ASSERT_EQ(s.used, 1u);
  EXPECT_LE(s.re.mean, 1e-6);
  EXPECT_GE(s.j_count.mean, 2.0);
  EXPECT_LE(s.j_count.mean, 6.0);
  EXPECT_LE(s.e_ab.mean, 0.02);
  EXPECT_LE(s.e_ba.mean, 0.02);
}

TEST(Experiment, CsvDeterministicAcrossRunsAndWorkers) {
  ExperimentConfig c;
  c.spec = example2_spec(200);
  c.noise.snr = 400;
  c.replications = 6;
  c.base_seed = 42;
  std::string first;
  for (std::size_t workers : {1u, 3u, 1u}) {
    c.workers = workers;
    std::ostringstream out;
    write_experiment_csv(out, run_experiment(c));
    if (first.empty()) first = out.str();
    EXPECT_EQ(out.str(), first) << workers;
  }
}

TEST(Experiment, ConfigValidation) {
  ExperimentConfig c;
  c.spec = example1_spec(100);
  c.replications = 0;
  EXPECT_THROW(c.validate(), InvalidSpec);
  c.replications = 1;
  c.grid_min_rel = 2.0;
  EXPECT_THROW(c.validate(), InvalidSpec);
}

}  // namespace
}  // namespace ltf
