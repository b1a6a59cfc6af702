#include <benchmark/benchmark.h>

#include "ltf/kkt.hpp"
#include "ltf/lasso.hpp"
#include "ltf/pathwise.hpp"
#include "ltf/sim.hpp"

namespace {

ltf::TimeSeries noisy_example2(std::size_t n) {
  return ltf::add_noise(ltf::gen_trend(ltf::example2_spec(n)), {400.0, 11, false});
}

void BM_PathwiseSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ltf::TimeSeries y = noisy_example2(n);
  const double lambda = ltf::lambda_max(y) / 100.0;
  for (auto _ : state) {
    ltf::FusedState s = ltf::FusedState::from_mean(y.values());
    benchmark::DoNotOptimize(ltf::pathwise_solve(y, lambda, s));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PathwiseSolve)->RangeMultiplier(2)->Range(250, 2000)->Complexity();

void BM_FitPath(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ltf::TimeSeries y = noisy_example2(n);
  const auto grid = ltf::make_lambda_grid(ltf::lambda_max(y), 100, 1e-6, true);
  for (auto _ : state) benchmark::DoNotOptimize(ltf::fit_path(y, grid));
}
BENCHMARK(BM_FitPath)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LassoCd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ltf::TimeSeries y = noisy_example2(n);
  const ltf::LassoProblem p(y, ltf::lambda_max(y) / 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(ltf::cd_fit(p, {}, 1e-8, 100'000));
}
BENCHMARK(BM_LassoCd)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_CheckKkt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ltf::TimeSeries y = noisy_example2(n);
  const double lambda = ltf::lambda_max(y) / 100.0;
  ltf::FusedState s = ltf::FusedState::from_mean(y.values());
  const ltf::TrendFit fit = ltf::pathwise_solve(y, lambda, s);
  for (auto _ : state) benchmark::DoNotOptimize(ltf::check_kkt(y, fit.mu_hat, lambda, 1e-6));
}
BENCHMARK(BM_CheckKkt)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
