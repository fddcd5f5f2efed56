#include <benchmark/benchmark.h>

#include "mcgpp/inference.hpp"
#include "mcgpp/prediction.hpp"
#include "mcgpp/simulation.hpp"

using namespace mcgpp;

namespace {

const ModelSpec kModel1 = ModelSpec::mcgpp(CovFamily::SquaredExponential,
                                           CovFamily::SquaredExponential,
                                           CovFamily::GammaExponential);

MCGPHyperparams bench_theta(CovFamily shared) {
  MCGPHyperparams t;
  t.shared_family = shared;
  t.xi1 = KernelParams::isotropic(0.5, 0.8, 1, shared);
  t.xi2 = KernelParams::isotropic(0.4, 1.2, 1, shared);
  t.eta1 = {CovFamily::Matern, KernelParams::isotropic(0.3, 1.0, 1, CovFamily::Matern)};
  t.eta2 = {CovFamily::GammaExponential,
            KernelParams::isotropic(0.3, 1.0, 1, CovFamily::GammaExponential)};
  return t;
}

void BM_AssembleK(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const ScenarioDraw draw = gen_scenario1(n, n, 1);
  const MCGPHyperparams theta = bench_theta(CovFamily::RationalQuadratic);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_K(draw.train.inputs(), theta));
  state.SetComplexityN(2 * n);
}
BENCHMARK(BM_AssembleK)->RangeMultiplier(2)->Range(10, 320)->Complexity(benchmark::oNSquared);

void BM_LaplaceMarginal(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const ScenarioDraw draw = gen_scenario1(n, n, 2);
  const MCGPHyperparams theta = bench_theta(CovFamily::SquaredExponential);
  const RegressionCoefficients beta{Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)};
  for (auto _ : state) benchmark::DoNotOptimize(laplace_marginal_loglik(beta, theta, draw.train));
  state.SetComplexityN(2 * n);
}
BENCHMARK(BM_LaplaceMarginal)->RangeMultiplier(2)->Range(10, 160)->Complexity(benchmark::oNCubed);

void BM_Predict(benchmark::State& state) {
  const ScenarioDraw draw = gen_scenario1(20, 20, 3);
  FittedModel m;
  m.spec = kModel1;
  m.theta = bench_theta(CovFamily::SquaredExponential);
  m.beta = {Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)};
  const auto points = draw.test_points();
  for (auto _ : state) benchmark::DoNotOptimize(predict_batch(m, draw.train, points));
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMillisecond);

void BM_FitModel1(benchmark::State& state) {
  const ScenarioDraw draw = gen_scenario1(20, 20, 4);
  OptimOptions o;
  o.n_starts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit(draw.train, kModel1, o));
}
BENCHMARK(BM_FitModel1)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
