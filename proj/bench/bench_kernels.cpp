#include <benchmark/benchmark.h>

#include "fwdaffine/montecarlo.hpp"
#include "fwdaffine/pricer.hpp"
#include "fwdaffine/quadrature.hpp"

using namespace fwdaffine;

namespace {

const BasisSystem& basis() {
  static const BasisSystem b(0.1, 10);
  return b;
}

const NelsonSiegelCurve kCurve;

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_FourierIntegrand(benchmark::State& state) {
  const ModelParams model = state.range(1) ? ModelParams(WishartModelParams::defaults(5))
                                           : ModelParams(JumpModelParams::levy(10));
  const TransformEvaluator phi(model, basis(), kCurve, 1.0, 1.0);
  const CompositeRule rule = composite_gauss_legendre(0.0, 200.0, 32, 64);
  for (auto _ : state) {
    auto v = mode(state) == Execution::parallel ? fourier_integrand_parallel(phi, 2.0, 1.0, rule.x)
                                                : fourier_integrand_serial(phi, 2.0, 1.0, rule.x);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rule.x.size()));
}
BENCHMARK(BM_FourierIntegrand)->ArgsProduct({{0, 1}, {0, 1}})->ArgNames({"parallel", "wishart"})->Unit(benchmark::kMillisecond);

void BM_PriceLevy(benchmark::State& state) {
  PricingRequest r;
  r.model = JumpModelParams::levy(5);
  r.theta = 10.0;
  r.compute_parity = false;
  for (auto _ : state) benchmark::DoNotOptimize(price_option(r, basis(), kCurve, mode(state)).price);
}
BENCHMARK(BM_PriceLevy)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_McJump(benchmark::State& state) {
  PricingRequest r;
  r.theta = 10.0;
  McConfig cfg;
  cfg.n_paths = 20000;
  const JumpModelParams m = JumpModelParams::levy(5);
  for (auto _ : state) benchmark::DoNotOptimize(mc_price_jump(m, r, basis(), kCurve, cfg, mode(state)).price.mean);
  state.SetItemsProcessed(state.iterations() * cfg.n_paths);
}
BENCHMARK(BM_McJump)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_McWishart(benchmark::State& state) {
  McConfig cfg;
  cfg.n_paths = 2000;
  const std::vector<double> lambdas{0.0, 1.0, 2.0, 5.0};
  const WishartModelParams m = WishartModelParams::defaults(5);
  const Eigen::MatrixXd u2 = Eigen::MatrixXd::Zero(5, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mc_mgf_wishart(m, 1.0, lambdas, 1.0, u2, 1.0 / 365, basis(), kCurve, cfg, mode(state)).values[0].mean);
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths);
}
BENCHMARK(BM_McWishart)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
