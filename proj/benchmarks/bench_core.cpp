#include <benchmark/benchmark.h>

#include <cmath>

#include "bet/bakry_emery.hpp"
#include "bet/bochner.hpp"
#include "bet/catalog.hpp"
#include "bet/expr.hpp"
#include "bet/geodesic.hpp"
#include "bet/geometry.hpp"
#include "bet/tubes.hpp"

namespace {

bet::Vec point2(double a, double b) {
  bet::Vec v(2);
  v << a, b;
  return v;
}

void BM_Jet(benchmark::State& state) {
  const auto e = bet::parse_expression("exp(0.5*sin(x)*cos(y)) / (1.5 + 0.3*sin(y)) + log(1 + x^2)", 2, {"x", "y"});
  const auto p = point2(0.4, 1.1);
  for (auto _ : state) benchmark::DoNotOptimize(e.evaluate_jet(p));
}
BENCHMARK(BM_Jet);

void BM_RicciLumpyTorus(benchmark::State& state) {
  const auto s = bet::lookup_catalog("lumpy_torus").space();
  const auto p = point2(0.7, 2.3);
  for (auto _ : state) benchmark::DoNotOptimize(bet::ricci_at(s, p));
}
BENCHMARK(BM_RicciLumpyTorus);

void BM_BeTensor(benchmark::State& state) {
  const auto s = bet::lookup_catalog("weighted_torus").space();
  const auto p = point2(0.7, 2.3);
  for (auto _ : state) benchmark::DoNotOptimize(bet::be_tensor_at(s, bet::QParam::finite(2.0), p));
}
BENCHMARK(BM_BeTensor);

void BM_BochnerResidual(benchmark::State& state) {
  const auto s = bet::lookup_catalog("lumpy_torus").space();
  const auto omega = bet::make_oneform(s, {"sin(x)*cos(y)", "cos(2*x) + sin(y)"});
  const auto p = point2(0.7, 2.3);
  for (auto _ : state) benchmark::DoNotOptimize(bet::bochner_residual_at(s, omega, p));
}
BENCHMARK(BM_BochnerResidual);

void BM_ShootSphere(benchmark::State& state) {
  const auto s = bet::lookup_catalog("sphere2").space();
  const int steps = static_cast<int>(state.range(0));
  bet::ShootOptions opt;
  opt.origin_offset = 0.1;
  opt.initial_area = std::sin(0.1);
  bet::Mat pi0(1, 1);
  pi0(0, 0) = 1.0 / std::tan(0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(bet::shoot_segment(s, point2(0.1, 1.0), point2(1.0, 0.0), pi0, 2.9, steps, opt));
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_ShootSphere)->Arg(500)->Arg(2000);

void BM_Vhat(benchmark::State& state) {
  double u = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bet::vhat(1.0, 0.3, 0.0, u));
    u = u < 4.0 ? u + 0.01 : 0.5;
  }
}
BENCHMARK(BM_Vhat);

}  // namespace

BENCHMARK_MAIN();
