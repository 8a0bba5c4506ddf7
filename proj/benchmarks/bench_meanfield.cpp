#include <benchmark/benchmark.h>

#include "drgcn/meanfield/fixed_point.hpp"
#include "drgcn/meanfield/operator.hpp"
#include "drgcn/meanfield/theorems.hpp"
#include "drgcn/meanfield/vphi.hpp"

namespace {

using namespace drgcn;

void BM_ClosedForm(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto cfg = mf::MeanFieldConfig::make(d, 1.0);
  num::RngStream rng(1, 1);
  const auto c = mf::random_wishart(d, d + 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mf::v_phi_closed(cfg, c).data().data());
}

void BM_Quadrature(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto cfg = mf::MeanFieldConfig::make(d, 1.0, true);
  num::RngStream rng(1, 1);
  const auto c = mf::random_wishart(d, d + 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mf::v_dphi_quadrature(cfg, c).data().data());
}

void BM_MonteCarlo(benchmark::State& state) {
  const auto cfg = mf::MeanFieldConfig::make(8, 1.0);
  num::RngStream rng(1, 1);
  const auto c = mf::random_wishart(8, 10, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mf::v_phi_mc(cfg, c, 100000, rng).mean.data().data());
}

void BM_Jacobian(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto cfg = mf::MeanFieldConfig::make(d, 1.0, true);
  const auto p = mf::find_bsb1_fixed_point(cfg);
  const auto at = mf::bsb1_matrix(d, p.q, p.c);
  const mf::CovMap map = [&](const num::SymmetricMatrix& x) { return mf::cov_map_step(cfg, x); };
  for (auto _ : state) benchmark::DoNotOptimize(mf::jacobian_fd(map, at).matrix.data().data());
}

BENCHMARK(BM_ClosedForm)->Arg(8)->Arg(16);
BENCHMARK(BM_Quadrature)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Jacobian)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
