#include <benchmark/benchmark.h>

#include <algorithm>

#include "drgcn/gcn/model.hpp"
#include "drgcn/numkit/rng.hpp"

namespace {

using namespace drgcn;

// Citation-like graph: ring plus random chords, sparse nonnegative features.
graph::Graph make_graph(std::size_t n, std::size_t d, std::size_t classes) {
  num::RngStream rng(1, 1);
  graph::Graph g;
  g.n = n;
  g.num_classes = classes;
  for (std::uint32_t v = 0; v + 1 < n; ++v) g.edges.emplace_back(v, v + 1);
  for (std::size_t e = 0; e < n; ++e) {
    auto a = static_cast<std::uint32_t>(rng.below(n));
    auto b = static_cast<std::uint32_t>(rng.below(n));
    if (a > b) std::swap(a, b);
    if (a + 1 < b) g.edges.emplace_back(a, b);
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.features = num::DenseMatrix(n, d);
  for (double& x : g.features.data()) x = rng.uniform() < 0.05 ? 1.0 : 0.0;
  for (std::size_t v = 0; v < n; ++v) g.labels.push_back(static_cast<std::uint16_t>(rng.below(classes)));
  for (std::uint32_t v = 0; v < n; ++v) (v < n / 10 ? g.train : v < n / 5 ? g.val : g.test).push_back(v);
  return g;
}

void run_step(benchmark::State& state, gcn::NormMode norm) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = make_graph(n, 500, 7);
  const auto spec = gcn::ModelSpec::two_layer(500, 64, 7, norm);
  const auto pg = gcn::prepare(g, spec);
  gcn::Model m(spec, 1);
  for (auto _ : state) {
    num::RngStream rng(3, 2);
    auto r = gcn::loss_and_gradients(m, pg, g.train, true, &rng);
    benchmark::DoNotOptimize(r.loss.data);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void run_forward(benchmark::State& state, gcn::NormMode norm) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = make_graph(n, 500, 7);
  const auto spec = gcn::ModelSpec::two_layer(500, 64, 7, norm);
  const auto pg = gcn::prepare(g, spec);
  gcn::Model m(spec, 1);
  for (auto _ : state) {
    auto logits = gcn::forward(m, pg, false, nullptr);
    benchmark::DoNotOptimize(logits.data().data());
  }
}

void BM_GcnForward(benchmark::State& s) { run_forward(s, gcn::NormMode::none); }
void BM_DrGcnForward(benchmark::State& s) { run_forward(s, gcn::NormMode::dr); }
void BM_GcnTrainStep(benchmark::State& s) { run_step(s, gcn::NormMode::none); }
void BM_DrGcnTrainStep(benchmark::State& s) { run_step(s, gcn::NormMode::dr); }

BENCHMARK(BM_GcnForward)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DrGcnForward)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GcnTrainStep)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DrGcnTrainStep)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
