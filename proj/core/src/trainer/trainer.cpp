#include "drgcn/trainer/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "drgcn/error.hpp"
#include "drgcn/gcn/ops.hpp"
#include "drgcn/meanfield/k_measure.hpp"

namespace drgcn::train {

void TrainConfig::validate() const {
  if (!(adam.lr > 0.0) || !(adam.eps > 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0))
    throw Error(ErrorCode::invalid_input, "Adam settings out of range");
  if (max_epochs == 0) throw Error(ErrorCode::invalid_input, "max_epochs must be positive");
  if (patience == 0 || patience > max_epochs)
    throw Error(ErrorCode::invalid_input, "patience must be in [1, max_epochs]");
}

double TrainReport::mean_epoch_seconds() const {
  if (epoch_seconds.empty()) return 0.0;
  double total = 0.0;
  for (double s : epoch_seconds) total += s;
  return total / static_cast<double>(epoch_seconds.size());
}

bool TrainReport::same_results(const TrainReport& o) const {
  auto same_epoch = [](const EpochRecord& a, const EpochRecord& b) {
    return a.epoch == b.epoch && a.train_loss == b.train_loss && a.train_acc == b.train_acc &&
           a.val_loss == b.val_loss && a.val_acc == b.val_acc && a.test_acc == b.test_acc;
  };
  if (seed != o.seed || selected_epoch != o.selected_epoch || val_acc != o.val_acc ||
      val_loss != o.val_loss || test_acc != o.test_acc || stopped_early != o.stopped_early ||
      epochs.size() != o.epochs.size() || k_values.size() != o.k_values.size())
    return false;
  for (std::size_t i = 0; i < epochs.size(); ++i)
    if (!same_epoch(epochs[i], o.epochs[i])) return false;
  for (std::size_t i = 0; i < k_values.size(); ++i)
    if (k_values[i].layer != o.k_values[i].layer || k_values[i].k != o.k_values[i].k) return false;
  return true;
}

double evaluate(const gcn::Model& m, const gcn::PreparedGraph& pg, std::span<const std::uint32_t> index) {
  return gcn::accuracy(gcn::forward(m, pg, false, nullptr), pg.graph->labels, index);
}

std::vector<LayerK> measure_k_per_layer(const gcn::Model& m, const gcn::PreparedGraph& pg) {
  if (!m.has_dr_layers()) throw Error(ErrorCode::invalid_input, "no Dr layers");
  gcn::ForwardCache cache;
  gcn::forward(m, pg, false, nullptr, &cache);
  std::vector<LayerK> out;
  for (std::size_t l = 0; l < cache.layers.size(); ++l) {
    const auto& c = cache.layers[l];
    if (!c.dr) continue;
    out.push_back({l, mf::k_measure_from_samples(c.n(), c.dr->s)});
  }
  return out;
}

TrainResult train(const graph::Graph& g, const gcn::ModelSpec& spec, const TrainConfig& cfg,
                  std::uint64_t seed) {
  cfg.validate();
  const gcn::PreparedGraph pg = gcn::prepare(g, spec);
  gcn::Model model(spec, seed);
  auto params = model.parameters();
  AdamState adam;
  const num::RngStream dropout_root(seed, 2);

  TrainResult result{TrainReport{}, model};
  TrainReport& rep = result.report;
  rep.seed = seed;
  bool have_best = false;
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    num::RngStream rng = dropout_root.substream(epoch);
    auto step = gcn::loss_and_gradients(model, pg, g.train, true, &rng);
    if (!std::isfinite(step.loss.total())) {
      throw Error(ErrorCode::divergence, "non-finite training loss at epoch " + std::to_string(epoch) +
                                             " (seed " + std::to_string(seed) + ")");
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = step.loss.total();
    rec.train_acc = gcn::accuracy(step.logits, g.labels, g.train);
    adam_step(params, step.grads, adam, cfg.adam);

    const auto logits = gcn::forward(model, pg, false, nullptr);
    if (!logits.all_finite())
      throw Error(ErrorCode::divergence, "non-finite logits after epoch " + std::to_string(epoch));
    rec.val_loss = gcn::softmax_cross_entropy(logits, g.labels, g.val).loss;
    rec.val_acc = gcn::accuracy(logits, g.labels, g.val);
    rec.test_acc = g.test.empty() ? 0.0 : gcn::accuracy(logits, g.labels, g.test);
    rep.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    rep.epochs.push_back(rec);

    const bool better = !have_best || rec.val_acc > rep.val_acc ||
                        (rec.val_acc == rep.val_acc && rec.val_loss < rep.val_loss);
    if (better) {
      have_best = true;
      since_best = 0;
      rep.selected_epoch = epoch;
      rep.val_acc = rec.val_acc;
      rep.val_loss = rec.val_loss;
      rep.test_acc = rec.test_acc;
      result.model = model;
    } else if (++since_best >= cfg.patience) {
      rep.stopped_early = epoch + 1 < cfg.max_epochs;
      break;
    }
  }
  if (result.model.has_dr_layers()) rep.k_values = measure_k_per_layer(result.model, pg);
  return result;
}

std::vector<TrainResult> train_many(const graph::Graph& g, const gcn::ModelSpec& spec,
                                    const TrainConfig& cfg, std::span<const std::uint64_t> seeds,
                                    std::size_t jobs) {
  std::vector<std::optional<TrainResult>> slots(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        slots[i] = train(g, spec, cfg, seeds[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, seeds.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<TrainResult> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

}  // namespace drgcn::train
