#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "drgcn/gcn/model.hpp"
#include "drgcn/graphstore/graph.hpp"
#include "drgcn/trainer/adam.hpp"

namespace drgcn::train {

/// Dropout and weight decay are part of gcn::ModelSpec because they shape the
/// loss; everything about the optimization loop lives here.
struct TrainConfig {
  AdamConfig adam;
  std::size_t max_epochs = 800;
  std::size_t patience = 100;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // dropout-mode loss before the update, decay included
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
};

struct LayerK {
  std::size_t layer = 0;
  double k = 0.0;
};

struct TrainReport {
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  std::size_t selected_epoch = 0;
  double val_acc = 0.0;
  double val_loss = 0.0;
  double test_acc = 0.0;
  bool stopped_early = false;
  std::vector<LayerK> k_values;  // at the selected epoch, Dr layers only
  // Wall-clock; excluded from equality because it is not reproducible.
  std::vector<double> epoch_seconds;

  double mean_epoch_seconds() const;
  bool same_results(const TrainReport& o) const;
};

struct TrainResult {
  TrainReport report;
  gcn::Model model;  // parameters at the selected epoch
};

/// Full-batch training with early stopping on validation accuracy (ties go
/// to the lower validation loss). Throws divergence on a non-finite loss.
TrainResult train(const graph::Graph& g, const gcn::ModelSpec& spec, const TrainConfig& cfg,
                  std::uint64_t seed);

double evaluate(const gcn::Model& m, const gcn::PreparedGraph& pg, std::span<const std::uint32_t> index);

/// K of every Dr layer: covariance of the layer's Dr input over all nodes
/// together with that layer's current s. Throws invalid-input when the model
/// has no Dr layers.
std::vector<LayerK> measure_k_per_layer(const gcn::Model& m, const gcn::PreparedGraph& pg);

/// Runs the seeds on up to `jobs` threads; results come back in seed order.
std::vector<TrainResult> train_many(const graph::Graph& g, const gcn::ModelSpec& spec,
                                    const TrainConfig& cfg, std::span<const std::uint64_t> seeds,
                                    std::size_t jobs);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  std::size_t count = 0;
};

Summary summarize(std::span<const double> values);

}  // namespace drgcn::train
