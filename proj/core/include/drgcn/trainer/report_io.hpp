#pragma once

#include <span>
#include <string>

#include "drgcn/trainer/trainer.hpp"

namespace drgcn::train {

/// Reproducible part of the report (no wall-clock numbers).
std::string to_json(const TrainReport& r);
/// {"epoch_seconds": [...], "mean_epoch_seconds": x}
std::string timing_json(const TrainReport& r);
std::string to_json(const TrainConfig& c);
TrainConfig train_config_from_json(std::string_view text);

/// epoch,train_loss,val_acc,test_acc
std::string curve_csv(const TrainReport& r);

/// Mean and sample std of test accuracy, plus per-layer K means over runs.
std::string aggregate_json(std::span<const TrainReport> reports);

}  // namespace drgcn::train
