#include "drgcn/trainer/report_io.hpp"

#include <cstdio>
#include <map>
#include <vector>

#include "drgcn/error.hpp"
#include "json.hpp"

namespace drgcn::train {

using nlohmann::ordered_json;

std::string to_json(const TrainReport& r) {
  ordered_json epochs = ordered_json::array();
  for (const auto& e : r.epochs)
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"train_acc", e.train_acc},
                      {"val_loss", e.val_loss},
                      {"val_acc", e.val_acc},
                      {"test_acc", e.test_acc}});
  ordered_json ks = ordered_json::array();
  for (const auto& k : r.k_values) ks.push_back({{"layer", k.layer}, {"k", k.k}});
  return ordered_json{{"seed", r.seed},
                      {"selected_epoch", r.selected_epoch},
                      {"val_acc", r.val_acc},
                      {"val_loss", r.val_loss},
                      {"test_acc", r.test_acc},
                      {"stopped_early", r.stopped_early},
                      {"epochs_run", r.epochs.size()},
                      {"k_values", ks},
                      {"epochs", epochs}}
      .dump();
}

std::string timing_json(const TrainReport& r) {
  return ordered_json{{"epoch_seconds", r.epoch_seconds}, {"mean_epoch_seconds", r.mean_epoch_seconds()}}.dump();
}

std::string to_json(const TrainConfig& c) {
  return ordered_json{{"lr", c.adam.lr},
                      {"beta1", c.adam.beta1},
                      {"beta2", c.adam.beta2},
                      {"eps", c.adam.eps},
                      {"max_epochs", c.max_epochs},
                      {"patience", c.patience}}
      .dump();
}

TrainConfig train_config_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    TrainConfig c;
    c.adam.lr = j.value("lr", c.adam.lr);
    c.adam.beta1 = j.value("beta1", c.adam.beta1);
    c.adam.beta2 = j.value("beta2", c.adam.beta2);
    c.adam.eps = j.value("eps", c.adam.eps);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::bad_format, std::string("train config: ") + e.what());
  }
}

std::string curve_csv(const TrainReport& r) {
  std::string out = "epoch,train_loss,val_acc,test_acc\n";
  char buf[128];
  for (const auto& e : r.epochs) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", e.epoch, e.train_loss, e.val_acc, e.test_acc);
    out += buf;
  }
  return out;
}

std::string aggregate_json(std::span<const TrainReport> reports) {
  std::vector<double> test, val;
  std::map<std::size_t, std::vector<double>> ks;
  for (const auto& r : reports) {
    test.push_back(r.test_acc);
    val.push_back(r.val_acc);
    for (const auto& k : r.k_values) ks[k.layer].push_back(k.k);
  }
  const auto t = summarize(test);
  const auto v = summarize(val);
  ordered_json kj = ordered_json::array();
  for (const auto& [layer, values] : ks) {
    const auto s = summarize(values);
    kj.push_back({{"layer", layer}, {"mean", s.mean}, {"std", s.std}});
  }
  return ordered_json{{"runs", reports.size()},
                      {"test_acc", {{"mean", t.mean}, {"std", t.std}}},
                      {"val_acc", {{"mean", v.mean}, {"std", v.std}}},
                      {"test_acc_per_seed", test},
                      {"k", kj}}
      .dump();
}

}  // namespace drgcn::train
