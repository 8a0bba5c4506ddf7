#include <algorithm>
#include <iostream>
#include <memory>

#include "cli_util.hpp"
#include "drgcn/error.hpp"
#include "drgcn/gcn/checkpoint.hpp"
#include "drgcn/gcn/model.hpp"
#include "drgcn/graphstore/bundle.hpp"
#include "drgcn/trainer/report_io.hpp"
#include "drgcn/trainer/trainer.hpp"

namespace drgcn::cli {
namespace {

struct TrainArgs {
  std::string bundle;
  std::string model = "gcn";
  std::string norm;  // overrides the norm implied by --model
  std::string order = "post";
  std::string adjacency = "renormalized";
  std::size_t hidden = 64;
  double dropout = 0.5;
  double weight_decay = 5e-4;
  double lr = 0.01;
  std::size_t epochs = 800;
  std::size_t patience = 100;
  std::size_t seeds = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool no_row_normalize = false;
  bool pool_exclude_test = false;
  std::string out = "out";
  std::string config;
  ConfigurableOptions opts;
};

gcn::ModelSpec build_spec(const TrainArgs& a, const graph::Graph& g) {
  gcn::NormMode norm;
  if (a.model == "gcn") norm = gcn::NormMode::none;
  else if (a.model == "dr-gcn") norm = gcn::NormMode::dr;
  else throw Error(ErrorCode::invalid_input, "unknown model '" + a.model + "' (gcn | dr-gcn)");
  if (!a.norm.empty()) norm = gcn::norm_mode_from_string(a.norm);
  auto spec = gcn::ModelSpec::two_layer(g.feature_dim(), a.hidden, g.num_classes, norm,
                                        gcn::activation_order_from_string(a.order));
  spec.adjacency = graph::adjacency_variant_from_string(a.adjacency);
  spec.dropout = a.dropout;
  spec.weight_decay = a.weight_decay;
  spec.row_normalize_features = !a.no_row_normalize;
  spec.pool_exclude_test = a.pool_exclude_test;
  spec.validate();
  return spec;
}

void run(TrainArgs& a, int& exit_code) {
  if (!a.config.empty()) a.opts.apply_file(a.config);
  if (a.bundle.empty()) throw Error(ErrorCode::invalid_input, "--bundle is required");
  const std::filesystem::path out(a.out);
  const auto g = graph::load_bundle(a.bundle);
  const auto spec = build_spec(a, g);
  train::TrainConfig cfg;
  cfg.adam.lr = a.lr;
  cfg.max_epochs = a.epochs;
  cfg.patience = std::min(a.patience, a.epochs);  // short runs keep the default patience usable
  cfg.validate();
  if (a.seeds == 0) throw Error(ErrorCode::invalid_input, "--seeds must be >= 1");

  RunManifest m;
  m.command = "train";
  m.config = a.opts.resolved();
  m.config["model_spec"] = ordered_json::parse(gcn::model_spec_to_json(spec));
  m.config["train_config"] = ordered_json::parse(train::to_json(cfg));
  for (std::size_t k = 0; k < a.seeds; ++k) m.seeds.push_back(a.seed + k);
  m.input_checksums = bundle_checksums(a.bundle);
  for (auto s : m.seeds) {
    const auto tag = std::to_string(s);
    m.outputs.push_back((out / ("report_seed" + tag + ".json")).string());
    m.outputs.push_back((out / ("curve_seed" + tag + ".csv")).string());
    m.outputs.push_back((out / ("model_seed" + tag + ".ckpt")).string());
  }
  m.outputs.push_back((out / "aggregate.json").string());

  const std::string started = utc_now();
  const auto results = train::train_many(g, spec, cfg, m.seeds, a.jobs);
  const std::string finished = utc_now();

  std::vector<train::TrainReport> reports;
  for (const auto& r : results) {
    const auto tag = std::to_string(r.report.seed);
    ordered_json timing = ordered_json::parse(train::timing_json(r.report));
    timing["started_at"] = started;
    timing["finished_at"] = finished;
    write_text(out / ("report_seed" + tag + ".json"),
               wrap_report(m, "report", ordered_json::parse(train::to_json(r.report)), timing));
    write_text(out / ("curve_seed" + tag + ".csv"), train::curve_csv(r.report));
    gcn::save_checkpoint(r.model, out / ("model_seed" + tag + ".ckpt"));
    std::cout << "seed " << r.report.seed << ": test " << r.report.test_acc << " val " << r.report.val_acc
              << " (epoch " << r.report.selected_epoch << ", " << r.report.mean_epoch_seconds() * 1e3
              << " ms/epoch)\n";
    reports.push_back(r.report);
  }
  const auto agg = ordered_json::parse(train::aggregate_json(reports));
  write_text(out / "aggregate.json", wrap_report(m, "aggregate", agg,
                                                 ordered_json{{"started_at", started}, {"finished_at", finished}}));
  std::cout << "test accuracy " << agg["test_acc"]["mean"].get<double>() << " +- "
            << agg["test_acc"]["std"].get<double>() << " over " << reports.size() << " run(s)\n";
  exit_code = kExitOk;
}

}  // namespace

void register_train(CLI::App& app, int& exit_code) {
  auto a = std::make_shared<TrainArgs>();
  CLI::App* sub = app.add_subcommand("train", "Train GCN / Dr-GCN on a bundle, one run per seed");
  auto& o = a->opts;
  o.add(sub, "bundle", a->bundle, "Bundle directory");
  o.add(sub, "model", a->model, "gcn | dr-gcn");
  o.add(sub, "norm", a->norm, "Override normalization: none | batch | layer | dr | dr+layer");
  o.add(sub, "order", a->order, "Activation order: post | pre");
  o.add(sub, "adjacency", a->adjacency, "mean | symmetric | self-loop-symmetric | renormalized");
  o.add(sub, "hidden", a->hidden, "Hidden width");
  o.add(sub, "dropout", a->dropout, "Dropout rate");
  o.add(sub, "weight-decay", a->weight_decay, "L2 coefficient on weights");
  o.add(sub, "lr", a->lr, "Adam learning rate");
  o.add(sub, "epochs", a->epochs, "Maximum epochs");
  o.add(sub, "patience", a->patience, "Early-stopping patience");
  o.add(sub, "seeds", a->seeds, "Number of runs");
  o.add(sub, "seed", a->seed, "First seed; runs use seed, seed+1, ...");
  o.add(sub, "jobs", a->jobs, "Parallel runs");
  o.add_flag(sub, "no-row-normalize", a->no_row_normalize, "Keep raw feature rows");
  o.add_flag(sub, "pool-exclude-test", a->pool_exclude_test, "Dr pooling skips test nodes");
  sub->add_option("--out", a->out, "Output directory")->capture_default_str();
  sub->add_option("--config", a->config, "JSON file with option values; flags win");
  sub->callback([a, &exit_code] { run(*a, exit_code); });
}

}  // namespace drgcn::cli
