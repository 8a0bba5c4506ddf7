#include <iostream>
#include <memory>
#include <sstream>

#include "cli_util.hpp"
#include "drgcn/error.hpp"
#include "drgcn/gcn/checkpoint.hpp"
#include "drgcn/graphstore/bundle.hpp"
#include "drgcn/trainer/trainer.hpp"

namespace drgcn::cli {
namespace {

struct MeasureKArgs {
  std::string checkpoint;
  std::string bundle;
  std::string out = "out";
  std::string config;
  ConfigurableOptions opts;
};

void run(MeasureKArgs& a, int& exit_code) {
  if (!a.config.empty()) a.opts.apply_file(a.config);
  if (a.checkpoint.empty() || a.bundle.empty())
    throw Error(ErrorCode::invalid_input, "--checkpoint and --bundle are required");
  const auto g = graph::load_bundle(a.bundle);
  const auto model = gcn::load_checkpoint(a.checkpoint);
  const auto& dims = model.spec().dims;
  if (dims.front() != g.feature_dim() || dims.back() != g.num_classes) {
    throw Error(ErrorCode::checkpoint_mismatch,
                "checkpoint expects " + std::to_string(dims.front()) + " features and " +
                    std::to_string(dims.back()) + " classes, bundle has " + std::to_string(g.feature_dim()) +
                    " and " + std::to_string(g.num_classes));
  }
  const auto pg = gcn::prepare(g, model.spec());
  const auto ks = train::measure_k_per_layer(model, pg);

  const std::filesystem::path out(a.out);
  RunManifest m;
  m.command = "measure-k";
  m.config = a.opts.resolved();
  m.input_checksums = bundle_checksums(a.bundle);
  m.input_checksums["checkpoint"] = sha256_file(a.checkpoint);
  m.outputs = {(out / "k.csv").string(), (out / "k.json").string()};

  std::ostringstream csv;
  csv.precision(17);
  csv << "layer,K\n";
  ordered_json rows = ordered_json::array();
  for (const auto& lk : ks) {
    csv << lk.layer << "," << lk.k << "\n";
    rows.push_back({{"layer", lk.layer}, {"k", lk.k}});
    std::cout << "layer " << lk.layer << "  K = " << lk.k << "\n";
  }
  write_text(out / "k.csv", csv.str());
  write_text(out / "k.json", wrap_report(m, "layers", rows, ordered_json{{"finished_at", utc_now()}}));
  exit_code = kExitOk;
}

}  // namespace

void register_measure_k(CLI::App& app, int& exit_code) {
  auto a = std::make_shared<MeasureKArgs>();
  CLI::App* sub = app.add_subcommand("measure-k", "Per-layer K of a trained Dr checkpoint");
  a->opts.add(sub, "checkpoint", a->checkpoint, "Checkpoint file");
  a->opts.add(sub, "bundle", a->bundle, "Bundle directory");
  sub->add_option("--out", a->out, "Output directory")->capture_default_str();
  sub->add_option("--config", a->config, "JSON file with option values; flags win");
  sub->callback([a, &exit_code] { run(*a, exit_code); });
}

}  // namespace drgcn::cli
