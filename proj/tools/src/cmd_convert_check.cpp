#include <algorithm>
#include <iostream>
#include <memory>

#include "cli_util.hpp"
#include "drgcn/error.hpp"
#include "drgcn/graphstore/bundle.hpp"

namespace drgcn::cli {
namespace {

struct ConvertCheckArgs {
  std::string bundle;
  std::string out;
};

void run(const ConvertCheckArgs& a, int& exit_code) {
  // load_bundle validates sizes, ranges, symmetry and split disjointness
  const auto g = graph::load_bundle(a.bundle);
  const auto deg = graph::degrees(g);
  std::vector<std::size_t> per_class(g.num_classes, 0);
  for (auto y : g.labels) ++per_class[y];
  std::size_t nnz = 0;
  for (std::size_t v = 0; v < g.n; ++v)
    for (double x : g.features.row(v)) nnz += x != 0.0;

  RunManifest m;
  m.command = "convert-check";
  m.config = {{"bundle", a.bundle}};
  m.input_checksums = bundle_checksums(a.bundle);
  if (!a.out.empty()) m.outputs = {(std::filesystem::path(a.out) / "bundle_check.json").string()};
  const ordered_json summary = {
      {"nodes", g.n},
      {"edges", g.edges.size()},
      {"features", g.feature_dim()},
      {"feature_density", g.n * g.feature_dim() == 0 ? 0.0
                                                      : static_cast<double>(nnz) /
                                                            static_cast<double>(g.n * g.feature_dim())},
      {"classes", g.num_classes},
      {"class_counts", per_class},
      {"train", g.train.size()},
      {"val", g.val.size()},
      {"test", g.test.size()},
      {"isolated_nodes", std::count(deg.begin(), deg.end(), std::size_t{0})},
      {"max_degree", deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end())}};
  const std::string text = wrap_report(m, "bundle", summary, ordered_json{{"finished_at", utc_now()}});
  std::cout << text;
  if (!a.out.empty()) write_text(std::filesystem::path(a.out) / "bundle_check.json", text);
  exit_code = kExitOk;
}

}  // namespace

void register_convert_check(CLI::App& app, int& exit_code) {
  auto a = std::make_shared<ConvertCheckArgs>();
  CLI::App* sub = app.add_subcommand("convert-check", "Validate a graph bundle and print a summary");
  sub->add_option("--bundle", a->bundle, "Bundle directory")->required();
  sub->add_option("--out", a->out, "Also write bundle_check.json here");
  sub->callback([a, &exit_code] { run(*a, exit_code); });
}

}  // namespace drgcn::cli
