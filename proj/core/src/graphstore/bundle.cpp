#include "drgcn/graphstore/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "drgcn/error.hpp"

namespace drgcn::graph {
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "bundle IO assumes a little-endian host");

namespace {

std::vector<char> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <class T>
std::vector<T> read_array(const fs::path& p, std::size_t expected) {
  const auto bytes = read_file(p);
  if (bytes.size() != expected * sizeof(T)) {
    throw Error(ErrorCode::size_mismatch, p.filename().string() + " has " +
                                              std::to_string(bytes.size()) + " bytes, expected " +
                                              std::to_string(expected * sizeof(T)));
  }
  std::vector<T> out(expected);
  if (expected > 0) std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

template <class T>
std::vector<T> read_index_file(const fs::path& p) {
  const auto bytes = read_file(p);
  if (bytes.size() % sizeof(T) != 0) {
    throw Error(ErrorCode::size_mismatch, p.filename().string() + " length not a multiple of " +
                                              std::to_string(sizeof(T)));
  }
  std::vector<T> out(bytes.size() / sizeof(T));
  if (!out.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

template <class T>
void write_array(const fs::path& p, const std::vector<T>& v) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::missing_file, "cannot write " + p.string());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

std::size_t meta_count(const nlohmann::json& meta, const char* key) {
  if (!meta.contains(key) || !meta[key].is_number_integer() || meta[key].get<long long>() < 0) {
    throw Error(ErrorCode::bad_format, std::string("meta.json: bad or missing '") + key + "'");
  }
  return meta[key].get<std::size_t>();
}

}  // namespace

Graph load_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::missing_file, dir.string() + " is not a directory");
  for (const char* name : {"meta.json", "features.f32", "labels.u16", "edges.u32", "train.idx",
                           "val.idx", "test.idx"}) {
    if (!fs::exists(dir / name)) throw Error(ErrorCode::missing_file, (dir / name).string());
  }

  nlohmann::json meta;
  try {
    const auto text = read_file(dir / "meta.json");
    meta = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::bad_format, std::string("meta.json: ") + e.what());
  }
  if (!meta.is_object()) throw Error(ErrorCode::bad_format, "meta.json is not an object");
  if (meta_count(meta, "format_version") != kBundleFormatVersion) {
    throw Error(ErrorCode::bad_format, "unsupported format_version");
  }

  Graph g;
  g.n = meta_count(meta, "n");
  const std::size_t d = meta_count(meta, "d");
  g.num_classes = meta_count(meta, "classes");
  const std::size_t m = meta_count(meta, "edges");

  const auto feats = read_array<float>(dir / "features.f32", g.n * d);
  g.features = num::DenseMatrix(g.n, d);
  auto fd = g.features.data();
  for (std::size_t k = 0; k < feats.size(); ++k) fd[k] = static_cast<double>(feats[k]);

  g.labels = read_array<std::uint16_t>(dir / "labels.u16", g.n);

  const auto raw_edges = read_array<std::uint32_t>(dir / "edges.u32", 2 * m);
  g.edges.resize(m);
  for (std::size_t k = 0; k < m; ++k) g.edges[k] = {raw_edges[2 * k], raw_edges[2 * k + 1]};

  g.train = read_index_file<std::uint32_t>(dir / "train.idx");
  g.val = read_index_file<std::uint32_t>(dir / "val.idx");
  g.test = read_index_file<std::uint32_t>(dir / "test.idx");

  validate(g);
  return g;
}

void save_bundle(const Graph& g, const fs::path& dir) {
  validate(g);
  fs::create_directories(dir);

  nlohmann::ordered_json meta;
  meta["n"] = g.n;
  meta["d"] = g.feature_dim();
  meta["classes"] = g.num_classes;
  meta["edges"] = g.edges.size();
  meta["format_version"] = kBundleFormatVersion;
  {
    std::ofstream out(dir / "meta.json", std::ios::trunc);
    if (!out) throw Error(ErrorCode::missing_file, "cannot write meta.json");
    out << meta.dump() << '\n';
  }

  std::vector<float> feats(g.features.size());
  for (std::size_t k = 0; k < feats.size(); ++k) feats[k] = static_cast<float>(g.features.data()[k]);
  write_array(dir / "features.f32", feats);
  write_array(dir / "labels.u16", g.labels);

  std::vector<std::uint32_t> raw_edges;
  raw_edges.reserve(2 * g.edges.size());
  for (const auto& [i, j] : g.edges) {
    raw_edges.push_back(i);
    raw_edges.push_back(j);
  }
  write_array(dir / "edges.u32", raw_edges);
  write_array(dir / "train.idx", g.train);
  write_array(dir / "val.idx", g.val);
  write_array(dir / "test.idx", g.test);
}

}  // namespace drgcn::graph
