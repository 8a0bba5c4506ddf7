#include "drgcn/gcn/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <json.hpp>

#include "drgcn/error.hpp"

namespace drgcn::gcn {

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes little-endian");

namespace {
constexpr const char* kFormat = "drgcn-checkpoint";
}

void save_checkpoint(const Model& m, const std::filesystem::path& file) {
  nlohmann::ordered_json header;
  header["format"] = kFormat;
  header["version"] = 1;
  header["spec"] = nlohmann::ordered_json::parse(model_spec_to_json(m.spec()));
  auto& blocks = header["blocks"] = nlohmann::ordered_json::array();
  const auto names = m.parameter_names();
  const auto params = m.parameters();
  for (std::size_t i = 0; i < params.size(); ++i)
    blocks.push_back({{"name", names[i]}, {"rows", params[i]->rows()}, {"cols", params[i]->cols()}});

  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::missing_file, "cannot write " + file.string());
  out << header.dump() << '\n';
  for (const auto* p : params)
    out.write(reinterpret_cast<const char*>(p->data().data()),
              static_cast<std::streamsize>(p->size() * sizeof(double)));
}

Model load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::missing_file, file.string());
  std::string line;
  std::getline(in, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
    if (header.at("format") != kFormat || header.at("version") != 1)
      throw Error(ErrorCode::bad_format, "not a version-1 checkpoint");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::bad_format, std::string("checkpoint header: ") + e.what());
  }
  ModelSpec spec = model_spec_from_json(header.at("spec").dump());

  // Build a zero model of the declared spec, then fill blocks in order.
  Model m(spec, 0);
  auto params = m.parameters();
  const auto& blocks = header.at("blocks");
  if (blocks.size() != params.size())
    throw Error(ErrorCode::checkpoint_mismatch, "block count " + std::to_string(blocks.size()) +
                                                    " != " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& b = blocks[i];
    if (b.at("name") != params[i].name || b.at("rows") != params[i].value->rows() ||
        b.at("cols") != params[i].value->cols())
      throw Error(ErrorCode::checkpoint_mismatch, "block " + std::to_string(i) + " does not match spec");
    auto data = params[i].value->data();
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != data.size() * sizeof(double))
      throw Error(ErrorCode::checkpoint_mismatch, "checkpoint truncated in block " + params[i].name);
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw Error(ErrorCode::checkpoint_mismatch, "trailing bytes after last block");
  return m;
}

}  // namespace drgcn::gcn
