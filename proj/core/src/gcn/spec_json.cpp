#include <json.hpp>

#include "drgcn/error.hpp"
#include "drgcn/gcn/model.hpp"

namespace drgcn::gcn {

std::string model_spec_to_json(const ModelSpec& spec) {
  nlohmann::ordered_json j;
  j["dims"] = spec.dims;
  auto& acts = j["activations"] = nlohmann::ordered_json::array();
  for (auto a : spec.activations) acts.push_back(std::string(to_string(a)));
  auto& norms = j["norms"] = nlohmann::ordered_json::array();
  for (auto n : spec.norms) norms.push_back(std::string(to_string(n)));
  j["order"] = std::string(to_string(spec.order));
  j["adjacency"] = std::string(graph::to_string(spec.adjacency));
  j["dropout"] = spec.dropout;
  j["weight_decay"] = spec.weight_decay;
  j["norm_eps"] = spec.norm_eps;
  j["row_normalize_features"] = spec.row_normalize_features;
  j["pool_exclude_test"] = spec.pool_exclude_test;
  return j.dump();
}

ModelSpec model_spec_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ModelSpec s;
    s.dims = j.at("dims").get<std::vector<std::size_t>>();
    for (const auto& a : j.at("activations")) s.activations.push_back(activation_from_string(a.get<std::string>()));
    for (const auto& n : j.at("norms")) s.norms.push_back(norm_mode_from_string(n.get<std::string>()));
    s.order = activation_order_from_string(j.at("order").get<std::string>());
    s.adjacency = graph::adjacency_variant_from_string(j.at("adjacency").get<std::string>());
    s.dropout = j.at("dropout").get<double>();
    s.weight_decay = j.at("weight_decay").get<double>();
    s.norm_eps = j.at("norm_eps").get<double>();
    s.row_normalize_features = j.at("row_normalize_features").get<bool>();
    s.pool_exclude_test = j.at("pool_exclude_test").get<bool>();
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::bad_format, std::string("model spec: ") + e.what());
  }
}

}  // namespace drgcn::gcn
