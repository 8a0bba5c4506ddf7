#include "drgcn/gcn/activation.hpp"

#include <string>

#include "drgcn/error.hpp"

namespace drgcn::gcn {

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::elu: return "elu";
    case Activation::identity: return "identity";
  }
  return "?";
}

Activation activation_from_string(std::string_view name) {
  for (auto a : {Activation::relu, Activation::elu, Activation::identity})
    if (name == to_string(a)) return a;
  throw Error(ErrorCode::invalid_input, "unknown activation '" + std::string(name) + "'");
}

num::DenseMatrix activate(Activation a, num::DenseMatrix m) {
  if (a == Activation::identity) return m;
  for (double& x : m.data()) x = activate(a, x);
  return m;
}

}  // namespace drgcn::gcn
