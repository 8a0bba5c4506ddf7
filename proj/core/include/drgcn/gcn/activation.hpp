#pragma once

#include <cmath>
#include <string_view>

#include "drgcn/numkit/dense_matrix.hpp"

namespace drgcn::gcn {

enum class Activation { relu, elu, identity };

std::string_view to_string(Activation a) noexcept;
Activation activation_from_string(std::string_view name);

inline double activate(Activation a, double x) noexcept {
  switch (a) {
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::elu: return x > 0.0 ? x : std::expm1(x);
    case Activation::identity: return x;
  }
  return x;
}

/// Derivative evaluated at the pre-activation value x.
inline double activate_grad(Activation a, double x) noexcept {
  switch (a) {
    case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::elu: return x > 0.0 ? 1.0 : std::exp(x);
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

num::DenseMatrix activate(Activation a, num::DenseMatrix m);

inline double sigmoid(double x) noexcept {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace drgcn::gcn
