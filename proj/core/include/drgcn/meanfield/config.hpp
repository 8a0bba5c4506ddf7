#pragma once

#include <cstddef>
#include <vector>

namespace drgcn::mf {

struct MeanFieldConfig {
  std::size_t d = 2;
  double sigma_b2 = 1.0;  // Cov(b) = sigma_b2 * I
  std::vector<double> s;  // diagonal of S
  bool normalized = false;  // d_phi instead of phi (ReLU in both cases)

  void validate() const;
  bool identity_scaling() const;

  /// S = I.
  static MeanFieldConfig make(std::size_t d, double sigma_b2, bool normalized = false);
};

}  // namespace drgcn::mf
