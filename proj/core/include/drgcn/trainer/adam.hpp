#pragma once

#include <cstddef>
#include <vector>

#include "drgcn/gcn/model.hpp"
#include "drgcn/numkit/dense_matrix.hpp"

namespace drgcn::train {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<num::DenseMatrix> m;
  std::vector<num::DenseMatrix> v;
  std::size_t t = 0;
};

/// One bias-corrected Adam update; the state is sized on first use.
void adam_step(std::vector<gcn::ParamRef>& params, const std::vector<num::DenseMatrix>& grads,
               AdamState& state, const AdamConfig& cfg);

}  // namespace drgcn::train
