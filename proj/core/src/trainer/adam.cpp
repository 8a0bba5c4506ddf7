#include "drgcn/trainer/adam.hpp"

#include <cmath>

#include "drgcn/error.hpp"

namespace drgcn::train {

void adam_step(std::vector<gcn::ParamRef>& params, const std::vector<num::DenseMatrix>& grads,
               AdamState& state, const AdamConfig& cfg) {
  if (grads.size() != params.size()) throw Error(ErrorCode::shape_mismatch, "gradient count");
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.value->rows(), p.value->cols());
      state.v.emplace_back(p.value->rows(), p.value->cols());
    }
  }
  if (state.m.size() != params.size()) throw Error(ErrorCode::shape_mismatch, "Adam state size");
  ++state.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].value->data();
    auto g = grads[i].data();
    auto m = state.m[i].data();
    auto v = state.v[i].data();
    if (g.size() != w.size()) throw Error(ErrorCode::shape_mismatch, "gradient shape");
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
      w[k] -= cfg.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + cfg.eps);
    }
  }
}

}  // namespace drgcn::train
