#include "drgcn/meanfield/fixed_point.hpp"

#include <cmath>
#include <string>

#include "drgcn/error.hpp"
#include "drgcn/meanfield/vphi.hpp"

namespace drgcn::mf {

num::SymmetricMatrix bsb1_matrix(std::size_t d, double q, double c) {
  num::SymmetricMatrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m.set(i, j, i == j ? q : q * c);
  return m;
}

Bsb1Point find_bsb1_fixed_point(const MeanFieldConfig& cfg, double tol, std::size_t max_iter) {
  cfg.validate();
  if (cfg.sigma_b2 == 0.0)
    throw Error(ErrorCode::degenerate_covariance, "sigma_b2 = 0: the ReLU map collapses to q* = 0");
  const std::size_t d = cfg.d;
  const double pairs = static_cast<double>(d * (d - 1));
  Bsb1Point p;
  p.q = 1.0;
  p.c = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const auto cur = bsb1_matrix(d, p.q, p.c);
    const auto next = cov_map_step(cfg, cur);
    p.residual = num::frobenius_norm(next - cur);
    p.residual_trace.push_back(p.residual);
    p.iterations = it;
    if (p.residual < tol) return p;
    double diag = 0.0, off = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) (i == j ? diag : off) += next(i, j);
    p.q = diag / static_cast<double>(d);
    p.c = off / pairs / p.q;
  }
  throw Error(ErrorCode::non_convergence, "BSB1 iteration stopped at residual " + std::to_string(p.residual) +
                                              " after " + std::to_string(max_iter) + " steps");
}

FullMapResult iterate_full_map(const MeanFieldConfig& cfg, num::SymmetricMatrix start, double tol,
                               std::size_t max_iter) {
  FullMapResult r{std::move(start), 0.0, 0, false};
  for (std::size_t it = 0; it < max_iter; ++it) {
    auto next = cov_map_step(cfg, r.c);
    r.residual = num::frobenius_norm(next - r.c);
    r.iterations = it + 1;
    r.c = std::move(next);
    if (r.residual < tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace drgcn::mf
