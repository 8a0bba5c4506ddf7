#pragma once

#include <cstddef>
#include <vector>

#include "drgcn/meanfield/config.hpp"
#include "drgcn/numkit/symmetric_matrix.hpp"

namespace drgcn::mf {

struct Bsb1Point {
  double q = 0.0;
  double c = 0.0;
  double residual = 0.0;  // |F(C*) - C*|_F for the full map
  std::size_t iterations = 0;
  std::vector<double> residual_trace;
};

/// q ((1 - c) I + c 1 1^T)
num::SymmetricMatrix bsb1_matrix(std::size_t d, double q, double c);

/// Iterates cov_map_step from C = I, projecting each image back onto the
/// BSB1 family (mean diagonal, mean off-diagonal), until the full-map residual
/// drops below tol. Throws degenerate-covariance for sigma_b2 == 0 and
/// non-convergence when max_iter runs out.
Bsb1Point find_bsb1_fixed_point(const MeanFieldConfig& cfg, double tol = 1e-12, std::size_t max_iter = 10000);

struct FullMapResult {
  num::SymmetricMatrix c;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Plain iteration of cov_map_step on all of H_d.
FullMapResult iterate_full_map(const MeanFieldConfig& cfg, num::SymmetricMatrix start, double tol = 1e-12,
                               std::size_t max_iter = 10000);

}  // namespace drgcn::mf
