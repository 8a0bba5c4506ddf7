#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "drgcn/meanfield/config.hpp"
#include "drgcn/meanfield/fixed_point.hpp"
#include "drgcn/meanfield/operator.hpp"
#include "drgcn/numkit/rng.hpp"
#include "drgcn/numkit/symmetric_matrix.hpp"

namespace drgcn::mf {

/// A A^T with A a d x dof standard normal matrix.
num::SymmetricMatrix random_wishart(std::size_t d, std::size_t dof, num::RngStream& rng);

struct SpectralOptions {
  double h = 1e-5;
  bool richardson = false;
  double residual_tol = 1e-5;
  double v0_tol = 1e-6;
};

/// Subspace-by-subspace reading of the Jacobian of the normalized map at a
/// BSB1 point. Eigenvalues are averages of <B, P(J B)> over an orthonormal
/// basis B of each piece, P being the projection G . G that drops V_0; the
/// residual is max |P(J B) - lambda B|. For V_0 the residual is max |J B|.
struct SpectralReport {
  std::size_t d = 0;
  double sigma_b2 = 0.0;
  double q = 0.0;
  double c = 0.0;
  double lambda_g = 0.0;
  double lambda_l = 0.0;
  double lambda_m = 0.0;
  double residual_v0 = 0.0;
  double residual_g = 0.0;
  double residual_l = 0.0;
  double residual_m = 0.0;
  std::size_t dim_v0 = 0;
  std::size_t dim_g = 0;
  std::size_t dim_l = 0;
  std::size_t dim_m = 0;
  bool v0_ok = false;
  bool g_expanding = false;  // lambda_g > 1
  bool l_contracting = false;
  bool m_contracting = false;  // true when V_M is empty
  bool invariance_ok = false;  // every residual below residual_tol
  std::vector<std::string> failures;

  bool verified() const noexcept { return failures.empty(); }
};

/// Requires cfg.normalized. Check failures are reported, not thrown.
SpectralReport theorem3_verify(const MeanFieldConfig& cfg, const Bsb1Point& point, const SpectralOptions& opt = {});

struct Theorem1Options {
  std::size_t max_iter = 200;
  double h = 1e-5;         // Jacobian step
  double grad_step = 1e-4;  // step for the gradient in s
  double stationary_tol = 1e-7;
};

struct Theorem1Result {
  std::vector<double> s;
  double ratio = 1.0;  // |J(S C S)|_F / |J(C)|_F
  double initial_norm = 0.0;
  double final_norm = 0.0;
  std::size_t iterations = 0;
  bool stalled = false;  // line search gave up before the gradient vanished
};

/// |J(X)|_F with J the finite-difference Jacobian of V (S = I) at X.
double jacobian_norm_at(const MeanFieldConfig& cfg, const num::SymmetricMatrix& x, double h = 1e-5);

/// Projected gradient descent of |J(S C S)|_F over {sum s_i^2 = d, s_i > 0}
/// starting from s = 1, with backtracking.
Theorem1Result theorem1_search(const num::SymmetricMatrix& c, const MeanFieldConfig& cfg,
                               const Theorem1Options& opt = {});

/// <S C S, G> / <C, G> through explicit matrices.
double initial_g_ratio(const num::SymmetricMatrix& c, std::span<const double> s);

/// Signed length of the projection of x onto R G.
double g_component(const num::SymmetricMatrix& x);

struct GrowthRow {
  std::size_t step = 0;
  double g_component = 0.0;
  double total_deviation = 0.0;
};

struct GrowthTrace {
  std::vector<GrowthRow> rows;
  std::vector<double> per_step;  // g_{t+1} / g_t
  double growth = 0.0;           // first entry of per_step
  bool truncated = false;        // left the linear regime before `steps`
};

/// C_0 = C* + eps * dev / |dev|_F, then C_{t+1} = cov_map_step(cfg, C_t).
/// Stops early once |C_t - C*|_F exceeds linear_limit * q*.
GrowthTrace theorem2_growth(const MeanFieldConfig& cfg, const Bsb1Point& point,
                            const num::SymmetricMatrix& deviation, double eps, std::size_t steps,
                            double linear_limit = 1e-2);

}  // namespace drgcn::mf
