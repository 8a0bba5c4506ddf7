#pragma once

#include <cstddef>

#include "drgcn/meanfield/config.hpp"
#include "drgcn/numkit/rng.hpp"
#include "drgcn/numkit/symmetric_matrix.hpp"

namespace drgcn::mf {

/// E[relu(h) relu(h)^T] for h ~ N(0, c), entrywise arc-cosine form.
/// Rows and columns with zero variance come out as zero.
num::SymmetricMatrix relu_kernel(const num::SymmetricMatrix& c);

/// V_phi(S, C) = relu_kernel(S C S). Ignores cfg.normalized.
num::SymmetricMatrix v_phi_closed(const MeanFieldConfig& cfg, const num::SymmetricMatrix& c);

/// Normalized map E[d_phi(S h) d_phi(S h)^T] with
/// d_phi(y) = relu(sqrt(d) G y / |G y|), evaluated deterministically: the
/// factor 1/|x|^2 is written as an integral of exp(-t |x|^2), which turns each
/// slice into a Gaussian expectation with covariance Sigma (I + 2t Sigma)^-1.
/// Throws degenerate-covariance when G S C S G = 0.
num::SymmetricMatrix v_dphi_quadrature(const MeanFieldConfig& cfg, const num::SymmetricMatrix& c);

struct VphiEstimate {
  num::SymmetricMatrix mean;
  num::SymmetricMatrix stderr_;  // per-entry standard error of the mean
  std::size_t samples = 0;
};

/// Monte Carlo estimate of V_phi (or of the normalized map when
/// cfg.normalized). Samples are split into fixed chunks drawn from
/// rng.substream(chunk) and reduced in chunk order, so the result does not
/// depend on `threads`.
VphiEstimate v_phi_mc(const MeanFieldConfig& cfg, const num::SymmetricMatrix& c, std::size_t n_samples,
                      const num::RngStream& rng, std::size_t threads = 1);

/// C -> V(I, S C S) + sigma_b2 I, closed form or quadrature depending on cfg.normalized.
num::SymmetricMatrix cov_map_step(const MeanFieldConfig& cfg, const num::SymmetricMatrix& c);

}  // namespace drgcn::mf
