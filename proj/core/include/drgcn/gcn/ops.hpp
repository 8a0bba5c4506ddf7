#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "drgcn/gcn/activation.hpp"
#include "drgcn/graphstore/adjacency.hpp"
#include "drgcn/numkit/dense_matrix.hpp"
#include "drgcn/numkit/rng.hpp"

namespace drgcn::gcn {

/// Row-vector parameters (biases, gamma, beta) are stored as 1 x k matrices.
struct DrParams {
  num::DenseMatrix w_g;  // g_dim x in
  num::DenseMatrix b_g;  // 1 x g_dim
  num::DenseMatrix w_s;  // in x g_dim
  num::DenseMatrix b_s;  // 1 x in

  std::size_t in_dim() const noexcept { return w_g.cols(); }
  std::size_t g_dim() const noexcept { return w_g.rows(); }
  std::size_t parameter_count() const noexcept {
    return w_g.size() + b_g.size() + w_s.size() + b_s.size();
  }
};

/// round(sqrt(in)), at least 1.
std::size_t dr_hidden_dim(std::size_t in);
DrParams make_dr_params(std::size_t in);

struct NormParams {
  num::DenseMatrix gamma;  // 1 x in
  num::DenseMatrix beta;   // 1 x in
};

struct LayerParams {
  num::DenseMatrix w;  // out x in
  num::DenseMatrix b;  // 1 x out
  std::optional<NormParams> norm;
  std::optional<DrParams> dr;
};

/// Intermediate values of the Dr block, kept for the backward pass.
struct DrTrace {
  std::vector<double> r;    // pooled input, length in
  std::vector<double> a_g;  // W_g r + b_g
  std::vector<double> g;    // ELU(a_g)
  std::vector<double> s;    // sigmoid(W_s g + b_s)
};

/// Weighted pooling sum_v w_v x_v over the rows of x.
std::vector<double> pool_rows(const num::DenseMatrix& x, std::span<const double> weights);

/// Excitation part of the Dr block applied to an already pooled vector.
DrTrace dr_from_pooled(std::vector<double> r, const DrParams& dr);

/// s = sigmoid(W_s ELU(W_g r + b_g) + b_s), r = sum_v w_v r_v.
std::vector<double> dr_vector(const num::DenseMatrix& r_in, const DrParams& dr,
                              std::span<const double> pool_weights);

/// Gradients of the Dr parameters given dL/ds; returns dL/dr (the pooled vector).
std::vector<double> dr_backward(const DrParams& dr, const DrTrace& t, std::span<const double> ds,
                                DrParams& grad);

/// Uniform 1/n weights.
std::vector<double> uniform_pool_weights(std::size_t n);

/// act(A^T R_in W^T + 1 b^T) in node-major storage.
num::DenseMatrix gcn_forward(const num::DenseMatrix& r_in, const graph::SparseAdjacency& adj,
                             const LayerParams& p, Activation act);

/// gcn_forward applied to S o R_in with s = dr_vector(R_in).
num::DenseMatrix drgcn_forward(const num::DenseMatrix& r_in, const graph::SparseAdjacency& adj,
                               const LayerParams& p, Activation act,
                               std::span<const double> pool_weights);

/// Multiplies column k of m by s[k].
num::DenseMatrix scale_columns(num::DenseMatrix m, std::span<const double> s);

struct NormTrace {
  num::DenseMatrix xhat;       // standardized input
  std::vector<double> inv_std; // per column (batch) or per row (layer)
};

/// Per-dimension standardization over nodes, then affine.
num::DenseMatrix batch_norm_forward(const num::DenseMatrix& x, const NormParams& p, double eps,
                                    NormTrace* trace = nullptr);
/// Per-node standardization over dimensions, then affine.
num::DenseMatrix layer_norm_forward(const num::DenseMatrix& x, const NormParams& p, double eps,
                                    NormTrace* trace = nullptr);
/// Returns dL/dx and accumulates dgamma, dbeta.
num::DenseMatrix batch_norm_backward(const num::DenseMatrix& dy, const NormParams& p,
                                     const NormTrace& t, NormParams& grad);
num::DenseMatrix layer_norm_backward(const num::DenseMatrix& dy, const NormParams& p,
                                     const NormTrace& t, NormParams& grad);

struct CrossEntropy {
  double loss = 0.0;
  num::DenseMatrix probs;  // row-stochastic, all nodes
};

/// Mean negative log-likelihood over `mask`.
CrossEntropy softmax_cross_entropy(const num::DenseMatrix& logits,
                                   std::span<const std::uint16_t> labels,
                                   std::span<const std::uint32_t> mask);

/// dL/dlogits of softmax_cross_entropy.
num::DenseMatrix softmax_cross_entropy_grad(const CrossEntropy& ce,
                                            std::span<const std::uint16_t> labels,
                                            std::span<const std::uint32_t> mask);

/// Argmax per row, ties to the lowest index.
std::vector<std::uint16_t> predict(const num::DenseMatrix& logits);

double accuracy(const num::DenseMatrix& logits, std::span<const std::uint16_t> labels,
                std::span<const std::uint32_t> index);

/// Glorot/Xavier uniform on [-sqrt(6/(fan_in+fan_out)), +...].
void glorot_uniform(num::DenseMatrix& w, num::RngStream& rng);

}  // namespace drgcn::gcn
