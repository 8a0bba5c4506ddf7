#include "drgcn/gcn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drgcn/error.hpp"

namespace drgcn::gcn {

std::size_t dr_hidden_dim(std::size_t in) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(in)))));
}

DrParams make_dr_params(std::size_t in) {
  const std::size_t g = dr_hidden_dim(in);
  return {num::DenseMatrix(g, in), num::DenseMatrix(1, g), num::DenseMatrix(in, g),
          num::DenseMatrix(1, in)};
}

std::vector<double> uniform_pool_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::vector<double> pool_rows(const num::DenseMatrix& x, std::span<const double> weights) {
  if (weights.size() != x.rows()) throw Error(ErrorCode::shape_mismatch, "pool weight count");
  std::vector<double> r(x.cols(), 0.0);
  for (std::size_t v = 0; v < x.rows(); ++v) {
    const double w = weights[v];
    if (w == 0.0) continue;
    auto row = x.row(v);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += w * row[k];
  }
  return r;
}

DrTrace dr_from_pooled(std::vector<double> r, const DrParams& dr) {
  if (r.size() != dr.in_dim()) throw Error(ErrorCode::shape_mismatch, "Dr input width");
  DrTrace t;
  t.r = std::move(r);
  const std::size_t g = dr.g_dim();
  const std::size_t in = dr.in_dim();
  t.a_g.assign(g, 0.0);
  t.g.assign(g, 0.0);
  for (std::size_t j = 0; j < g; ++j) {
    double acc = dr.b_g(0, j);
    auto wrow = dr.w_g.row(j);
    for (std::size_t k = 0; k < in; ++k) acc += wrow[k] * t.r[k];
    t.a_g[j] = acc;
    t.g[j] = activate(Activation::elu, acc);
  }
  t.s.assign(in, 0.0);
  for (std::size_t k = 0; k < in; ++k) {
    double acc = dr.b_s(0, k);
    auto wrow = dr.w_s.row(k);
    for (std::size_t j = 0; j < g; ++j) acc += wrow[j] * t.g[j];
    t.s[k] = sigmoid(acc);
  }
  return t;
}

std::vector<double> dr_vector(const num::DenseMatrix& r_in, const DrParams& dr,
                              std::span<const double> pool_weights) {
  return dr_from_pooled(pool_rows(r_in, pool_weights), dr).s;
}

std::vector<double> dr_backward(const DrParams& dr, const DrTrace& t, std::span<const double> ds,
                                DrParams& grad) {
  const std::size_t g = dr.g_dim();
  const std::size_t in = dr.in_dim();
  std::vector<double> dg(g, 0.0);
  for (std::size_t k = 0; k < in; ++k) {
    const double da = ds[k] * t.s[k] * (1.0 - t.s[k]);
    grad.b_s(0, k) += da;
    auto wrow = dr.w_s.row(k);
    auto grow = grad.w_s.row(k);
    for (std::size_t j = 0; j < g; ++j) {
      grow[j] += da * t.g[j];
      dg[j] += da * wrow[j];
    }
  }
  std::vector<double> dr_pooled(in, 0.0);
  for (std::size_t j = 0; j < g; ++j) {
    const double da = dg[j] * activate_grad(Activation::elu, t.a_g[j]);
    grad.b_g(0, j) += da;
    auto wrow = dr.w_g.row(j);
    auto grow = grad.w_g.row(j);
    for (std::size_t k = 0; k < in; ++k) {
      grow[k] += da * t.r[k];
      dr_pooled[k] += da * wrow[k];
    }
  }
  return dr_pooled;
}

num::DenseMatrix scale_columns(num::DenseMatrix m, std::span<const double> s) {
  if (s.size() != m.cols()) throw Error(ErrorCode::shape_mismatch, "scale vector length");
  for (std::size_t v = 0; v < m.rows(); ++v) {
    auto row = m.row(v);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] *= s[k];
  }
  return m;
}

num::DenseMatrix gcn_forward(const num::DenseMatrix& r_in, const graph::SparseAdjacency& adj,
                             const LayerParams& p, Activation act) {
  if (r_in.cols() != p.w.cols() || r_in.rows() != adj.n || p.b.cols() != p.w.rows()) {
    throw Error(ErrorCode::shape_mismatch, "gcn_forward shapes");
  }
  num::DenseMatrix z = graph::multiply_transposed(adj, num::matmul_nt(r_in, p.w));
  for (std::size_t v = 0; v < z.rows(); ++v) {
    auto row = z.row(v);
    for (std::size_t o = 0; o < row.size(); ++o) row[o] += p.b(0, o);
  }
  return activate(act, std::move(z));
}

num::DenseMatrix drgcn_forward(const num::DenseMatrix& r_in, const graph::SparseAdjacency& adj,
                               const LayerParams& p, Activation act,
                               std::span<const double> pool_weights) {
  if (!p.dr) throw Error(ErrorCode::invalid_input, "drgcn_forward needs Dr parameters");
  const auto s = dr_vector(r_in, *p.dr, pool_weights);
  return gcn_forward(scale_columns(r_in, s), adj, p, act);
}

namespace {

void check_norm_shapes(const num::DenseMatrix& x, const NormParams& p) {
  if (p.gamma.cols() != x.cols() || p.beta.cols() != x.cols())
    throw Error(ErrorCode::shape_mismatch, "norm parameter width");
}

}  // namespace

num::DenseMatrix batch_norm_forward(const num::DenseMatrix& x, const NormParams& p, double eps,
                                    NormTrace* trace) {
  check_norm_shapes(x, p);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t k = 0; k < d; ++k) mean[k] += x(v, k);
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t k = 0; k < d; ++k) var[k] += (x(v, k) - mean[k]) * (x(v, k) - mean[k]);
  std::vector<double> inv_std(d);
  for (std::size_t k = 0; k < d; ++k) inv_std[k] = 1.0 / std::sqrt(var[k] / static_cast<double>(n) + eps);

  num::DenseMatrix xhat(n, d), y(n, d);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t k = 0; k < d; ++k) {
      xhat(v, k) = (x(v, k) - mean[k]) * inv_std[k];
      y(v, k) = p.gamma(0, k) * xhat(v, k) + p.beta(0, k);
    }
  }
  if (trace) *trace = {std::move(xhat), std::move(inv_std)};
  return y;
}

num::DenseMatrix layer_norm_forward(const num::DenseMatrix& x, const NormParams& p, double eps,
                                    NormTrace* trace) {
  check_norm_shapes(x, p);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  num::DenseMatrix xhat(n, d), y(n, d);
  std::vector<double> inv_std(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto row = x.row(v);
    double mean = 0.0;
    for (double a : row) mean += a;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double a : row) var += (a - mean) * (a - mean);
    inv_std[v] = 1.0 / std::sqrt(var / static_cast<double>(d) + eps);
    for (std::size_t k = 0; k < d; ++k) {
      xhat(v, k) = (row[k] - mean) * inv_std[v];
      y(v, k) = p.gamma(0, k) * xhat(v, k) + p.beta(0, k);
    }
  }
  if (trace) *trace = {std::move(xhat), std::move(inv_std)};
  return y;
}

num::DenseMatrix batch_norm_backward(const num::DenseMatrix& dy, const NormParams& p,
                                     const NormTrace& t, NormParams& grad) {
  const std::size_t n = dy.rows();
  const std::size_t d = dy.cols();
  std::vector<double> sum_dxhat(d, 0.0), sum_dxhat_xhat(d, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t k = 0; k < d; ++k) {
      grad.gamma(0, k) += dy(v, k) * t.xhat(v, k);
      grad.beta(0, k) += dy(v, k);
      const double dxhat = dy(v, k) * p.gamma(0, k);
      sum_dxhat[k] += dxhat;
      sum_dxhat_xhat[k] += dxhat * t.xhat(v, k);
    }
  }
  num::DenseMatrix dx(n, d);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t k = 0; k < d; ++k) {
      const double dxhat = dy(v, k) * p.gamma(0, k);
      dx(v, k) = t.inv_std[k] * (dxhat - inv_n * sum_dxhat[k] - t.xhat(v, k) * inv_n * sum_dxhat_xhat[k]);
    }
  }
  return dx;
}

num::DenseMatrix layer_norm_backward(const num::DenseMatrix& dy, const NormParams& p,
                                     const NormTrace& t, NormParams& grad) {
  const std::size_t n = dy.rows();
  const std::size_t d = dy.cols();
  num::DenseMatrix dx(n, d);
  const double inv_d = 1.0 / static_cast<double>(d);
  for (std::size_t v = 0; v < n; ++v) {
    double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      grad.gamma(0, k) += dy(v, k) * t.xhat(v, k);
      grad.beta(0, k) += dy(v, k);
      const double dxhat = dy(v, k) * p.gamma(0, k);
      sum_dxhat += dxhat;
      sum_dxhat_xhat += dxhat * t.xhat(v, k);
    }
    for (std::size_t k = 0; k < d; ++k) {
      const double dxhat = dy(v, k) * p.gamma(0, k);
      dx(v, k) = t.inv_std[v] * (dxhat - inv_d * sum_dxhat - t.xhat(v, k) * inv_d * sum_dxhat_xhat);
    }
  }
  return dx;
}

CrossEntropy softmax_cross_entropy(const num::DenseMatrix& logits,
                                   std::span<const std::uint16_t> labels,
                                   std::span<const std::uint32_t> mask) {
  if (mask.empty()) throw Error(ErrorCode::empty_mask, "cross-entropy over an empty mask");
  if (labels.size() != logits.rows()) throw Error(ErrorCode::shape_mismatch, "label count");
  CrossEntropy ce;
  ce.probs = num::DenseMatrix(logits.rows(), logits.cols());
  std::vector<double> log_norm(logits.rows());
  for (std::size_t v = 0; v < logits.rows(); ++v) {
    auto z = logits.row(v);
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double a : z) sum += std::exp(a - top);
    log_norm[v] = top + std::log(sum);
    auto p = ce.probs.row(v);
    for (std::size_t c = 0; c < z.size(); ++c) p[c] = std::exp(z[c] - log_norm[v]);
  }
  double total = 0.0;
  for (std::uint32_t v : mask) {
    if (v >= logits.rows() || labels[v] >= logits.cols())
      throw Error(ErrorCode::index_out_of_range, "mask or label index");
    total += log_norm[v] - logits(v, labels[v]);
  }
  ce.loss = total / static_cast<double>(mask.size());
  return ce;
}

num::DenseMatrix softmax_cross_entropy_grad(const CrossEntropy& ce,
                                            std::span<const std::uint16_t> labels,
                                            std::span<const std::uint32_t> mask) {
  num::DenseMatrix g(ce.probs.rows(), ce.probs.cols());
  const double scale = 1.0 / static_cast<double>(mask.size());
  for (std::uint32_t v : mask) {
    auto out = g.row(v);
    auto p = ce.probs.row(v);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = scale * p[c];
    out[labels[v]] -= scale;
  }
  return g;
}

std::vector<std::uint16_t> predict(const num::DenseMatrix& logits) {
  std::vector<std::uint16_t> out(logits.rows());
  for (std::size_t v = 0; v < logits.rows(); ++v) {
    auto z = logits.row(v);
    out[v] = static_cast<std::uint16_t>(std::max_element(z.begin(), z.end()) - z.begin());
  }
  return out;
}

double accuracy(const num::DenseMatrix& logits, std::span<const std::uint16_t> labels,
                std::span<const std::uint32_t> index) {
  if (index.empty()) throw Error(ErrorCode::empty_mask, "accuracy over an empty index set");
  const auto pred = predict(logits);
  std::size_t hits = 0;
  for (std::uint32_t v : index) hits += pred[v] == labels[v] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(index.size());
}

void glorot_uniform(num::DenseMatrix& w, num::RngStream& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (double& x : w.data()) x = limit * (2.0 * rng.uniform() - 1.0);
}

}  // namespace drgcn::gcn
