#include "drgcn/gcn/model.hpp"

#include <cmath>
#include <string>

#include "drgcn/error.hpp"

namespace drgcn::gcn {

std::string_view to_string(NormMode m) noexcept {
  switch (m) {
    case NormMode::none: return "none";
    case NormMode::batch: return "batch";
    case NormMode::layer: return "layer";
    case NormMode::dr: return "dr";
    case NormMode::dr_layer: return "dr+layer";
  }
  return "?";
}

NormMode norm_mode_from_string(std::string_view name) {
  for (auto m : {NormMode::none, NormMode::batch, NormMode::layer, NormMode::dr, NormMode::dr_layer})
    if (name == to_string(m)) return m;
  throw Error(ErrorCode::invalid_input, "unknown normalization mode '" + std::string(name) + "'");
}

std::string_view to_string(ActivationOrder o) noexcept {
  return o == ActivationOrder::post ? "post" : "pre";
}

ActivationOrder activation_order_from_string(std::string_view name) {
  if (name == "post") return ActivationOrder::post;
  if (name == "pre") return ActivationOrder::pre;
  throw Error(ErrorCode::invalid_input, "unknown activation order '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  if (dims.size() < 2) throw Error(ErrorCode::invalid_input, "model needs at least one layer");
  for (std::size_t d : dims)
    if (d == 0) throw Error(ErrorCode::invalid_input, "layer width 0");
  if (activations.size() != num_layers() || norms.size() != num_layers())
    throw Error(ErrorCode::invalid_input, "need one activation and one norm mode per layer");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw Error(ErrorCode::invalid_input, "dropout must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw Error(ErrorCode::invalid_input, "weight decay must be >= 0");
  if (!(norm_eps > 0.0)) throw Error(ErrorCode::invalid_input, "norm epsilon must be > 0");
}

ModelSpec ModelSpec::two_layer(std::size_t in, std::size_t hidden, std::size_t classes,
                               NormMode norm, ActivationOrder order) {
  ModelSpec s;
  s.dims = {in, hidden, classes};
  s.norms = {norm, norm};
  s.order = order;
  if (order == ActivationOrder::post)
    s.activations = {Activation::relu, Activation::identity};
  else
    s.activations = {Activation::identity, Activation::relu};
  return s;
}

PreparedGraph prepare(const graph::Graph& g, const ModelSpec& spec) {
  spec.validate();
  if (g.feature_dim() != spec.dims.front())
    throw Error(ErrorCode::shape_mismatch, "feature width " + std::to_string(g.feature_dim()) +
                                               " != model input " + std::to_string(spec.dims.front()));
  if (g.num_classes != spec.dims.back())
    throw Error(ErrorCode::shape_mismatch, "class count differs from model output width");
  PreparedGraph pg;
  pg.graph = &g;
  pg.adj = graph::normalize_adjacency(g, spec.adjacency);
  pg.features = spec.row_normalize_features ? graph::row_normalized(g.features) : g.features;
  auto sparse = graph::SparseRows::from_dense(pg.features);
  if (static_cast<double>(sparse.nnz()) <
      graph::kSparseDensityThreshold * static_cast<double>(pg.features.size())) {
    pg.sparse_features = std::move(sparse);
  }
  if (spec.pool_exclude_test && g.test.size() < g.n) {
    pg.pool_weights.assign(g.n, 1.0 / static_cast<double>(g.n - g.test.size()));
    for (std::uint32_t v : g.test) pg.pool_weights[v] = 0.0;
  } else {
    pg.pool_weights = uniform_pool_weights(g.n);
  }
  pg.pooled_features = pool_rows(pg.features, pg.pool_weights);
  return pg;
}

Model::Model(ModelSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  spec_.validate();
  num::RngStream rng(seed, 1);
  for (std::size_t l = 0; l < spec_.num_layers(); ++l) {
    const std::size_t in = spec_.dims[l];
    const std::size_t out = spec_.dims[l + 1];
    LayerParams p;
    p.w = num::DenseMatrix(out, in);
    glorot_uniform(p.w, rng);
    p.b = num::DenseMatrix(1, out);
    const NormMode mode = spec_.norms[l];
    if (mode == NormMode::batch || mode == NormMode::layer || mode == NormMode::dr_layer)
      p.norm = NormParams{num::DenseMatrix(1, in, 1.0), num::DenseMatrix(1, in)};
    if (has_dr(mode)) {
      p.dr = make_dr_params(in);
      glorot_uniform(p.dr->w_g, rng);
      glorot_uniform(p.dr->w_s, rng);
    }
    layers_.push_back(std::move(p));
  }
}

Model::Model(ModelSpec spec, std::vector<LayerParams> layers)
    : spec_(std::move(spec)), layers_(std::move(layers)) {
  spec_.validate();
  check_shapes();
}

void Model::check_shapes() const {
  if (layers_.size() != spec_.num_layers())
    throw Error(ErrorCode::checkpoint_mismatch, "layer count differs from spec");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& p = layers_[l];
    const std::size_t in = spec_.dims[l];
    const std::size_t out = spec_.dims[l + 1];
    const NormMode mode = spec_.norms[l];
    const bool want_norm = mode == NormMode::batch || mode == NormMode::layer || mode == NormMode::dr_layer;
    bool ok = p.w.rows() == out && p.w.cols() == in && p.b.rows() == 1 && p.b.cols() == out &&
              p.norm.has_value() == want_norm && p.dr.has_value() == has_dr(mode);
    if (ok && p.norm) ok = p.norm->gamma.cols() == in && p.norm->beta.cols() == in;
    if (ok && p.dr) {
      const std::size_t g = dr_hidden_dim(in);
      ok = p.dr->w_g.rows() == g && p.dr->w_g.cols() == in && p.dr->b_g.cols() == g &&
           p.dr->w_s.rows() == in && p.dr->w_s.cols() == g && p.dr->b_s.cols() == in;
    }
    if (!ok) throw Error(ErrorCode::checkpoint_mismatch, "layer " + std::to_string(l) + " shapes differ from spec");
  }
}

std::vector<ParamRef> Model::parameters() {
  std::vector<ParamRef> out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    auto& p = layers_[l];
    const std::string pre = "layer" + std::to_string(l) + ".";
    out.push_back({pre + "w", &p.w, true});
    out.push_back({pre + "b", &p.b, false});
    if (p.norm) {
      out.push_back({pre + "gamma", &p.norm->gamma, false});
      out.push_back({pre + "beta", &p.norm->beta, false});
    }
    if (p.dr) {
      out.push_back({pre + "w_g", &p.dr->w_g, true});
      out.push_back({pre + "b_g", &p.dr->b_g, false});
      out.push_back({pre + "w_s", &p.dr->w_s, true});
      out.push_back({pre + "b_s", &p.dr->b_s, false});
    }
  }
  return out;
}

std::vector<const num::DenseMatrix*> Model::parameters() const {
  std::vector<const num::DenseMatrix*> out;
  for (auto& ref : const_cast<Model*>(this)->parameters()) out.push_back(ref.value);
  return out;
}

std::vector<std::string> Model::parameter_names() const {
  std::vector<std::string> out;
  for (auto& ref : const_cast<Model*>(this)->parameters()) out.push_back(ref.name);
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t total = 0;
  for (const auto* p : parameters()) total += p->size();
  return total;
}

bool Model::has_dr_layers() const noexcept {
  for (const auto& p : layers_)
    if (p.dr) return true;
  return false;
}

namespace {

bool uses_sparse_path(const PreparedGraph& pg, const ModelSpec& spec, std::size_t l) {
  return l == 0 && pg.sparse_features.has_value() &&
         (spec.norms[0] == NormMode::none || spec.norms[0] == NormMode::dr);
}

void forward_layer(const Model& m, const PreparedGraph& pg, std::size_t l, bool training,
                   num::RngStream* rng, const num::DenseMatrix& h, LayerCache& c) {
  const ModelSpec& spec = m.spec();
  const LayerParams& p = m.layers()[l];
  const Activation act = spec.activations[l];
  const bool post = spec.order == ActivationOrder::post;
  const NormMode mode = spec.norms[l];

  c = LayerCache{};
  c.input = &h;
  c.sparse = uses_sparse_path(pg, spec, l);

  if (mode == NormMode::batch) c.normed = batch_norm_forward(h, *p.norm, spec.norm_eps, &c.norm);
  if (mode == NormMode::layer || mode == NormMode::dr_layer)
    c.normed = layer_norm_forward(h, *p.norm, spec.norm_eps, &c.norm);

  if (p.dr) {
    auto pooled = (l == 0 && c.normed.empty()) ? pg.pooled_features : pool_rows(c.n(), pg.pool_weights);
    c.dr = dr_from_pooled(std::move(pooled), *p.dr);
  }
  const std::vector<double>* s = c.dr ? &c.dr->s : nullptr;

  const bool dropping = training && spec.dropout > 0.0;
  if (dropping && rng == nullptr) throw Error(ErrorCode::invalid_input, "training forward needs an rng");
  c.keep_scale = dropping ? 1.0 / (1.0 - spec.dropout) : 1.0;
  const auto threshold = static_cast<std::uint64_t>(std::ldexp(spec.dropout, 32));
  auto draw_keep = [&]() -> std::uint8_t {
    return !dropping || static_cast<std::uint64_t>(rng->next_u32()) >= threshold;
  };

  const std::size_t out = p.w.rows();
  num::DenseMatrix proj(h.rows(), out);

  if (c.sparse) {
    const graph::SparseRows& x = *pg.sparse_features;
    c.xt_sparse = x;
    c.keep.resize(x.nnz());
    if (!post) c.pre_act_sparse.resize(x.nnz());
    for (std::size_t idx = 0; idx < x.nnz(); ++idx) {
      const std::size_t k = x.indices[idx];
      double val = x.values[idx];
      if (!post) {
        const double a = s ? val * (*s)[k] : val;
        c.pre_act_sparse[idx] = a;
        val = activate(act, a);
      }
      c.keep[idx] = draw_keep();
      c.xt_sparse.values[idx] = c.keep[idx] ? val * c.keep_scale : 0.0;
    }
    // Rows of wt are columns of W, with s folded in for post order.
    const num::DenseMatrix wt = num::transpose((post && s) ? scale_columns(p.w, *s) : p.w);
    for (std::size_t v = 0; v < x.rows; ++v) {
      auto prow = proj.row(v);
      for (std::size_t idx = x.offsets[v]; idx < x.offsets[v + 1]; ++idx) {
        const double a = c.xt_sparse.values[idx];
        if (a == 0.0) continue;
        auto wrow = wt.row(x.indices[idx]);
        for (std::size_t o = 0; o < out; ++o) prow[o] += a * wrow[o];
      }
    }
  } else {
    const num::DenseMatrix& n = c.n();
    num::DenseMatrix r;
    if (post) {
      r = n;
    } else {
      c.pre_act = s ? scale_columns(n, *s) : n;
      r = activate(act, c.pre_act);
    }
    c.keep.resize(r.size());
    auto rd = r.data();
    for (std::size_t i = 0; i < rd.size(); ++i) {
      c.keep[i] = draw_keep();
      rd[i] = c.keep[i] ? rd[i] * c.keep_scale : 0.0;
    }
    c.xt = std::move(r);
    const num::DenseMatrix w = (post && s) ? scale_columns(p.w, *s) : p.w;
    proj = num::matmul(c.xt, num::transpose(w));
  }

  c.z = graph::multiply_transposed(pg.adj, proj);
  for (std::size_t v = 0; v < c.z.rows(); ++v) {
    auto row = c.z.row(v);
    for (std::size_t o = 0; o < out; ++o) row[o] += p.b(0, o);
  }
  c.output = post ? activate(act, c.z) : c.z;
}

}  // namespace

num::DenseMatrix forward(const Model& m, const PreparedGraph& pg, bool training,
                         num::RngStream* rng, ForwardCache* cache) {
  ForwardCache local;
  ForwardCache& fc = cache ? *cache : local;
  const std::size_t layers = m.spec().num_layers();
  fc.layers.assign(layers, LayerCache{});
  for (std::size_t l = 0; l < layers; ++l) {
    num::RngStream layer_rng = rng ? rng->substream(l) : num::RngStream(0);
    const num::DenseMatrix& h = l == 0 ? pg.features : fc.layers[l - 1].output;
    forward_layer(m, pg, l, training, rng ? &layer_rng : nullptr, h, fc.layers[l]);
  }
  return fc.layers.back().output;
}

std::vector<num::DenseMatrix> backward(const Model& m, const PreparedGraph& pg,
                                       const ForwardCache& cache, const num::DenseMatrix& dlogits) {
  const ModelSpec& spec = m.spec();
  const bool post = spec.order == ActivationOrder::post;
  const std::size_t layers = spec.num_layers();

  std::vector<std::size_t> base(layers);
  std::size_t count = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    base[l] = count;
    count += 2 + (m.layers()[l].norm ? 2 : 0) + (m.layers()[l].dr ? 4 : 0);
  }
  std::vector<num::DenseMatrix> grads;
  grads.reserve(count);
  for (const auto* p : m.parameters()) grads.emplace_back(p->rows(), p->cols());

  num::DenseMatrix dh = dlogits;
  for (std::size_t l = layers; l-- > 0;) {
    const LayerParams& p = m.layers()[l];
    const LayerCache& c = cache.layers[l];
    const Activation act = spec.activations[l];
    const std::size_t out = p.w.rows();
    const std::size_t in = p.w.cols();
    const std::vector<double>* s = c.dr ? &c.dr->s : nullptr;
    const bool need_dn = l > 0 || p.norm.has_value();

    num::DenseMatrix dz = std::move(dh);
    if (post && act != Activation::identity) {
      auto dzd = dz.data();
      auto zd = c.z.data();
      for (std::size_t i = 0; i < dzd.size(); ++i) dzd[i] *= activate_grad(act, zd[i]);
    }
    num::DenseMatrix& db = grads[base[l] + 1];
    for (std::size_t v = 0; v < dz.rows(); ++v)
      for (std::size_t o = 0; o < out; ++o) db(0, o) += dz(v, o);

    const num::DenseMatrix dp = graph::multiply(pg.adj, dz);

    // mt = Xt^T dP, in x out.
    num::DenseMatrix mt(in, out);
    if (c.sparse) {
      const auto& x = c.xt_sparse;
      for (std::size_t v = 0; v < x.rows; ++v) {
        auto dprow = dp.row(v);
        for (std::size_t idx = x.offsets[v]; idx < x.offsets[v + 1]; ++idx) {
          const double a = x.values[idx];
          if (a == 0.0) continue;
          auto mrow = mt.row(x.indices[idx]);
          for (std::size_t o = 0; o < out; ++o) mrow[o] += a * dprow[o];
        }
      }
    } else {
      mt = num::matmul_tn(c.xt, dp);
    }

    num::DenseMatrix& dw = grads[base[l]];
    std::vector<double> ds(in, 0.0);
    num::DenseMatrix dn;
    if (post) {
      for (std::size_t o = 0; o < out; ++o)
        for (std::size_t k = 0; k < in; ++k) dw(o, k) = mt(k, o) * (s ? (*s)[k] : 1.0);
      if (s)
        for (std::size_t k = 0; k < in; ++k)
          for (std::size_t o = 0; o < out; ++o) ds[k] += p.w(o, k) * mt(k, o);
      if (need_dn) {
        dn = num::matmul(dp, s ? scale_columns(p.w, *s) : p.w);
        auto dnd = dn.data();
        for (std::size_t i = 0; i < dnd.size(); ++i) dnd[i] = c.keep[i] ? dnd[i] * c.keep_scale : 0.0;
      }
    } else {
      for (std::size_t o = 0; o < out; ++o)
        for (std::size_t k = 0; k < in; ++k) dw(o, k) = mt(k, o);
      if (c.sparse) {
        if (s) {
          const auto& x = c.xt_sparse;
          const num::DenseMatrix wt = num::transpose(p.w);
          const auto& raw = *pg.sparse_features;
          for (std::size_t v = 0; v < x.rows; ++v) {
            auto dprow = dp.row(v);
            for (std::size_t idx = x.offsets[v]; idx < x.offsets[v + 1]; ++idx) {
              if (!c.keep[idx]) continue;
              const std::size_t k = x.indices[idx];
              auto wrow = wt.row(k);
              double dxt = 0.0;
              for (std::size_t o = 0; o < out; ++o) dxt += dprow[o] * wrow[o];
              const double da = dxt * c.keep_scale * activate_grad(act, c.pre_act_sparse[idx]);
              ds[k] += da * raw.values[idx];
            }
          }
        }
      } else if (s || need_dn) {
        num::DenseMatrix da = num::matmul(dp, p.w);
        auto dad = da.data();
        auto ad = c.pre_act.data();
        for (std::size_t i = 0; i < dad.size(); ++i)
          dad[i] = c.keep[i] ? dad[i] * c.keep_scale * activate_grad(act, ad[i]) : 0.0;
        if (s) {
          const num::DenseMatrix& n = c.n();
          for (std::size_t v = 0; v < da.rows(); ++v)
            for (std::size_t k = 0; k < in; ++k) ds[k] += da(v, k) * n(v, k);
        }
        if (need_dn) dn = s ? scale_columns(std::move(da), *s) : std::move(da);
      }
    }

    if (p.dr) {
      const std::size_t off = base[l] + 2 + (p.norm ? 2 : 0);
      DrParams gdr{std::move(grads[off]), std::move(grads[off + 1]), std::move(grads[off + 2]),
                   std::move(grads[off + 3])};
      const auto dpool = dr_backward(*p.dr, *c.dr, ds, gdr);
      grads[off] = std::move(gdr.w_g);
      grads[off + 1] = std::move(gdr.b_g);
      grads[off + 2] = std::move(gdr.w_s);
      grads[off + 3] = std::move(gdr.b_s);
      if (need_dn) {
        for (std::size_t v = 0; v < dn.rows(); ++v) {
          const double w = pg.pool_weights[v];
          if (w == 0.0) continue;
          auto row = dn.row(v);
          for (std::size_t k = 0; k < in; ++k) row[k] += w * dpool[k];
        }
      }
    }

    if (!need_dn) break;
    if (p.norm) {
      NormParams gn{std::move(grads[base[l] + 2]), std::move(grads[base[l] + 3])};
      const NormMode mode = spec.norms[l];
      dh = mode == NormMode::batch ? batch_norm_backward(dn, *p.norm, c.norm, gn)
                                   : layer_norm_backward(dn, *p.norm, c.norm, gn);
      grads[base[l] + 2] = std::move(gn.gamma);
      grads[base[l] + 3] = std::move(gn.beta);
    } else {
      dh = std::move(dn);
    }
  }
  return grads;
}

double weight_decay_term(const Model& m) {
  double acc = 0.0;
  for (const auto& p : m.layers()) {
    for (double x : p.w.data()) acc += x * x;
    if (p.dr) {
      for (double x : p.dr->w_g.data()) acc += x * x;
      for (double x : p.dr->w_s.data()) acc += x * x;
    }
  }
  return m.spec().weight_decay * acc;
}

StepResult loss_and_gradients(const Model& m, const PreparedGraph& pg,
                              std::span<const std::uint32_t> mask, bool training,
                              num::RngStream* rng) {
  ForwardCache cache;
  StepResult r;
  r.logits = forward(m, pg, training, rng, &cache);
  const auto ce = softmax_cross_entropy(r.logits, pg.graph->labels, mask);
  r.loss.data = ce.loss;
  r.loss.decay = weight_decay_term(m);
  r.grads = backward(m, pg, cache, softmax_cross_entropy_grad(ce, pg.graph->labels, mask));
  const double lambda2 = 2.0 * m.spec().weight_decay;
  auto params = const_cast<Model&>(m).parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].decayed || lambda2 == 0.0) continue;
    auto g = r.grads[i].data();
    auto w = params[i].value->data();
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += lambda2 * w[k];
  }
  return r;
}

std::vector<std::vector<double>> dr_scales(const Model& m, const PreparedGraph& pg) {
  ForwardCache cache;
  forward(m, pg, false, nullptr, &cache);
  std::vector<std::vector<double>> out;
  for (const auto& c : cache.layers) out.push_back(c.dr ? c.dr->s : std::vector<double>{});
  return out;
}

}  // namespace drgcn::gcn
