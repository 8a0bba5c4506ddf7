#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <utility>

#include "drgcn/error.hpp"
#include "drgcn/gcn/checkpoint.hpp"
#include "drgcn/gcn/model.hpp"
#include "drgcn/gcn/ops.hpp"
#include "drgcn/graphstore/adjacency.hpp"

using namespace drgcn;
using namespace drgcn::gcn;
using num::DenseMatrix;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, num::RngStream& rng, double scale = 1.0) {
  DenseMatrix m(r, c);
  for (double& x : m.data()) x = scale * rng.normal();
  return m;
}

graph::Graph random_graph(std::size_t n, std::size_t d, std::size_t classes, double p,
                          std::uint64_t seed, bool sparse_features = false) {
  num::RngStream rng(seed);
  graph::Graph g;
  g.n = n;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) g.edges.emplace_back(i, j);
  g.features = DenseMatrix(n, d);
  for (double& x : g.features.data()) {
    if (sparse_features)
      x = rng.uniform() < 0.05 ? 1.0 + rng.uniform() : 0.0;
    else
      x = rng.normal();
  }
  g.num_classes = classes;
  for (std::size_t v = 0; v < n; ++v) g.labels.push_back(static_cast<std::uint16_t>(rng.below(classes)));
  for (std::uint32_t v = 0; v < n; ++v) {
    if (v % 3 == 0) g.train.push_back(v);
    else if (v % 3 == 1) g.val.push_back(v);
    else g.test.push_back(v);
  }
  return g;
}

DenseMatrix dense_oracle(const DenseMatrix& r_in, const DenseMatrix& adj, const LayerParams& p,
                         Activation act) {
  const std::size_t n = r_in.rows();
  DenseMatrix proj(n, p.w.rows());
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t o = 0; o < p.w.rows(); ++o)
      for (std::size_t k = 0; k < p.w.cols(); ++k) proj(v, o) += r_in(v, k) * p.w(o, k);
  DenseMatrix z(n, p.w.rows());
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t o = 0; o < p.w.rows(); ++o) {
      double acc = p.b(0, o);
      for (std::size_t u = 0; u < n; ++u) acc += adj(u, v) * proj(u, o);
      z(v, o) = activate(act, acc);
    }
  return z;
}

LayerParams random_layer(std::size_t in, std::size_t out, num::RngStream& rng, bool dr) {
  LayerParams p;
  p.w = random_matrix(out, in, rng);
  p.b = random_matrix(1, out, rng);
  if (dr) {
    p.dr = make_dr_params(in);
    p.dr->w_g = random_matrix(p.dr->w_g.rows(), in, rng);
    p.dr->b_g = random_matrix(1, p.dr->g_dim(), rng);
    p.dr->w_s = random_matrix(in, p.dr->g_dim(), rng);
    p.dr->b_s = random_matrix(1, in, rng);
  }
  return p;
}

}  // namespace

TEST(GcnForward, IdentityCase) {
  graph::Graph g;
  g.n = 3;
  g.features = DenseMatrix(3, 2);
  g.labels = {0, 0, 0};
  g.num_classes = 1;
  // No edges: the self-loop variant reduces to I.
  const auto adj = graph::normalize_adjacency(g, graph::AdjacencyVariant::self_loop_symmetric);
  num::RngStream rng(1);
  const auto x = random_matrix(3, 2, rng);
  LayerParams p{DenseMatrix::identity(2), DenseMatrix(1, 2), std::nullopt, std::nullopt};
  EXPECT_EQ(gcn_forward(x, adj, p, Activation::identity), x);
}

TEST(GcnForward, PathSwapsNodes) {
  graph::Graph g;
  g.n = 2;
  g.edges = {{0, 1}};
  const auto adj = graph::normalize_adjacency(g, graph::AdjacencyVariant::mean);
  const DenseMatrix x(2, 3, {1, 2, 3, 4, 5, 6});
  LayerParams p{DenseMatrix::identity(3), DenseMatrix(1, 3), std::nullopt, std::nullopt};
  EXPECT_EQ(gcn_forward(x, adj, p, Activation::identity), DenseMatrix(2, 3, {4, 5, 6, 1, 2, 3}));
}

TEST(GcnForward, MatchesDenseOracle) {
  const auto g = random_graph(12, 5, 3, 0.3, 2);
  num::RngStream rng(3);
  for (auto variant : {graph::AdjacencyVariant::mean, graph::AdjacencyVariant::symmetric,
                       graph::AdjacencyVariant::renormalized}) {
    const auto adj = graph::normalize_adjacency(g, variant);
    const auto x = random_matrix(12, 5, rng);
    const auto p = random_layer(5, 4, rng, false);
    for (auto act : {Activation::relu, Activation::elu, Activation::identity}) {
      EXPECT_LE(num::max_abs_diff(gcn_forward(x, adj, p, act), dense_oracle(x, adj.to_dense(), p, act)), 1e-12);
    }
  }
}

TEST(DrVector, ZeroParametersGiveHalf) {
  num::RngStream rng(4);
  const auto x = random_matrix(6, 9, rng);
  const auto s = dr_vector(x, make_dr_params(9), uniform_pool_weights(6));
  ASSERT_EQ(s.size(), 9u);
  for (double v : s) EXPECT_EQ(v, 0.5);
  EXPECT_EQ(dr_hidden_dim(9), 3u);
  EXPECT_EQ(dr_hidden_dim(1433), 38u);
  EXPECT_EQ(dr_hidden_dim(64), 8u);
  EXPECT_EQ(dr_hidden_dim(500), 22u);
}

TEST(DrVector, ScalarCase) {
  DrParams dr{DenseMatrix(1, 1, 1.0), DenseMatrix(1, 1), DenseMatrix(1, 1, 1.0), DenseMatrix(1, 1)};
  const DenseMatrix x(2, 1, {1.0, -1.0});  // pooled r = 0
  EXPECT_EQ(dr_vector(x, dr, uniform_pool_weights(2))[0], 0.5);
}

TEST(DrVector, HandEvaluatedTwoDims) {
  // r = (2, 1); a_g = 0.5*2 - 2*1 + 0.25 = -0.75; g = e^-0.75 - 1
  DrParams dr{DenseMatrix(1, 2, {0.5, -2.0}), DenseMatrix(1, 1, 0.25), DenseMatrix(2, 1, {2.0, -4.0}),
              DenseMatrix(1, 2, {0.0, 0.5})};
  const DenseMatrix x(2, 2, {1, 2, 3, 0});
  const auto s = dr_vector(x, dr, uniform_pool_weights(2));
  EXPECT_NEAR(s[0], 0.25821499579066143, 1e-15);
  EXPECT_NEAR(s[1], 0.9315364472053591, 1e-15);
}

TEST(DrVector, PermutationInvariantUnderUniformPooling) {
  num::RngStream rng(5);
  const auto x = random_matrix(7, 4, rng);
  const auto dr = random_layer(4, 2, rng, true).dr.value();
  DenseMatrix y(7, 4);
  const std::size_t perm[] = {3, 6, 0, 2, 5, 1, 4};
  for (std::size_t v = 0; v < 7; ++v)
    for (std::size_t k = 0; k < 4; ++k) y(v, k) = x(perm[v], k);
  const auto a = dr_vector(x, dr, uniform_pool_weights(7));
  const auto b = dr_vector(y, dr, uniform_pool_weights(7));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(a[k], b[k], 1e-15);
    EXPECT_GT(a[k], 0.0);
    EXPECT_LT(a[k], 1.0);
  }
}

TEST(DrgcnForward, ZeroDrEqualsHalfInput) {
  const auto g = random_graph(10, 4, 2, 0.3, 6);
  const auto adj = graph::normalize_adjacency(g, graph::AdjacencyVariant::renormalized);
  num::RngStream rng(7);
  const auto x = random_matrix(10, 4, rng);
  auto p = random_layer(4, 3, rng, false);
  p.dr = make_dr_params(4);
  DenseMatrix half = x;
  for (double& v : half.data()) v *= 0.5;
  EXPECT_EQ(drgcn_forward(x, adj, p, Activation::relu, uniform_pool_weights(10)),
            gcn_forward(half, adj, p, Activation::relu));
}

TEST(DrgcnForward, SaturatedGateEqualsPlainLayer) {
  const auto g = random_graph(10, 4, 2, 0.3, 8);
  const auto adj = graph::normalize_adjacency(g, graph::AdjacencyVariant::renormalized);
  num::RngStream rng(9);
  const auto x = random_matrix(10, 4, rng);
  auto p = random_layer(4, 3, rng, true);
  p.dr->b_s = DenseMatrix(1, 4, 1e3);  // sigmoid rounds to exactly 1
  EXPECT_EQ(drgcn_forward(x, adj, p, Activation::relu, uniform_pool_weights(10)),
            gcn_forward(x, adj, p, Activation::relu));
}

TEST(DrgcnForward, MatchesDenseOracle) {
  const auto g = random_graph(15, 6, 3, 0.25, 10);
  const auto adj = graph::normalize_adjacency(g, graph::AdjacencyVariant::symmetric);
  num::RngStream rng(11);
  const auto x = random_matrix(15, 6, rng);
  const auto p = random_layer(6, 4, rng, true);
  // Oracle: pool, excite, scale, then the plain dense layer.
  std::vector<double> r(6, 0.0);
  for (std::size_t v = 0; v < 15; ++v)
    for (std::size_t k = 0; k < 6; ++k) r[k] += x(v, k) / 15.0;
  const std::size_t gd = p.dr->g_dim();
  std::vector<double> gv(gd);
  for (std::size_t j = 0; j < gd; ++j) {
    double a = p.dr->b_g(0, j);
    for (std::size_t k = 0; k < 6; ++k) a += p.dr->w_g(j, k) * r[k];
    gv[j] = a > 0 ? a : std::exp(a) - 1.0;
  }
  DenseMatrix xs = x;
  for (std::size_t k = 0; k < 6; ++k) {
    double a = p.dr->b_s(0, k);
    for (std::size_t j = 0; j < gd; ++j) a += p.dr->w_s(k, j) * gv[j];
    const double s = 1.0 / (1.0 + std::exp(-a));
    for (std::size_t v = 0; v < 15; ++v) xs(v, k) *= s;
  }
  EXPECT_LE(num::max_abs_diff(drgcn_forward(x, adj, p, Activation::elu, uniform_pool_weights(15)),
                              dense_oracle(xs, adj.to_dense(), p, Activation::elu)),
            1e-12);
}

TEST(Activation, ReluCommutesWithPositiveScaling) {
  num::RngStream rng(12);
  const auto h = random_matrix(20, 5, rng);
  std::vector<double> s(5);
  for (double& v : s) v = 0.1 + rng.uniform();
  EXPECT_LE(num::max_abs_diff(activate(Activation::relu, scale_columns(h, s)),
                              scale_columns(activate(Activation::relu, h), s)),
            0.0);
}

TEST(Norm, ConstantInputGivesZeros) {
  const DenseMatrix x(4, 3, 2.5);
  NormParams p{DenseMatrix(1, 3, 1.0), DenseMatrix(1, 3)};
  const auto b = batch_norm_forward(x, p, 1e-5);
  const auto l = layer_norm_forward(x, p, 1e-5);
  for (double v : b.data()) EXPECT_EQ(v, 0.0);
  for (double v : l.data()) EXPECT_EQ(v, 0.0);
}

TEST(Norm, TwoNodeBatchExample) {
  const DenseMatrix x(2, 2, {0, 0, 2, 2});
  NormParams p{DenseMatrix(1, 2, 1.0), DenseMatrix(1, 2)};
  const auto y = batch_norm_forward(x, p, 1e-14);
  EXPECT_LE(num::max_abs_diff(y, DenseMatrix(2, 2, {-1, -1, 1, 1})), 1e-12);
}

TEST(Norm, StandardizedMoments) {
  num::RngStream rng(13);
  const auto x = random_matrix(30, 6, rng, 3.0);
  NormParams p{DenseMatrix(1, 6, 1.0), DenseMatrix(1, 6)};
  const auto b = batch_norm_forward(x, p, 1e-12);
  for (std::size_t k = 0; k < 6; ++k) {
    double m = 0, v = 0;
    for (std::size_t r = 0; r < 30; ++r) m += b(r, k) / 30;
    for (std::size_t r = 0; r < 30; ++r) v += (b(r, k) - m) * (b(r, k) - m) / 30;
    EXPECT_NEAR(m, 0.0, 1e-10);
    EXPECT_NEAR(v, 1.0, 1e-10);
  }
  const auto l = layer_norm_forward(x, p, 1e-12);
  for (std::size_t r = 0; r < 30; ++r) {
    double m = 0, v = 0;
    for (std::size_t k = 0; k < 6; ++k) m += l(r, k) / 6;
    for (std::size_t k = 0; k < 6; ++k) v += (l(r, k) - m) * (l(r, k) - m) / 6;
    EXPECT_NEAR(m, 0.0, 1e-10);
    EXPECT_NEAR(v, 1.0, 1e-10);
  }
}

TEST(CrossEntropy, UniformLogits) {
  const DenseMatrix z(3, 5, 0.7);
  const std::vector<std::uint16_t> y = {0, 3, 4};
  const std::vector<std::uint32_t> mask = {0, 2};
  EXPECT_NEAR(softmax_cross_entropy(z, y, mask).loss, std::log(5.0), 1e-15);
}

TEST(CrossEntropy, ConfidentLogitsApproachZero) {
  const DenseMatrix z(2, 3, {1e3, 0, 0, 0, 0, 1e3});
  const std::vector<std::uint16_t> y = {0, 2};
  const std::vector<std::uint32_t> mask = {0, 1};
  const auto ce = softmax_cross_entropy(z, y, mask);
  EXPECT_LT(ce.loss, 1e-300);
  for (std::size_t r = 0; r < 2; ++r) {
    double sum = 0;
    for (std::size_t c = 0; c < 3; ++c) sum += ce.probs(r, c);
    EXPECT_NEAR(sum, 1.0, 1e-15);
  }
}

TEST(CrossEntropy, SmallInstance) {
  const DenseMatrix z(2, 3, {1, 2, 0.5, 0, 0, 3});
  const std::vector<std::uint16_t> y = {1, 0};
  const std::vector<std::uint32_t> mask = {0, 1};
  EXPECT_NEAR(softmax_cross_entropy(z, y, mask).loss, 1.779645870264453, 1e-14);
}

TEST(CrossEntropy, EmptyMaskIsAnError) {
  const DenseMatrix z(2, 2);
  const std::vector<std::uint16_t> y = {0, 1};
  try {
    softmax_cross_entropy(z, y, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_mask);
  }
}

TEST(Accuracy, HandCases) {
  const DenseMatrix z(4, 2, {1, 0, 0, 1, 1, 0, 0.5, 0.5});
  const std::vector<std::uint16_t> y = {0, 1, 1, 0};
  const std::vector<std::uint32_t> all = {0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(accuracy(z, y, all), 0.75);  // the tie on node 3 goes to class 0
  EXPECT_DOUBLE_EQ(accuracy(z, y, std::vector<std::uint32_t>{0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(z, y, std::vector<std::uint32_t>{2}), 0.0);
  EXPECT_THROW(accuracy(z, y, {}), Error);
}

TEST(Model, DrParameterOverhead) {
  for (std::size_t in : {16u, 1433u, 500u}) {
    const Model plain(ModelSpec::two_layer(in, 64, 7), 1);
    const Model dr(ModelSpec::two_layer(in, 64, 7, NormMode::dr), 1);
    const std::size_t g1 = dr_hidden_dim(in), g2 = dr_hidden_dim(64);
    EXPECT_EQ(dr.parameter_count() - plain.parameter_count(),
              (in * g1 + g1 + g1 * in + in) + (64 * g2 + g2 + g2 * 64 + 64));
  }
}

TEST(Model, PlainModelHasNoDrParameters) {
  Model m(ModelSpec::two_layer(8, 4, 3), 2);
  EXPECT_FALSE(m.has_dr_layers());
  for (const auto& name : m.parameter_names()) EXPECT_EQ(name.find("_g"), std::string::npos);
  EXPECT_EQ(m.parameters().size(), 4u);
}

TEST(Model, SeedDeterminesInitialization) {
  const auto spec = ModelSpec::two_layer(8, 4, 3, NormMode::dr);
  Model a(spec, 5), b(spec, 5), c(spec, 6);
  EXPECT_EQ(a.layers()[0].w, b.layers()[0].w);
  EXPECT_EQ(a.layers()[1].dr->w_s, b.layers()[1].dr->w_s);
  EXPECT_NE(a.layers()[0].w, c.layers()[0].w);
}

TEST(Model, SpecJsonRoundTrip) {
  auto spec = ModelSpec::two_layer(8, 4, 3, NormMode::dr_layer, ActivationOrder::pre);
  spec.pool_exclude_test = true;
  spec.adjacency = graph::AdjacencyVariant::mean;
  EXPECT_EQ(model_spec_from_json(model_spec_to_json(spec)), spec);
}

TEST(Model, LossDecomposesIntoDataAndDecay) {
  const auto g = random_graph(20, 6, 3, 0.2, 14);
  auto spec = ModelSpec::two_layer(6, 5, 3, NormMode::dr);
  spec.dropout = 0.0;
  spec.weight_decay = 0.01;
  const auto pg = prepare(g, spec);
  Model m(spec, 3);
  const auto r = loss_and_gradients(m, pg, g.train, false, nullptr);
  double sq = 0;
  for (const auto& l : m.layers()) {
    for (double x : l.w.data()) sq += x * x;
    for (double x : l.dr->w_g.data()) sq += x * x;
    for (double x : l.dr->w_s.data()) sq += x * x;
  }
  EXPECT_NEAR(r.loss.decay, 0.01 * sq, 1e-15);
  EXPECT_NEAR(r.loss.data, softmax_cross_entropy(forward(m, pg, false, nullptr), g.labels, g.train).loss, 1e-15);
}

namespace {

struct GradCase {
  NormMode norm;
  ActivationOrder order;
  bool sparse_features;
  double dropout;
};

double max_relative_gradient_error(const GradCase& gc, std::uint64_t seed) {
  const auto g = random_graph(20, 7, 3, 0.2, seed, gc.sparse_features);
  auto spec = ModelSpec::two_layer(7, 5, 3, gc.norm, gc.order);
  spec.dropout = gc.dropout;
  spec.weight_decay = 1e-3;
  spec.row_normalize_features = false;
  const auto pg = prepare(g, spec);
  EXPECT_EQ(pg.sparse_features.has_value(), gc.sparse_features);
  Model m(spec, seed);
  // Move gamma/beta and biases away from their trivial initial values.
  num::RngStream rng(seed + 100);
  for (auto& ref : m.parameters())
    for (double& x : ref.value->data()) x += 0.3 * rng.normal();

  const num::RngStream dropout_rng(seed + 200);
  auto loss_at = [&]() {
    num::RngStream r = dropout_rng;
    ForwardCache cache;
    const auto logits = forward(m, pg, true, &r, &cache);
    return softmax_cross_entropy(logits, g.labels, g.train).loss + weight_decay_term(m);
  };
  num::RngStream r = dropout_rng;
  const auto analytic = loss_and_gradients(m, pg, g.train, true, &r).grads;

  double worst = 0.0;
  auto params = m.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto data = params[i].value->data();
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double orig = data[k];
      const double h = 1e-5;
      data[k] = orig + h;
      const double up = loss_at();
      data[k] = orig - h;
      const double down = loss_at();
      data[k] = orig;
      const double numeric = (up - down) / (2 * h);
      const double a = analytic[i].data()[k];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      if (rel > worst) worst = rel;
      EXPECT_LT(rel, 1e-4) << params[i].name << "[" << k << "] analytic " << a << " numeric " << numeric;
    }
  }
  return worst;
}

}  // namespace

class GradientCheck : public ::testing::TestWithParam<GradCase> {};

TEST_P(GradientCheck, AnalyticMatchesCentralDifferences) {
  EXPECT_LT(max_relative_gradient_error(GetParam(), 21), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(
    Modes, GradientCheck,
    ::testing::Values(GradCase{NormMode::none, ActivationOrder::post, false, 0.0},
                      GradCase{NormMode::dr, ActivationOrder::post, false, 0.0},
                      GradCase{NormMode::dr, ActivationOrder::post, false, 0.5},
                      GradCase{NormMode::dr, ActivationOrder::post, true, 0.5},
                      GradCase{NormMode::batch, ActivationOrder::post, false, 0.3},
                      GradCase{NormMode::layer, ActivationOrder::post, false, 0.3},
                      GradCase{NormMode::dr_layer, ActivationOrder::post, false, 0.3},
                      GradCase{NormMode::dr, ActivationOrder::pre, false, 0.3},
                      GradCase{NormMode::dr, ActivationOrder::pre, true, 0.3},
                      GradCase{NormMode::dr_layer, ActivationOrder::pre, false, 0.0},
                      GradCase{NormMode::none, ActivationOrder::pre, true, 0.0}));

TEST(Backward, SparseAndDensePathsAgree) {
  auto g = random_graph(20, 7, 3, 0.2, 30, true);
  auto spec = ModelSpec::two_layer(7, 5, 3, NormMode::dr);
  spec.dropout = 0.0;
  const auto sparse_pg = prepare(g, spec);
  ASSERT_TRUE(sparse_pg.sparse_features.has_value());
  auto dense_pg = sparse_pg;
  dense_pg.sparse_features.reset();
  Model m(spec, 4);
  const auto a = loss_and_gradients(m, sparse_pg, g.train, false, nullptr);
  const auto b = loss_and_gradients(m, dense_pg, g.train, false, nullptr);
  EXPECT_NEAR(a.loss.total(), b.loss.total(), 1e-14);
  for (std::size_t i = 0; i < a.grads.size(); ++i) EXPECT_LE(num::max_abs_diff(a.grads[i], b.grads[i]), 1e-14);
}

TEST(Backward, GradientVanishesAtRegularizedOptimum) {
  // Single linear layer: cross-entropy plus L2 is strictly convex, so plain
  // gradient descent reaches the unique stationary point.
  graph::Graph g;
  g.n = 6;
  g.features = DenseMatrix(6, 2, {1, 0, 0.9, 0.1, 0.8, 0, 0, 1, 0.1, 0.9, 0, 0.8});
  g.labels = {0, 0, 0, 1, 1, 1};
  g.num_classes = 2;
  g.train = {0, 1, 2, 3, 4, 5};
  ModelSpec spec;
  spec.dims = {2, 2};
  spec.activations = {Activation::identity};
  spec.norms = {NormMode::none};
  spec.dropout = 0.0;
  spec.weight_decay = 0.05;
  spec.row_normalize_features = false;
  spec.adjacency = graph::AdjacencyVariant::self_loop_symmetric;  // I for an edgeless graph
  const auto pg = prepare(g, spec);
  Model m(spec, 1);
  double norm = 1.0;
  for (int it = 0; it < 20000 && norm > 1e-9; ++it) {
    const auto r = loss_and_gradients(m, pg, g.train, false, nullptr);
    norm = 0.0;
    auto params = m.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      for (std::size_t k = 0; k < r.grads[i].size(); ++k) {
        norm += r.grads[i].data()[k] * r.grads[i].data()[k];
        params[i].value->data()[k] -= 2.0 * r.grads[i].data()[k];
      }
    }
    norm = std::sqrt(norm);
  }
  EXPECT_LT(norm, 1e-8);
}

TEST(Checkpoint, RoundTripAndMismatch) {
  const auto dir = std::filesystem::temp_directory_path() / "drgcn_ckpt_test";
  std::filesystem::create_directories(dir);
  Model m(ModelSpec::two_layer(9, 4, 3, NormMode::dr_layer), 8);
  save_checkpoint(m, dir / "m.ckpt");
  const Model back = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(back.spec(), m.spec());
  const auto a = std::as_const(m).parameters();
  const auto b = back.parameters();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);

  // Truncate the last block.
  const auto size = std::filesystem::file_size(dir / "m.ckpt");
  std::filesystem::resize_file(dir / "m.ckpt", size - 8);
  try {
    load_checkpoint(dir / "m.ckpt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::checkpoint_mismatch);
  }
  std::filesystem::remove_all(dir);
}

TEST(Forward, DeterministicGivenSeed) {
  const auto g = random_graph(20, 7, 3, 0.2, 40, true);
  const auto spec = ModelSpec::two_layer(7, 5, 3, NormMode::dr);
  const auto pg = prepare(g, spec);
  Model m(spec, 9);
  num::RngStream a(3), b(3);
  EXPECT_EQ(forward(m, pg, true, &a), forward(m, pg, true, &b));
}
