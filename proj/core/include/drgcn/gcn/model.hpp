#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drgcn/gcn/activation.hpp"
#include "drgcn/gcn/ops.hpp"
#include "drgcn/graphstore/adjacency.hpp"
#include "drgcn/graphstore/graph.hpp"
#include "drgcn/graphstore/sparse.hpp"
#include "drgcn/numkit/rng.hpp"

namespace drgcn::gcn {

enum class NormMode { none, batch, layer, dr, dr_layer };
enum class ActivationOrder { post, pre };

std::string_view to_string(NormMode m) noexcept;
NormMode norm_mode_from_string(std::string_view name);
std::string_view to_string(ActivationOrder o) noexcept;
ActivationOrder activation_order_from_string(std::string_view name);

inline bool has_dr(NormMode m) noexcept { return m == NormMode::dr || m == NormMode::dr_layer; }

struct ModelSpec {
  std::vector<std::size_t> dims;  // d0, hidden..., classes
  std::vector<Activation> activations;
  std::vector<NormMode> norms;
  ActivationOrder order = ActivationOrder::post;
  graph::AdjacencyVariant adjacency = graph::AdjacencyVariant::renormalized;
  double dropout = 0.5;
  double weight_decay = 5e-4;
  double norm_eps = 1e-5;
  bool row_normalize_features = true;
  bool pool_exclude_test = false;

  std::size_t num_layers() const noexcept { return dims.empty() ? 0 : dims.size() - 1; }
  void validate() const;

  /// Two-layer model; `norm` is applied in every layer. In pre-activation
  /// order the activation acts on each layer's input, so the first layer
  /// gets identity and the logits are not activated.
  static ModelSpec two_layer(std::size_t in, std::size_t hidden, std::size_t classes,
                             NormMode norm = NormMode::none,
                             ActivationOrder order = ActivationOrder::post);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

std::string model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(std::string_view text);

/// Graph-side inputs that depend on the spec but not on the parameters.
struct PreparedGraph {
  const graph::Graph* graph = nullptr;
  graph::SparseAdjacency adj;
  num::DenseMatrix features;
  std::optional<graph::SparseRows> sparse_features;
  std::vector<double> pool_weights;
  std::vector<double> pooled_features;
};

PreparedGraph prepare(const graph::Graph& g, const ModelSpec& spec);

struct ParamRef {
  std::string name;
  num::DenseMatrix* value;
  bool decayed;  // counted in the weight-decay term
};

class Model {
 public:
  /// Glorot-uniform weights, zero biases, unit gamma.
  Model(ModelSpec spec, std::uint64_t seed);
  Model(ModelSpec spec, std::vector<LayerParams> layers);

  const ModelSpec& spec() const noexcept { return spec_; }
  std::vector<LayerParams>& layers() noexcept { return layers_; }
  const std::vector<LayerParams>& layers() const noexcept { return layers_; }

  /// Every parameter block in declaration order: per layer w, b, then
  /// gamma, beta when normalized, then w_g, b_g, w_s, b_s when Dr is on.
  std::vector<ParamRef> parameters();
  std::vector<const num::DenseMatrix*> parameters() const;
  std::vector<std::string> parameter_names() const;
  std::size_t parameter_count() const;
  bool has_dr_layers() const noexcept;

 private:
  void check_shapes() const;
  ModelSpec spec_;
  std::vector<LayerParams> layers_;
};

struct LayerCache {
  bool sparse = false;
  const num::DenseMatrix* input = nullptr;  // dense input H
  num::DenseMatrix normed;                  // N when a norm is active
  NormTrace norm;
  std::optional<DrTrace> dr;
  num::DenseMatrix pre_act;  // N o s before the activation (pre order, dense)
  num::DenseMatrix xt;       // dropped-out layer input (dense path)
  graph::SparseRows xt_sparse;
  std::vector<double> pre_act_sparse;  // pre order, sparse path
  std::vector<std::uint8_t> keep;
  double keep_scale = 1.0;
  num::DenseMatrix z;       // A^T P + 1 b^T
  num::DenseMatrix output;  // activated z in post order, z otherwise

  const num::DenseMatrix& n() const noexcept { return normed.empty() ? *input : normed; }
};

struct ForwardCache {
  std::vector<LayerCache> layers;
};

/// Full-graph forward pass; `rng` drives dropout and may be null when not training.
num::DenseMatrix forward(const Model& m, const PreparedGraph& pg, bool training,
                         num::RngStream* rng, ForwardCache* cache = nullptr);

/// Gradients of the data loss, aligned with Model::parameters().
std::vector<num::DenseMatrix> backward(const Model& m, const PreparedGraph& pg,
                                       const ForwardCache& cache, const num::DenseMatrix& dlogits);

/// lambda * sum ||W||^2 over w, w_g, w_s of every layer.
double weight_decay_term(const Model& m);

struct LossParts {
  double data = 0.0;
  double decay = 0.0;
  double total() const noexcept { return data + decay; }
};

struct StepResult {
  LossParts loss;
  std::vector<num::DenseMatrix> grads;
  num::DenseMatrix logits;
};

/// Forward, masked cross-entropy, weight decay and backward in one call.
StepResult loss_and_gradients(const Model& m, const PreparedGraph& pg,
                              std::span<const std::uint32_t> mask, bool training,
                              num::RngStream* rng);

/// Current s of every Dr layer (empty vector for layers without Dr), no dropout.
std::vector<std::vector<double>> dr_scales(const Model& m, const PreparedGraph& pg);

}  // namespace drgcn::gcn
