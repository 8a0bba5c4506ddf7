#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "drgcn/numkit/dense_matrix.hpp"

namespace drgcn::graph {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Undirected citation graph. Edges are stored once with i < j.
struct Graph {
  std::size_t n = 0;
  std::vector<Edge> edges;
  num::DenseMatrix features;  // n x d
  std::vector<std::uint16_t> labels;
  std::size_t num_classes = 0;
  std::vector<std::uint32_t> train;
  std::vector<std::uint32_t> val;
  std::vector<std::uint32_t> test;

  std::size_t feature_dim() const noexcept { return features.cols(); }
  friend bool operator==(const Graph&, const Graph&) = default;
};

/// Throws drgcn::Error with a code naming the first violated invariant.
void validate(const Graph& g);

std::vector<std::size_t> degrees(const Graph& g);

/// Copy of the features with every non-zero row scaled to sum 1.
num::DenseMatrix row_normalized(const num::DenseMatrix& features);

}  // namespace drgcn::graph
