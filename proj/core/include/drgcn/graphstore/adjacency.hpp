#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "drgcn/graphstore/graph.hpp"
#include "drgcn/numkit/dense_matrix.hpp"

namespace drgcn::graph {

enum class AdjacencyVariant {
  mean,                 // A D^-1
  symmetric,            // D^-1/2 A D^-1/2
  self_loop_symmetric,  // I + D^-1/2 A D^-1/2
  renormalized,         // (D+I)^-1/2 (A+I) (D+I)^-1/2
};

std::string_view to_string(AdjacencyVariant v) noexcept;
AdjacencyVariant adjacency_variant_from_string(std::string_view name);

/// CSR matrix with both directions of every edge materialized.
struct SparseAdjacency {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;  // n + 1
  std::vector<std::uint32_t> cols;
  std::vector<double> values;

  num::DenseMatrix to_dense() const;
};

SparseAdjacency normalize_adjacency(const Graph& g, AdjacencyVariant v);

/// A * x for node-major x (n x k).
num::DenseMatrix multiply(const SparseAdjacency& a, const num::DenseMatrix& x);
/// A^T * x for node-major x (n x k).
num::DenseMatrix multiply_transposed(const SparseAdjacency& a, const num::DenseMatrix& x);

}  // namespace drgcn::graph
