#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "drgcn/numkit/dense_matrix.hpp"

namespace drgcn::graph {

/// CSR copy of a mostly-zero dense matrix (bag-of-words features).
struct SparseRows {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  static SparseRows from_dense(const num::DenseMatrix& m);
  std::size_t nnz() const noexcept { return values.size(); }
};

/// Density below which the sparse layer path is used.
inline constexpr double kSparseDensityThreshold = 0.3;

}  // namespace drgcn::graph
