#include "drgcn/graphstore/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drgcn/error.hpp"

namespace drgcn::graph {

std::string_view to_string(AdjacencyVariant v) noexcept {
  switch (v) {
    case AdjacencyVariant::mean: return "mean";
    case AdjacencyVariant::symmetric: return "symmetric";
    case AdjacencyVariant::self_loop_symmetric: return "self-loop-symmetric";
    case AdjacencyVariant::renormalized: return "renormalized";
  }
  return "?";
}

AdjacencyVariant adjacency_variant_from_string(std::string_view name) {
  for (auto v : {AdjacencyVariant::mean, AdjacencyVariant::symmetric,
                 AdjacencyVariant::self_loop_symmetric, AdjacencyVariant::renormalized}) {
    if (name == to_string(v)) return v;
  }
  throw Error(ErrorCode::invalid_input, "unknown adjacency variant '" + std::string(name) + "'");
}

num::DenseMatrix SparseAdjacency::to_dense() const {
  num::DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) m(i, cols[k]) += values[k];
  return m;
}

SparseAdjacency normalize_adjacency(const Graph& g, AdjacencyVariant v) {
  const std::size_t n = g.n;
  const auto deg = degrees(g);
  const bool loops = v == AdjacencyVariant::self_loop_symmetric || v == AdjacencyVariant::renormalized;

  // Neighbour lists in ascending column order; the diagonal slot is placed in order too.
  std::vector<std::vector<std::uint32_t>> nbrs(n);
  for (const auto& [i, j] : g.edges) {
    nbrs[i].push_back(j);
    nbrs[j].push_back(i);
  }

  std::vector<double> scale(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    switch (v) {
      case AdjacencyVariant::mean: scale[i] = deg[i] > 0 ? 1.0 / static_cast<double>(deg[i]) : 0.0; break;
      case AdjacencyVariant::symmetric:
      case AdjacencyVariant::self_loop_symmetric:
        scale[i] = deg[i] > 0 ? 1.0 / std::sqrt(static_cast<double>(deg[i])) : 0.0;
        break;
      case AdjacencyVariant::renormalized: scale[i] = 1.0 / std::sqrt(static_cast<double>(deg[i] + 1)); break;
    }
  }

  SparseAdjacency a;
  a.n = n;
  a.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = nbrs[i];
    std::sort(row.begin(), row.end());
    bool diag_done = !loops;
    auto emit_diag = [&] {
      a.cols.push_back(static_cast<std::uint32_t>(i));
      a.values.push_back(v == AdjacencyVariant::renormalized ? scale[i] * scale[i] : 1.0);
      diag_done = true;
    };
    for (std::uint32_t j : row) {
      if (!diag_done && j > i) emit_diag();
      a.cols.push_back(j);
      // Entry (i, j) of A D^-1 is 1/deg(j).
      a.values.push_back(v == AdjacencyVariant::mean ? scale[j] : scale[i] * scale[j]);
    }
    if (!diag_done) emit_diag();
    a.offsets[i + 1] = a.cols.size();
  }
  return a;
}

num::DenseMatrix multiply(const SparseAdjacency& a, const num::DenseMatrix& x) {
  if (x.rows() != a.n) throw Error(ErrorCode::shape_mismatch, "adjacency multiply rows");
  num::DenseMatrix y(a.n, x.cols());
  for (std::size_t i = 0; i < a.n; ++i) {
    auto out = y.row(i);
    for (std::size_t k = a.offsets[i]; k < a.offsets[i + 1]; ++k) {
      const double w = a.values[k];
      auto in = x.row(a.cols[k]);
      for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * in[c];
    }
  }
  return y;
}

num::DenseMatrix multiply_transposed(const SparseAdjacency& a, const num::DenseMatrix& x) {
  if (x.rows() != a.n) throw Error(ErrorCode::shape_mismatch, "adjacency multiply rows");
  num::DenseMatrix y(a.n, x.cols());
  for (std::size_t i = 0; i < a.n; ++i) {
    auto in = x.row(i);
    for (std::size_t k = a.offsets[i]; k < a.offsets[i + 1]; ++k) {
      const double w = a.values[k];
      auto out = y.row(a.cols[k]);
      for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * in[c];
    }
  }
  return y;
}

}  // namespace drgcn::graph
