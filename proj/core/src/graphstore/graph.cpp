#include "drgcn/graphstore/graph.hpp"

#include <string>

#include "drgcn/error.hpp"

namespace drgcn::graph {
namespace {

void check_split(const std::vector<std::uint32_t>& idx, std::size_t n, const char* name,
                 std::vector<char>& owner, char tag) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= n) {
      throw Error(ErrorCode::index_out_of_range,
                  std::string(name) + " index " + std::to_string(idx[k]) + " >= n");
    }
    if (k > 0 && idx[k] <= idx[k - 1]) {
      throw Error(ErrorCode::unsorted, std::string(name) + " indices not strictly ascending");
    }
    if (owner[idx[k]] != 0) {
      throw Error(ErrorCode::overlapping_splits,
                  std::string(name) + " shares node " + std::to_string(idx[k]));
    }
    owner[idx[k]] = tag;
  }
}

}  // namespace

void validate(const Graph& g) {
  if (g.features.rows() != g.n) {
    throw Error(ErrorCode::size_mismatch, "feature rows " + std::to_string(g.features.rows()) +
                                              " != n " + std::to_string(g.n));
  }
  if (!g.features.all_finite()) throw Error(ErrorCode::invalid_input, "non-finite feature");
  if (g.labels.size() != g.n) {
    throw Error(ErrorCode::size_mismatch, "label count " + std::to_string(g.labels.size()));
  }
  for (std::size_t v = 0; v < g.n; ++v) {
    if (g.labels[v] >= g.num_classes) {
      throw Error(ErrorCode::index_out_of_range,
                  "label " + std::to_string(g.labels[v]) + " at node " + std::to_string(v));
    }
  }
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const auto [i, j] = g.edges[k];
    if (i >= g.n || j >= g.n) {
      throw Error(ErrorCode::index_out_of_range, "edge " + std::to_string(k) + " endpoint >= n");
    }
    if (i == j) throw Error(ErrorCode::self_loop, "edge " + std::to_string(k) + " is a self-loop");
    if (i > j) throw Error(ErrorCode::unsorted, "edge " + std::to_string(k) + " has i > j");
    if (k > 0) {
      if (g.edges[k] == g.edges[k - 1]) {
        throw Error(ErrorCode::duplicate_edge, "edge " + std::to_string(k) + " repeated");
      }
      if (g.edges[k] < g.edges[k - 1]) {
        throw Error(ErrorCode::unsorted, "edges not sorted at " + std::to_string(k));
      }
    }
  }
  std::vector<char> owner(g.n, 0);
  check_split(g.train, g.n, "train", owner, 1);
  check_split(g.val, g.n, "val", owner, 2);
  check_split(g.test, g.n, "test", owner, 3);
}

std::vector<std::size_t> degrees(const Graph& g) {
  std::vector<std::size_t> deg(g.n, 0);
  for (const auto& [i, j] : g.edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

num::DenseMatrix row_normalized(const num::DenseMatrix& features) {
  num::DenseMatrix out = features;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    double sum = 0.0;
    for (double x : row) sum += x;
    if (sum == 0.0) continue;
    for (double& x : row) x /= sum;
  }
  return out;
}

}  // namespace drgcn::graph
