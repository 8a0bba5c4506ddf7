#include "drgcn/graphstore/sparse.hpp"

namespace drgcn::graph {

SparseRows SparseRows::from_dense(const num::DenseMatrix& m) {
  SparseRows s;
  s.rows = m.rows();
  s.cols = m.cols();
  s.offsets.reserve(m.rows() + 1);
  s.offsets.push_back(0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] != 0.0) {
        s.indices.push_back(static_cast<std::uint32_t>(c));
        s.values.push_back(row[c]);
      }
    }
    s.offsets.push_back(s.values.size());
  }
  return s;
}

}  // namespace drgcn::graph
