#include "drgcn/meanfield/subspaces.hpp"

#include <cmath>

#include "drgcn/error.hpp"
#include "drgcn/numkit/linalg.hpp"

namespace drgcn::mf {
namespace {

// Diagonal D with diag(G D G) = diag(x); (G D G)_ii = (1 - 2/d) D_i + sum(D)/d^2.
// Summing gives sum(D) (1 - 2/d + 1/d) = sum(x), then each D_i follows.
std::vector<double> match_diagonal(const num::SymmetricMatrix& x) {
  const std::size_t d = x.dim();
  const double dd = static_cast<double>(d);
  double sum_x = 0.0;
  for (std::size_t i = 0; i < d; ++i) sum_x += x(i, i);
  const double sum_d = sum_x / (1.0 - 1.0 / dd);
  std::vector<double> diag(d);
  for (std::size_t i = 0; i < d; ++i) diag[i] = (x(i, i) - sum_d / (dd * dd)) / (1.0 - 2.0 / dd);
  return diag;
}

num::SymmetricMatrix diag_matrix(const std::vector<double>& v) {
  num::SymmetricMatrix m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m.set(i, i, v[i]);
  return m;
}

}  // namespace

Decomposition orthogonal_decompose(const num::SymmetricMatrix& c) {
  const std::size_t d = c.dim();
  if (d < 2) throw Error(ErrorCode::invalid_input, "decomposition needs d >= 2");
  const auto g = num::SymmetricMatrix::centering(d);
  const auto inside = num::center_project(c);
  Decomposition out{c - inside, num::SymmetricMatrix(d), num::SymmetricMatrix(d), num::SymmetricMatrix(d)};
  out.cg = (num::inner(inside, g) / num::inner(g, g)) * g;
  if (d >= 3) {
    // R G + V_L is everything of the form G D G; V_M is what is left.
    const auto gdg = num::center_project(diag_matrix(match_diagonal(inside)));
    out.cl = gdg - out.cg;
    out.cm = inside - gdg;
  }
  return out;
}

std::size_t subspace_dim(Subspace which, std::size_t d) noexcept {
  switch (which) {
    case Subspace::v0: return d;
    case Subspace::g: return 1;
    case Subspace::l: return d >= 3 ? d - 1 : 0;
    case Subspace::m: return d >= 3 ? d * (d - 3) / 2 : 0;
  }
  return 0;
}

num::SymmetricMatrix project(Subspace which, const num::SymmetricMatrix& c) {
  const auto parts = orthogonal_decompose(c);
  switch (which) {
    case Subspace::v0: return parts.c0;
    case Subspace::g: return parts.cg;
    case Subspace::l: return parts.cl;
    case Subspace::m: return parts.cm;
  }
  return parts.c0;
}

std::vector<num::SymmetricMatrix> subspace_basis(Subspace which, std::size_t d) {
  const std::size_t want = subspace_dim(which, d);
  std::vector<num::SymmetricMatrix> basis;
  if (want == 0) return basis;
  // Project the standard basis and keep what survives Gram-Schmidt (twice, for stability).
  for (std::size_t i = 0; i < d && basis.size() < want; ++i)
    for (std::size_t j = i; j < d && basis.size() < want; ++j) {
      auto v = project(which, num::SymmetricMatrix::basis(d, i, j));
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) v -= num::inner(v, b) * b;
      const double n = num::frobenius_norm(v);
      if (n > 1e-8) basis.push_back((1.0 / n) * v);
    }
  if (basis.size() != want) throw Error(ErrorCode::invalid_input, "subspace basis incomplete");
  return basis;
}

}  // namespace drgcn::mf
