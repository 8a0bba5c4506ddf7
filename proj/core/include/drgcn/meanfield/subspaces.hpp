#pragma once

#include <cstddef>
#include <vector>

#include "drgcn/numkit/symmetric_matrix.hpp"

namespace drgcn::mf {

/// H_d splits Frobenius-orthogonally into
///   V_0 = {C : G C G = 0}                     (dim d)
///   R G                                        (dim 1)
///   V_L = {G D G : D diagonal, tr D = 0}      (dim d - 1)
///   V_M = {C : G C G = C, diag C = 0}         (dim d(d-3)/2)
/// For d < 3 the last two are empty.
struct Decomposition {
  num::SymmetricMatrix c0, cg, cl, cm;
};

Decomposition orthogonal_decompose(const num::SymmetricMatrix& c);

enum class Subspace { v0, g, l, m };

std::size_t subspace_dim(Subspace which, std::size_t d) noexcept;

/// Orthonormal basis (Frobenius) of one of the four pieces.
std::vector<num::SymmetricMatrix> subspace_basis(Subspace which, std::size_t d);

/// Orthogonal projection onto a piece.
num::SymmetricMatrix project(Subspace which, const num::SymmetricMatrix& c);

}  // namespace drgcn::mf
