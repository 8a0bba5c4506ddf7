#pragma once

#include <cstddef>
#include <vector>

#include "drgcn/numkit/dense_matrix.hpp"
#include "drgcn/numkit/rng.hpp"
#include "drgcn/numkit/symmetric_matrix.hpp"

namespace drgcn::num {

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column k pairs with values[k]
};

/// Cyclic Jacobi eigensolver.
EigenDecomposition sym_eigen(const SymmetricMatrix& m);

/// Principal square root of a PSD matrix. Eigenvalues below
/// -1e-10 * max(1, |lambda|_max) are rejected, the rest are clipped at 0.
SymmetricMatrix psd_sqrt(const SymmetricMatrix& c);

/// n i.i.d. rows drawn from N(0, c) through the symmetric square root.
DenseMatrix gaussian_sample(const SymmetricMatrix& c, std::size_t n, RngStream& rng);

/// Solves a x = b for square a by partial-pivot LU. Throws on singular a.
DenseMatrix solve(DenseMatrix a, DenseMatrix b);
double log_abs_det(DenseMatrix a);

}  // namespace drgcn::num
