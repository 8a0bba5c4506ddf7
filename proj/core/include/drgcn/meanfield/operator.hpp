#pragma once

#include <cstddef>
#include <functional>

#include "drgcn/numkit/dense_matrix.hpp"
#include "drgcn/numkit/rng.hpp"
#include "drgcn/numkit/symmetric_matrix.hpp"

namespace drgcn::mf {

using CovMap = std::function<num::SymmetricMatrix(const num::SymmetricMatrix&)>;

/// Linear map on H_d in the coordinates of num::to_coords: column k is the
/// image of the k-th basis element (E_ii or E_ij + E_ji).
struct SymmetricOperator {
  std::size_t d = 0;
  num::DenseMatrix matrix;

  num::SymmetricMatrix apply(const num::SymmetricMatrix& c) const;
  static SymmetricOperator identity(std::size_t d);
};

/// Frobenius norm of the operator with both sides measured in the matrix
/// Frobenius norm (orthonormal basis E_ii, (E_ij + E_ji)/sqrt 2).
double operator_frobenius_norm(const SymmetricOperator& op);

/// Central differences along every basis direction. With `richardson` the
/// h and h/2 estimates are combined as (4 D(h/2) - D(h)) / 3.
/// h must lie in [1e-6, 1e-4]; throws step-underflow when h vanishes against
/// the entries of `at`.
SymmetricOperator jacobian_fd(const CovMap& map, const num::SymmetricMatrix& at, double h = 1e-5,
                              bool richardson = false);

/// Largest relative gap between op(X) and a central difference of `map`
/// along `trials` random unit directions X.
double linearity_residual(const CovMap& map, const num::SymmetricMatrix& at, const SymmetricOperator& op,
                          num::RngStream& rng, std::size_t trials = 5, double h = 1e-5);

/// T(C)_ii = u c_ii, T(C)_ij = v (c_ii + c_jj) + w c_ij for i != j.
struct DosOperator {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  std::size_t d = 2;
};

num::SymmetricMatrix dos_apply(const DosOperator& op, const num::SymmetricMatrix& c);
SymmetricOperator dos_matrix(const DosOperator& op);

/// L_i: w - u at (i,i), -v on the rest of row and column i.
num::SymmetricMatrix dos_l_vector(const DosOperator& op, std::size_t i);

struct DosEigenReport {
  double m_residual = 0.0;  // max |T(M_ij) - w M_ij|
  double l_residual = 0.0;  // max |T(L_i) - u L_i|
  std::size_t m_count = 0;  // d(d-1)/2
  std::size_t l_count = 0;  // d
  std::size_t rank = 0;     // numerical rank of {M_ij} + {L_i}
  bool ok = false;
};

/// Throws degenerate-operator when w == u.
DosEigenReport dos_eigencheck(const DosOperator& op);

struct DosFit {
  DosOperator op;
  double residual = 0.0;  // max entry gap between the operator and the fitted DOS matrix
};

/// Reads u, v, w off the operator (averaging over entries) and reports how far
/// the operator is from that DOS operator.
DosFit dos_fit(const SymmetricOperator& op);

}  // namespace drgcn::mf
