#pragma once

#include <span>

#include "drgcn/numkit/dense_matrix.hpp"
#include "drgcn/numkit/symmetric_matrix.hpp"

namespace drgcn::mf {

/// <S C S, G> = sum_i c_ii s_i^2 - (1/d) sum_ij c_ij s_i s_j.
double g_inner(const num::SymmetricMatrix& c, std::span<const double> s);

/// K = g_inner(C, s) / (g_inner(C, 1) * sum_i s_i^2 / d).
/// Throws degenerate-covariance when the denominator vanishes (C in span{1 1^T}).
double k_measure(const num::SymmetricMatrix& c, std::span<const double> s);

/// K of the empirical covariance of the rows of x (centered, 1/n), computed
/// without forming the d x d matrix. Equals k_measure(cov(x), s).
double k_measure_from_samples(const num::DenseMatrix& x, std::span<const double> s);

/// Centered empirical covariance (1/n) of the rows of x.
num::SymmetricMatrix empirical_covariance(const num::DenseMatrix& x);

}  // namespace drgcn::mf
