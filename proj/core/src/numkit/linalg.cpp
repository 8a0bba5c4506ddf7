#include "drgcn/numkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "drgcn/error.hpp"

namespace drgcn::num {

EigenDecomposition sym_eigen(const SymmetricMatrix& m) {
  if (!m.all_finite()) throw Error(ErrorCode::invalid_input, "sym_eigen: non-finite entry");
  const std::size_t n = m.dim();
  DenseMatrix a = m.to_dense();
  DenseMatrix v = DenseMatrix::identity(n);

  const double scale = std::max(frobenius_norm(m), std::numeric_limits<double>::min());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that zeroes a(p,q).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  EigenDecomposition out;
  out.values.reserve(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values.push_back(a(order[k], order[k]));
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

SymmetricMatrix psd_sqrt(const SymmetricMatrix& c) {
  const auto eig = sym_eigen(c);
  const double biggest = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  const double floor = -1e-10 * std::max(1.0, biggest);
  const std::size_t d = c.dim();
  std::vector<double> root(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (eig.values[k] < floor) {
      throw Error(ErrorCode::invalid_covariance,
                  "covariance has eigenvalue " + std::to_string(eig.values[k]));
    }
    root[k] = std::sqrt(std::max(eig.values[k], 0.0));
  }
  SymmetricMatrix out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        acc += eig.vectors(i, k) * root[k] * eig.vectors(j, k);
      out.set(i, j, acc);
    }
  }
  return out;
}

DenseMatrix gaussian_sample(const SymmetricMatrix& c, std::size_t n, RngStream& rng) {
  const SymmetricMatrix root = psd_sqrt(c);
  const std::size_t d = c.dim();
  DenseMatrix out(n, d);
  std::vector<double> z(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (double& x : z) x = rng.normal();
    auto row = out.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += root(i, k) * z[k];
      row[i] = acc;
    }
  }
  return out;
}

namespace {

// In-place LU with partial pivoting; returns the permutation sign.
double lu_decompose(DenseMatrix& a, std::vector<std::size_t>& perm) {
  const std::size_t n = a.rows();
  perm.resize(n);
  std::iota(perm.begin(), perm.end(), 0);
  double sign = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
    if (a(pivot, k) == 0.0) throw Error(ErrorCode::invalid_input, "singular matrix");
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pivot, j));
      std::swap(perm[k], perm[pivot]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      a(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return sign;
}

}  // namespace

DenseMatrix solve(DenseMatrix a, DenseMatrix b) {
  if (a.rows() != a.cols() || a.rows() != b.rows())
    throw Error(ErrorCode::shape_mismatch, "solve: shapes");
  std::vector<std::size_t> perm;
  lu_decompose(a, perm);
  const std::size_t n = a.rows();
  DenseMatrix x(n, b.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) x(i, j) = b(perm[i], j);
  for (std::size_t col = 0; col < b.cols(); ++col) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < i; ++k) x(i, col) -= a(i, k) * x(k, col);
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t k = i + 1; k < n; ++k) x(i, col) -= a(i, k) * x(k, col);
      x(i, col) /= a(i, i);
    }
  }
  return x;
}

double log_abs_det(DenseMatrix a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::shape_mismatch, "log_abs_det: not square");
  std::vector<std::size_t> perm;
  lu_decompose(a, perm);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) acc += std::log(std::abs(a(i, i)));
  return acc;
}

}  // namespace drgcn::num
