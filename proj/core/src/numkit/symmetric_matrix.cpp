#include "drgcn/numkit/symmetric_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drgcn/error.hpp"

namespace drgcn::num {

SymmetricMatrix::SymmetricMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
  if (dim == 0) throw Error(ErrorCode::invalid_input, "symmetric matrix needs dim >= 1");
}

SymmetricMatrix SymmetricMatrix::from_dense(const DenseMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::shape_mismatch, "symmetric matrix must be square");
  SymmetricMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol) {
        throw Error(ErrorCode::invalid_input, "matrix not symmetric at (" + std::to_string(i) +
                                                  "," + std::to_string(j) + ")");
      }
      s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    }
  }
  return s;
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t dim) {
  SymmetricMatrix s(dim);
  for (std::size_t i = 0; i < dim; ++i) s.set(i, i, 1.0);
  return s;
}

SymmetricMatrix SymmetricMatrix::ones(std::size_t dim) {
  SymmetricMatrix s(dim);
  std::fill(s.data_.begin(), s.data_.end(), 1.0);
  return s;
}

SymmetricMatrix SymmetricMatrix::centering(std::size_t dim) {
  SymmetricMatrix s(dim);
  const double off = -1.0 / static_cast<double>(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i; j < dim; ++j) s.set(i, j, (i == j ? 1.0 : 0.0) + off);
  return s;
}

SymmetricMatrix SymmetricMatrix::basis(std::size_t dim, std::size_t i, std::size_t j) {
  SymmetricMatrix s(dim);
  s.set(i, j, 1.0);
  return s;
}

DenseMatrix SymmetricMatrix::to_dense() const { return DenseMatrix(dim_, dim_, data_); }

bool SymmetricMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& o) {
  if (o.dim_ != dim_) throw Error(ErrorCode::shape_mismatch, "symmetric matrix dims differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator-=(const SymmetricMatrix& o) {
  if (o.dim_ != dim_) throw Error(ErrorCode::shape_mismatch, "symmetric matrix dims differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator*=(double a) {
  for (double& x : data_) x *= a;
  return *this;
}

double inner(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::shape_mismatch, "inner product dims differ");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) acc += a.data()[k] * b.data()[k];
  return acc;
}

double frobenius_norm(const SymmetricMatrix& m) { return std::sqrt(inner(m, m)); }

SymmetricMatrix reweighted_covariance(const SymmetricMatrix& c, std::span<const double> s) {
  if (s.size() != c.dim()) throw Error(ErrorCode::shape_mismatch, "scaling vector length");
  SymmetricMatrix out(c.dim());
  for (std::size_t i = 0; i < c.dim(); ++i)
    for (std::size_t j = i; j < c.dim(); ++j) out.set(i, j, s[i] * c(i, j) * s[j]);
  return out;
}

SymmetricMatrix center_project(const SymmetricMatrix& c) {
  const std::size_t d = c.dim();
  const double inv_d = 1.0 / static_cast<double>(d);
  std::vector<double> row_mean(d, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) row_mean[i] += c(i, j);
    total += row_mean[i];
    row_mean[i] *= inv_d;
  }
  const double grand = total * inv_d * inv_d;
  SymmetricMatrix out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) out.set(i, j, c(i, j) - row_mean[i] - row_mean[j] + grand);
  return out;
}

std::size_t hd_dim(std::size_t d) noexcept { return d * (d + 1) / 2; }

std::vector<double> to_coords(const SymmetricMatrix& m) {
  std::vector<double> x;
  x.reserve(hd_dim(m.dim()));
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j) x.push_back(m(i, j));
  return x;
}

SymmetricMatrix from_coords(std::size_t d, std::span<const double> coords) {
  if (coords.size() != hd_dim(d)) throw Error(ErrorCode::shape_mismatch, "H_d coordinate length");
  SymmetricMatrix m(d);
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m.set(i, j, coords[k++]);
  return m;
}

}  // namespace drgcn::num
