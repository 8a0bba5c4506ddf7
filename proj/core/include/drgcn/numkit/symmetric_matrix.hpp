#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "drgcn/numkit/dense_matrix.hpp"

namespace drgcn::num {

/// Element of H_d. Writes go to both (i,j) and (j,i), so the stored matrix is
/// always exactly symmetric.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t dim = 1);

  /// Symmetrizes `m` as (m + m^T)/2; throws if the asymmetry exceeds `tol`.
  static SymmetricMatrix from_dense(const DenseMatrix& m, double tol = 1e-12);
  static SymmetricMatrix identity(std::size_t dim);
  /// 1 1^T
  static SymmetricMatrix ones(std::size_t dim);
  /// G = I - (1/d) 1 1^T
  static SymmetricMatrix centering(std::size_t dim);
  /// E_ii for i == j, E_ij + E_ji otherwise.
  static SymmetricMatrix basis(std::size_t dim, std::size_t i, std::size_t j);

  std::size_t dim() const noexcept { return dim_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double value) noexcept {
    data_[i * dim_ + j] = value;
    data_[j * dim_ + i] = value;
  }
  void add(std::size_t i, std::size_t j, double value) noexcept {
    data_[i * dim_ + j] += value;
    if (i != j) data_[j * dim_ + i] += value;
  }

  std::span<const double> data() const noexcept { return data_; }
  DenseMatrix to_dense() const;
  bool all_finite() const noexcept;

  SymmetricMatrix& operator+=(const SymmetricMatrix& o);
  SymmetricMatrix& operator-=(const SymmetricMatrix& o);
  SymmetricMatrix& operator*=(double a);

  friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
  friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) { return a -= b; }
  friend SymmetricMatrix operator*(double s, SymmetricMatrix a) { return a *= s; }
  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

/// Frobenius inner product <a, b> = tr(a b).
double inner(const SymmetricMatrix& a, const SymmetricMatrix& b);
double frobenius_norm(const SymmetricMatrix& m);

/// S C S with S = diag(s).
SymmetricMatrix reweighted_covariance(const SymmetricMatrix& c, std::span<const double> s);
/// G C G.
SymmetricMatrix center_project(const SymmetricMatrix& c);

/// Coordinates on the d(d+1)/2-dimensional space H_d: the (i,j), i <= j entries
/// in row-major upper-triangle order, matching the basis E_ii, E_ij + E_ji.
std::size_t hd_dim(std::size_t d) noexcept;
std::vector<double> to_coords(const SymmetricMatrix& m);
SymmetricMatrix from_coords(std::size_t d, std::span<const double> coords);

}  // namespace drgcn::num
