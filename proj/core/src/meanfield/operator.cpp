#include "drgcn/meanfield/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "drgcn/error.hpp"
#include "drgcn/numkit/linalg.hpp"

namespace drgcn::mf {
namespace {

std::size_t coord_index(std::size_t d, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return i * d - i * (i - 1) / 2 + (j - i);
}

}  // namespace

num::SymmetricMatrix SymmetricOperator::apply(const num::SymmetricMatrix& c) const {
  if (c.dim() != d) throw Error(ErrorCode::shape_mismatch, "operator dim");
  const auto x = num::to_coords(c);
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t r = 0; r < y.size(); ++r)
    for (std::size_t k = 0; k < x.size(); ++k) y[r] += matrix(r, k) * x[k];
  return num::from_coords(d, y);
}

SymmetricOperator SymmetricOperator::identity(std::size_t d) {
  return {d, num::DenseMatrix::identity(num::hd_dim(d))};
}

double operator_frobenius_norm(const SymmetricOperator& op) {
  // Output entry (i,j), i != j, appears twice in the matrix norm; input basis
  // E_ij + E_ji has norm sqrt 2.
  const std::size_t d = op.d;
  std::vector<double> w;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) w.push_back(i == j ? 1.0 : 2.0);
  double acc = 0.0;
  for (std::size_t r = 0; r < w.size(); ++r)
    for (std::size_t k = 0; k < w.size(); ++k) acc += w[r] / w[k] * op.matrix(r, k) * op.matrix(r, k);
  return std::sqrt(acc);
}

SymmetricOperator jacobian_fd(const CovMap& map, const num::SymmetricMatrix& at, double h, bool richardson) {
  if (!(h >= 1e-6 && h <= 1e-4)) throw Error(ErrorCode::invalid_input, "finite-difference step outside [1e-6, 1e-4]");
  const std::size_t d = at.dim();
  const std::size_t n = num::hd_dim(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      const double h_eff = richardson ? 0.5 * h : h;
      if (at(i, j) + h_eff == at(i, j))
        throw Error(ErrorCode::step_underflow, "step " + std::to_string(h) + " lost against entry (" +
                                                   std::to_string(i) + "," + std::to_string(j) + ")");
    }

  auto central = [&](std::size_t i, std::size_t j, double step) {
    num::SymmetricMatrix plus = at, minus = at;
    plus.add(i, j, step);
    minus.add(i, j, -step);
    auto diff = num::to_coords(map(plus));
    const auto lo = num::to_coords(map(minus));
    for (std::size_t r = 0; r < diff.size(); ++r) diff[r] = (diff[r] - lo[r]) / (2.0 * step);
    return diff;
  };

  SymmetricOperator op{d, num::DenseMatrix(n, n)};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      const std::size_t k = coord_index(d, i, j);
      auto col = central(i, j, h);
      if (richardson) {
        const auto half = central(i, j, 0.5 * h);
        for (std::size_t r = 0; r < n; ++r) col[r] = (4.0 * half[r] - col[r]) / 3.0;
      }
      for (std::size_t r = 0; r < n; ++r) op.matrix(r, k) = col[r];
    }
  return op;
}

double linearity_residual(const CovMap& map, const num::SymmetricMatrix& at, const SymmetricOperator& op,
                          num::RngStream& rng, std::size_t trials, double h) {
  const std::size_t d = at.dim();
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    num::SymmetricMatrix x(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) x.set(i, j, rng.normal());
    x *= 1.0 / num::frobenius_norm(x);
    const auto fd = (1.0 / (2.0 * h)) * (map(at + h * x) - map(at - h * x));
    const auto lin = op.apply(x);
    const double scale = std::max({num::frobenius_norm(lin), num::frobenius_norm(fd), 1e-300});
    worst = std::max(worst, num::frobenius_norm(fd - lin) / scale);
  }
  return worst;
}

num::SymmetricMatrix dos_apply(const DosOperator& op, const num::SymmetricMatrix& c) {
  if (c.dim() != op.d) throw Error(ErrorCode::shape_mismatch, "DOS dim");
  num::SymmetricMatrix out(op.d);
  for (std::size_t i = 0; i < op.d; ++i) {
    out.set(i, i, op.u * c(i, i));
    for (std::size_t j = i + 1; j < op.d; ++j) out.set(i, j, op.v * c(i, i) + op.v * c(j, j) + op.w * c(i, j));
  }
  return out;
}

SymmetricOperator dos_matrix(const DosOperator& op) {
  const std::size_t n = num::hd_dim(op.d);
  SymmetricOperator out{op.d, num::DenseMatrix(n, n)};
  for (std::size_t i = 0; i < op.d; ++i)
    for (std::size_t j = i; j < op.d; ++j) {
      const auto col = num::to_coords(dos_apply(op, num::SymmetricMatrix::basis(op.d, i, j)));
      for (std::size_t r = 0; r < n; ++r) out.matrix(r, coord_index(op.d, i, j)) = col[r];
    }
  return out;
}

num::SymmetricMatrix dos_l_vector(const DosOperator& op, std::size_t i) {
  num::SymmetricMatrix l(op.d);
  for (std::size_t j = 0; j < op.d; ++j) l.set(i, j, i == j ? op.w - op.u : -op.v);
  return l;
}

DosEigenReport dos_eigencheck(const DosOperator& op) {
  if (op.w == op.u) throw Error(ErrorCode::degenerate_operator, "DOS eigencheck needs w != u");
  const std::size_t d = op.d;
  DosEigenReport rep;
  std::vector<std::vector<double>> vecs;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const auto m = num::SymmetricMatrix::basis(d, i, j);
      const auto gap = dos_apply(op, m) - op.w * m;
      for (double x : gap.data()) rep.m_residual = std::max(rep.m_residual, std::abs(x));
      vecs.push_back(num::to_coords(m));
      ++rep.m_count;
    }
  for (std::size_t i = 0; i < d; ++i) {
    const auto l = dos_l_vector(op, i);
    const auto gap = dos_apply(op, l) - op.u * l;
    for (double x : gap.data()) rep.l_residual = std::max(rep.l_residual, std::abs(x));
    vecs.push_back(num::to_coords(l));
    ++rep.l_count;
  }
  // rank through Gram matrix eigenvalues
  num::SymmetricMatrix gram(vecs.size());
  double big = 0.0;
  for (std::size_t a = 0; a < vecs.size(); ++a)
    for (std::size_t b = a; b < vecs.size(); ++b) {
      double acc = 0.0;
      for (std::size_t k = 0; k < vecs[a].size(); ++k) acc += vecs[a][k] * vecs[b][k];
      gram.set(a, b, acc);
      big = std::max(big, std::abs(acc));
    }
  for (double x : num::sym_eigen(gram).values)
    if (x > 1e-10 * big) ++rep.rank;
  const double scale = std::max({std::abs(op.u), std::abs(op.v), std::abs(op.w), 1.0}) *
                       std::max({std::abs(op.w - op.u), std::abs(op.v), 1.0});
  const double tol = 8.0 * std::numeric_limits<double>::epsilon() * scale;
  rep.ok = rep.m_residual <= tol && rep.l_residual <= tol && rep.rank == num::hd_dim(d);
  return rep;
}

DosFit dos_fit(const SymmetricOperator& op) {
  const std::size_t d = op.d;
  DosOperator f{0.0, 0.0, 0.0, d};
  std::size_t nv = 0, nw = 0;
  for (std::size_t i = 0; i < d; ++i) {
    f.u += op.matrix(coord_index(d, i, i), coord_index(d, i, i));
    for (std::size_t j = i + 1; j < d; ++j) {
      const std::size_t r = coord_index(d, i, j);
      f.v += op.matrix(r, coord_index(d, i, i)) + op.matrix(r, coord_index(d, j, j));
      f.w += op.matrix(r, r);
      nv += 2;
      ++nw;
    }
  }
  f.u /= static_cast<double>(d);
  if (nv > 0) f.v /= static_cast<double>(nv);
  if (nw > 0) f.w /= static_cast<double>(nw);
  const auto ref = dos_matrix(f);
  return {f, max_abs_diff(ref.matrix, op.matrix)};
}

}  // namespace drgcn::mf
