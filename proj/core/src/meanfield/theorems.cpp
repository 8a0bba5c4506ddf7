#include "drgcn/meanfield/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "drgcn/error.hpp"
#include "drgcn/meanfield/subspaces.hpp"
#include "drgcn/meanfield/vphi.hpp"

namespace drgcn::mf {
namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Piece {
  double lambda = 0.0;
  double residual = 0.0;
};

Piece read_piece(const SymmetricOperator& j, Subspace which, std::size_t d) {
  const auto basis = subspace_basis(which, d);
  Piece p;
  if (basis.empty()) return p;
  std::vector<num::SymmetricMatrix> images;
  for (const auto& b : basis) {
    images.push_back(num::center_project(j.apply(b)));
    p.lambda += num::inner(b, images.back());
  }
  p.lambda /= static_cast<double>(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    p.residual = std::max(p.residual, num::frobenius_norm(images[k] - p.lambda * basis[k]));
  return p;
}

MeanFieldConfig unscaled(const MeanFieldConfig& cfg) {
  MeanFieldConfig c = cfg;
  c.s.assign(cfg.d, 1.0);
  return c;
}

}  // namespace

num::SymmetricMatrix random_wishart(std::size_t d, std::size_t dof, num::RngStream& rng) {
  num::DenseMatrix a(d, dof);
  for (double& x : a.data()) x = rng.normal();
  num::SymmetricMatrix c(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < dof; ++k) acc += a(i, k) * a(j, k);
      c.set(i, j, acc);
    }
  return c;
}

SpectralReport theorem3_verify(const MeanFieldConfig& cfg, const Bsb1Point& point, const SpectralOptions& opt) {
  cfg.validate();
  if (!cfg.normalized) throw Error(ErrorCode::invalid_input, "spectral check concerns the normalized map");
  const std::size_t d = cfg.d;
  SpectralReport r;
  r.d = d;
  r.sigma_b2 = cfg.sigma_b2;
  r.q = point.q;
  r.c = point.c;
  const auto at = bsb1_matrix(d, point.q, point.c);
  const auto j = jacobian_fd([&](const num::SymmetricMatrix& x) { return cov_map_step(cfg, x); }, at, opt.h,
                             opt.richardson);

  r.dim_v0 = subspace_dim(Subspace::v0, d);
  r.dim_g = subspace_dim(Subspace::g, d);
  r.dim_l = subspace_dim(Subspace::l, d);
  r.dim_m = subspace_dim(Subspace::m, d);
  for (const auto& b : subspace_basis(Subspace::v0, d))
    r.residual_v0 = std::max(r.residual_v0, num::frobenius_norm(j.apply(b)));
  const auto g = read_piece(j, Subspace::g, d);
  const auto l = read_piece(j, Subspace::l, d);
  const auto m = read_piece(j, Subspace::m, d);
  r.lambda_g = g.lambda;
  r.residual_g = g.residual;
  r.lambda_l = l.lambda;
  r.residual_l = l.residual;
  r.lambda_m = m.lambda;
  r.residual_m = m.residual;

  r.v0_ok = r.residual_v0 <= opt.v0_tol;
  r.g_expanding = r.lambda_g > 1.0;
  r.l_contracting = r.dim_l == 0 || std::abs(r.lambda_l) < 1.0;
  r.m_contracting = r.dim_m == 0 || std::abs(r.lambda_m) < 1.0;
  r.invariance_ok = r.residual_g < opt.residual_tol && r.residual_l < opt.residual_tol &&
                    r.residual_m < opt.residual_tol;
  if (!r.v0_ok) r.failures.push_back("V_0 image " + fmt(r.residual_v0) + " above " + fmt(opt.v0_tol));
  if (!r.g_expanding) r.failures.push_back("lambda_G = " + fmt(r.lambda_g) + " is not > 1");
  if (!r.l_contracting) r.failures.push_back("|lambda_L| = " + fmt(std::abs(r.lambda_l)) + " is not < 1");
  if (!r.m_contracting) r.failures.push_back("|lambda_M| = " + fmt(std::abs(r.lambda_m)) + " is not < 1");
  if (!r.invariance_ok)
    r.failures.push_back("invariance residuals G/L/M = " + fmt(r.residual_g) + "/" + fmt(r.residual_l) + "/" +
                         fmt(r.residual_m) + " above " + fmt(opt.residual_tol));
  return r;
}

double jacobian_norm_at(const MeanFieldConfig& cfg, const num::SymmetricMatrix& x, double h) {
  const MeanFieldConfig plain = unscaled(cfg);
  return operator_frobenius_norm(
      jacobian_fd([&](const num::SymmetricMatrix& y) { return cov_map_step(plain, y); }, x, h));
}

Theorem1Result theorem1_search(const num::SymmetricMatrix& c, const MeanFieldConfig& cfg,
                               const Theorem1Options& opt) {
  cfg.validate();
  const std::size_t d = cfg.d;
  if (c.dim() != d) throw Error(ErrorCode::shape_mismatch, "covariance dim != d");
  auto objective = [&](const std::vector<double>& s) {
    return jacobian_norm_at(cfg, num::reweighted_covariance(c, s), opt.h);
  };
  auto renormalize = [&](std::vector<double>& s) {
    double ss = 0.0;
    for (double& x : s) {
      x = std::max(x, 1e-6);
      ss += x * x;
    }
    const double k = std::sqrt(static_cast<double>(d) / ss);
    for (double& x : s) x *= k;
  };

  Theorem1Result res;
  res.s.assign(d, 1.0);
  res.initial_norm = objective(res.s);
  double f = res.initial_norm;
  double eta = 0.1;
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    res.iterations = it;
    std::vector<double> grad(d);
    for (std::size_t k = 0; k < d; ++k) {
      auto plus = res.s, minus = res.s;
      plus[k] += opt.grad_step;
      minus[k] -= opt.grad_step;
      grad[k] = (objective(plus) - objective(minus)) / (2.0 * opt.grad_step);
    }
    // drop the radial part: the objective is scale free in s
    const double radial = std::inner_product(grad.begin(), grad.end(), res.s.begin(), 0.0) / static_cast<double>(d);
    double gnorm = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      grad[k] -= radial * res.s[k];
      gnorm += grad[k] * grad[k];
    }
    gnorm = std::sqrt(gnorm);
    if (gnorm <= opt.stationary_tol * std::max(1.0, f)) break;

    bool moved = false;
    for (; eta > 1e-12; eta *= 0.5) {
      auto trial = res.s;
      for (std::size_t k = 0; k < d; ++k) trial[k] -= eta * grad[k] / gnorm;
      renormalize(trial);
      const double ft = objective(trial);
      if (ft < f) {
        res.s = std::move(trial);
        f = ft;
        moved = true;
        eta *= 2.0;
        break;
      }
    }
    if (!moved) {
      res.stalled = true;
      break;
    }
  }
  res.final_norm = f;
  res.ratio = f / res.initial_norm;
  return res;
}

double initial_g_ratio(const num::SymmetricMatrix& c, std::span<const double> s) {
  const auto g = num::SymmetricMatrix::centering(c.dim());
  return num::inner(num::reweighted_covariance(c, s), g) / num::inner(c, g);
}

double g_component(const num::SymmetricMatrix& x) {
  const auto g = num::SymmetricMatrix::centering(x.dim());
  return num::inner(x, g) / num::frobenius_norm(g);
}

GrowthTrace theorem2_growth(const MeanFieldConfig& cfg, const Bsb1Point& point, const num::SymmetricMatrix& deviation,
                            double eps, std::size_t steps, double linear_limit) {
  cfg.validate();
  if (deviation.dim() != cfg.d) throw Error(ErrorCode::shape_mismatch, "deviation dim != d");
  const double dn = num::frobenius_norm(deviation);
  if (!(dn > 0.0) || !(eps > 0.0)) throw Error(ErrorCode::invalid_input, "deviation and eps must be nonzero");
  const auto star = bsb1_matrix(cfg.d, point.q, point.c);
  auto cur = star + (eps / dn) * deviation;
  GrowthTrace tr;
  for (std::size_t t = 0; t <= steps; ++t) {
    const auto dev = cur - star;
    const double total = num::frobenius_norm(dev);
    if (total > linear_limit * point.q) {
      tr.truncated = true;
      break;
    }
    tr.rows.push_back({t, g_component(dev), total});
    if (t == steps) break;
    cur = cov_map_step(cfg, cur);
  }
  for (std::size_t t = 1; t < tr.rows.size(); ++t)
    tr.per_step.push_back(tr.rows[t - 1].g_component != 0.0 ? tr.rows[t].g_component / tr.rows[t - 1].g_component
                                                            : 0.0);
  if (!tr.per_step.empty()) tr.growth = tr.per_step.front();
  return tr;
}

}  // namespace drgcn::mf
