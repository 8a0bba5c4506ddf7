#include "drgcn/meanfield/vphi.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "drgcn/error.hpp"
#include "drgcn/numkit/linalg.hpp"

namespace drgcn::mf {
namespace {

constexpr double kPi = std::numbers::pi;

void check_input(const MeanFieldConfig& cfg, const num::SymmetricMatrix& c) {
  cfg.validate();
  if (c.dim() != cfg.d) throw Error(ErrorCode::shape_mismatch, "covariance dim != d");
  if (!c.all_finite()) throw Error(ErrorCode::invalid_covariance, "non-finite covariance");
}

}  // namespace

num::SymmetricMatrix relu_kernel(const num::SymmetricMatrix& c) {
  const std::size_t d = c.dim();
  num::SymmetricMatrix v(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double cii = c(i, i);
    if (!(cii > 0.0)) continue;
    v.set(i, i, 0.5 * cii);
    for (std::size_t j = i + 1; j < d; ++j) {
      const double cjj = c(j, j);
      if (!(cjj > 0.0)) continue;
      const double norm = std::sqrt(cii * cjj);
      const double rho = std::clamp(c(i, j) / norm, -1.0, 1.0);
      v.set(i, j, norm / (2.0 * kPi) * (std::sqrt(1.0 - rho * rho) + (kPi - std::acos(rho)) * rho));
    }
  }
  return v;
}

num::SymmetricMatrix v_phi_closed(const MeanFieldConfig& cfg, const num::SymmetricMatrix& c) {
  check_input(cfg, c);
  return relu_kernel(num::reweighted_covariance(c, cfg.s));
}

num::SymmetricMatrix v_dphi_quadrature(const MeanFieldConfig& cfg, const num::SymmetricMatrix& c) {
  check_input(cfg, c);
  const std::size_t d = cfg.d;
  const auto eig = num::sym_eigen(num::center_project(num::reweighted_covariance(c, cfg.s)));
  const double lmax = std::max(eig.values.back(), 0.0);
  if (!(lmax > 0.0)) throw Error(ErrorCode::degenerate_covariance, "G S C S G vanishes");
  if (eig.values.front() < -1e-10 * lmax) throw Error(ErrorCode::invalid_covariance, "covariance is not PSD");
  std::vector<double> lam(d);
  std::size_t rank = 0;
  double lmin = lmax;
  for (std::size_t k = 0; k < d; ++k) {
    lam[k] = std::max(eig.values[k], 0.0);
    if (lam[k] > 1e-12 * lmax) {
      ++rank;
      lmin = std::min(lmin, lam[k]);
    }
  }

  // t = exp(u). The integrand behaves like t for t << 1/lmax and like
  // t^{-rank/2} beyond 1/lmin (in the measure du), so the window below drops
  // less than exp(-45) at both ends. The trapezoid rule in u converges
  // geometrically for this analytic, exponentially decaying integrand.
  const double u_lo = -45.0 - std::log(lmax);
  const double u_hi = 90.0 / static_cast<double>(rank) - std::log(lmin);
  const double step = 0.1;
  const auto nodes = static_cast<std::size_t>(std::ceil((u_hi - u_lo) / step));

  const auto& vec = eig.vectors;
  std::vector<double> acc(d * d, 0.0);
  std::vector<double> lt(d);
  num::SymmetricMatrix sig(d);
  for (std::size_t q = 0; q <= nodes; ++q) {
    const double t = std::exp(u_lo + step * static_cast<double>(q));
    double log_det = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      log_det += std::log1p(2.0 * t * lam[k]);
      lt[k] = lam[k] / (1.0 + 2.0 * t * lam[k]);
    }
    const double weight = t * std::exp(-0.5 * log_det) * ((q == 0 || q == nodes) ? 0.5 : 1.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        double x = 0.0;
        for (std::size_t k = 0; k < d; ++k) x += vec(i, k) * lt[k] * vec(j, k);
        sig.set(i, j, x);
      }
    const auto kern = relu_kernel(sig);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) acc[i * d + j] += weight * kern(i, j);
  }
  num::SymmetricMatrix out(d);
  const double scale = step * static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) out.set(i, j, scale * acc[i * d + j]);
  return out;
}

VphiEstimate v_phi_mc(const MeanFieldConfig& cfg, const num::SymmetricMatrix& c, std::size_t n_samples,
                      const num::RngStream& rng, std::size_t threads) {
  check_input(cfg, c);
  if (n_samples < 10000) throw Error(ErrorCode::invalid_input, "need at least 1e4 samples");
  const std::size_t d = cfg.d;
  const std::size_t pairs = num::hd_dim(d);
  // psd_sqrt rejects indefinite input.
  const num::SymmetricMatrix root = num::psd_sqrt(num::reweighted_covariance(c, cfg.s));
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  constexpr std::size_t kChunk = 1 << 15;
  const std::size_t chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> sum(chunks), sum_sq(chunks);

  auto run_chunk = [&](std::size_t ch) {
    num::RngStream r = rng.substream(ch);
    const std::size_t count = std::min(kChunk, n_samples - ch * kChunk);
    std::vector<double> z(d), y(d), f(d);
    std::vector<double> s1(pairs, 0.0), s2(pairs, 0.0);
    for (std::size_t n = 0; n < count; ++n) {
      for (double& x : z) x = r.normal();
      for (std::size_t i = 0; i < d; ++i) {
        double a = 0.0;
        for (std::size_t k = 0; k < d; ++k) a += root(i, k) * z[k];
        y[i] = a;
      }
      if (cfg.normalized) {
        double mean = 0.0;
        for (double x : y) mean += x;
        mean /= static_cast<double>(d);
        double nrm = 0.0;
        for (double& x : y) {
          x -= mean;
          nrm += x * x;
        }
        nrm = std::sqrt(nrm);
        const double scale = nrm > 0.0 ? sqrt_d / nrm : 0.0;
        for (double& x : y) x *= scale;
      }
      for (std::size_t i = 0; i < d; ++i) f[i] = std::max(y[i], 0.0);
      std::size_t p = 0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j, ++p) {
          const double x = f[i] * f[j];
          s1[p] += x;
          s2[p] += x * x;
        }
    }
    sum[ch] = std::move(s1);
    sum_sq[ch] = std::move(s2);
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, chunks);
  if (workers == 1) {
    for (std::size_t ch = 0; ch < chunks; ++ch) run_chunk(ch);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t ch = next++; ch < chunks; ch = next++) run_chunk(ch);
      });
  }

  std::vector<double> s1(pairs, 0.0), s2(pairs, 0.0);
  for (std::size_t ch = 0; ch < chunks; ++ch)
    for (std::size_t p = 0; p < pairs; ++p) {
      s1[p] += sum[ch][p];
      s2[p] += sum_sq[ch][p];
    }
  const auto n = static_cast<double>(n_samples);
  VphiEstimate est{num::SymmetricMatrix(d), num::SymmetricMatrix(d), n_samples};
  std::size_t p = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j, ++p) {
      const double mean = s1[p] / n;
      const double var = std::max(0.0, (s2[p] - n * mean * mean) / (n - 1.0));
      est.mean.set(i, j, mean);
      est.stderr_.set(i, j, std::sqrt(var / n));
    }
  return est;
}

num::SymmetricMatrix cov_map_step(const MeanFieldConfig& cfg, const num::SymmetricMatrix& c) {
  num::SymmetricMatrix out = cfg.normalized ? v_dphi_quadrature(cfg, c) : v_phi_closed(cfg, c);
  for (std::size_t i = 0; i < cfg.d; ++i) out.add(i, i, cfg.sigma_b2);
  return out;
}

}  // namespace drgcn::mf
