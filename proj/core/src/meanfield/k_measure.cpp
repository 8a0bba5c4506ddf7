#include "drgcn/meanfield/k_measure.hpp"

#include <cmath>
#include <vector>

#include "drgcn/error.hpp"

namespace drgcn::mf {
namespace {

double k_from_parts(double g_s, double g_1, double trace, double sum_s2, std::size_t d) {
  // g_1 = <C, G> vanishes exactly on span{1 1^T}; compare against the trace
  // so the test is scale free.
  if (!(std::abs(g_1) > 1e-12 * std::abs(trace)) || !(sum_s2 > 0.0)) {
    throw Error(ErrorCode::degenerate_covariance, "K denominator vanishes");
  }
  return (g_s / g_1) / (sum_s2 / static_cast<double>(d));
}

}  // namespace

double g_inner(const num::SymmetricMatrix& c, std::span<const double> s) {
  const std::size_t d = c.dim();
  if (s.size() != d) throw Error(ErrorCode::shape_mismatch, "scaling vector length");
  double diag = 0.0, all = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    diag += c(i, i) * s[i] * s[i];
    for (std::size_t j = 0; j < d; ++j) all += c(i, j) * s[i] * s[j];
  }
  return diag - all / static_cast<double>(d);
}

double k_measure(const num::SymmetricMatrix& c, std::span<const double> s) {
  const std::size_t d = c.dim();
  const std::vector<double> ones(d, 1.0);
  double sum_s2 = 0.0;
  for (double x : s) sum_s2 += x * x;
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += c(i, i);
  return k_from_parts(g_inner(c, s), g_inner(c, ones), trace, sum_s2, d);
}

double k_measure_from_samples(const num::DenseMatrix& x, std::span<const double> s) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (s.size() != d) throw Error(ErrorCode::shape_mismatch, "scaling vector length");
  if (n == 0) throw Error(ErrorCode::degenerate_covariance, "no samples");
  std::vector<double> mean(d, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t k = 0; k < d; ++k) mean[k] += x(v, k);
  for (double& m : mean) m /= static_cast<double>(n);

  // sum_ij c_ij a_i a_j = mean over rows of ((x_v - mu) . a)^2
  double diag_s = 0.0, diag_1 = 0.0, quad_s = 0.0, quad_1 = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    double dot_s = 0.0, dot_1 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double c = x(v, k) - mean[k];
      diag_s += c * c * s[k] * s[k];
      diag_1 += c * c;
      dot_s += c * s[k];
      dot_1 += c;
    }
    quad_s += dot_s * dot_s;
    quad_1 += dot_1 * dot_1;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_d = 1.0 / static_cast<double>(d);
  double sum_s2 = 0.0;
  for (double a : s) sum_s2 += a * a;
  return k_from_parts((diag_s - inv_d * quad_s) * inv_n, (diag_1 - inv_d * quad_1) * inv_n,
                      diag_1 * inv_n, sum_s2, d);
}

num::SymmetricMatrix empirical_covariance(const num::DenseMatrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t k = 0; k < d; ++k) mean[k] += x(v, k);
  for (double& m : mean) m /= static_cast<double>(n);
  num::SymmetricMatrix c(d);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t i = 0; i < d; ++i) {
      const double a = x(v, i) - mean[i];
      for (std::size_t j = i; j < d; ++j) c.add(i, j, a * (x(v, j) - mean[j]) / static_cast<double>(n));
    }
  return c;
}

}  // namespace drgcn::mf
